// Exit gate: one PASS/FAIL line per acceptance criterion.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

#include "gkz/mellin_barnes.hpp"
#include "gkz/verify.hpp"
#include "oracles/series_oracle.hpp"
#include "support.hpp"

using namespace gkz;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", x);
  return buf;
}

const cplx kTwoPiI(0.0, 2.0 * std::numbers::pi);

GkzSystem diamond_system() { return build_system(support::diamond_matrix(), support::rats({{1, 3}, {1, 2}})); }

Simplex diamond_simplex() { return make_simplex(support::diamond_matrix(), {0, 1}); }

double hankel_gamma_error(const ContourSpec& contour) {
  double worst = 0.0;
  for (const cplx alpha : {cplx(1.0 / 3.0), cplx(0.5, 0.2), cplx(-2.0 / 3.0)})
    worst = std::max(worst, support::rel_err(hankel_power_exp(alpha, contour), kTwoPiI * oracle::rgamma_d(1.0 - alpha)));
  return worst;
}

double exponential_error(const ContourSpec& contour) {
  double worst = 0.0;
  for (const cplx z : {cplx(1.0), cplx(2.0, 1.0), cplx(0.5)})
    worst = std::max(worst, support::rel_err(hankel_exp(z, contour), std::exp(z)));
  return worst;
}

// Direct oracle sum over all classes at the diamond point.
cplx diamond_oracle_sum() {
  const oracle::Problem p{support::to_oracle(support::diamond_matrix()), {1.0 / 3.0, 0.5}, {0, 1}};
  const GammaSeriesBasis basis(diamond_system(), diamond_simplex());
  cplx s = 0.0;
  for (const auto& k : basis.representatives()) s += oracle::gamma_series(p, k, support::diamond_point(), 60);
  return s;
}

double diamond_error(const ContourSpec& contour, const cplx& reference) {
  const MbSpec spec{diamond_system(), diamond_simplex(), {}, contour, 1e-12};
  return support::rel_err(mb_eval(spec, support::diamond_point()).value, reference);
}

cplx library_series_sum() {
  const GammaSeriesBasis basis(diamond_system(), diamond_simplex());
  cplx s = 0.0;
  for (const auto& v : basis.evaluate(support::diamond_point())) s += v.value;
  return s;
}

Outcome hankel_gamma() {
  const auto t0 = Clock::now();
  const double err = hankel_gamma_error({});
  const double secs = seconds_since(t0);
  return {err < 1e-8 && secs < 1.0, "max rel err " + fmt(err) + ", " + fmt(secs) + " s"};
}

Outcome exponential() {
  const double err = exponential_error({});
  return {err < 1e-8, "max rel err " + fmt(err)};
}

Outcome diamond_equivalence() {
  const cplx series = library_series_sum();
  const double oracle_gap = support::rel_err(series, diamond_oracle_sum());
  const auto t0 = Clock::now();
  const double err = diamond_error({}, series);
  const double secs = seconds_since(t0);
  return {err < 1e-6 && secs < 60.0 && oracle_gap < 1e-10,
          "rel err " + fmt(err) + " (series vs oracle " + fmt(oracle_gap) + "), " + fmt(secs) + " s"};
}

Outcome basis_relation() {
  const auto rep = basis_relation_check(diamond_system(), diamond_simplex(), support::diamond_point());
  const double recovered = rep.recovered_max_err.value_or(1.0);
  return {rep.F.size() == 12 && rep.max_rel_err < 1e-6 && recovered < 1e-5,
          "r " + std::to_string(rep.F.size()) + ", relation err " + fmt(rep.max_rel_err) + ", recovered T err " +
              fmt(recovered)};
}

double orthogonality_defect(const CharacterMatrix& T) {
  double worst = 0.0;
  for (std::size_t i = 0; i < T.r; ++i)
    for (std::size_t j = 0; j < T.r; ++j) {
      cplx s = 0.0;
      for (std::size_t k = 0; k < T.r; ++k) s += T.at(i, k) * std::conj(T.at(j, k));
      worst = std::max(worst, std::abs(s - (i == j ? cplx(static_cast<double>(T.r)) : cplx(0.0))));
    }
  return worst;
}

Outcome character_orthogonality() {
  const IntMatrix A = support::diamond_matrix();
  const std::vector<std::size_t> sigma{0, 1}, bar{2, 3};
  const IntMatrix As = A.select_columns(sigma);
  const QuotientGroup dual(As.transpose());
  const auto T = character_matrix(As, A.select_columns(bar), std::vector<cplx>{1.0 / 3.0, 0.5}, std::nullopt,
                                  dual.representatives(), sigmabar_representatives(A, sigma, 64));
  double worst = orthogonality_defect(T);
  bool sizes = T.r == 12;
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 1 + rng() % 3;
    const IntMatrix Ar = support::from_oracle(oracle::random_nonsingular(rng, n, 24));
    IntMatrix Af(n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) Af(i, j) = Ar(i, j);
      Af(i, n + i) = 1;
    }
    std::vector<std::size_t> s(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = i;
      b[i] = n + i;
    }
    const QuotientGroup d(Ar.transpose());
    const auto Tr = character_matrix(Ar, Af.select_columns(b), std::vector<cplx>(n, cplx(0.3, 0.1)), std::nullopt,
                                     d.representatives(), sigmabar_representatives(Af, s, 200));
    sizes = sizes && Tr.r == static_cast<std::size_t>(boost::multiprecision::abs(oracle::det(support::to_oracle(Ar))));
    worst = std::max(worst, orthogonality_defect(Tr));
  }
  return {sizes && worst < 1e-10, "max |chars chars^H - r I| " + fmt(worst)};
}

Outcome pde_residuals_check() {
  const GkzSystem sys = diamond_system();
  const Simplex sg = diamond_simplex();
  std::vector<IntVector> boxes;
  for (const auto& u : sys.kernel) {
    const auto [p, m] = split_kernel_vector(u);
    long a = 0, b = 0;
    for (long x : p) a += x;
    for (long x : m) b += x;
    if (a <= 6 && b <= 6) boxes.push_back(u);
  }
  const SeriesEvaluator series(std::make_shared<const GammaSeriesBasis>(sys, sg));
  const MbEvaluator mb(std::make_shared<const MbIntegral>(sys, sg), {{0, 0}}, MbOptions{false, Exec::Parallel});
  const std::vector<std::vector<cplx>> points{support::diamond_point(),
                                              {cplx(0.9, 0.2), cplx(1.1, -0.3), cplx(0.2, 0.1), cplx(-0.1, 0.2)},
                                              {cplx(1.3, -0.4), cplx(0.7, 0.5), cplx(-0.25, 0.05), cplx(0.15, -0.1)},
                                              {cplx(0.8, 0.0), cplx(1.0, 0.6), cplx(0.05, -0.3), cplx(0.3, 0.0)},
                                              {cplx(1.5, 0.5), cplx(0.6, -0.2), cplx(0.35, 0.2), cplx(-0.2, -0.2)}};
  double worst = 0.0;
  std::size_t count = 0;
  bool inside = true, ok = true;
  for (const auto& z : points) {
    inside = inside && in_convergence_domain(sg, sys.A, z).inside;
    for (const SolutionEvaluator* f : {static_cast<const SolutionEvaluator*>(&series),
                                       static_cast<const SolutionEvaluator*>(&mb)})
      for (const auto& r : pde_residuals(*f, sys, boxes, z)) {
        worst = std::max(worst, r.normalized());
        ok = ok && r.normalized() < 1e-7;
        ++count;
      }
  }
  return {ok && inside && !boxes.empty(), std::to_string(count) + " residuals, " + std::to_string(boxes.size()) +
                                              " box vectors, worst " + fmt(worst)};
}

Outcome partition() {
  const GammaSeriesBasis basis(diamond_system(), diamond_simplex());
  const auto t0 = Clock::now();
  const auto rep = partition_check(diamond_system(), diamond_simplex(), basis.representatives(), 12);
  const double secs = seconds_since(t0);
  // Independent class test: (m3 + 2 m4 mod 4, m3 + m4 mod 3) determines the class.
  bool oracle_ok = true;
  for (const auto& k : basis.representatives())
    for (const auto& l : basis.representatives())
      if (&k != &l) {
        const bool same = ((k[0] + 2 * k[1]) - (l[0] + 2 * l[1])) % 4 == 0 && ((k[0] + k[1]) - (l[0] + l[1])) % 3 == 0;
        oracle_ok = oracle_ok && !same;
      }
  return {rep.pass && oracle_ok && secs < 1.0,
          std::to_string(rep.checked) + " exponents, " + fmt(secs) + " s"};
}

Outcome pairing_nondegenerate() {
  std::mt19937_64 rng(8);
  std::size_t checked = 0;
  bool ok = true;
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 1 + rng() % 3;
    const oracle::Mat om = oracle::random_nonsingular(rng, n, 24);
    const IntMatrix As = support::from_oracle(om);
    const oracle::Problem p{om, std::vector<cplx>(n), [&] {
                              std::vector<std::size_t> s(n);
                              for (std::size_t i = 0; i < n; ++i) s[i] = i;
                              return s;
                            }()};
    const auto inv = oracle::sigma_inverse(p);
    const QuotientGroup left(As.transpose()), right(As);
    const auto order = boost::multiprecision::abs(oracle::det(om));
    ok = ok && left.order() == order && right.order() == order;
    for (const auto& v : left.representatives()) {
      bool zero = true;
      for (const auto& x : v) zero = zero && x == 0;
      if (zero) continue;
      bool nonzero = false;
      for (const auto& w : right.representatives()) {
        oracle::Rat q = 0;
        for (std::size_t a = 0; a < n; ++a)
          for (std::size_t b = 0; b < n; ++b) q += oracle::Rat(oracle::Int(v[a])) * inv[a][b] * oracle::Rat(oracle::Int(w[b]));
        const bool frac_nonzero = boost::multiprecision::denominator(q) != 1;
        ok = ok && frac_nonzero == (pairing(v, w, As) != 0);
        nonzero = nonzero || frac_nonzero;
      }
      ok = ok && nonzero;
      ++checked;
    }
  }
  return {ok, std::to_string(checked) + " nonzero classes checked"};
}

Outcome residue_sum() {
  const MbSpec spec{diamond_system(), diamond_simplex(), {}, {}, 1e-12};
  const auto r = residue_partial_sum(spec, support::diamond_point(), 20);
  const auto v = mb_eval(spec, support::diamond_point());
  const double gap = std::abs(r.partial - v.value);
  return {gap <= r.remainder_bound + v.error_estimate,
          "gap " + fmt(gap) + ", remainder bound " + fmt(r.remainder_bound) + ", mb error " + fmt(v.error_estimate)};
}

Outcome classical_2f1() {
  const double e1 = support::rel_err(barnes_2f1(0.5, 1.0 / 3.0, 0.25, 0.2).value,
                                     oracle::gauss_2f1(0.5, 1.0 / 3.0, 0.25, 0.2, 80));
  const double e2 = support::rel_err(barnes_2f1(1.0, 1.0, 2.0, 0.5).value, 2.0 * std::log(2.0));
  return {e1 < 1e-8 && e2 < 1e-8, "Gauss series err " + fmt(e1) + ", 2 log 2 err " + fmt(e2)};
}

Outcome volume_additivity() {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> jitter(1, 999);
  int good = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + rng() % 2, N = n + 1 + rng() % (5 - n);
    oracle::Mat om;
    while (true) {
      om = oracle::random_matrix(rng, n, N, -3, 3);
      const auto f = oracle::invariant_factors(om);
      if (std::all_of(f.begin(), f.end(), [](const oracle::Int& x) { return x == 1; })) break;
    }
    const IntMatrix A = support::from_oracle(om);
    RatVector w(N);
    for (auto& x : w) x = Rational(1) + Rational(jitter(rng), 1000000);
    BigInt total = 0;
    std::size_t count = 0;
    for (const auto& s : regular_triangulation(A, w).simplices) {
      total += boost::multiprecision::abs(s.det);
      count += sigmabar_representatives(A, s.indices, 400).size();
    }
    const long expected = oracle::newton_volume(om);
    if (total == expected && newton_volume(A) == expected && count == static_cast<std::size_t>(expected)) ++good;
  }
  return {good == 20, std::to_string(good) + "/20 matrices"};
}

Outcome contour_robustness() {
  ContourSpec half_eps;
  half_eps.epsilon = 0.25;
  ContourSpec doubled;
  doubled.nodes_per_panel = 2 * ContourSpec{}.nodes_per_panel;
  const cplx series = library_series_sum();
  double worst1 = 0.0, worst2 = 0.0, worst3 = 0.0;
  for (const auto& c : {half_eps, doubled}) {
    worst1 = std::max(worst1, hankel_gamma_error(c));
    worst2 = std::max(worst2, exponential_error(c));
    worst3 = std::max(worst3, diamond_error(c, series));
  }
  return {worst1 < 1e-7 && worst2 < 1e-7 && worst3 < 1e-5,
          "worst errs " + fmt(worst1) + ", " + fmt(worst2) + ", " + fmt(worst3)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"Hankel-Gamma identity", hankel_gamma},
      {"exponential identity", exponential},
      {"diamond equivalence", diamond_equivalence},
      {"basis relation", basis_relation},
      {"character orthogonality", character_orthogonality},
      {"PDE residuals", pde_residuals_check},
      {"class partition", partition},
      {"pairing non-degeneracy", pairing_nondegenerate},
      {"residue-sum consistency", residue_sum},
      {"classical 2F1 cross-check", classical_2f1},
      {"triangulation volume additivity", volume_additivity},
      {"contour robustness", contour_robustness},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << (i + 1) << ". " << criteria[i].first << ": " << o.detail
              << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
