#include "gkz/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>

#include "gkz/errors.hpp"

namespace gkz {

namespace {

constexpr long kMaxBoxOrder = 6;

std::vector<long> to_longs(const IntVector& v) {
  std::vector<long> out;
  for (const auto& x : v) out.push_back(static_cast<long>(to_ll(x)));
  return out;
}

std::string box_label(const IntVector& u) {
  std::ostringstream os;
  os << "box u=(";
  for (std::size_t i = 0; i < u.size(); ++i) os << (i ? "," : "") << u[i];
  os << ")";
  return os.str();
}

void check_box_vector(const GkzSystem& system, const IntVector& u) {
  if (u.size() != system.N()) throw Error(ErrorCode::InvalidArgument, "box vector must have N entries");
  if (std::all_of(u.begin(), u.end(), [](const BigInt& x) { return x == 0; }))
    throw Error(ErrorCode::InvalidArgument, "box vector must be nonzero");
  for (const auto& x : system.A * u)
    if (x != 0) throw Error(ErrorCode::InvalidArgument, box_label(u) + " is not in ker A");
  const auto [plus, minus] = split_kernel_vector(u);
  long p = 0, m = 0;
  for (long x : plus) p += x;
  for (long x : minus) m += x;
  if (p > kMaxBoxOrder || m > kMaxBoxOrder)
    throw Error(ErrorCode::OrderTooHigh, box_label(u) + " has order above " + std::to_string(kMaxBoxOrder));
}

std::vector<int> as_alpha(const std::vector<long>& v) { return {v.begin(), v.end()}; }

// Residual reports without validating box vectors (self-tests feed
// deliberately invalid ones).
std::vector<ResidualReport> residuals_unchecked(const SolutionEvaluator& f, const GkzSystem& system,
                                                std::span<const IntVector> boxes, bool euler,
                                                std::span<const cplx> z, const Thresholds& thresholds) {
  if (z.size() != system.N()) throw Error(ErrorCode::InvalidArgument, "z must have N entries");
  const std::size_t N = system.N(), n = system.n();
  std::vector<std::vector<int>> alphas;
  alphas.emplace_back(N, 0);
  if (euler)
    for (std::size_t j = 0; j < N; ++j) {
      std::vector<int> e(N, 0);
      e[j] = 1;
      alphas.push_back(std::move(e));
    }
  const std::size_t box_base = alphas.size();
  for (const auto& u : boxes) {
    const auto [plus, minus] = split_kernel_vector(u);
    alphas.push_back(as_alpha(plus));
    alphas.push_back(as_alpha(minus));
  }

  const std::size_t F = f.size();
  const std::vector<cplx> d = f.derivatives(z, alphas);
  const double thr = f.residual_threshold(thresholds);
  const std::vector<cplx> point(z.begin(), z.end());
  auto at = [&](std::size_t a, std::size_t fn) { return d[a * F + fn]; };

  std::vector<ResidualReport> out;
  auto push = [&](std::string op, std::size_t fn, cplx sum, double scale) {
    ResidualReport r;
    r.op = std::move(op);
    r.evaluator = f.label();
    r.function = fn;
    r.point = point;
    r.residual = std::abs(sum);
    r.scale = scale;
    r.threshold = thr;
    r.pass = std::isfinite(r.residual) && r.normalized() < thr;
    out.push_back(std::move(r));
  };

  for (std::size_t fn = 0; fn < F; ++fn) {
    if (euler)
      for (std::size_t i = 0; i < n; ++i) {
        KahanSum<cplx> sum;
        double scale = 0.0;
        for (std::size_t j = 0; j < N; ++j) {
          const cplx t = system.A(i, j).convert_to<double>() * z[j] * at(1 + j, fn);
          sum.add(t);
          scale = std::max(scale, std::abs(t));
        }
        const cplx t = system.c[i] * at(0, fn);
        sum.add(t);
        scale = std::max(scale, std::abs(t));
        push("E_" + std::to_string(i + 1), fn, sum.value(), scale);
      }
    for (std::size_t b = 0; b < boxes.size(); ++b) {
      const cplx p = at(box_base + 2 * b, fn), m = at(box_base + 2 * b + 1, fn);
      push(box_label(boxes[b]), fn, p - m, std::max(std::abs(p), std::abs(m)));
    }
  }
  return out;
}

double halton(std::size_t index, unsigned base) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * static_cast<double>(index % base);
    index /= base;
  }
  return r;
}

constexpr unsigned kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

double relation_error(const CharacterMatrix& T, std::span<const cplx> phi, std::span<const cplx> F,
                      std::vector<double>* rows) {
  double worst = 0.0;
  for (std::size_t i = 0; i < T.r; ++i) {
    KahanSum<cplx> sum;
    double denom = 0.0;
    for (std::size_t j = 0; j < T.r; ++j) {
      const cplx t = T.transform(i, j) * phi[j];
      sum.add(t);
      denom += std::abs(t);
    }
    const double err = std::abs(F[i] - sum.value()) / (denom > 0.0 ? denom : 1.0);
    if (rows) rows->push_back(err);
    worst = std::max(worst, std::isfinite(err) ? err : std::numeric_limits<double>::infinity());
  }
  return worst;
}

std::vector<cplx> values_of(const std::vector<SeriesValue>& v) {
  std::vector<cplx> out;
  for (const auto& x : v) out.push_back(x.value);
  return out;
}

std::vector<cplx> values_of(const std::vector<MbValue>& v) {
  std::vector<cplx> out;
  for (const auto& x : v) out.push_back(x.value);
  return out;
}

}  // namespace

SeriesEvaluator::SeriesEvaluator(std::shared_ptr<const GammaSeriesBasis> basis, Exec exec)
    : basis_(std::move(basis)), exec_(exec) {}

std::vector<cplx> SeriesEvaluator::derivatives(std::span<const cplx> z,
                                               std::span<const std::vector<int>> alphas) const {
  return values_of(basis_->evaluate(z, alphas, {}, exec_));
}

MbEvaluator::MbEvaluator(std::shared_ptr<const MbIntegral> integral, std::vector<std::vector<long>> k_tildes,
                         MbOptions options)
    : integral_(std::move(integral)), k_tildes_(std::move(k_tildes)), options_(options) {
  if (k_tildes_.empty()) k_tildes_.emplace_back(integral_->sigma().indices.size(), 0);
}

std::vector<cplx> MbEvaluator::derivatives(std::span<const cplx> z, std::span<const std::vector<int>> alphas) const {
  return values_of(integral_->evaluate(z, k_tildes_, alphas, options_));
}

std::vector<ResidualReport> euler_residual(const SolutionEvaluator& f, const GkzSystem& system,
                                           std::span<const cplx> z, const Thresholds& thresholds) {
  return residuals_unchecked(f, system, {}, true, z, thresholds);
}

std::vector<ResidualReport> box_residual(const SolutionEvaluator& f, const GkzSystem& system, const IntVector& u,
                                         std::span<const cplx> z, const Thresholds& thresholds) {
  check_box_vector(system, u);
  return residuals_unchecked(f, system, std::span<const IntVector>(&u, 1), false, z, thresholds);
}

std::vector<ResidualReport> pde_residuals(const SolutionEvaluator& f, const GkzSystem& system,
                                          std::span<const IntVector> box_vectors, std::span<const cplx> z,
                                          const Thresholds& thresholds) {
  for (const auto& u : box_vectors) check_box_vector(system, u);
  return residuals_unchecked(f, system, box_vectors, true, z, thresholds);
}

std::vector<std::vector<cplx>> relation_sample_points(const Simplex& sigma, const IntMatrix& A,
                                                      std::span<const cplx> z, std::size_t count) {
  const DomainReport dom = in_convergence_domain(sigma, A, z);
  if (!dom.sigma_nonzero) throw Error(ErrorCode::DomainError, "z_sigma has a zero entry");
  const std::size_t N = A.cols();
  if (N > std::size(kPrimes)) throw Error(ErrorCode::DimensionTooLarge, "too many columns for sample points");
  std::vector<double> radius(N);
  for (auto i : sigma.indices) radius[i] = std::abs(z[i]);
  for (std::size_t k = 0; k < sigma.complement.size(); ++k) {
    const std::size_t j = sigma.complement[k];
    // Larger moduli keep the leading monomials of distinct classes comparable.
    if (dom.automatic[k])
      radius[j] = std::max(std::abs(z[j]), 0.5);
    else
      radius[j] = std::abs(z[j]) > 0.0 ? std::abs(z[j]) : 0.25 * dom.rhs[k];
  }
  std::vector<std::vector<cplx>> pts;
  for (std::size_t p = 0; p < count; ++p) {
    std::vector<cplx> pt(N);
    for (std::size_t j = 0; j < N; ++j) {
      const double h = halton(p + 1, kPrimes[j]) - 0.5;
      const bool in_sigma = std::find(sigma.indices.begin(), sigma.indices.end(), j) != sigma.indices.end();
      const double arg = in_sigma ? h * std::numbers::pi : 1.8 * h * std::numbers::pi;
      pt[j] = std::polar(radius[j], arg);
    }
    pts.push_back(std::move(pt));
  }
  return pts;
}

BasisRelationReport basis_relation_check(const GkzSystem& system, const Simplex& sigma, std::span<const cplx> z,
                                         const Thresholds& thresholds, const BasisRelationOptions& options) {
  auto basis = std::make_shared<const GammaSeriesBasis>(system, sigma, options.truncation);
  const QuotientGroup rows(sigma.a_sigma.transpose());

  BasisRelationReport rep;
  rep.k_reps = basis->representatives();
  std::vector<IntVector> kb;
  for (const auto& k : rep.k_reps) kb.emplace_back(k.begin(), k.end());
  for (const auto& v : rows.representatives()) rep.k_tilde_reps.push_back(to_longs(v));
  rep.matrix_used = character_matrix(sigma.a_sigma, sigma.a_sigmabar, system.c, system.c_exact,
                                     rows.representatives(), kb);

  const MbIntegral mb(system, sigma, options.contour, options.tail_tol);
  const std::vector<std::vector<int>> value_only{std::vector<int>(system.N(), 0)};
  rep.phi = values_of(basis->evaluate(z, options.exec));
  rep.F = values_of(mb.evaluate(z, rep.k_tilde_reps, value_only, {true, options.exec}));
  rep.max_rel_err = relation_error(rep.matrix_used, rep.phi, rep.F, &rep.row_errors);
  rep.pass = rep.max_rel_err < thresholds.identity;
  if (!options.recover_matrix) return rep;

  const std::size_t r = rep.matrix_used.r;
  const auto pts = relation_sample_points(sigma, system.A, z, r);
  Eigen::MatrixXcd Phi(r, r), Fm(r, r);
  for (std::size_t p = 0; p < r; ++p) {
    const auto phi = values_of(basis->evaluate(pts[p], options.exec));
    const auto F = values_of(mb.evaluate(pts[p], rep.k_tilde_reps, value_only, {false, options.exec}));
    for (std::size_t j = 0; j < r; ++j) Phi(p, j) = phi[j];
    for (std::size_t i = 0; i < r; ++i) Fm(p, i) = F[i];
  }
  const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(Phi);
  const auto& sv = svd.singularValues();
  const double cond = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : std::numeric_limits<double>::infinity();
  rep.condition_number = cond;
  if (!(cond <= thresholds.condition_limit))
    throw Error(ErrorCode::IllConditioned,
                "sample matrix condition number " + std::to_string(cond) + " exceeds the limit");
  // Phi X = Fm gives X(j, i) = T(i, j).
  const Eigen::MatrixXcd X = Phi.partialPivLu().solve(Fm);
  double worst = 0.0, modulus = 0.0;
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j) {
      worst = std::max(worst, std::abs(X(j, i) - rep.matrix_used.transform(i, j)));
      modulus = std::max(modulus, std::abs(std::abs(X(j, i)) - std::abs(rep.matrix_used.diag[i])));
    }
  rep.recovered_max_err = worst;
  rep.recovered_modulus_err = modulus;
  rep.pass = rep.pass && worst < thresholds.recovered_matrix;
  return rep;
}

PartitionReport partition_check(const GkzSystem& system, const Simplex& sigma,
                                std::span<const std::vector<long>> reps, long bound) {
  if (sigma.a_sigma.rows() != system.n() || sigma.indices.size() + sigma.complement.size() != system.N())
    throw Error(ErrorCode::InvalidArgument, "simplex does not belong to the system");
  const QuotientGroup group(sigma.a_sigma);
  std::vector<std::vector<BigInt>> keys;
  for (const auto& k : reps) {
    if (k.size() != sigma.complement.size())
      throw Error(ErrorCode::InvalidArgument, "representative length must be N - n");
    keys.push_back(group.class_key(sigma.a_sigmabar * IntVector(k.begin(), k.end())));
  }
  PartitionReport rep;
  rep.bound = bound;
  rep.hits.assign(reps.size(), 0);
  const std::size_t d = sigma.complement.size();
  for (long deg = 0; deg <= bound; ++deg) {
    for_each_composition(deg, d, [&](std::span<const long> m) {
      ++rep.checked;
      const auto key = group.class_key(sigma.a_sigmabar * IntVector(m.begin(), m.end()));
      std::vector<std::size_t> match;
      for (std::size_t j = 0; j < keys.size(); ++j)
        if (keys[j] == key) match.push_back(j);
      if (match.size() == 1) ++rep.hits[match[0]];
      if (match.size() != 1 && rep.pass) {
        rep.pass = false;
        rep.counterexample = std::vector<long>(m.begin(), m.end());
        rep.matching = match;
      }
    });
    if (d == 0) break;
  }
  return rep;
}

std::vector<SelfTestResult> run_self_tests(const GkzSystem& system, const Simplex& sigma, std::span<const cplx> z,
                                           const Thresholds& thresholds, const BasisRelationOptions& options) {
  std::vector<SelfTestResult> out;
  auto worst_of = [](const std::vector<ResidualReport>& rs) {
    double w = 0.0;
    for (const auto& r : rs) w = std::max(w, r.normalized());
    return w;
  };

  {
    std::vector<cplx> c = system.c;
    for (auto& x : c) x += 0.01;
    const GkzSystem shifted = build_system(system.A, c);
    const SeriesEvaluator f(std::make_shared<const GammaSeriesBasis>(shifted, sigma, options.truncation),
                            options.exec);
    const auto rs = euler_residual(f, system, z, thresholds);
    const bool detected = std::any_of(rs.begin(), rs.end(), [](const auto& r) { return !r.pass; });
    out.push_back({"perturbed_c", detected, "worst Euler residual/scale " + std::to_string(worst_of(rs))});
  }

  auto basis = std::make_shared<const GammaSeriesBasis>(system, sigma, options.truncation);
  {
    auto reps = basis->representatives();
    if (reps.size() > 1) {
      reps.back() = reps.front();
    } else {
      reps.push_back(reps.front());
    }
    const auto pr = partition_check(system, sigma, reps, 12);
    out.push_back({"duplicated_representative", !pr.pass,
                   pr.pass ? "partition check passed" : "partition check found a counterexample"});
  }

  {
    std::vector<IntVector> boxes;
    for (const auto& u : system.kernel) {
      IntVector v = u;
      v[0] += 1;
      boxes.push_back(std::move(v));
      break;
    }
    const SeriesEvaluator f(basis, options.exec);
    const auto rs = residuals_unchecked(f, system, boxes, false, z, thresholds);
    const bool detected = std::any_of(rs.begin(), rs.end(), [](const auto& r) { return !r.pass; });
    out.push_back({"off_kernel_box", detected, "worst box residual/scale " + std::to_string(worst_of(rs))});
  }

  {
    BasisRelationOptions o = options;
    o.recover_matrix = false;
    const auto br = basis_relation_check(system, sigma, z, thresholds, o);
    CharacterMatrix bad = br.matrix_used;
    const bool trivial =
        std::all_of(bad.diag.begin(), bad.diag.end(), [](const cplx& d) { return d == cplx(1.0); });
    // Drop the parameter-dependent phases; rows with k~ != 0 then disagree.
    std::fill(bad.diag.begin(), bad.diag.end(), cplx(1.0));
    const double err = relation_error(bad, br.phi, br.F, nullptr);
    if (trivial)
      out.push_back({"dropped_character_phases", false, "every phase is already 1; nothing to drop", false});
    else
      out.push_back({"dropped_character_phases", err >= thresholds.identity,
                     "relation error with corrupted T " + std::to_string(err)});
  }
  return out;
}

}  // namespace gkz
