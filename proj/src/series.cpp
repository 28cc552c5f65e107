#include "gkz/series.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace gkz {

namespace {

constexpr double kMaxShellRatio = 0.9;
constexpr int kMaxDerivativeOrder = 6;

bool on_branch_cut(cplx z) { return z.imag() == 0.0 && z.real() <= 0.0; }

// [e]_a = e (e-1) ... (e-a+1)
cplx falling(cplx e, int a) {
  cplx p = 1.0;
  for (int i = 0; i < a; ++i) p *= e - static_cast<double>(i);
  return p;
}

struct ShellStats {
  double last = 0.0;
  double prev = 0.0;
  int nonzero_shells = 0;
  double max_term = 0.0;
  long terms = 0;
  KahanSum<cplx> sum;

  void close_shell(double mag) {
    if (mag <= 0.0) return;
    prev = last;
    last = mag;
    ++nonzero_shells;
  }
  double ratio() const { return last / prev; }
  double tail() const {
    const double rho = ratio();
    return last * rho / (1.0 - rho);
  }
};

}  // namespace

bool lambda_class_member(std::span<const long> m, std::span<const long> k, const GkzSystem& system,
                         const Simplex& sigma) {
  (void)system;
  if (m.size() != sigma.complement.size() || k.size() != m.size())
    throw Error(ErrorCode::InvalidArgument, "exponent vectors must have one entry per sigma-bar column");
  const QuotientGroup group(sigma.a_sigma);
  IntVector diff(m.size());
  for (std::size_t j = 0; j < m.size(); ++j) diff[j] = BigInt(m[j]) - BigInt(k[j]);
  const auto key = group.class_key(sigma.a_sigmabar * diff);
  return std::all_of(key.begin(), key.end(), [](const BigInt& x) { return x == 0; });
}

GammaSeriesBasis::GammaSeriesBasis(GkzSystem system, Simplex sigma, Truncation truncation, long rep_bound)
    : system_(std::move(system)), sigma_(std::move(sigma)), truncation_(truncation) {
  if (truncation_.max_order < 0) throw Error(ErrorCode::InvalidArgument, "max_order must be >= 0");
  if (!(truncation_.tail_tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tail_tol must be positive");
  const std::size_t n = system_.n();
  const std::size_t nb = sigma_.complement.size();

  for (const auto& v : sigmabar_representatives(system_.A, sigma_.indices, rep_bound)) {
    std::vector<long> m;
    for (const auto& x : v) m.push_back(static_cast<long>(to_ll(x)));
    reps_.push_back(std::move(m));
  }

  const SnfDecomposition snf = smith_normal_form(sigma_.a_sigma);
  const IntMatrix g = snf.P * sigma_.a_sigmabar;
  const auto diag = snf.diagonal();
  for (std::size_t i = 0; i < diag.size(); ++i) {
    if (diag[i] == 1) continue;
    const long long d = to_ll(diag[i]);
    moduli_.push_back(d);
    std::vector<long long> row(nb);
    for (std::size_t j = 0; j < nb; ++j) {
      BigInt r = g(i, j) % diag[i];
      if (r < 0) r += diag[i];
      row[j] = to_ll(r);
    }
    gen_.push_back(std::move(row));
  }
  long long table = 1;
  for (auto d : moduli_) table *= d;
  class_table_.assign(static_cast<std::size_t>(table), std::numeric_limits<std::size_t>::max());
  for (std::size_t j = 0; j < reps_.size(); ++j) {
    long long key = 0;
    for (std::size_t i = 0; i < moduli_.size(); ++i) {
      long long r = 0;
      for (std::size_t l = 0; l < nb; ++l) r = (r + gen_[i][l] * reps_[j][l]) % moduli_[i];
      key = key * moduli_[i] + r;
    }
    class_table_[static_cast<std::size_t>(key)] = j;
  }

  // e(mu) = -A_sigma^{-1} c - A_sigma^{-1} A_sigmabar mu
  base_.assign(n, 0.0);
  if (system_.c_exact) {
    const RatVector ac = sigma_.inv * *system_.c_exact;
    for (std::size_t l = 0; l < n; ++l) base_[l] = -to_double(ac[l]);
  } else {
    for (std::size_t l = 0; l < n; ++l)
      for (std::size_t i = 0; i < n; ++i) base_[l] -= to_double(sigma_.inv(l, i)) * system_.c[i];
  }
  const RatMatrix s = sigma_.inv * to_rational(sigma_.a_sigmabar);
  slope_.assign(n, std::vector<double>(nb));
  for (std::size_t l = 0; l < n; ++l)
    for (std::size_t j = 0; j < nb; ++j) slope_[l][j] = -to_double(s(l, j));
}

std::size_t GammaSeriesBasis::class_of(std::span<const long> mu) const {
  long long key = 0;
  for (std::size_t i = 0; i < moduli_.size(); ++i) {
    long long r = 0;
    for (std::size_t l = 0; l < mu.size(); ++l) r = (r + gen_[i][l] * (mu[l] % moduli_[i])) % moduli_[i];
    if (r < 0) r += moduli_[i];
    key = key * moduli_[i] + r;
  }
  return class_table_[static_cast<std::size_t>(key)];
}

std::vector<SeriesValue> GammaSeriesBasis::evaluate(std::span<const cplx> z, Exec exec) const {
  const std::vector<std::vector<int>> alphas{std::vector<int>(system_.N(), 0)};
  return evaluate(z, alphas, {}, exec);
}

std::vector<SeriesValue> GammaSeriesBasis::evaluate(std::span<const cplx> z, std::span<const std::vector<int>> alphas,
                                                    std::span<const long> winding, Exec exec) const {
  const std::size_t n = system_.n();
  const std::size_t N = system_.N();
  const std::size_t nb = sigma_.complement.size();
  const std::size_t r = reps_.size();
  const std::size_t na = alphas.size();
  if (z.size() != N) throw Error(ErrorCode::InvalidArgument, "z must have N entries");
  if (!winding.empty() && winding.size() != n) throw Error(ErrorCode::InvalidArgument, "winding must have n entries");

  std::vector<cplx> lam(n);
  for (std::size_t l = 0; l < n; ++l) {
    const cplx zl = z[sigma_.indices[l]];
    if (on_branch_cut(zl))
      throw Error(ErrorCode::BranchCut, "z_" + std::to_string(sigma_.indices[l] + 1) + " lies on (-inf, 0]");
    lam[l] = std::log(zl);
    if (!winding.empty()) lam[l] += cplx(0.0, 2.0 * std::numbers::pi * static_cast<double>(winding[l]));
  }
  std::vector<cplx> log_bar(nb);
  std::vector<bool> zero_bar(nb);
  bool all_bar_zero = true;
  for (std::size_t j = 0; j < nb; ++j) {
    const cplx zj = z[sigma_.complement[j]];
    zero_bar[j] = (zj == cplx(0.0));
    if (!zero_bar[j]) {
      log_bar[j] = std::log(zj);
      all_bar_zero = false;
    }
  }

  // Per derivative: orders on sigma and sigma-bar coordinates.
  std::vector<std::vector<int>> a_sig(na, std::vector<int>(n)), a_bar(na, std::vector<int>(nb));
  int max_bar_order = 0;
  for (std::size_t a = 0; a < na; ++a) {
    if (alphas[a].size() != N) throw Error(ErrorCode::InvalidArgument, "multi-index must have N entries");
    int total = 0, bar_total = 0;
    for (int v : alphas[a]) {
      if (v < 0) throw Error(ErrorCode::InvalidArgument, "negative derivative order");
      total += v;
    }
    if (total > kMaxDerivativeOrder) throw Error(ErrorCode::OrderTooHigh, "derivative order exceeds 6");
    for (std::size_t l = 0; l < n; ++l) a_sig[a][l] = alphas[a][sigma_.indices[l]];
    for (std::size_t j = 0; j < nb; ++j) {
      a_bar[a][j] = alphas[a][sigma_.complement[j]];
      bar_total += a_bar[a][j];
    }
    max_bar_order = std::max(max_bar_order, bar_total);
  }

  const long max_order = truncation_.max_order;
  std::vector<double> log_fact(static_cast<std::size_t>(max_order) + 2, 0.0);
  for (std::size_t i = 2; i < log_fact.size(); ++i) log_fact[i] = log_fact[i - 1] + std::log(static_cast<double>(i));

  std::vector<ShellStats> stats(na * r);
  std::vector<std::vector<long>> mus;
  std::vector<cplx> vals;
  std::vector<std::size_t> cls;
  long last_order = 0;

  for (long d = 0; d <= max_order; ++d) {
    mus.clear();
    for_each_composition(d, nb, [&](std::span<const long> m) { mus.emplace_back(m.begin(), m.end()); });
    const std::size_t count = mus.size();
    vals.assign(count * na, 0.0);
    cls.assign(count, 0);

    const auto term = [&](std::size_t t) {
      const auto& mu = mus[t];
      cls[t] = class_of(mu);
      std::vector<cplx> e(n);
      cplx rg = 1.0;
      for (std::size_t l = 0; l < n; ++l) {
        e[l] = base_[l];
        for (std::size_t j = 0; j < nb; ++j) e[l] += slope_[l][j] * static_cast<double>(mu[j]);
        rg *= reciprocal_gamma(1.0 + e[l]);
      }
      if (rg == cplx(0.0)) return;
      for (std::size_t a = 0; a < na; ++a) {
        cplx logt = 0.0, coef = rg;
        bool zero = false;
        for (std::size_t j = 0; j < nb && !zero; ++j) {
          const long p = mu[j] - a_bar[a][j];
          if (p < 0 || (zero_bar[j] && p > 0)) zero = true;
          else if (!zero_bar[j]) logt += static_cast<double>(p) * log_bar[j] - log_fact[static_cast<std::size_t>(p)];
        }
        if (zero) continue;
        for (std::size_t l = 0; l < n; ++l) {
          logt += (e[l] - static_cast<double>(a_sig[a][l])) * lam[l];
          coef *= falling(e[l], a_sig[a][l]);
        }
        vals[t * na + a] = coef * std::exp(logt);
      }
    };

    if (exec == Exec::Parallel && count >= 32) {
#pragma omp parallel for schedule(static)
      for (std::size_t t = 0; t < count; ++t) term(t);
    } else {
      for (std::size_t t = 0; t < count; ++t) term(t);
    }

    std::vector<double> shell(na * r, 0.0);
    for (std::size_t t = 0; t < count; ++t)
      for (std::size_t a = 0; a < na; ++a) {
        const std::size_t o = a * r + cls[t];
        const cplx v = vals[t * na + a];
        stats[o].sum.add(v);
        ++stats[o].terms;
        const double mag = std::abs(v);
        shell[o] += mag;
        stats[o].max_term = std::max(stats[o].max_term, mag);
      }
    for (std::size_t o = 0; o < stats.size(); ++o) stats[o].close_shell(shell[o]);
    last_order = d;

    if (nb == 0) break;
    if (all_bar_zero) {
      if (d >= max_bar_order) break;
      continue;
    }
    bool done = true;
    for (const auto& s : stats) {
      if (s.nonzero_shells < 2 || s.ratio() >= kMaxShellRatio) {
        done = false;
        break;
      }
      const double scale = std::max(std::abs(s.sum.value()), s.max_term);
      if (s.tail() > truncation_.tail_tol * scale) {
        done = false;
        break;
      }
    }
    if (done) break;
  }

  std::vector<SeriesValue> out(stats.size());
  for (std::size_t o = 0; o < stats.size(); ++o) {
    const auto& s = stats[o];
    SeriesValue& v = out[o];
    v.value = s.sum.value();
    v.terms_used = s.terms;
    v.last_order = last_order;
    v.max_term = s.max_term;
    v.branch_log = lam;
    if (all_bar_zero || nb == 0) {
      v.tail_bound = 0.0;
    } else if (s.nonzero_shells >= 2) {
      if (s.ratio() >= kMaxShellRatio)
        throw Error(ErrorCode::TailNotConverged,
                    "shell ratio " + std::to_string(s.ratio()) + " at order " + std::to_string(last_order));
      v.tail_bound = s.tail();
    } else {
      v.tail_bound = s.last;
      v.tail_reliable = false;
    }
  }
  return out;
}

SeriesValue gamma_series_eval(const GammaSeriesSpec& spec, std::span<const cplx> z, Exec exec) {
  const std::vector<int> alpha(spec.system.N(), 0);
  return gamma_series_derivative(spec, z, alpha, exec);
}

SeriesValue gamma_series_derivative(const GammaSeriesSpec& spec, std::span<const cplx> z,
                                    std::span<const int> alpha, Exec exec) {
  const GammaSeriesBasis basis(spec.system, spec.sigma, spec.truncation);
  if (spec.k.size() != spec.sigma.complement.size())
    throw Error(ErrorCode::InvalidArgument, "k must have one entry per sigma-bar column");
  const std::size_t j = basis.class_of(spec.k);
  const std::vector<std::vector<int>> alphas{std::vector<int>(alpha.begin(), alpha.end())};
  auto all = basis.evaluate(z, alphas, {}, exec);
  return all[j];
}

cplx normalization_factor(Normalization norm, const Simplex& sigma) {
  if (norm == Normalization::Bare) return 1.0;
  const cplx two_pi_i(0.0, 2.0 * std::numbers::pi);
  return std::pow(two_pi_i, static_cast<int>(sigma.indices.size())) / static_cast<double>(sigma.order());
}

cplx diamond_cycle_value(const GammaSeriesBasis& basis, long k, long l, std::span<const cplx> z) {
  const Simplex& s = basis.sigma();
  if (s.indices.size() != 2) throw Error(ErrorCode::InvalidArgument, "cycle continuation needs a rank-2 system");
  for (auto i : s.indices)
    if (z.size() <= i || z[i].imag() != 0.0 || !(z[i].real() > 0.0))
      throw Error(ErrorCode::DomainError, "z_" + std::to_string(i + 1) + " must be real positive");
  const std::vector<long> winding{-k, -l};
  const std::vector<std::vector<int>> alphas{std::vector<int>(basis.system().N(), 0)};
  const auto vals = basis.evaluate(z, alphas, winding, Exec::Parallel);
  KahanSum<cplx> total;
  for (const auto& v : vals) total.add(v.value);
  return normalization_factor(Normalization::LaplaceCycle, s) * total.value();
}

}  // namespace gkz
