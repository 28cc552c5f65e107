#include "gkz/mellin_barnes.hpp"

#include <cmath>
#include <map>
#include <limits>
#include <numbers>

#include "gkz/gamma.hpp"

namespace gkz {

namespace {

constexpr int kMaxDerivativeOrder = 6;
constexpr std::size_t kMaxDimension = 3;
const cplx kTwoPiI(0.0, 2.0 * std::numbers::pi);
const cplx kIPi(0.0, std::numbers::pi);

bool on_branch_cut(cplx z) { return z.imag() == 0.0 && z.real() <= 0.0; }

cplx falling(cplx e, int a) {
  cplx p = 1.0;
  for (int i = 0; i < a; ++i) p *= e - static_cast<double>(i);
  return p;
}

void check_slit_plane(std::span<const cplx> z) {
  for (std::size_t j = 0; j < z.size(); ++j)
    if (on_branch_cut(z[j])) throw Error(ErrorCode::BranchCut, "z_" + std::to_string(j + 1) + " lies on (-inf, 0]");
}

ContourSpec refined(ContourSpec c) {
  c.panels_per_unit *= 2;
  return c;
}

double roundoff_floor(double mass) { return 100.0 * std::numeric_limits<double>::epsilon() * mass; }

}  // namespace

// ---------------------------------------------------------------------------

DomainReport in_convergence_domain(const Simplex& sigma, const IntMatrix& A, std::span<const cplx> z,
                                   std::span<const double> margins) {
  if (z.size() != A.cols()) throw Error(ErrorCode::InvalidArgument, "z must have N entries");
  if (!margins.empty() && margins.size() != sigma.complement.size())
    throw Error(ErrorCode::InvalidArgument, "need one margin per sigma-bar column");
  DomainReport rep;
  for (auto i : sigma.indices)
    if (z[i] == cplx(0.0)) rep.sigma_nonzero = false;
  rep.inside = rep.sigma_nonzero;
  for (std::size_t k = 0; k < sigma.complement.size(); ++k) {
    const std::size_t j = sigma.complement[k];
    const RatVector v = sigma.inv * to_rational(A.column(j));
    Rational sum = 0;
    for (const auto& x : v) sum += x;
    rep.columns.push_back(j);
    rep.s.push_back(sum);
    const bool automatic = sum < 1;
    rep.automatic.push_back(automatic);
    double rhs = std::numeric_limits<double>::quiet_NaN();
    if (!automatic && rep.sigma_nonzero) {
      double log_mod = 0.0, log_radius = 0.0;
      for (std::size_t l = 0; l < v.size(); ++l) {
        const double a = to_double(v[l]);
        log_mod += a * std::log(std::abs(z[sigma.indices[l]]));
        // Stirling on the arms: the integrand grows like (prod |a_l|^{a_l} |z_j| / |z_sigma^a|)^{|s|}.
        if (a != 0.0) log_radius -= a * std::log(std::abs(a));
      }
      rhs = (margins.empty() ? std::exp(log_radius) : margins[k]) * std::exp(log_mod);
      if (!(std::abs(z[j]) < rhs)) rep.inside = false;
    }
    rep.lhs.push_back(std::abs(z[j]));
    rep.rhs.push_back(rhs);
  }
  return rep;
}

cplx mb_integrand(const MbSpec& spec, std::span<const cplx> z, std::span<const cplx> s) {
  const Simplex& sg = spec.sigma;
  const std::size_t n = sg.indices.size();
  const std::size_t d = sg.complement.size();
  if (z.size() != spec.system.N() || s.size() != d) throw Error(ErrorCode::InvalidArgument, "bad z or s length");
  check_slit_plane(z);
  for (std::size_t j = 0; j < d; ++j) {
    const double r = std::round(s[j].real());
    if (r <= 0.0 && std::abs(s[j] - cplx(r, 0.0)) < 1e-12)
      throw Error(ErrorCode::PoleHit, "s_" + std::to_string(j + 1) + " is at a pole of Gamma");
  }
  const RatMatrix alpha = sg.inv * to_rational(sg.a_sigmabar);
  std::vector<cplx> a0(n, 0.0);
  for (std::size_t l = 0; l < n; ++l)
    for (std::size_t i = 0; i < n; ++i) a0[l] += to_double(sg.inv(l, i)) * spec.system.c[i];

  cplx value = 1.0;
  for (std::size_t j = 0; j < d; ++j) {
    value /= reciprocal_gamma(s[j]);
    value *= std::exp(-s[j] * (std::log(z[sg.complement[j]]) + kIPi));
  }
  for (std::size_t l = 0; l < n; ++l) {
    cplx as = 0.0;
    for (std::size_t j = 0; j < d; ++j) as += to_double(alpha(l, j)) * s[j];
    const double kt = spec.k_tilde.empty() ? 0.0 : static_cast<double>(spec.k_tilde[l]);
    value *= std::exp(as * std::log(z[sg.indices[l]]));  // z_sigma^{alpha s}
    value *= std::exp(kTwoPiI * kt * as);                // continuation phase
    value *= reciprocal_gamma(1.0 - a0[l] + as);         // 1 / Gamma(1 - A^{-1}(c - A_bar s))
  }
  return value;
}

// ---------------------------------------------------------------------------

MbIntegral::MbIntegral(GkzSystem system, Simplex sigma, ContourSpec contour, double tail_tol)
    : system_(std::move(system)), sigma_(std::move(sigma)), contour_(contour), tail_tol_(tail_tol) {
  contour_.validate();
  if (!(tail_tol_ > 0.0)) throw Error(ErrorCode::InvalidArgument, "tail_tol must be positive");
  const std::size_t n = system_.n();
  const std::size_t d = sigma_.complement.size();
  if (d > kMaxDimension) throw Error(ErrorCode::DimensionTooLarge, "N - n > 3");

  a0_.assign(n, 0.0);
  if (system_.c_exact) {
    a0_exact_ = sigma_.inv * *system_.c_exact;
    for (std::size_t l = 0; l < n; ++l) a0_[l] = to_double((*a0_exact_)[l]);
  } else {
    for (std::size_t l = 0; l < n; ++l)
      for (std::size_t i = 0; i < n; ++i) a0_[l] += to_double(sigma_.inv(l, i)) * system_.c[i];
  }
  const RatMatrix alpha = sigma_.inv * to_rational(sigma_.a_sigmabar);
  alpha_.assign(n, std::vector<double>(d));
  alpha_exact_.assign(n, std::vector<Rational>(d));
  for (std::size_t l = 0; l < n; ++l)
    for (std::size_t j = 0; j < d; ++j) {
      alpha_exact_[l][j] = alpha(l, j);
      alpha_[l][j] = to_double(alpha(l, j));
    }
}

QuadratureResult MbIntegral::integrate(std::span<const ContourRule> rules, std::span<const cplx> z,
                                       std::span<const std::vector<long>> k_tildes,
                                       std::span<const std::vector<int>> alphas, Exec exec) const {
  const std::size_t n = system_.n();
  const std::size_t N = system_.N();
  const std::size_t d = sigma_.complement.size();
  const std::size_t K = k_tildes.size();
  const std::size_t na = alphas.size();
  if (rules.size() != d) throw Error(ErrorCode::InvalidArgument, "need one contour rule per sigma-bar variable");
  if (z.size() != N) throw Error(ErrorCode::InvalidArgument, "z must have N entries");
  check_slit_plane(z);
  for (const auto& kt : k_tildes)
    if (kt.size() != n) throw Error(ErrorCode::InvalidArgument, "k~ must have n entries");

  std::vector<std::vector<int>> a_sig(na, std::vector<int>(n)), a_bar(na, std::vector<int>(d));
  for (std::size_t a = 0; a < na; ++a) {
    if (alphas[a].size() != N) throw Error(ErrorCode::InvalidArgument, "multi-index must have N entries");
    int total = 0;
    for (int v : alphas[a]) {
      if (v < 0) throw Error(ErrorCode::InvalidArgument, "negative derivative order");
      total += v;
    }
    if (total > kMaxDerivativeOrder) throw Error(ErrorCode::OrderTooHigh, "derivative order exceeds 6");
    for (std::size_t l = 0; l < n; ++l) a_sig[a][l] = alphas[a][sigma_.indices[l]];
    for (std::size_t j = 0; j < d; ++j) a_bar[a][j] = alphas[a][sigma_.complement[j]];
  }

  std::vector<cplx> lam(n), log_bar(d);
  for (std::size_t l = 0; l < n; ++l) lam[l] = std::log(z[sigma_.indices[l]]);
  for (std::size_t j = 0; j < d; ++j) log_bar[j] = std::log(z[sigma_.complement[j]]);

  // Separable per-dimension factors, indexed by node id:
  //   h[j][t] = Gamma(s) exp(s (q_jt - Log z_j - i pi)),  q_jt = sum_l alpha_lj (Log z_l + 2 pi i k~_l)
  //   sf[j][a] = [-s]_{alpha_j}
  std::vector<std::vector<std::vector<cplx>>> h(d), sf(d);
  for (std::size_t j = 0; j < d; ++j) {
    const auto nodes = rules[j].flatten();
    long max_id = 0;
    for (const auto& nd : nodes) max_id = std::max(max_id, nd.id);
    const std::size_t size = static_cast<std::size_t>(max_id) + 1;
    h[j].assign(K, std::vector<cplx>(size, 0.0));
    sf[j].assign(na, std::vector<cplx>(size, 0.0));
    for (std::size_t t = 0; t < K; ++t) {
      cplx q = 0.0;
      for (std::size_t l = 0; l < n; ++l)
        q += alpha_[l][j] * (lam[l] + kTwoPiI * static_cast<double>(k_tildes[t][l]));
      const cplx rate = q - log_bar[j] - kIPi;
      for (const auto& nd : nodes) {
        const cplx g = nd.residue ? cplx(1.0) : 1.0 / reciprocal_gamma(nd.s);
        h[j][t][static_cast<std::size_t>(nd.id)] = g * std::exp(nd.s * rate);
      }
    }
    for (std::size_t a = 0; a < na; ++a)
      for (const auto& nd : nodes) sf[j][a][static_cast<std::size_t>(nd.id)] = falling(-nd.s, a_bar[a][j]);
  }

  const TensorIntegrand f = [&](std::span<const QuadNode* const> nodes, std::span<cplx> out) {
    cplx e[kMaxDimension + 8];
    std::vector<cplx> e_heap;
    cplx* ep = e;
    if (n > kMaxDimension + 8) {
      e_heap.resize(n);
      ep = e_heap.data();
    }
    cplx g = 1.0;
    for (std::size_t l = 0; l < n; ++l) {
      cplx v = -a0_[l];
      for (std::size_t j = 0; j < d; ++j) v += alpha_[l][j] * nodes[j]->s;
      ep[l] = v;
      g *= reciprocal_gamma(1.0 + v);
    }
    for (std::size_t a = 0; a < na; ++a) {
      cplx da = g;
      for (std::size_t l = 0; l < n; ++l) da *= falling(ep[l], a_sig[a][l]);
      for (std::size_t j = 0; j < d; ++j) da *= sf[j][a][static_cast<std::size_t>(nodes[j]->id)];
      for (std::size_t t = 0; t < K; ++t) {
        cplx v = da;
        for (std::size_t j = 0; j < d; ++j) v *= h[j][t][static_cast<std::size_t>(nodes[j]->id)];
        out[a * K + t] = v;
      }
    }
  };

  QuadratureResult res = tensor_quadrature(rules, na * K, f, tail_tol_, exec);
  if (res.arm_exhausted)
    throw Error(ErrorCode::TailNotConverged,
                "the integrand has not decayed by arm_length; z is outside or near the edge of the convergence domain");

  // Prefactor exp(-a0 . (Log z_sigma + 2 pi i k~)) / (2 pi i)^d and z^{-alpha}.
  const cplx norm = std::pow(kTwoPiI, -static_cast<int>(d));
  for (std::size_t t = 0; t < K; ++t) {
    cplx pref = 0.0;
    for (std::size_t l = 0; l < n; ++l) pref -= a0_[l] * lam[l];
    pref = std::exp(pref);
    if (a0_exact_) {
      Rational ph = 0;
      for (std::size_t l = 0; l < n; ++l) ph += Rational(k_tildes[t][l]) * (*a0_exact_)[l];
      pref *= unit_phase(ph);
    } else {
      cplx ph = 0.0;
      for (std::size_t l = 0; l < n; ++l) ph += static_cast<double>(k_tildes[t][l]) * a0_[l];
      pref *= std::exp(-kTwoPiI * ph);
    }
    pref *= norm;
    for (std::size_t a = 0; a < na; ++a) {
      cplx scale = pref;
      for (std::size_t i = 0; i < N; ++i)
        if (alphas[a][i] > 0) scale /= std::pow(z[i], alphas[a][i]);
      const std::size_t o = a * K + t;
      res.values[o] *= scale;
      res.mass[o] *= std::abs(scale);
    }
  }
  return res;
}

std::vector<MbValue> MbIntegral::evaluate(std::span<const cplx> z, std::span<const std::vector<long>> k_tildes,
                                          std::span<const std::vector<int>> alphas, MbOptions options) const {
  const std::size_t d = sigma_.complement.size();
  const AdmissibilityReport adm = simplex_admissible(system_.A, sigma_.indices);
  if (!adm.admissible) throw Error(ErrorCode::DomainError, "sigma is not admissible; the integral diverges");

  // A derivative of order m in a sigma-bar variable multiplies Gamma(s) by a
  // polynomial vanishing at s = 0..1-m, so the contour is centered at -m. This
  // keeps |z_j^{-s-m}| near the size of the result instead of |z_j|^{-m}.
  const std::size_t K = k_tildes.size();
  std::map<std::vector<int>, std::vector<std::size_t>> groups;
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    if (alphas[a].size() != system_.N()) throw Error(ErrorCode::InvalidArgument, "multi-index must have N entries");
    std::vector<int> shift(d);
    for (std::size_t j = 0; j < d; ++j) shift[j] = alphas[a][sigma_.complement[j]];
    groups[shift].push_back(a);
  }

  const std::size_t n_out = alphas.size() * K;
  QuadratureResult res;
  res.values.assign(n_out, 0.0);
  res.mass.assign(n_out, 0.0);
  std::vector<double> diff(n_out, std::numeric_limits<double>::quiet_NaN());
  for (const auto& [shift, members] : groups) {
    std::vector<std::vector<int>> sub;
    for (auto a : members) sub.push_back(alphas[a]);
    auto rules_for = [&](const ContourSpec& spec) {
      std::vector<ContourRule> rules;
      for (std::size_t j = 0; j < d; ++j) rules.push_back(hankel_rule(spec, -static_cast<double>(shift[j])));
      return rules;
    };
    QuadratureResult part = integrate(rules_for(contour_), z, k_tildes, sub, options.exec);
    std::vector<double> part_diff(part.values.size(), std::numeric_limits<double>::quiet_NaN());
    if (options.check_convergence) {
      QuadratureResult fine = integrate(rules_for(refined(contour_)), z, k_tildes, sub, options.exec);
      for (std::size_t o = 0; o < part.values.size(); ++o) {
        part_diff[o] = std::abs(part.values[o] - fine.values[o]);
        const double allowed = 10.0 * tail_tol_ * std::abs(fine.values[o]) + roundoff_floor(fine.mass[o]);
        if (part_diff[o] > allowed)
          throw Error(ErrorCode::QuadratureNotConverged,
                      "doubling panels changed the result by " + std::to_string(part_diff[o]) + " (allowed " +
                          std::to_string(allowed) + ")");
      }
      fine.evaluations += part.evaluations;
      part = std::move(fine);
    }
    for (std::size_t m = 0; m < members.size(); ++m)
      for (std::size_t t = 0; t < K; ++t) {
        const std::size_t src = m * K + t, dst = members[m] * K + t;
        res.values[dst] = part.values[src];
        res.mass[dst] = part.mass[src];
        diff[dst] = part_diff[src];
      }
    res.evaluations += part.evaluations;
  }

  const DomainReport dom = in_convergence_domain(sigma_, system_.A, z);
  std::vector<MbValue> out(res.values.size());
  for (std::size_t o = 0; o < out.size(); ++o) {
    MbValue& v = out[o];
    v.value = res.values[o];
    v.mass = res.mass[o];
    v.nodes_used = res.evaluations;
    if (options.check_convergence) v.self_difference = diff[o];
    v.error_estimate = (options.check_convergence ? diff[o] : 0.0) + roundoff_floor(v.mass);
    v.in_domain = dom.inside;
    const auto& kt = k_tildes[o % K];
    for (std::size_t l = 0; l < sigma_.indices.size(); ++l)
      v.branch_log.push_back(std::log(z[sigma_.indices[l]]) + kTwoPiI * static_cast<double>(kt[l]));
  }
  return out;
}

MbValue mb_eval(const MbSpec& spec, std::span<const cplx> z, MbOptions options) {
  const MbIntegral integral(spec.system, spec.sigma, spec.contour, spec.tail_tol);
  std::vector<long> kt = spec.k_tilde;
  if (kt.empty()) kt.assign(spec.system.n(), 0);
  const std::vector<std::vector<long>> kts{kt};
  const std::vector<std::vector<int>> alphas{std::vector<int>(spec.system.N(), 0)};
  return integral.evaluate(z, kts, alphas, options).front();
}

// ---------------------------------------------------------------------------

ResiduePartialSum residue_partial_sum(const MbSpec& spec, std::span<const cplx> z, long M, Exec exec) {
  if (M < 1) throw Error(ErrorCode::InvalidArgument, "M must be >= 1");
  const MbIntegral integral(spec.system, spec.sigma, spec.contour, spec.tail_tol);
  const std::size_t d = spec.sigma.complement.size();
  std::vector<long> kt = spec.k_tilde;
  if (kt.empty()) kt.assign(spec.system.n(), 0);
  const std::vector<std::vector<long>> kts{kt};
  const std::vector<std::vector<int>> alphas{std::vector<int>(spec.system.N(), 0)};

  ResiduePartialSum out;
  const ContourRule residues = residue_rule(M);
  {
    const std::vector<ContourRule> rules(d, residues);
    const auto r = integral.integrate(rules, z, kts, alphas, exec);
    out.partial = r.values[0];
    out.nodes_used += r.evaluations;
  }
  // Prod_j (R_j + S_j) - Prod_j R_j = sum_k R_1..R_{k-1} S_k C_{k+1}..C_d
  for (std::size_t k = 0; k < d; ++k) {
    auto build = [&](const ContourSpec& cs) {
      std::vector<ContourRule> rules;
      for (std::size_t j = 0; j < d; ++j) {
        if (j < k) rules.push_back(residues);
        else if (j == k) rules.push_back(hankel_rule(cs, -static_cast<double>(M)));
        else rules.push_back(hankel_rule(cs));
      }
      return rules;
    };
    const auto coarse = integral.integrate(build(spec.contour), z, kts, alphas, exec);
    const auto fine = integral.integrate(build(refined(spec.contour)), z, kts, alphas, exec);
    const cplx piece = fine.values[0];
    out.pieces.push_back(piece);
    out.remainder_estimate += std::abs(piece);
    out.remainder_bound +=
        std::abs(piece) + std::abs(fine.values[0] - coarse.values[0]) + roundoff_floor(fine.mass[0]);
    out.nodes_used += coarse.evaluations + fine.evaluations;
  }
  return out;
}

// ---------------------------------------------------------------------------

Barnes2F1 barnes_2f1(cplx a, cplx b, cplx c, cplx x, ContourSpec contour, double tail_tol) {
  Barnes2F1 out;
  {
    const double r = std::round(c.real());
    if (c.imag() == 0.0 && r <= 0.0 && c.real() == r) throw Error(ErrorCode::DomainError, "c is a pole of Gamma");
  }
  out.normalization = reciprocal_gamma(a) * reciprocal_gamma(b) / reciprocal_gamma(c) / kTwoPiI;
  if (x == cplx(0.0)) {
    out.value = 1.0;
    return out;
  }
  if (!(std::abs(x) < 1.0)) throw Error(ErrorCode::DomainError, "|x| must be < 1");
  if (on_branch_cut(x)) throw Error(ErrorCode::BranchCut, "x lies on (-inf, 0]");
  if (!(a.real() > 0.0 && b.real() > 0.0))
    throw Error(ErrorCode::DomainError, "need Re a > 0 and Re b > 0 so the arc separates the two pole families");

  // Keep the poles a + k, b + k of Gamma(a - s) Gamma(b - s) outside the arc.
  contour.epsilon = std::min(contour.epsilon, 0.5 * std::min(a.real(), b.real()));
  out.epsilon_used = contour.epsilon;
  const std::vector<ContourRule> rules{hankel_rule(contour)};
  const cplx rate = std::log(x) + kIPi;
  const TensorIntegrand f = [&](std::span<const QuadNode* const> nodes, std::span<cplx> o) {
    const cplx s = nodes[0]->s;
    o[0] = reciprocal_gamma(c - s) * std::exp(-s * rate) /
           (reciprocal_gamma(s) * reciprocal_gamma(a - s) * reciprocal_gamma(b - s));
  };
  const auto res = tensor_quadrature(rules, 1, f, tail_tol, Exec::Serial);
  out.value = out.normalization * res.values[0];
  out.nodes_used = res.evaluations;
  return out;
}

// ---------------------------------------------------------------------------

cplx hankel_power_exp(cplx alpha, const ContourSpec& contour, double tail_tol) {
  const std::vector<ContourRule> rules{hankel_rule(contour)};
  const TensorIntegrand f = [&](std::span<const QuadNode* const> nodes, std::span<cplx> out) {
    const cplx s = nodes[0]->s;
    out[0] = std::exp((alpha - 1.0) * std::log(s) + s);
  };
  return tensor_quadrature(rules, 1, f, tail_tol, Exec::Serial).values[0];
}

cplx hankel_exp(cplx z, const ContourSpec& contour, double tail_tol) {
  if (z == cplx(0.0)) throw Error(ErrorCode::DomainError, "z must be nonzero");
  check_slit_plane(std::span<const cplx>(&z, 1));
  const std::vector<ContourRule> rules{hankel_rule(contour)};
  const cplx rate = -(std::log(z) + kIPi);
  const TensorIntegrand f = [&](std::span<const QuadNode* const> nodes, std::span<cplx> out) {
    const cplx s = nodes[0]->s;
    out[0] = std::exp(s * rate) / reciprocal_gamma(s);
  };
  return tensor_quadrature(rules, 1, f, tail_tol, Exec::Serial).values[0] / kTwoPiI;
}

}  // namespace gkz
