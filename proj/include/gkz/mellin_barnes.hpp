#pragma once

// Mellin-Barnes integrals F_{sigma,k~} over products of Hankel contours in the
// sigma-bar variables s, evaluated by tensor quadrature.
//
//   F(z) = e^{-2 pi i k~ . A_sigma^{-1} c} z_sigma^{-A_sigma^{-1} c} / (2 pi i)^{N-n}
//          * Int Gamma(s) (e^{i pi} z_sigmabar)^{-s} z_sigma^{A_sigma^{-1} A_sigmabar s}
//                 e^{2 pi i k~ . A_sigma^{-1} A_sigmabar s} / Gamma(1 - A_sigma^{-1}(c - A_sigmabar s)) ds
//
// Equivalently F_{sigma,k~} is F_{sigma,0} continued along Log z_sigma -> Log z_sigma + 2 pi i k~.

#include <optional>
#include <span>
#include <vector>

#include "gkz/contour.hpp"
#include "gkz/gkz_system.hpp"
#include "gkz/parallel.hpp"
#include "gkz/quadrature.hpp"

namespace gkz {

struct MbSpec {
  GkzSystem system;
  Simplex sigma;
  std::vector<long> k_tilde;  // length n; empty means 0
  ContourSpec contour;
  double tail_tol = 1e-12;
};

struct DomainReport {
  bool inside = true;
  bool sigma_nonzero = true;
  std::vector<std::size_t> columns;  // j not in sigma
  std::vector<Rational> s;           // coordinate sums of A_sigma^{-1} a(j)
  std::vector<bool> automatic;       // s_j < 1: decay holds for every z
  std::vector<double> lhs, rhs;      // |z_j| and margin_j |z_sigma^{A_sigma^{-1} a(j)}| when s_j = 1
};

// margins: one per sigma-bar column. The default is the radius prod_l |a_l|^{-a_l},
// a = A_sigma^{-1} a(j), past which the integrand grows geometrically on the arms.
DomainReport in_convergence_domain(const Simplex& sigma, const IntMatrix& A, std::span<const cplx> z,
                                   std::span<const double> margins = {});

// The integrand without the prefactor. Throws PoleHit when some s_j is within
// 1e-12 of a non-positive integer and BranchCut when z leaves the slit plane.
cplx mb_integrand(const MbSpec& spec, std::span<const cplx> z, std::span<const cplx> s);

struct MbValue {
  cplx value{};
  long nodes_used = 0;
  double mass = 0.0;                 // prefactor-scaled sum of |w f|
  std::optional<double> self_difference;  // |value(ppu) - value(2 ppu)| when checked
  double error_estimate = 0.0;       // self_difference (if any) + roundoff floor of the sum
  bool in_domain = true;
  std::vector<cplx> branch_log;      // Log z_sigma + 2 pi i k~
};

struct MbOptions {
  bool check_convergence = true;  // rerun with doubled panels_per_unit
  Exec exec = Exec::Parallel;
};

// All continuations k~ and derivative multi-indices in one pass; they share
// every Gamma evaluation. Result index = a * k_tildes.size() + t.
class MbIntegral {
 public:
  MbIntegral(GkzSystem system, Simplex sigma, ContourSpec contour = {}, double tail_tol = 1e-12);

  std::vector<MbValue> evaluate(std::span<const cplx> z, std::span<const std::vector<long>> k_tildes,
                                std::span<const std::vector<int>> alphas, MbOptions options = {}) const;

  const GkzSystem& system() const { return system_; }
  const Simplex& sigma() const { return sigma_; }
  const ContourSpec& contour() const { return contour_; }
  double tail_tol() const { return tail_tol_; }

  // Raw integral over the given per-dimension rules, prefactor included.
  QuadratureResult integrate(std::span<const ContourRule> rules, std::span<const cplx> z,
                             std::span<const std::vector<long>> k_tildes, std::span<const std::vector<int>> alphas,
                             Exec exec) const;

 private:
  GkzSystem system_;
  Simplex sigma_;
  ContourSpec contour_;
  double tail_tol_;
  std::vector<cplx> a0_;                   // A_sigma^{-1} c
  std::vector<std::vector<double>> alpha_;  // A_sigma^{-1} A_sigmabar, n x d
  std::vector<std::vector<Rational>> alpha_exact_;
  std::optional<std::vector<Rational>> a0_exact_;
};

MbValue mb_eval(const MbSpec& spec, std::span<const cplx> z, MbOptions options = {});

struct ResiduePartialSum {
  cplx partial{};               // residues at s in {0..M-1}^d
  double remainder_bound = 0.0;     // remainder estimate + its quadrature error + roundoff
  double remainder_estimate = 0.0;  // sum over k of |R_k|
  std::vector<cplx> pieces;     // R_k: residues in dims < k, shifted contour in k, full contour after
  long nodes_used = 0;
};

ResiduePartialSum residue_partial_sum(const MbSpec& spec, std::span<const cplx> z, long M,
                                      Exec exec = Exec::Parallel);

struct Barnes2F1 {
  cplx value{};
  cplx normalization{};  // Gamma(c) / (Gamma(a) Gamma(b) 2 pi i)
  double epsilon_used = 0.0;
  long nodes_used = 0;
};

// 2F1(a, b; c; x) = Gamma(c)/(Gamma(a)Gamma(b)) (1/2 pi i) Int Gamma(s) Gamma(a-s) Gamma(b-s)/Gamma(c-s)
//                   (e^{i pi} x)^{-s} ds over the Hankel contour around the poles of Gamma(s).
Barnes2F1 barnes_2f1(cplx a, cplx b, cplx c, cplx x, ContourSpec contour = {}, double tail_tol = 1e-14);

// Int xi^{alpha-1} e^xi dxi over the Hankel contour, principal branch of xi^{alpha-1}.
// Equals 2 pi i / Gamma(1 - alpha).
cplx hankel_power_exp(cplx alpha, const ContourSpec& contour = {}, double tail_tol = 1e-14);

// (1/2 pi i) Int Gamma(s) (e^{i pi} z)^{-s} ds over the Hankel contour. Equals e^z.
cplx hankel_exp(cplx z, const ContourSpec& contour = {}, double tail_tol = 1e-14);

}  // namespace gkz
