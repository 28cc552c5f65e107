#pragma once

// Gamma-series solutions phi_{v^k} attached to a simplex sigma, one per class
// k of Z^n / Z A_sigma reached by A_sigmabar k.

#include <span>
#include <vector>

#include "gkz/gamma.hpp"
#include "gkz/gkz_system.hpp"
#include "gkz/parallel.hpp"

namespace gkz {

struct Truncation {
  long max_order = 40;    // largest total sigma-bar degree summed
  double tail_tol = 1e-12;
};

// The overall constant a series value carries.
//   Bare:          the Gamma-series exactly as written (leading coefficient 1/Gamma).
//   LaplaceCycle:  (2 pi i)^n / |det A_sigma| times Bare, the normalization of the
//                  exponential integral over the product of Hankel cycles.
enum class Normalization { Bare, LaplaceCycle };

struct GammaSeriesSpec {
  GkzSystem system;
  Simplex sigma;
  std::vector<long> k;  // class representative, sigma-bar exponents
  Truncation truncation;
};

struct SeriesValue {
  cplx value{};
  long terms_used = 0;
  double tail_bound = 0.0;
  bool tail_reliable = true;   // false when fewer than two nonzero shells were seen
  long last_order = 0;         // highest total degree summed
  double max_term = 0.0;       // largest |term|, the natural scale of value
  std::vector<cplx> branch_log;  // logarithms used for z_sigma
};

// A_sigmabar (m - k) in Z A_sigma, decided exactly.
bool lambda_class_member(std::span<const long> m, std::span<const long> k, const GkzSystem& system,
                         const Simplex& sigma);

// All r series of a simplex evaluated together: the exponent lattice is walked
// once in total-degree shells and each term is routed to its class.
class GammaSeriesBasis {
 public:
  GammaSeriesBasis(GkzSystem system, Simplex sigma, Truncation truncation = {}, long rep_bound = 64);

  const GkzSystem& system() const { return system_; }
  const Simplex& sigma() const { return sigma_; }
  const Truncation& truncation() const { return truncation_; }
  std::size_t size() const { return reps_.size(); }
  const std::vector<std::vector<long>>& representatives() const { return reps_; }
  std::size_t class_of(std::span<const long> mu) const;

  // Result index = a * size() + j for derivative multi-index alphas[a] (over
  // all N coordinates) and class j. `winding` adds 2 pi i w_l to Log z_sigma_l.
  std::vector<SeriesValue> evaluate(std::span<const cplx> z, std::span<const std::vector<int>> alphas,
                                    std::span<const long> winding = {}, Exec exec = Exec::Parallel) const;

  std::vector<SeriesValue> evaluate(std::span<const cplx> z, Exec exec = Exec::Parallel) const;

 private:
  GkzSystem system_;
  Simplex sigma_;
  Truncation truncation_;
  std::vector<std::vector<long>> reps_;
  // Fast class lookup: key_i = (G mu)_i mod d_i over the nontrivial invariant
  // factors d_i, flattened mixed-radix, then mapped to a representative index.
  std::vector<long long> moduli_;
  std::vector<std::vector<long long>> gen_;
  std::vector<std::size_t> class_table_;
  // exponent data: e(mu) = base_ + slope_ * mu  (minus A_sigma^{-1}(c + A_sigmabar mu))
  std::vector<cplx> base_;
  std::vector<std::vector<double>> slope_;
};

SeriesValue gamma_series_eval(const GammaSeriesSpec& spec, std::span<const cplx> z, Exec exec = Exec::Parallel);
SeriesValue gamma_series_derivative(const GammaSeriesSpec& spec, std::span<const cplx> z,
                                    std::span<const int> alpha, Exec exec = Exec::Parallel);

// Scales a value by the constant of the given normalization.
cplx normalization_factor(Normalization norm, const Simplex& sigma);

// The Laplace-cycle integral over Gamma_{k,m1} x Gamma_{l,m2} for the system
// A = [[m1,0,1,2],[0,m2,1,1]] with sigma = {1,2}: the full series (all classes)
// in LaplaceCycle normalization with Log z1, Log z2 shifted by -2 pi i k,
// -2 pi i l. Requires z1, z2 real positive.
cplx diamond_cycle_value(const GammaSeriesBasis& basis, long k, long l, std::span<const cplx> z);

}  // namespace gkz
