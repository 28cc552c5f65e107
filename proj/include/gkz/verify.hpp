#pragma once

// Cross-checks between the two solution bases: PDE residuals through a
// black-box derivative channel, the character-matrix relation between the
// Mellin-Barnes and Gamma-series bases, and the class partition of exponents.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gkz/mellin_barnes.hpp"
#include "gkz/series.hpp"

namespace gkz {

struct Thresholds {
  double identity = 1e-6;          // two independent numeric channels
  double truncation = 1e-8;        // residuals limited only by series truncation
  double pde = 1e-7;               // residuals through quadrature
  double recovered_matrix = 1e-5;  // recovered T vs analytic T, entrywise
  double condition_limit = 1e8;    // sample matrix condition number
};

// A family of functions with exact derivative access.
class SolutionEvaluator {
 public:
  virtual ~SolutionEvaluator() = default;
  virtual std::string label() const = 0;
  virtual std::size_t size() const = 0;
  // Result index a * size() + j: derivative alphas[a] of function j at z.
  virtual std::vector<cplx> derivatives(std::span<const cplx> z, std::span<const std::vector<int>> alphas) const = 0;
  // Threshold that applies to residuals computed from this evaluator.
  virtual double residual_threshold(const Thresholds& t) const = 0;
};

class SeriesEvaluator : public SolutionEvaluator {
 public:
  explicit SeriesEvaluator(std::shared_ptr<const GammaSeriesBasis> basis, Exec exec = Exec::Parallel);
  std::string label() const override { return "series"; }
  std::size_t size() const override { return basis_->size(); }
  std::vector<cplx> derivatives(std::span<const cplx> z, std::span<const std::vector<int>> alphas) const override;
  double residual_threshold(const Thresholds& t) const override { return t.truncation; }

 private:
  std::shared_ptr<const GammaSeriesBasis> basis_;
  Exec exec_;
};

class MbEvaluator : public SolutionEvaluator {
 public:
  MbEvaluator(std::shared_ptr<const MbIntegral> integral, std::vector<std::vector<long>> k_tildes,
              MbOptions options = {});
  std::string label() const override { return "mellin_barnes"; }
  std::size_t size() const override { return k_tildes_.size(); }
  std::vector<cplx> derivatives(std::span<const cplx> z, std::span<const std::vector<int>> alphas) const override;
  double residual_threshold(const Thresholds& t) const override { return t.pde; }

 private:
  std::shared_ptr<const MbIntegral> integral_;
  std::vector<std::vector<long>> k_tildes_;
  MbOptions options_;
};

struct ResidualReport {
  std::string op;         // "E_i" or "box u=(...)"
  std::string evaluator;
  std::size_t function = 0;
  std::vector<cplx> point;
  double residual = 0.0;
  double scale = 0.0;     // largest term magnitude
  double threshold = 0.0;
  bool pass = false;

  double normalized() const { return scale > 0.0 ? residual / scale : residual; }
};

// sum_j a_ij z_j d_j f + c_i f, one report per (i, function).
std::vector<ResidualReport> euler_residual(const SolutionEvaluator& f, const GkzSystem& system,
                                           std::span<const cplx> z, const Thresholds& thresholds = {});

// d^{u+} f - d^{u-} f, one report per function. u must be a nonzero kernel
// vector with |u+|, |u-| <= 6.
std::vector<ResidualReport> box_residual(const SolutionEvaluator& f, const GkzSystem& system, const IntVector& u,
                                         std::span<const cplx> z, const Thresholds& thresholds = {});

// Both residual families over a set of operators, evaluated with one batched
// derivative request per point.
std::vector<ResidualReport> pde_residuals(const SolutionEvaluator& f, const GkzSystem& system,
                                          std::span<const IntVector> box_vectors, std::span<const cplx> z,
                                          const Thresholds& thresholds = {});

struct BasisRelationOptions {
  Truncation truncation;
  ContourSpec contour;
  double tail_tol = 1e-12;
  bool recover_matrix = true;
  Exec exec = Exec::Parallel;
};

struct BasisRelationReport {
  double max_rel_err = 0.0;
  std::vector<double> row_errors;
  CharacterMatrix matrix_used;
  std::vector<std::vector<long>> k_reps;        // sigma-bar exponents k(j)
  std::vector<std::vector<long>> k_tilde_reps;  // k~(i)
  std::vector<cplx> phi;                        // phi_j(z)
  std::vector<cplx> F;                          // F_{sigma,k~(i)}(z)
  std::optional<double> condition_number;
  std::optional<double> recovered_max_err;
  std::optional<double> recovered_modulus_err;  // max | |T_rec(i,j)| - |diag_i| |
  bool pass = false;
};

BasisRelationReport basis_relation_check(const GkzSystem& system, const Simplex& sigma, std::span<const cplx> z,
                                         const Thresholds& thresholds = {}, const BasisRelationOptions& options = {});

// Deterministic points of the slit plane near z used to recover T: z_sigma
// rotated within (-pi/2, pi/2) and z_sigmabar rotated through (-pi, pi).
std::vector<std::vector<cplx>> relation_sample_points(const Simplex& sigma, const IntMatrix& A,
                                                      std::span<const cplx> z, std::size_t count);

struct PartitionReport {
  bool pass = true;
  long bound = 0;
  std::size_t checked = 0;
  std::vector<std::size_t> hits;           // per representative
  std::optional<std::vector<long>> counterexample;
  std::vector<std::size_t> matching;       // representatives containing the counterexample
};

// Every m with |m| <= bound lies in exactly one class k(j); exact arithmetic.
PartitionReport partition_check(const GkzSystem& system, const Simplex& sigma,
                                std::span<const std::vector<long>> reps, long bound);

struct SelfTestResult {
  std::string name;
  bool detected = false;
  std::string detail;
  // False when the fault cannot be injected (e.g. every phase is already 1).
  bool applicable = true;
};

// Injects known faults and confirms each is flagged by the matching check.
std::vector<SelfTestResult> run_self_tests(const GkzSystem& system, const Simplex& sigma, std::span<const cplx> z,
                                           const Thresholds& thresholds = {}, const BasisRelationOptions& options = {});

}  // namespace gkz
