#pragma once

// Iterated tensor-product quadrature over a product of contour rules, with
// outward arm truncation. Serial and OpenMP paths give identical results: the
// parallel path only precomputes outer-node values, and all accumulation runs
// in the serial order afterwards.

#include <functional>
#include <span>
#include <vector>

#include "gkz/contour.hpp"
#include "gkz/parallel.hpp"

namespace gkz {

// Writes the integrand outputs at the tensor node (one node per dimension).
using TensorIntegrand = std::function<void(std::span<const QuadNode* const> nodes, std::span<cplx> out)>;

struct QuadratureResult {
  std::vector<cplx> values;   // one per output
  std::vector<double> mass;   // sum of |weight * integrand|, the roundoff scale
  long evaluations = 0;
  // Some arm reached its end while its last panel was still above the cut
  // threshold: the integrand has not decayed by arm_length.
  bool arm_exhausted = false;
};

// An arm is cut after three consecutive panels whose largest contribution is
// below tail_tol times the running maximum, for every output.
QuadratureResult tensor_quadrature(std::span<const ContourRule> rules, std::size_t n_out, const TensorIntegrand& f,
                                   double tail_tol, Exec exec = Exec::Parallel);

}  // namespace gkz
