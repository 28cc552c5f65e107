#pragma once

#include <complex>
#include <vector>

namespace gkz {

using cplx = std::complex<double>;

// 1/Gamma(z) for complex z. Lanczos (g = 7, 9 terms) on Re z >= 1/2, reflection
// elsewhere; exactly zero on the non-positive integers.
cplx reciprocal_gamma(cplx z);

// log Gamma(z) on Re z >= 1/2 (Lanczos, continuous branch in that half plane).
cplx log_gamma_right(cplx z);

// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule& gauss_legendre(int order);

}  // namespace gkz
