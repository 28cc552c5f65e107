#pragma once

// Conversions between library and oracle types, plus small numeric helpers.

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "gkz/lattice.hpp"
#include "oracles/lattice_oracle.hpp"

namespace support {

inline oracle::Mat to_oracle(const gkz::IntMatrix& m) {
  oracle::Mat out(m.rows(), std::vector<oracle::Int>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
  return out;
}

inline gkz::IntMatrix from_oracle(const oracle::Mat& m) {
  gkz::IntMatrix out(m.size(), m[0].size());
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m[0].size(); ++j) out(i, j) = m[i][j];
  return out;
}

inline double rel_err(std::complex<double> a, std::complex<double> b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

inline gkz::IntVector ivec(std::initializer_list<long long> xs) {
  gkz::IntVector v;
  for (long long x : xs) v.emplace_back(x);
  return v;
}

inline std::vector<gkz::cplx> diamond_point() { return {1.0, 1.0, 0.1, 0.05}; }

inline gkz::IntMatrix diamond_matrix() { return gkz::IntMatrix{{4, 0, 1, 2}, {0, 3, 1, 1}}; }

inline gkz::RatVector rats(std::initializer_list<std::pair<long, long>> xs) {
  gkz::RatVector v;
  for (auto [p, q] : xs) v.emplace_back(gkz::Rational(p, q));
  return v;
}

}  // namespace support
