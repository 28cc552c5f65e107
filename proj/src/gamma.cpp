#include "gkz/gamma.hpp"

#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include <boost/math/special_functions/legendre.hpp>

#include "gkz/errors.hpp"

namespace gkz {

namespace {

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

cplx sin_pi(cplx z) {
  // sin(pi z) with the integer part removed first so that zeros stay clean.
  const double n = std::round(z.real());
  const cplx f(z.real() - n, z.imag());
  const cplx s = std::sin(std::numbers::pi * f);
  return (static_cast<long long>(n) % 2 == 0) ? s : -s;
}

cplx log_gamma_stirling(cplx z) {
  cplx shift = 0.0;
  while (std::abs(z) < 15.0) {
    shift += std::log(z);
    z += 1.0;
  }
  static constexpr std::array<double, 8> b = {1.0 / 12,   -1.0 / 360,        1.0 / 1260, -1.0 / 1680,
                                              1.0 / 1188, -691.0 / 360360.0, 1.0 / 156,  -3617.0 / 122400.0};
  const cplx inv = 1.0 / z, inv2 = inv * inv;
  cplx series = 0.0, p = inv;
  for (double c : b) {
    series += c * p;
    p *= inv2;
  }
  return (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * std::numbers::pi) + series - shift;
}

}  // namespace

cplx log_gamma_right(cplx z) {
  // Lanczos loses digits away from the real axis; Stirling takes over there.
  if (std::abs(z.imag()) >= 4.0) return log_gamma_stirling(z);
  z -= 1.0;
  cplx x = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) x += kLanczos[i] / (z + static_cast<double>(i));
  const cplx t = z + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t + std::log(x);
}

cplx reciprocal_gamma(cplx z) {
  if (z.real() >= 0.5) return std::exp(-log_gamma_right(z));
  if (std::abs(z.imag()) <= 1e-300) {
    const double r = std::round(z.real());
    if (r <= 0.0 && std::abs(z.real() - r) <= 1e-300) return 0.0;
  }
  // 1/Gamma(z) = Gamma(1 - z) sin(pi z) / pi
  return sin_pi(z) * std::exp(log_gamma_right(1.0 - z)) / std::numbers::pi;
}

const GaussRule& gauss_legendre(int order) {
  if (order < 1 || order > 200) throw Error(ErrorCode::InvalidArgument, "Gauss-Legendre order out of range");
  static std::mutex mutex;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;

  const auto zeros = boost::math::legendre_p_zeros<double>(order);  // non-negative zeros, ascending
  GaussRule rule;
  auto weight = [order](double x) {
    const double d = boost::math::legendre_p_prime<double>(order, x);
    return 2.0 / ((1.0 - x * x) * d * d);
  };
  for (auto r = zeros.rbegin(); r != zeros.rend(); ++r) {
    if (*r == 0.0) continue;
    rule.nodes.push_back(-*r);
    rule.weights.push_back(weight(*r));
  }
  if (order % 2 == 1) {
    rule.nodes.push_back(0.0);
    rule.weights.push_back(weight(0.0));
  }
  for (double x : zeros) {
    if (x == 0.0) continue;
    rule.nodes.push_back(x);
    rule.weights.push_back(weight(x));
  }
  return cache.emplace(order, std::move(rule)).first->second;
}

}  // namespace gkz
