#include "gkz/contour.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gkz/errors.hpp"
#include "gkz/gamma.hpp"

namespace gkz {

void ContourSpec::validate() const {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must lie in (0, 1)");
  if (!(epsilon_prime > 0.0 && epsilon_prime < std::numbers::pi / 8))
    throw Error(ErrorCode::InvalidArgument, "epsilon_prime must lie in (0, pi/8)");
  if (!(arm_length >= 5.0)) throw Error(ErrorCode::InvalidArgument, "arm_length must be >= 5");
  if (panels_per_unit < 2) throw Error(ErrorCode::InvalidArgument, "panels_per_unit must be >= 2");
  if (nodes_per_panel < 2 || nodes_per_panel > 200)
    throw Error(ErrorCode::InvalidArgument, "nodes_per_panel must lie in [2, 200]");
}

std::size_t ContourRule::size() const {
  std::size_t n = 0;
  for (const auto& p : core) n += p.nodes.size();
  for (const auto& arm : arms)
    for (const auto& p : arm) n += p.nodes.size();
  return n;
}

std::vector<QuadNode> ContourRule::flatten() const {
  std::vector<QuadNode> out;
  for (const auto& p : core) out.insert(out.end(), p.nodes.begin(), p.nodes.end());
  for (const auto& arm : arms)
    for (const auto& p : arm) out.insert(out.end(), p.nodes.begin(), p.nodes.end());
  return out;
}

ContourRule hankel_rule(const ContourSpec& spec, double center) {
  spec.validate();
  const GaussRule& gl = gauss_legendre(spec.nodes_per_panel);
  const double half_angle = std::numbers::pi - spec.epsilon_prime;
  const double eps = spec.epsilon;
  ContourRule rule;
  long id = 0;

  // Arc: s = center + eps e^{i theta}, theta from -half_angle to +half_angle.
  const double arc_len = 2.0 * half_angle * eps;
  const int arc_panels = std::max(2, static_cast<int>(std::ceil(arc_len * spec.panels_per_unit)));
  const double dtheta = 2.0 * half_angle / arc_panels;
  for (int p = 0; p < arc_panels; ++p) {
    Panel panel;
    const double a = -half_angle + p * dtheta;
    for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
      const double theta = a + 0.5 * dtheta * (gl.nodes[q] + 1.0);
      const cplx e = std::polar(1.0, theta);
      panel.nodes.push_back({center + eps * e, 0.5 * dtheta * gl.weights[q] * cplx(0.0, eps) * e, false, id++});
    }
    rule.core.push_back(std::move(panel));
  }

  // Radial breaks: eps, then the grid j / ppu beyond it (dropping a sliver).
  const double h = 1.0 / spec.panels_per_unit;
  std::vector<double> breaks{eps};
  for (long j = static_cast<long>(std::floor(eps / h)) + 1; j * h <= spec.arm_length + 1e-12; ++j) {
    const double b = j * h;
    if (breaks.size() == 1 && b - eps < 0.25 * h) continue;
    breaks.push_back(b);
  }
  if (spec.arm_length > breaks.back() + 1e-12) breaks.push_back(spec.arm_length);

  // A pole at radius m sits m sin(epsilon') off the arm. Grade the panels on
  // both sides of radius m geometrically until they are no longer than that gap.
  const double gap = std::sin(spec.epsilon_prime);
  for (long m = 1; m < spec.arm_length; ++m) {
    if (m <= eps) continue;
    for (double piece = 0.5 * h; piece > m * gap; piece *= 0.5) {
      for (double b : {m - piece, m + piece})
        if (b > eps + 0.25 * piece && b < spec.arm_length) breaks.push_back(b);
    }
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end(), [](double a, double b) { return b - a < 1e-12; }),
               breaks.end());

  // Lower arm is traversed inward (direction -e^{-i half_angle}), upper outward.
  for (int side : {-1, +1}) {
    const cplx dir = std::polar(1.0, side * half_angle);
    const double orient = side < 0 ? -1.0 : 1.0;
    std::vector<Panel> arm;
    for (std::size_t b = 0; b + 1 < breaks.size(); ++b) {
      Panel panel;
      const double r0 = breaks[b], r1 = breaks[b + 1];
      for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
        const double rho = r0 + 0.5 * (r1 - r0) * (gl.nodes[q] + 1.0);
        panel.nodes.push_back({center + rho * dir, orient * 0.5 * (r1 - r0) * gl.weights[q] * dir, false, id++});
      }
      arm.push_back(std::move(panel));
    }
    rule.arms.push_back(std::move(arm));
  }
  return rule;
}

std::vector<QuadNode> hankel_contour(const ContourSpec& spec) { return hankel_rule(spec).flatten(); }

ContourRule residue_rule(long M) {
  ContourRule rule;
  Panel panel;
  double inv_fact = 1.0;
  for (long m = 0; m < M; ++m) {
    if (m > 0) inv_fact /= static_cast<double>(m);
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
    panel.nodes.push_back({cplx(-static_cast<double>(m), 0.0),
                           cplx(0.0, 2.0 * std::numbers::pi * sign * inv_fact), true, m});
  }
  rule.core.push_back(std::move(panel));
  return rule;
}

}  // namespace gkz
