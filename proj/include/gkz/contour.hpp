#pragma once

// Hankel contour in the s-plane: in from -infinity below the negative axis,
// counterclockwise around the origin on a small arc, back out above it.

#include <complex>
#include <vector>

namespace gkz {

using cplx = std::complex<double>;

struct ContourSpec {
  double epsilon = 0.5;         // arc radius
  double epsilon_prime = 0.05;  // angle between the arms and the negative axis
  double arm_length = 40.0;     // arms run from radius epsilon to arm_length
  int panels_per_unit = 4;
  int nodes_per_panel = 16;

  void validate() const;  // throws InvalidArgument
};

struct QuadNode {
  cplx s;
  cplx w;                // includes ds/dt and the path orientation
  bool residue = false;  // point mass standing for a residue at s (see residue_rule)
  long id = 0;           // position within its rule
};

struct Panel {
  std::vector<QuadNode> nodes;
};

// Panels grouped by role. `core` is always integrated in full; each entry of
// `arms` is ordered outward and may be cut once its contributions vanish.
struct ContourRule {
  std::vector<Panel> core;
  std::vector<std::vector<Panel>> arms;

  std::size_t size() const;
  std::vector<QuadNode> flatten() const;
};

// Contour centred at `center` (the shifted contour Gamma - M uses center = -M).
// Arm panel breaks fall on the grid {center - j / panels_per_unit}, so the
// integer points where Gamma(s) has poles are always panel ends.
ContourRule hankel_rule(const ContourSpec& spec, double center = 0.0);

// Every node and weight of the untruncated contour.
std::vector<QuadNode> hankel_contour(const ContourSpec& spec);

// Point masses at s = 0, -1, ..., -(M-1) with weight 2 pi i (-1)^m / m!, the
// residues of Gamma(s). The integrand skips its Gamma(s) factor on such nodes.
ContourRule residue_rule(long M);

}  // namespace gkz
