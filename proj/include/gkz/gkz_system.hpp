#pragma once

// The system M_A(c): the integer matrix A, the parameter c, and the
// combinatorics around it (simplices, genericity, regular triangulations).

#include <optional>
#include <string>
#include <vector>

#include "gkz/lattice.hpp"

namespace gkz {

struct GkzSystem {
  IntMatrix A;                       // n x N
  std::vector<cplx> c;               // length n
  std::optional<RatVector> c_exact;  // present when c was given as rationals
  std::vector<IntVector> kernel;     // basis of L_A = ker A

  std::size_t n() const { return A.rows(); }
  std::size_t N() const { return A.cols(); }
};

// Validates full row rank, n < N and ZA = Z^n; caches the kernel basis.
GkzSystem build_system(IntMatrix A, std::vector<cplx> c, std::optional<RatVector> c_exact = std::nullopt);
GkzSystem build_system(IntMatrix A, const RatVector& c);

// Positive and negative parts of u, as exponent vectors of the box operator.
std::pair<std::vector<long>, std::vector<long>> split_kernel_vector(const IntVector& u);

struct Simplex {
  std::vector<std::size_t> indices;     // sorted, 0-based
  std::vector<std::size_t> complement;  // sorted, 0-based
  IntMatrix a_sigma;
  IntMatrix a_sigmabar;
  BigInt det;
  RatMatrix inv;

  std::size_t order() const;  // |det|
};

// Throws SingularSimplex when det A_sigma = 0.
Simplex make_simplex(const IntMatrix& A, std::vector<std::size_t> sigma);

// Every n-subset of columns with nonzero determinant, in lexicographic order.
std::vector<Simplex> all_simplices(const IntMatrix& A);

struct AdmissibilityReport {
  bool admissible = true;
  std::vector<std::size_t> columns;  // j not in sigma, 0-based
  std::vector<Rational> s;           // coordinate sum of A_sigma^{-1} a(j)
};

AdmissibilityReport simplex_admissible(const IntMatrix& A, const std::vector<std::size_t>& sigma);

// Normalized volume of conv{0, a(1), ..., a(N)}.
BigInt newton_volume(const IntMatrix& A);

enum class Verdict { Yes, No, Unknown };
std::string_view to_string(Verdict v);

struct VeryGenericReport {
  Verdict verdict = Verdict::Unknown;
  std::vector<long> witness;  // m with an integral entry (verdict No)
  std::size_t witness_entry = 0;
  long bound = 0;             // scan bound (verdict Unknown)
  // A_sigma^{-1} c has no integer entry; the m = 0 instance of the condition.
  std::optional<bool> base_point_non_integral;
};

VeryGenericReport is_very_generic(const GkzSystem& system, const Simplex& sigma, long bound);

struct NonresonanceReport {
  Verdict verdict = Verdict::Unknown;
  std::vector<std::size_t> face_columns;  // columns on the witness face (verdict No)
  IntVector face_normal;
  std::string note;
};

// Faces of conv{0, a(j)} through the origin; n <= 3 only.
NonresonanceReport is_nonresonant(const GkzSystem& system);

struct Triangulation {
  std::vector<Simplex> simplices;
  RatVector weights;
};

// Cells conv{0, a(sigma)} of the lower hull of the lifted configuration, with
// the origin lifted to height 0. Throws DegenerateWeights on ties.
Triangulation regular_triangulation(const IntMatrix& A, const RatVector& w);

}  // namespace gkz
