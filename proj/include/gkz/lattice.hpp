#pragma once

// Exact integer and rational linear algebra: Smith normal form, lattice
// kernels, finite quotient groups Z^n / M Z^n, the duality pairing and the
// character matrix that relates the two Gamma-series / Mellin-Barnes bases.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "gkz/errors.hpp"

namespace gkz {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
using cplx = std::complex<double>;

using IntVector = std::vector<BigInt>;
using RatVector = std::vector<Rational>;

template <class T>
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  DenseMatrix(std::initializer_list<std::initializer_list<long long>> rows);

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::vector<T> column(std::size_t c) const;
  std::vector<T> row(std::size_t r) const;
  DenseMatrix transpose() const;
  // Columns listed in `idx`, in that order.
  DenseMatrix select_columns(std::span<const std::size_t> idx) const;

  bool operator==(const DenseMatrix& o) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using IntMatrix = DenseMatrix<BigInt>;
using RatMatrix = DenseMatrix<Rational>;

IntMatrix operator*(const IntMatrix& a, const IntMatrix& b);
RatMatrix operator*(const RatMatrix& a, const RatMatrix& b);
IntVector operator*(const IntMatrix& a, const IntVector& v);
RatVector operator*(const RatMatrix& a, const RatVector& v);
RatMatrix to_rational(const IntMatrix& m);
RatVector to_rational(const IntVector& v);

BigInt determinant(const IntMatrix& m);
// Exact inverse; throws SingularModulus when det = 0.
RatMatrix inverse(const IntMatrix& m);
std::size_t rank(const IntMatrix& m);

BigInt floor_rational(const Rational& q);
// Representative of q mod 1 in [0, 1).
Rational frac(const Rational& q);
bool is_integer(const Rational& q);

struct SnfDecomposition {
  IntMatrix P;  // rows x rows, unimodular
  IntMatrix D;  // rows x cols, diagonal, d1 | d2 | ...
  IntMatrix Q;  // cols x cols, unimodular

  std::vector<BigInt> diagonal() const;
};

// P * m * Q = D. Pivot: smallest nonzero absolute value, rows eliminated before
// columns; deterministic for a given input.
SnfDecomposition smith_normal_form(const IntMatrix& m);

// Z-basis of ker(A) in Z^N, pairwise size-reduced. Throws RankDeficient when A
// does not have full row rank.
std::vector<IntVector> kernel_basis(const IntMatrix& a);

// Z^n / modulus * Z^n for a nonsingular square modulus.
class QuotientGroup {
 public:
  explicit QuotientGroup(IntMatrix modulus);

  const IntMatrix& modulus() const { return modulus_; }
  std::size_t order() const { return order_; }
  // Lattice points of the half-open fundamental parallelepiped modulus*[0,1)^n,
  // sorted lexicographically; the zero vector comes first.
  const std::vector<IntVector>& representatives() const { return reps_; }

  // SNF coordinates reduced into [0, d_i): equal keys <=> same coset.
  std::vector<BigInt> class_key(const IntVector& v) const;
  bool equivalent(const IntVector& a, const IntVector& b) const;
  // v - modulus * floor(modulus^{-1} v).
  IntVector reduce(const IntVector& v) const;
  std::size_t index_of(const IntVector& v) const;

  const SnfDecomposition& snf() const { return snf_; }

 private:
  IntMatrix modulus_;
  RatMatrix inverse_;
  SnfDecomposition snf_;
  std::vector<BigInt> invariants_;
  std::size_t order_ = 0;
  std::vector<IntVector> reps_;
  std::map<std::vector<BigInt>, std::size_t> index_;
};

QuotientGroup quotient_representatives(const IntMatrix& modulus);

// Fractional part of v^T A_sigma^{-1} w, exact.
Rational pairing(const IntVector& v, const IntVector& w, const IntMatrix& a_sigma);
Rational pairing(const IntVector& v, const IntVector& w, const RatMatrix& a_sigma_inv);

// exp(-2 pi i q) with q reduced exactly mod 1 first.
cplx unit_phase(const Rational& q);

struct CharacterMatrix {
  std::size_t r = 0;
  std::vector<cplx> diag;            // exp(-2 pi i k~(i)^T A_sigma^{-1} c)
  std::vector<cplx> chars;           // row-major r x r
  std::vector<Rational> char_phase;  // row-major exact phases in [0,1)

  cplx at(std::size_t i, std::size_t j) const { return chars[i * r + j]; }
  // Entry of T_sigma = diag * chars.
  cplx transform(std::size_t i, std::size_t j) const { return diag[i] * chars[i * r + j]; }
};

// c is given in floating point; c_exact (when present) makes the diagonal
// phases exact.
CharacterMatrix character_matrix(const IntMatrix& a_sigma, const IntMatrix& a_sigmabar,
                                 std::span<const cplx> c, const std::optional<RatVector>& c_exact,
                                 std::span<const IntVector> k_tilde_reps,
                                 std::span<const IntVector> kb_reps);

// First vector (graded-lex order) of each class of A_sigmabar m mod Z A_sigma,
// m >= 0, until all |det A_sigma| classes are seen. Indices are 0-based
// column positions of A.
std::vector<IntVector> sigmabar_representatives(const IntMatrix& a, std::span<const std::size_t> sigma,
                                                long bound);

// Complement of sigma in {0..n_cols-1}, ascending.
std::vector<std::size_t> complement(std::span<const std::size_t> sigma, std::size_t n_cols);

// Calls f(m) for every m in Z_{>=0}^k with |m| = degree, lexicographically
// ascending.
template <class F>
void for_each_composition(long degree, std::size_t k, F&& f);

long long to_ll(const BigInt& x);
double to_double(const Rational& q);

// ---------------------------------------------------------------------------

template <class F>
void for_each_composition(long degree, std::size_t k, F&& f) {
  std::vector<long> m(k, 0);
  if (k == 0) {
    if (degree == 0) f(std::span<const long>(m));
    return;
  }
  // m[0..k-2] enumerated lexicographically; last coordinate absorbs the rest.
  auto rec = [&](auto&& self, std::size_t pos, long remaining) -> void {
    if (pos + 1 == k) {
      m[pos] = remaining;
      f(std::span<const long>(m));
      return;
    }
    for (long v = 0; v <= remaining; ++v) {
      m[pos] = v;
      self(self, pos + 1, remaining - v);
    }
  };
  rec(rec, 0, degree);
}

}  // namespace gkz
