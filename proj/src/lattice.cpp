#include "gkz/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

namespace gkz {

namespace mp = boost::multiprecision;

// ---------------------------------------------------------------------------
// DenseMatrix

template <class T>
DenseMatrix<T>::DenseMatrix(std::initializer_list<std::initializer_list<long long>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw Error(ErrorCode::InvalidArgument, "ragged matrix literal");
    for (long long v : r) data_.emplace_back(v);
  }
}

template <class T>
DenseMatrix<T> DenseMatrix<T>::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
  return m;
}

template <class T>
std::vector<T> DenseMatrix<T>::column(std::size_t c) const {
  std::vector<T> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

template <class T>
std::vector<T> DenseMatrix<T>::row(std::size_t r) const {
  return std::vector<T>(data_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
                        data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_));
}

template <class T>
DenseMatrix<T> DenseMatrix<T>::transpose() const {
  DenseMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

template <class T>
DenseMatrix<T> DenseMatrix<T>::select_columns(std::span<const std::size_t> idx) const {
  DenseMatrix out(rows_, idx.size());
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t k = 0; k < idx.size(); ++k) out(r, k) = (*this)(r, idx[k]);
  return out;
}

template class DenseMatrix<BigInt>;
template class DenseMatrix<Rational>;

namespace {

template <class T>
DenseMatrix<T> multiply(const DenseMatrix<T>& a, const DenseMatrix<T>& b) {
  if (a.cols() != b.rows()) throw Error(ErrorCode::InvalidArgument, "matrix shape mismatch");
  DenseMatrix<T> out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      if (a(i, k) == 0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += a(i, k) * b(k, j);
    }
  return out;
}

template <class T>
std::vector<T> multiply(const DenseMatrix<T>& a, const std::vector<T>& v) {
  if (a.cols() != v.size()) throw Error(ErrorCode::InvalidArgument, "matrix-vector shape mismatch");
  std::vector<T> out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) out[i] += a(i, k) * v[k];
  return out;
}

}  // namespace

IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) { return multiply(a, b); }
RatMatrix operator*(const RatMatrix& a, const RatMatrix& b) { return multiply(a, b); }
IntVector operator*(const IntMatrix& a, const IntVector& v) { return multiply(a, v); }
RatVector operator*(const RatMatrix& a, const RatVector& v) { return multiply(a, v); }

RatMatrix to_rational(const IntMatrix& m) {
  RatMatrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = Rational(m(i, j));
  return out;
}

RatVector to_rational(const IntVector& v) {
  RatVector out;
  out.reserve(v.size());
  for (const auto& x : v) out.emplace_back(x);
  return out;
}

// ---------------------------------------------------------------------------
// Scalars

BigInt floor_rational(const Rational& q) {
  const BigInt num = mp::numerator(q);
  const BigInt den = mp::denominator(q);  // always positive
  BigInt quo = num / den;
  if (num % den != 0 && num < 0) quo -= 1;
  return quo;
}

Rational frac(const Rational& q) { return q - Rational(floor_rational(q)); }

bool is_integer(const Rational& q) { return mp::denominator(q) == 1; }

long long to_ll(const BigInt& x) {
  if (x > std::numeric_limits<long long>::max() || x < std::numeric_limits<long long>::min())
    throw Error(ErrorCode::InvalidArgument, "integer does not fit in 64 bits");
  return x.convert_to<long long>();
}

double to_double(const Rational& q) { return q.convert_to<double>(); }

cplx unit_phase(const Rational& q) {
  double f = to_double(frac(q));
  if (f > 0.5) f -= 1.0;
  if (f == 0.0) return {1.0, 0.0};
  if (f == 0.5) return {-1.0, 0.0};
  if (f == 0.25) return {0.0, -1.0};
  if (f == -0.25) return {0.0, 1.0};
  const double angle = -2.0 * std::numbers::pi * f;
  return {std::cos(angle), std::sin(angle)};
}

// ---------------------------------------------------------------------------
// Determinant, inverse, rank

BigInt determinant(const IntMatrix& m) {
  const std::size_t n = m.rows();
  if (n != m.cols()) throw Error(ErrorCode::InvalidArgument, "determinant of a non-square matrix");
  if (n == 0) return BigInt(1);
  // Bareiss fraction-free elimination.
  IntMatrix a = m;
  BigInt sign = 1;
  BigInt prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a(k, k) == 0) {
      std::size_t swap = k + 1;
      while (swap < n && a(swap, k) == 0) ++swap;
      if (swap == n) return BigInt(0);
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(swap, j));
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) = (a(i, j) * a(k, k) - a(i, k) * a(k, j)) / prev;
      a(i, k) = 0;
    }
    prev = a(k, k);
  }
  return sign * a(n - 1, n - 1);
}

RatMatrix inverse(const IntMatrix& m) {
  const std::size_t n = m.rows();
  if (n != m.cols()) throw Error(ErrorCode::InvalidArgument, "inverse of a non-square matrix");
  RatMatrix a = to_rational(m);
  RatMatrix inv = RatMatrix::identity(n);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && a(piv, col) == 0) ++piv;
    if (piv == n) throw Error(ErrorCode::SingularModulus, "matrix is singular");
    if (piv != col)
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(a(piv, j), a(col, j));
        std::swap(inv(piv, j), inv(col, j));
      }
    const Rational p = a(col, col);
    for (std::size_t j = 0; j < n; ++j) {
      a(col, j) /= p;
      inv(col, j) /= p;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == col || a(i, col) == 0) continue;
      const Rational f = a(i, col);
      for (std::size_t j = 0; j < n; ++j) {
        a(i, j) -= f * a(col, j);
        inv(i, j) -= f * inv(col, j);
      }
    }
  }
  return inv;
}

std::size_t rank(const IntMatrix& m) {
  RatMatrix a = to_rational(m);
  std::size_t r = 0;
  for (std::size_t col = 0; col < a.cols() && r < a.rows(); ++col) {
    std::size_t piv = r;
    while (piv < a.rows() && a(piv, col) == 0) ++piv;
    if (piv == a.rows()) continue;
    for (std::size_t j = 0; j < a.cols(); ++j) std::swap(a(piv, j), a(r, j));
    for (std::size_t i = r + 1; i < a.rows(); ++i) {
      if (a(i, col) == 0) continue;
      const Rational f = a(i, col) / a(r, col);
      for (std::size_t j = col; j < a.cols(); ++j) a(i, j) -= f * a(r, j);
    }
    ++r;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Smith normal form

std::vector<BigInt> SnfDecomposition::diagonal() const {
  std::vector<BigInt> d;
  for (std::size_t i = 0; i < std::min(D.rows(), D.cols()); ++i) d.push_back(D(i, i));
  return d;
}

namespace {

struct SnfWork {
  IntMatrix D, P, Q;

  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t j = 0; j < D.cols(); ++j) std::swap(D(a, j), D(b, j));
    for (std::size_t j = 0; j < P.cols(); ++j) std::swap(P(a, j), P(b, j));
  }
  void swap_cols(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t i = 0; i < D.rows(); ++i) std::swap(D(i, a), D(i, b));
    for (std::size_t i = 0; i < Q.rows(); ++i) std::swap(Q(i, a), Q(i, b));
  }
  // row_dst += f * row_src
  void add_row(std::size_t dst, std::size_t src, const BigInt& f) {
    for (std::size_t j = 0; j < D.cols(); ++j) D(dst, j) += f * D(src, j);
    for (std::size_t j = 0; j < P.cols(); ++j) P(dst, j) += f * P(src, j);
  }
  void add_col(std::size_t dst, std::size_t src, const BigInt& f) {
    for (std::size_t i = 0; i < D.rows(); ++i) D(i, dst) += f * D(i, src);
    for (std::size_t i = 0; i < Q.rows(); ++i) Q(i, dst) += f * Q(i, src);
  }
  void negate_row(std::size_t r) {
    for (std::size_t j = 0; j < D.cols(); ++j) D(r, j) = -D(r, j);
    for (std::size_t j = 0; j < P.cols(); ++j) P(r, j) = -P(r, j);
  }
};

}  // namespace

SnfDecomposition smith_normal_form(const IntMatrix& m) {
  const std::size_t R = m.rows();
  const std::size_t C = m.cols();
  SnfWork w{m, IntMatrix::identity(R), IntMatrix::identity(C)};

  for (std::size_t t = 0; t < std::min(R, C); ++t) {
    // Smallest nonzero pivot of the trailing block.
    auto place_pivot = [&]() -> bool {
      std::size_t bi = R, bj = C;
      BigInt best;
      for (std::size_t i = t; i < R; ++i)
        for (std::size_t j = t; j < C; ++j) {
          if (w.D(i, j) == 0) continue;
          BigInt v = mp::abs(w.D(i, j));
          if (bi == R || v < best) {
            best = v;
            bi = i;
            bj = j;
          }
        }
      if (bi == R) return false;
      w.swap_rows(t, bi);
      w.swap_cols(t, bj);
      return true;
    };
    if (!place_pivot()) break;

    for (;;) {
      bool dirty = false;
      // Rows first.
      for (std::size_t i = t + 1; i < R; ++i) {
        if (w.D(i, t) == 0) continue;
        const BigInt q = w.D(i, t) / w.D(t, t);
        if (q != 0) w.add_row(i, t, -q);
        if (w.D(i, t) != 0) dirty = true;
      }
      if (dirty) {
        std::size_t bi = t;
        for (std::size_t i = t + 1; i < R; ++i)
          if (w.D(i, t) != 0 && mp::abs(w.D(i, t)) < mp::abs(w.D(bi, t))) bi = i;
        w.swap_rows(t, bi);
        continue;
      }
      // Then columns.
      for (std::size_t j = t + 1; j < C; ++j) {
        if (w.D(t, j) == 0) continue;
        const BigInt q = w.D(t, j) / w.D(t, t);
        if (q != 0) w.add_col(j, t, -q);
        if (w.D(t, j) != 0) dirty = true;
      }
      if (dirty) {
        std::size_t bj = t;
        for (std::size_t j = t + 1; j < C; ++j)
          if (w.D(t, j) != 0 && mp::abs(w.D(t, j)) < mp::abs(w.D(t, bj))) bj = j;
        w.swap_cols(t, bj);
        continue;
      }
      // Divisibility: fold an offending row into the pivot row and repeat.
      bool folded = false;
      for (std::size_t i = t + 1; i < R && !folded; ++i)
        for (std::size_t j = t + 1; j < C; ++j)
          if (w.D(i, j) % w.D(t, t) != 0) {
            w.add_row(t, i, BigInt(1));
            folded = true;
            break;
          }
      if (!folded) break;
    }
    if (w.D(t, t) < 0) w.negate_row(t);
  }
  return {std::move(w.P), std::move(w.D), std::move(w.Q)};
}

// ---------------------------------------------------------------------------
// Kernel

namespace {

BigInt dot(const IntVector& a, const IntVector& b) {
  BigInt s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

BigInt round_div(const BigInt& num, const BigInt& den) {
  // nearest integer to num/den, den > 0, ties away from zero
  const BigInt twice = 2 * num;
  BigInt q = (twice + (num >= 0 ? den : BigInt(-den))) / (2 * den);
  return q;
}

}  // namespace

std::vector<IntVector> kernel_basis(const IntMatrix& a) {
  const SnfDecomposition snf = smith_normal_form(a);
  std::size_t rk = 0;
  for (const auto& d : snf.diagonal())
    if (d != 0) ++rk;
  if (rk < a.rows()) throw Error(ErrorCode::RankDeficient, "A does not have full row rank");

  std::vector<IntVector> basis;
  for (std::size_t j = rk; j < a.cols(); ++j) basis.push_back(snf.Q.column(j));

  // Pairwise size reduction in the Euclidean norm until nothing improves.
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < basis.size(); ++i)
      for (std::size_t j = 0; j < basis.size(); ++j) {
        if (i == j) continue;
        const BigInt nj = dot(basis[j], basis[j]);
        const BigInt mu = round_div(dot(basis[i], basis[j]), nj);
        if (mu == 0) continue;
        IntVector cand = basis[i];
        for (std::size_t k = 0; k < cand.size(); ++k) cand[k] -= mu * basis[j][k];
        if (dot(cand, cand) < dot(basis[i], basis[i])) {
          basis[i] = std::move(cand);
          changed = true;
        }
      }
  }
  for (auto& v : basis) {
    auto it = std::find_if(v.begin(), v.end(), [](const BigInt& x) { return x != 0; });
    if (it != v.end() && *it < 0)
      for (auto& x : v) x = -x;
  }
  std::stable_sort(basis.begin(), basis.end(), [](const IntVector& x, const IntVector& y) {
    const BigInt nx = dot(x, x), ny = dot(y, y);
    if (nx != ny) return nx < ny;
    return x > y;
  });
  return basis;
}

// ---------------------------------------------------------------------------
// Quotient groups

QuotientGroup::QuotientGroup(IntMatrix modulus) : modulus_(std::move(modulus)) {
  if (modulus_.rows() != modulus_.cols() || modulus_.rows() == 0)
    throw Error(ErrorCode::InvalidArgument, "quotient modulus must be square");
  if (determinant(modulus_) == 0) throw Error(ErrorCode::SingularModulus, "det(modulus) = 0");
  inverse_ = inverse(modulus_);
  snf_ = smith_normal_form(modulus_);
  invariants_ = snf_.diagonal();

  BigInt order = 1;
  for (const auto& d : invariants_) order *= d;
  if (order > 10'000'000) throw Error(ErrorCode::InvalidArgument, "quotient group too large to enumerate");
  order_ = static_cast<std::size_t>(to_ll(order));

  // P^{-1} is integral because P is unimodular.
  const RatMatrix p_inv_rat = inverse(snf_.P);
  IntMatrix p_inv(p_inv_rat.rows(), p_inv_rat.cols());
  for (std::size_t i = 0; i < p_inv.rows(); ++i)
    for (std::size_t j = 0; j < p_inv.cols(); ++j) p_inv(i, j) = mp::numerator(p_inv_rat(i, j));

  const std::size_t n = modulus_.rows();
  IntVector y(n, 0);
  reps_.reserve(order_);
  for (std::size_t count = 0; count < order_; ++count) {
    reps_.push_back(reduce(p_inv * y));
    for (std::size_t i = 0; i < n; ++i) {  // odometer over the SNF box
      y[i] += 1;
      if (y[i] < invariants_[i]) break;
      y[i] = 0;
    }
  }
  std::sort(reps_.begin(), reps_.end());
  for (std::size_t i = 0; i < reps_.size(); ++i) index_.emplace(class_key(reps_[i]), i);
}

std::vector<BigInt> QuotientGroup::class_key(const IntVector& v) const {
  IntVector y = snf_.P * v;
  for (std::size_t i = 0; i < y.size(); ++i) {
    y[i] %= invariants_[i];
    if (y[i] < 0) y[i] += invariants_[i];
  }
  return y;
}

bool QuotientGroup::equivalent(const IntVector& a, const IntVector& b) const {
  return class_key(a) == class_key(b);
}

IntVector QuotientGroup::reduce(const IntVector& v) const {
  const RatVector t = inverse_ * to_rational(v);
  IntVector fl(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) fl[i] = floor_rational(t[i]);
  const IntVector shift = modulus_ * fl;
  IntVector out = v;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= shift[i];
  return out;
}

std::size_t QuotientGroup::index_of(const IntVector& v) const { return index_.at(class_key(v)); }

QuotientGroup quotient_representatives(const IntMatrix& modulus) { return QuotientGroup(modulus); }

// ---------------------------------------------------------------------------
// Pairing and characters

Rational pairing(const IntVector& v, const IntVector& w, const RatMatrix& a_sigma_inv) {
  const RatVector aw = a_sigma_inv * to_rational(w);
  Rational s = 0;
  for (std::size_t i = 0; i < v.size(); ++i) s += Rational(v[i]) * aw[i];
  return frac(s);
}

Rational pairing(const IntVector& v, const IntVector& w, const IntMatrix& a_sigma) {
  if (determinant(a_sigma) == 0) throw Error(ErrorCode::SingularModulus, "det A_sigma = 0");
  return pairing(v, w, inverse(a_sigma));
}

CharacterMatrix character_matrix(const IntMatrix& a_sigma, const IntMatrix& a_sigmabar,
                                 std::span<const cplx> c, const std::optional<RatVector>& c_exact,
                                 std::span<const IntVector> k_tilde_reps,
                                 std::span<const IntVector> kb_reps) {
  const QuotientGroup cols(a_sigma);
  const QuotientGroup rows(a_sigma.transpose());
  const std::size_t r = cols.order();

  auto check_complete = [r](const QuotientGroup& g, std::span<const IntVector> vs, const char* what) {
    if (vs.size() != r)
      throw Error(ErrorCode::IncompleteRepresentatives,
                  std::string(what) + ": expected " + std::to_string(r) + " representatives");
    std::vector<std::vector<BigInt>> keys;
    for (const auto& v : vs) keys.push_back(g.class_key(v));
    std::sort(keys.begin(), keys.end());
    if (std::adjacent_find(keys.begin(), keys.end()) != keys.end())
      throw Error(ErrorCode::IncompleteRepresentatives, std::string(what) + ": repeated class");
  };

  std::vector<IntVector> images;
  for (const auto& k : kb_reps) images.push_back(a_sigmabar * k);
  check_complete(cols, images, "A_sigmabar k(j)");
  check_complete(rows, k_tilde_reps, "k~(i)");

  const RatMatrix inv = inverse(a_sigma);
  CharacterMatrix out;
  out.r = r;
  out.chars.resize(r * r);
  out.char_phase.resize(r * r);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j) {
      out.char_phase[i * r + j] = pairing(k_tilde_reps[i], images[j], inv);
      out.chars[i * r + j] = unit_phase(out.char_phase[i * r + j]);
    }

  out.diag.resize(r);
  const std::size_t n = a_sigma.rows();
  for (std::size_t i = 0; i < r; ++i) {
    if (c_exact) {
      const RatVector ac = inv * *c_exact;
      Rational s = 0;
      for (std::size_t l = 0; l < n; ++l) s += Rational(k_tilde_reps[i][l]) * ac[l];
      out.diag[i] = unit_phase(s);
    } else {
      cplx s = 0;
      for (std::size_t l = 0; l < n; ++l) {
        cplx acl = 0;
        for (std::size_t m = 0; m < n; ++m) acl += to_double(inv(l, m)) * c[m];
        s += k_tilde_reps[i][l].convert_to<double>() * acl;
      }
      out.diag[i] = std::exp(cplx(0, -2.0 * std::numbers::pi) * s);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sigma-bar representatives

std::vector<std::size_t> complement(std::span<const std::size_t> sigma, std::size_t n_cols) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < n_cols; ++j)
    if (std::find(sigma.begin(), sigma.end(), j) == sigma.end()) out.push_back(j);
  return out;
}

std::vector<IntVector> sigmabar_representatives(const IntMatrix& a, std::span<const std::size_t> sigma,
                                                long bound) {
  const IntMatrix a_sigma = a.select_columns(sigma);
  const auto comp = complement(sigma, a.cols());
  const IntMatrix a_bar = a.select_columns(comp);
  const QuotientGroup group(a_sigma);
  const std::size_t r = group.order();

  std::vector<IntVector> found;
  std::vector<std::vector<BigInt>> seen;
  for (long deg = 0; deg <= bound && found.size() < r; ++deg) {
    for_each_composition(deg, comp.size(), [&](std::span<const long> m) {
      if (found.size() == r) return;
      IntVector mv(m.begin(), m.end());
      auto key = group.class_key(a_bar * mv);
      if (std::find(seen.begin(), seen.end(), key) != seen.end()) return;
      seen.push_back(std::move(key));
      found.push_back(std::move(mv));
    });
    if (comp.empty()) break;
  }
  if (found.size() < r)
    throw Error(ErrorCode::RepresentativesNotFound,
                "only " + std::to_string(found.size()) + " of " + std::to_string(r) +
                    " classes reached with |m| <= " + std::to_string(bound));
  return found;
}

}  // namespace gkz
