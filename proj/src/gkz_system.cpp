#include "gkz/gkz_system.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <numeric>

namespace gkz {

namespace mp = boost::multiprecision;

namespace {

void for_each_subset(std::size_t N, std::size_t k, const std::function<void(const std::vector<std::size_t>&)>& f) {
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  if (k > N) return;
  for (;;) {
    f(idx);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == N - k + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace

GkzSystem build_system(IntMatrix A, std::vector<cplx> c, std::optional<RatVector> c_exact) {
  if (A.rows() == 0 || A.cols() == 0) throw Error(ErrorCode::InvalidArgument, "A is empty");
  if (c.size() != A.rows()) throw Error(ErrorCode::InvalidArgument, "c must have one entry per row of A");
  if (c_exact && c_exact->size() != A.rows()) throw Error(ErrorCode::InvalidArgument, "exact c has wrong length");
  if (A.rows() >= A.cols()) throw Error(ErrorCode::InvalidArgument, "need n < N");
  if (rank(A) < A.rows()) throw Error(ErrorCode::RankDeficient, "A does not have full row rank");
  for (const auto& d : smith_normal_form(A).diagonal())
    if (d != 1) throw Error(ErrorCode::LatticeNotSaturated, "ZA != Z^n (invariant factor " + d.str() + ")");

  GkzSystem s;
  s.kernel = kernel_basis(A);
  s.A = std::move(A);
  s.c = std::move(c);
  s.c_exact = std::move(c_exact);
  return s;
}

GkzSystem build_system(IntMatrix A, const RatVector& c) {
  std::vector<cplx> cf;
  for (const auto& q : c) cf.emplace_back(to_double(q), 0.0);
  return build_system(std::move(A), std::move(cf), c);
}

std::pair<std::vector<long>, std::vector<long>> split_kernel_vector(const IntVector& u) {
  std::vector<long> plus(u.size(), 0), minus(u.size(), 0);
  for (std::size_t j = 0; j < u.size(); ++j) {
    const long v = static_cast<long>(to_ll(u[j]));
    if (v > 0) plus[j] = v;
    else minus[j] = -v;
  }
  return {plus, minus};
}

std::size_t Simplex::order() const { return static_cast<std::size_t>(to_ll(mp::abs(det))); }

Simplex make_simplex(const IntMatrix& A, std::vector<std::size_t> sigma) {
  std::sort(sigma.begin(), sigma.end());
  if (sigma.size() != A.rows() || std::adjacent_find(sigma.begin(), sigma.end()) != sigma.end() ||
      (!sigma.empty() && sigma.back() >= A.cols()))
    throw Error(ErrorCode::InvalidArgument, "sigma must be n distinct column indices");
  Simplex s;
  s.indices = std::move(sigma);
  s.complement = complement(s.indices, A.cols());
  s.a_sigma = A.select_columns(s.indices);
  s.a_sigmabar = A.select_columns(s.complement);
  s.det = determinant(s.a_sigma);
  if (s.det == 0) throw Error(ErrorCode::SingularSimplex, "det A_sigma = 0");
  s.inv = inverse(s.a_sigma);
  return s;
}

std::vector<Simplex> all_simplices(const IntMatrix& A) {
  std::vector<Simplex> out;
  for_each_subset(A.cols(), A.rows(), [&](const std::vector<std::size_t>& idx) {
    if (determinant(A.select_columns(idx)) != 0) out.push_back(make_simplex(A, idx));
  });
  return out;
}

AdmissibilityReport simplex_admissible(const IntMatrix& A, const std::vector<std::size_t>& sigma) {
  const Simplex s = make_simplex(A, sigma);
  AdmissibilityReport rep;
  for (std::size_t k = 0; k < s.complement.size(); ++k) {
    const RatVector v = s.inv * to_rational(A.column(s.complement[k]));
    Rational sum = 0;
    for (const auto& x : v) sum += x;
    rep.columns.push_back(s.complement[k]);
    rep.s.push_back(sum);
    if (sum > 1) rep.admissible = false;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Triangulations

Triangulation regular_triangulation(const IntMatrix& A, const RatVector& w) {
  const std::size_t n = A.rows(), N = A.cols();
  if (w.size() != N) throw Error(ErrorCode::InvalidArgument, "need one weight per column");
  Triangulation t;
  t.weights = w;
  bool degenerate = false;
  for_each_subset(N, n, [&](const std::vector<std::size_t>& idx) {
    const IntMatrix as = A.select_columns(idx);
    if (determinant(as) == 0) return;
    // m^T a(j) = w_j on sigma  <=>  m = A_sigma^{-T} w_sigma
    const RatMatrix inv_t = inverse(as.transpose());
    RatVector ws;
    for (auto j : idx) ws.push_back(w[j]);
    const RatVector m = inv_t * ws;
    bool lower = true, tie = false;
    for (std::size_t j = 0; j < N && lower; ++j) {
      if (std::find(idx.begin(), idx.end(), j) != idx.end()) continue;
      Rational h = 0;
      for (std::size_t i = 0; i < n; ++i) h += m[i] * Rational(A(i, j));
      if (h > w[j]) lower = false;
      else if (h == w[j]) tie = true;
    }
    if (!lower) return;
    if (tie) {
      degenerate = true;
      return;
    }
    t.simplices.push_back(make_simplex(A, idx));
  });
  if (degenerate) throw Error(ErrorCode::DegenerateWeights, "lifting heights are not generic");
  return t;
}

BigInt newton_volume(const IntMatrix& A) {
  if (rank(A) < A.rows()) throw Error(ErrorCode::RankDeficient, "A does not have full row rank");
  const std::size_t N = A.cols();
  // Heights near 1 cone every lower cell over the origin; the perturbation only
  // breaks ties, so a few deterministic variants suffice.
  for (int attempt = 1; attempt <= 16; ++attempt) {
    RatVector w(N);
    for (std::size_t j = 0; j < N; ++j) {
      const long e = static_cast<long>((j + 1) * (j + 1) * attempt + 7 * j * attempt * attempt) % 997 + 1;
      w[j] = Rational(1) + Rational(e, 1'000'000);
    }
    try {
      const Triangulation t = regular_triangulation(A, w);
      BigInt vol = 0;
      for (const auto& s : t.simplices) vol += mp::abs(s.det);
      return vol;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateWeights) throw;
    }
  }
  throw Error(ErrorCode::DegenerateWeights, "could not find generic pulling heights");
}

// ---------------------------------------------------------------------------
// Genericity

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Yes: return "Yes";
    case Verdict::No: return "No";
    case Verdict::Unknown: return "Unknown";
  }
  return "Unknown";
}

namespace {

// Shortest m >= 0 with sum_j m_j g_j == target (mod d), by BFS over residues.
std::optional<std::vector<long>> shortest_residue_witness(const std::vector<long long>& g, long long target,
                                                          long long d) {
  const auto mod = [d](long long x) { return ((x % d) + d) % d; };
  target = mod(target);
  std::vector<long long> parent(static_cast<std::size_t>(d), -2);
  std::vector<int> via(static_cast<std::size_t>(d), -1);
  std::deque<long long> queue{0};
  parent[0] = -1;
  while (!queue.empty()) {
    const long long r = queue.front();
    queue.pop_front();
    if (r == target) break;
    for (std::size_t j = 0; j < g.size(); ++j) {
      const long long nx = mod(r + g[j]);
      if (parent[static_cast<std::size_t>(nx)] != -2) continue;
      parent[static_cast<std::size_t>(nx)] = r;
      via[static_cast<std::size_t>(nx)] = static_cast<int>(j);
      queue.push_back(nx);
    }
  }
  if (parent[static_cast<std::size_t>(target)] == -2) return std::nullopt;
  std::vector<long> m(g.size(), 0);
  for (long long r = target; r != 0; r = parent[static_cast<std::size_t>(r)]) ++m[static_cast<std::size_t>(via[static_cast<std::size_t>(r)])];
  return m;
}

bool near_integer(cplx x) {
  return std::abs(x.imag()) < 1e-12 && std::abs(x.real() - std::round(x.real())) < 1e-9;
}

}  // namespace

VeryGenericReport is_very_generic(const GkzSystem& system, const Simplex& sigma, long bound) {
  const std::size_t n = system.n();
  const std::size_t nb = sigma.complement.size();
  VeryGenericReport rep;
  rep.bound = bound;

  if (system.c_exact) {
    const RatVector& c = *system.c_exact;
    const RatVector base = sigma.inv * c;
    rep.base_point_non_integral = std::none_of(base.begin(), base.end(), [](const Rational& q) { return is_integer(q); });

    // Entry i of A_sigma^{-1}(c + A_sigmabar m) is (adj_i c + adj_i A_sigmabar m) / det.
    const BigInt d = mp::abs(sigma.det);
    const long long dl = to_ll(d);
    std::optional<std::vector<long>> best;
    std::size_t best_entry = 0;
    for (std::size_t i = 0; i < n; ++i) {
      // adj row i = det * inv row i
      RatVector adj(n);
      for (std::size_t l = 0; l < n; ++l) adj[l] = Rational(sigma.det) * sigma.inv(i, l);
      Rational t = 0;
      for (std::size_t l = 0; l < n; ++l) t += adj[l] * c[l];
      if (!is_integer(t)) continue;
      std::vector<long long> g(nb);
      for (std::size_t j = 0; j < nb; ++j) {
        Rational gj = 0;
        for (std::size_t l = 0; l < n; ++l) gj += adj[l] * Rational(sigma.a_sigmabar(l, j));
        g[j] = to_ll(mp::numerator(gj) % d);
      }
      const long long target = -to_ll(mp::numerator(t) % d);
      auto m = shortest_residue_witness(g, target, dl);
      if (!m) continue;
      const auto deg = [](const std::vector<long>& v) { return std::accumulate(v.begin(), v.end(), 0L); };
      if (!best || deg(*m) < deg(*best)) {
        best = std::move(m);
        best_entry = i;
      }
    }
    if (best) {
      rep.verdict = Verdict::No;
      rep.witness = *best;
      rep.witness_entry = best_entry;
    } else {
      rep.verdict = Verdict::Yes;
    }
    return rep;
  }

  // Floating-point parameter: bounded scan only.
  std::vector<cplx> base(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = 0; l < n; ++l) base[i] += to_double(sigma.inv(i, l)) * system.c[l];
  rep.base_point_non_integral = std::none_of(base.begin(), base.end(), near_integer);

  std::vector<std::vector<double>> g(n, std::vector<double>(nb));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < nb; ++j) {
      Rational gj = 0;
      for (std::size_t l = 0; l < n; ++l) gj += sigma.inv(i, l) * Rational(sigma.a_sigmabar(l, j));
      g[i][j] = to_double(gj);
    }
  bool found = false;
  for (long deg = 0; deg <= bound && !found; ++deg) {
    for_each_composition(deg, nb, [&](std::span<const long> m) {
      if (found) return;
      for (std::size_t i = 0; i < n; ++i) {
        cplx e = base[i];
        for (std::size_t j = 0; j < nb; ++j) e += g[i][j] * static_cast<double>(m[j]);
        if (near_integer(e)) {
          found = true;
          rep.witness.assign(m.begin(), m.end());
          rep.witness_entry = i;
          return;
        }
      }
    });
    if (nb == 0) break;
  }
  rep.verdict = found ? Verdict::No : Verdict::Unknown;
  return rep;
}

NonresonanceReport is_nonresonant(const GkzSystem& system) {
  const std::size_t n = system.n(), N = system.N();
  if (n > 3) throw Error(ErrorCode::DimensionTooLarge, "face enumeration is limited to n <= 3");
  NonresonanceReport rep;
  if (!system.c_exact) {
    rep.note = "parameter is not rational; resonance is not decided";
    return rep;
  }
  const RatVector& c = *system.c_exact;

  // Candidate supporting hyperplanes through 0: normals of (n-1)-subsets.
  std::vector<IntVector> normals;
  for_each_subset(N, n - 1, [&](const std::vector<std::size_t>& idx) {
    const IntMatrix sub = system.A.select_columns(idx);  // n x (n-1)
    IntVector normal(n);
    for (std::size_t i = 0; i < n; ++i) {
      IntMatrix minor(n - 1, n - 1);
      for (std::size_t r = 0, rr = 0; r < n; ++r) {
        if (r == i) continue;
        for (std::size_t k = 0; k + 1 < n; ++k) minor(rr, k) = sub(r, k);
        ++rr;
      }
      normal[i] = ((i % 2) ? -1 : 1) * determinant(minor);
    }
    BigInt g = 0;
    for (const auto& x : normal) g = mp::gcd(g, x);
    if (g == 0) return;
    for (auto& x : normal) x /= g;
    for (int sign : {1, -1}) {
      IntVector m = normal;
      if (sign < 0)
        for (auto& x : m) x = -x;
      bool supporting = true;
      for (std::size_t j = 0; j < N && supporting; ++j) {
        BigInt h = 0;
        for (std::size_t i = 0; i < n; ++i) h += m[i] * system.A(i, j);
        if (h < 0) supporting = false;
      }
      if (supporting && std::find(normals.begin(), normals.end(), m) == normals.end()) normals.push_back(m);
    }
  });

  for (const auto& m : normals) {
    std::vector<std::size_t> face;
    for (std::size_t j = 0; j < N; ++j) {
      BigInt h = 0;
      for (std::size_t i = 0; i < n; ++i) h += m[i] * system.A(i, j);
      if (h == 0) face.push_back(j);
    }
    // c in Z^n + span(face)  <=>  trailing SNF coordinates of c are integral.
    std::size_t d = 0;
    IntMatrix P = IntMatrix::identity(n);
    if (!face.empty()) {
      const SnfDecomposition snf = smith_normal_form(system.A.select_columns(face));
      for (const auto& x : snf.diagonal())
        if (x != 0) ++d;
      P = snf.P;
    }
    const RatVector pc = to_rational(P) * c;
    bool inside = true;
    for (std::size_t i = d; i < n; ++i)
      if (!is_integer(pc[i])) inside = false;
    if (inside) {
      rep.verdict = Verdict::No;
      rep.face_columns = face;
      rep.face_normal = m;
      return rep;
    }
  }
  rep.verdict = Verdict::Yes;
  if (normals.empty()) rep.note = "origin is interior; no proper face contains it";
  return rep;
}

}  // namespace gkz
