#include <random>

#include "doctest.h"
#include "gkz/gkz_system.hpp"
#include "oracles/series_oracle.hpp"
#include "support.hpp"

using namespace gkz;
using support::rats;

namespace {

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

// Saturated full-rank n x N with entries in [lo, hi].
IntMatrix random_system_matrix(std::mt19937_64& rng, std::size_t n, std::size_t N, int lo, int hi) {
  while (true) {
    const auto om = oracle::random_matrix(rng, n, N, lo, hi);
    const auto f = oracle::invariant_factors(om);
    if (std::all_of(f.begin(), f.end(), [](const oracle::Int& x) { return x == 1; })) return support::from_oracle(om);
  }
}

}  // namespace

TEST_CASE("build_system examples") {
  SUBCASE("A = (1,-1)") {
    const auto s = build_system(IntMatrix{{1, -1}}, rats({{1, 2}}));
    REQUIRE(s.kernel.size() == 1);
    CHECK(boost::multiprecision::abs(s.kernel[0][0]) == 1);
    CHECK(s.kernel[0][0] == s.kernel[0][1]);
  }
  SUBCASE("diamond") {
    const auto s = build_system(support::diamond_matrix(), rats({{1, 3}, {1, 2}}));
    CHECK(s.n() == 2);
    CHECK(s.N() == 4);
    CHECK(s.kernel.size() == 2);
    CHECK(s.c_exact.has_value());
  }
  SUBCASE("non-saturated") {
    CHECK(code_of([] { build_system(IntMatrix{{2, 0, 0}, {0, 2, 0}}, rats({{1, 2}, {1, 2}})); }) ==
          ErrorCode::LatticeNotSaturated);
  }
  SUBCASE("rank deficient") {
    CHECK(code_of([] { build_system(IntMatrix{{1, 2, 3}, {2, 4, 6}}, rats({{1, 2}, {1, 2}})); }) ==
          ErrorCode::RankDeficient);
  }
  SUBCASE("n >= N") {
    CHECK(code_of([] { build_system(IntMatrix{{1, 0}, {0, 1}}, rats({{1, 2}, {1, 2}})); }) ==
          ErrorCode::InvalidArgument);
  }
}

TEST_CASE("build_system rejects exactly the non-saturated matrices") {
  std::mt19937_64 rng(21);
  int checked = 0;
  while (checked < 40) {
    const std::size_t n = 1 + rng() % 2, N = n + 1 + rng() % 3;
    const auto om = oracle::random_matrix(rng, n, N, -3, 3);
    const auto f = oracle::invariant_factors(om);
    if (std::any_of(f.begin(), f.end(), [](const oracle::Int& x) { return x == 0; })) continue;
    ++checked;
    const bool saturated = std::all_of(f.begin(), f.end(), [](const oracle::Int& x) { return x == 1; });
    std::vector<cplx> c(n, 0.5);
    try {
      build_system(support::from_oracle(om), c);
      CHECK(saturated);
    } catch (const Error& e) {
      CHECK_FALSE(saturated);
      CHECK(e.code() == ErrorCode::LatticeNotSaturated);
    }
  }
}

TEST_CASE("split_kernel_vector") {
  const auto [plus, minus] = split_kernel_vector(support::ivec({1, 1, -2, -1}));
  CHECK(plus == std::vector<long>{1, 1, 0, 0});
  CHECK(minus == std::vector<long>{0, 0, 2, 1});
}

TEST_CASE("make_simplex") {
  const auto s = make_simplex(support::diamond_matrix(), {1, 0});
  CHECK(s.indices == std::vector<std::size_t>{0, 1});
  CHECK(s.complement == std::vector<std::size_t>{2, 3});
  CHECK(s.det == 12);
  CHECK(s.order() == 12);
  CHECK(s.inv * to_rational(s.a_sigma) == to_rational(IntMatrix::identity(2)));
  CHECK(code_of([] { make_simplex(IntMatrix{{1, 2, 0}, {2, 4, 1}}, {0, 1}); }) == ErrorCode::SingularSimplex);
  CHECK(code_of([] { make_simplex(support::diamond_matrix(), {0, 0}); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("newton_volume examples") {
  CHECK(newton_volume(IntMatrix{{5, 2}}) == 5);
  CHECK(newton_volume(support::diamond_matrix()) == 12);
  CHECK(newton_volume(IntMatrix{{1, 0, 0}, {0, 1, 0}}) == 1);
  CHECK(newton_volume(IntMatrix{{1, 0, 0, 1}, {0, 1, 0, 1}, {0, 0, 1, 1}}) == 3);
  CHECK(newton_volume(IntMatrix{{1, -1}}) == 2);
  CHECK(code_of([] { newton_volume(IntMatrix{{1, 2}, {2, 4}}); }) == ErrorCode::RankDeficient);
}

TEST_CASE("simplex_admissible examples") {
  SUBCASE("diamond") {
    const auto r = simplex_admissible(support::diamond_matrix(), {0, 1});
    CHECK(r.admissible);
    CHECK(r.s == std::vector<Rational>{Rational(7, 12), Rational(5, 6)});
  }
  SUBCASE("boundary") {
    const auto r = simplex_admissible(IntMatrix{{1, 0, -1}, {0, 1, 2}}, {0, 1});
    CHECK(r.admissible);
    CHECK(r.s == std::vector<Rational>{Rational(1)});
  }
  SUBCASE("interior above") {
    const auto r = simplex_admissible(IntMatrix{{1, 0, 3}, {0, 1, 3}}, {0, 1});
    CHECK_FALSE(r.admissible);
    CHECK(r.s == std::vector<Rational>{Rational(6)});
  }
  SUBCASE("singular") {
    CHECK(code_of([] { simplex_admissible(IntMatrix{{1, 2, 0}, {2, 4, 1}}, {0, 1}); }) ==
          ErrorCode::SingularSimplex);
  }
}

TEST_CASE("simplex_admissible agrees with floating point away from the boundary") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 40; ++trial) {
    const IntMatrix A = random_system_matrix(rng, 2, 4, -4, 4);
    for (const auto& s : all_simplices(A)) {
      const auto r = simplex_admissible(A, s.indices);
      bool all_clear = true, float_ok = true;
      for (std::size_t k = 0; k < r.columns.size(); ++k) {
        const std::size_t j = r.columns[k];
        // Cramer's rule in doubles.
        const double a = to_double(Rational(s.a_sigma(0, 0))), b = to_double(Rational(s.a_sigma(0, 1)));
        const double c = to_double(Rational(s.a_sigma(1, 0))), d = to_double(Rational(s.a_sigma(1, 1)));
        const double x = to_double(Rational(A(0, j))), y = to_double(Rational(A(1, j)));
        const double det = a * d - b * c;
        const double sum = (d * x - b * y) / det + (a * y - c * x) / det;
        if (std::abs(sum - 1.0) < 1e-9) all_clear = false;
        if (sum > 1.0) float_ok = false;
      }
      if (all_clear) CHECK(r.admissible == float_ok);
    }
  }
}

TEST_CASE("is_very_generic examples") {
  const Simplex s = make_simplex(support::diamond_matrix(), {0, 1});
  SUBCASE("diamond c = (1/3, 1/2)") {
    const auto r = is_very_generic(build_system(support::diamond_matrix(), rats({{1, 3}, {1, 2}})), s, 24);
    CHECK(r.verdict == Verdict::Yes);
    CHECK(r.base_point_non_integral == std::optional<bool>(true));
  }
  SUBCASE("diamond c = (0, 1/2)") {
    const auto r = is_very_generic(build_system(support::diamond_matrix(), rats({{0, 1}, {1, 2}})), s, 24);
    CHECK(r.verdict == Verdict::No);
    CHECK(r.witness == std::vector<long>{0, 0});
    CHECK(r.witness_entry == 0);
    CHECK(r.base_point_non_integral == std::optional<bool>(false));
  }
  SUBCASE("A = (1,-1), c = 1/2") {
    const IntMatrix A{{1, -1}};
    const auto r = is_very_generic(build_system(A, rats({{1, 2}})), make_simplex(A, {0}), 24);
    CHECK(r.verdict == Verdict::Yes);
  }
  SUBCASE("complex c gets a bounded scan") {
    const auto sys = build_system(support::diamond_matrix(), {cplx(1.0 / 3.0, 0.1), cplx(0.5, 0.0)});
    const auto r = is_very_generic(sys, s, 10);
    CHECK(r.verdict == Verdict::Unknown);
    CHECK(r.bound == 10);
  }
}

TEST_CASE("very generic Yes survives an independent brute-force scan") {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<int> num(0, 11);
  int yes = 0, no = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const IntMatrix A = random_system_matrix(rng, 2, 4, -3, 3);
    const auto simplices = all_simplices(A);
    if (simplices.empty()) continue;
    const Simplex& s = simplices[rng() % simplices.size()];
    const RatVector c{Rational(num(rng), 12), Rational(num(rng), 12)};
    const auto r = is_very_generic(build_system(A, c), s, 24);
    oracle::Problem p{support::to_oracle(A), {to_double(c[0]), to_double(c[1])}, s.indices};
    const auto inv = oracle::sigma_inverse(p);
    const auto bar = oracle::complement_of(p);
    bool integral_seen = false;
    oracle::for_each_exponent(bar.size(), 50, [&](const std::vector<long>& m) {
      for (std::size_t l = 0; l < 2; ++l) {
        oracle::Rat e = 0;
        for (std::size_t i = 0; i < 2; ++i) {
          oracle::Rat t(c[i]);
          for (std::size_t j = 0; j < bar.size(); ++j) t += oracle::Rat(p.A[i][bar[j]] * m[j]);
          e += inv[l][i] * t;
        }
        if (boost::multiprecision::denominator(e) == 1) integral_seen = true;
      }
    });
    if (r.verdict == Verdict::Yes) {
      ++yes;
      CHECK_FALSE(integral_seen);
    } else {
      ++no;
      REQUIRE(r.verdict == Verdict::No);
      // The witness is genuine.
      oracle::Rat e = 0;
      for (std::size_t i = 0; i < 2; ++i) {
        oracle::Rat t(c[i]);
        for (std::size_t j = 0; j < bar.size(); ++j) t += oracle::Rat(p.A[i][bar[j]] * r.witness[j]);
        e += inv[r.witness_entry][i] * t;
      }
      CHECK(boost::multiprecision::denominator(e) == 1);
    }
  }
  CHECK(yes > 0);
  CHECK(no > 0);
}

TEST_CASE("is_nonresonant examples") {
  SUBCASE("A = (1,-1), c = 1/2") {
    CHECK(is_nonresonant(build_system(IntMatrix{{1, -1}}, rats({{1, 2}}))).verdict == Verdict::Yes);
  }
  SUBCASE("diamond c = (1/3, 1/2)") {
    CHECK(is_nonresonant(build_system(support::diamond_matrix(), rats({{1, 3}, {1, 2}}))).verdict == Verdict::Yes);
  }
  SUBCASE("diamond c = (2, 1/2)") {
    const auto r = is_nonresonant(build_system(support::diamond_matrix(), rats({{2, 1}, {1, 2}})));
    CHECK(r.verdict == Verdict::No);
    CHECK(r.face_columns == std::vector<std::size_t>{1});
  }
  SUBCASE("float c is not decided") {
    CHECK(is_nonresonant(build_system(support::diamond_matrix(), {cplx(0.3), cplx(0.5)})).verdict ==
          Verdict::Unknown);
  }
  SUBCASE("n > 3") {
    const IntMatrix A{{1, 0, 0, 0, 1}, {0, 1, 0, 0, 1}, {0, 0, 1, 0, 1}, {0, 0, 0, 1, 1}};
    CHECK(code_of([&] { is_nonresonant(build_system(A, rats({{1, 2}, {1, 2}, {1, 2}, {1, 2}}))); }) ==
          ErrorCode::DimensionTooLarge);
  }
}

TEST_CASE("regular_triangulation examples") {
  SUBCASE("diamond, interior columns lifted") {
    const auto t = regular_triangulation(support::diamond_matrix(), rats({{0, 1}, {0, 1}, {1, 1}, {1, 1}}));
    REQUIRE(t.simplices.size() == 1);
    CHECK(t.simplices[0].indices == std::vector<std::size_t>{0, 1});
    CHECK(t.simplices[0].order() == 12);
    CHECK(simplex_admissible(support::diamond_matrix(), {0, 1}).admissible);
  }
  SUBCASE("A = (1,-1)") {
    const auto t = regular_triangulation(IntMatrix{{1, -1}}, rats({{1, 1}, {2, 1}}));
    REQUIRE(t.simplices.size() == 2);
    CHECK(t.simplices[0].indices == std::vector<std::size_t>{0});
    CHECK(t.simplices[1].indices == std::vector<std::size_t>{1});
  }
  SUBCASE("degenerate") {
    CHECK(code_of([] { regular_triangulation(support::diamond_matrix(), RatVector(4, Rational(0))); }) ==
          ErrorCode::DegenerateWeights);
  }
}

TEST_CASE("volume additivity and rank count on random small A") {
  std::mt19937_64 rng(24);
  std::uniform_int_distribution<int> jitter(1, 999);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + rng() % 2, N = n + 1 + rng() % (5 - n);
    const IntMatrix A = random_system_matrix(rng, n, N, -3, 3);
    RatVector w(N);
    // Heights near 1 pull the origin down so every lower cell is a cone over 0.
    for (auto& x : w) x = Rational(1) + Rational(jitter(rng), 1000000);
    const auto t = regular_triangulation(A, w);
    BigInt total = 0;
    std::size_t count = 0;
    for (const auto& s : t.simplices) {
      total += boost::multiprecision::abs(s.det);
      count += sigmabar_representatives(A, s.indices, 400).size();
    }
    const long expected = oracle::newton_volume(support::to_oracle(A));
    CHECK(total == expected);
    CHECK(newton_volume(A) == expected);
    CHECK(count == static_cast<std::size_t>(expected));
  }
}
