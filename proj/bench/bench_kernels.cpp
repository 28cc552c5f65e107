// Serial vs OpenMP timings for the parallel kernels, with a bit-identity check.
// Usage: bench_kernels [threads] [repeats]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>

#include "gkz/mellin_barnes.hpp"
#include "gkz/series.hpp"

using namespace gkz;

namespace {

double time_best(int repeats, const std::function<void()>& f) {
  double best = 1e300;
  for (int i = 0; i < repeats; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

bool identical(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].real() != b[i].real() || a[i].imag() != b[i].imag()) return false;
  return true;
}

void report(const char* name, double serial, double parallel, bool same) {
  std::printf("%-28s serial %9.4f s   parallel %9.4f s   speedup %5.2fx   %s\n", name, serial, parallel,
              serial / parallel, same ? "bit-identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  const int threads = argc > 1 ? std::atoi(argv[1]) : max_threads();
  const int repeats = argc > 2 ? std::atoi(argv[2]) : 3;
  set_threads(threads);
  std::printf("threads %d, best of %d\n", max_threads(), repeats);

  const GkzSystem sys = build_system(IntMatrix{{4, 0, 1, 2}, {0, 3, 1, 1}}, RatVector{Rational(1, 3), Rational(1, 2)});
  const Simplex sg = make_simplex(sys.A, {0, 1});
  const std::vector<cplx> z{1.0, 1.0, 0.1, 0.05};
  bool all_same = true;

  {
    const GammaSeriesBasis basis(sys, sg);
    const std::vector<std::vector<int>> alphas{{0, 0, 0, 0}, {1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}};
    std::vector<cplx> s, p;
    auto run = [&](Exec e, std::vector<cplx>& out) {
      out.clear();
      for (const auto& v : basis.evaluate(z, alphas, {}, e)) out.push_back(v.value);
    };
    const double ts = time_best(repeats, [&] { run(Exec::Serial, s); });
    const double tp = time_best(repeats, [&] { run(Exec::Parallel, p); });
    all_same = all_same && identical(s, p);
    report("gamma series (r=12, 5 ops)", ts, tp, identical(s, p));
  }

  {
    const MbIntegral integral(sys, sg);
    const std::vector<std::vector<long>> kts{{0, 0}, {1, 0}, {0, 1}};
    const std::vector<std::vector<int>> alphas{{0, 0, 0, 0}};
    std::vector<cplx> s, p;
    auto run = [&](Exec e, std::vector<cplx>& out) {
      out.clear();
      for (const auto& v : integral.evaluate(z, kts, alphas, {false, e})) out.push_back(v.value);
    };
    const double ts = time_best(repeats, [&] { run(Exec::Serial, s); });
    const double tp = time_best(repeats, [&] { run(Exec::Parallel, p); });
    all_same = all_same && identical(s, p);
    report("mellin-barnes 2D (3 k~)", ts, tp, identical(s, p));
  }

  {
    const MbSpec spec{sys, sg, {}, {}, 1e-12};
    std::vector<cplx> s, p;
    auto run = [&](Exec e, std::vector<cplx>& out) {
      const auto r = residue_partial_sum(spec, z, 5, e);
      out = r.pieces;
      out.push_back(r.partial);
    };
    const double ts = time_best(repeats, [&] { run(Exec::Serial, s); });
    const double tp = time_best(repeats, [&] { run(Exec::Parallel, p); });
    all_same = all_same && identical(s, p);
    report("residue partial sum (M=5)", ts, tp, identical(s, p));
  }

  return all_same ? 0 : 1;
}
