#pragma once

#include <complex>
#include <cstddef>

namespace gkz {

// Kernels that have a data-parallel inner loop take an execution policy. The
// serial path is the reference implementation; the parallel path must produce
// bit-identical results because every reduction is performed in a fixed order
// after the parallel region.
enum class Exec { Serial, Parallel };

int max_threads();
void set_threads(int n);

// Reads GKZ_NUM_THREADS (if set and positive) and applies it.
void configure_threads_from_env();

// Compensated summation in a fixed order.
template <class T>
class KahanSum {
 public:
  void add(const T& x) {
    const T y = x - comp_;
    const T t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
  }
  const T& value() const { return sum_; }

 private:
  T sum_{};
  T comp_{};
};

}  // namespace gkz
