#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace csslab::par {

// Reductions are summed per fixed-size block and the block results are
// combined in index order, so totals do not depend on the thread count.
inline constexpr std::size_t kBlock = 4096;

// Loops below this size run serially; OpenMP fork/join overhead dominates
// on the grid sizes used by the evolution scenarios.
inline constexpr std::size_t kParallelGrain = 1u << 15;

// Thread cap: min(CSS_LAB_THREADS, omp_get_max_threads()), at least 1.
int thread_cap();
void set_thread_cap(int cap);

template <class F>
void for_each_serial(std::size_t n, F&& f) {
  for (std::size_t i = 0; i < n; ++i) f(i);
}

template <class F>
void for_each(std::size_t n, F&& f) {
#ifdef _OPENMP
  if (n >= kParallelGrain && thread_cap() > 1) {
    const auto nn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static) num_threads(thread_cap())
    for (std::ptrdiff_t i = 0; i < nn; ++i) f(static_cast<std::size_t>(i));
    return;
  }
#endif
  for_each_serial(n, std::forward<F>(f));
}

template <class F>
double block_sum_serial(std::size_t n, F&& term) {
  const std::size_t nblocks = (n + kBlock - 1) / kBlock;
  double total = 0.0;
  for (std::size_t b = 0; b < nblocks; ++b) {
    const std::size_t lo = b * kBlock;
    const std::size_t hi = std::min(n, lo + kBlock);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += term(i);
    total += s;
  }
  return total;
}

template <class F>
double block_sum(std::size_t n, F&& term) {
#ifdef _OPENMP
  if (n >= kParallelGrain && thread_cap() > 1) {
    const std::size_t nblocks = (n + kBlock - 1) / kBlock;
    std::vector<double> partial(nblocks, 0.0);
    const auto nb = static_cast<std::ptrdiff_t>(nblocks);
#pragma omp parallel for schedule(static) num_threads(thread_cap())
    for (std::ptrdiff_t b = 0; b < nb; ++b) {
      const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
      const std::size_t hi = std::min(n, lo + kBlock);
      double s = 0.0;
      for (std::size_t i = lo; i < hi; ++i) s += term(i);
      partial[static_cast<std::size_t>(b)] = s;
    }
    double total = 0.0;
    for (double s : partial) total += s;
    return total;
  }
#endif
  return block_sum_serial(n, std::forward<F>(term));
}

}  // namespace csslab::par
