#include "csslab/parallel.hpp"

#include <cstdlib>
#include <string>

namespace csslab::par {

namespace {

int read_env_cap() {
  int cap = 0;
#ifdef _OPENMP
  cap = omp_get_max_threads();
#else
  cap = 1;
#endif
  if (const char* env = std::getenv("CSS_LAB_THREADS")) {
    try {
      const int requested = std::stoi(env);
      if (requested >= 1) cap = std::min(cap, requested);
    } catch (...) {
      // ignore malformed values, keep the OpenMP default
    }
  }
  return std::max(1, cap);
}

int g_cap = -1;

}  // namespace

int thread_cap() {
  if (g_cap < 0) g_cap = read_env_cap();
  return g_cap;
}

void set_thread_cap(int cap) { g_cap = std::max(1, cap); }

}  // namespace csslab::par
