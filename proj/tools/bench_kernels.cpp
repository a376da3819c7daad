// Compares the serial reference kernels against the OpenMP paths on the
// hot operations: rhs evaluation, planar reductions, and RK4 stepping.
// The parallel reductions use fixed-order blocking, so the outputs must
// agree bit for bit; the table reports timings and the largest deviation.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#include "csslab/evolution.hpp"
#include "csslab/parallel.hpp"
#include "csslab/radial_grid.hpp"
#include "csslab/reference_solutions.hpp"

using namespace csslab;
using clock_type = std::chrono::steady_clock;

namespace {

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

template <class F>
double time_best_of(int reps, F&& f) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) {
    const auto t0 = clock_type::now();
    f();
    best = std::min(best, seconds_since(t0));
  }
  return best;
}

}  // namespace

int main() {
  std::printf("threads available: %d\n", par::thread_cap());
  std::printf("%-10s %-14s %12s %12s %9s %12s\n", "n", "kernel", "serial_ms",
              "parallel_ms", "speedup", "max_delta");

  for (int n : {1 << 14, 1 << 16, 1 << 18, 1 << 20}) {
    const auto grid = make_grid(64.0, n + 1, 1.0);
    const auto q = soliton(1, grid);

    // planar reduction
    std::vector<double> samples(q.values.size());
    for (std::size_t i = 0; i < samples.size(); ++i)
      samples[i] = std::norm(q.values[i]);
    const double* f = samples.data();
    const double* w = grid->weights.data();
    const double* r = grid->nodes.data();
    double sum_serial = 0.0, sum_parallel = 0.0;
    const double t_red_s = time_best_of(5, [&] {
      sum_serial = par::block_sum_serial(
          samples.size(), [=](std::size_t i) { return w[i] * f[i] * r[i]; });
    });
    const double t_red_p = time_best_of(5, [&] {
      sum_parallel = par::block_sum(
          samples.size(), [=](std::size_t i) { return w[i] * f[i] * r[i]; });
    });
    std::printf("%-10d %-14s %12.3f %12.3f %8.2fx %12.3e\n", n, "block_sum",
                1e3 * t_red_s, 1e3 * t_red_p, t_red_s / t_red_p,
                std::abs(sum_serial - sum_parallel));

    // rhs evaluation, serial cap vs full cap
    const int cap = par::thread_cap();
    par::set_thread_cap(1);
    EquivariantField rhs_serial = rhs(q);
    const double t_rhs_s = time_best_of(5, [&] { rhs_serial = rhs(q); });
    par::set_thread_cap(cap);
    EquivariantField rhs_parallel = rhs(q);
    const double t_rhs_p = time_best_of(5, [&] { rhs_parallel = rhs(q); });
    double delta = 0.0;
    for (std::size_t i = 0; i < rhs_serial.values.size(); ++i)
      delta = std::max(delta,
                       std::abs(rhs_serial.values[i] - rhs_parallel.values[i]));
    std::printf("%-10d %-14s %12.3f %12.3f %8.2fx %12.3e\n", n, "rhs",
                1e3 * t_rhs_s, 1e3 * t_rhs_p, t_rhs_s / t_rhs_p, delta);

    // one RK4 step
    const double dt = cfl_dt(*grid);
    par::set_thread_cap(1);
    EquivariantField step_serial = step_rk4(q, dt);
    const double t_step_s = time_best_of(3, [&] { step_serial = step_rk4(q, dt); });
    par::set_thread_cap(cap);
    EquivariantField step_parallel = step_rk4(q, dt);
    const double t_step_p =
        time_best_of(3, [&] { step_parallel = step_rk4(q, dt); });
    delta = 0.0;
    for (std::size_t i = 0; i < step_serial.values.size(); ++i)
      delta = std::max(delta, std::abs(step_serial.values[i] -
                                       step_parallel.values[i]));
    std::printf("%-10d %-14s %12.3f %12.3f %8.2fx %12.3e\n", n, "step_rk4",
                1e3 * t_step_s, 1e3 * t_step_p, t_step_s / t_step_p, delta);
  }
  return 0;
}
