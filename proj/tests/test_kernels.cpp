#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "csslab/evolution.hpp"
#include "csslab/parallel.hpp"
#include "csslab/radial_grid.hpp"
#include "csslab/reference_solutions.hpp"

using namespace csslab;

TEST_CASE("block_sum matches the serial path bit for bit") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (std::size_t n : {std::size_t{1}, std::size_t{4095}, std::size_t{4096},
                        std::size_t{4097}, std::size_t{1} << 17}) {
    std::vector<double> x(n);
    for (auto& v : x) v = dist(rng);
    const double* p = x.data();
    const double serial =
        par::block_sum_serial(n, [=](std::size_t i) { return p[i] * p[i]; });
    const double parallel =
        par::block_sum(n, [=](std::size_t i) { return p[i] * p[i]; });
    CHECK(serial == parallel);
  }
}

TEST_CASE("block_sum is independent of the thread cap") {
  const std::size_t n = std::size_t{1} << 18;
  std::vector<double> x(n);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (auto& v : x) v = dist(rng);
  const double* p = x.data();
  const int original = par::thread_cap();
  std::vector<double> results;
  for (int cap : {1, 2, 3, 8}) {
    par::set_thread_cap(cap);
    results.push_back(par::block_sum(n, [=](std::size_t i) { return std::sin(p[i]); }));
  }
  par::set_thread_cap(original);
  for (double r : results) CHECK(r == results.front());
}

TEST_CASE("rhs and step_rk4 are identical across thread caps") {
  const auto grid = make_grid(32.0, (1 << 16) + 1, 1.0);
  auto u = sample_field(1, grid, [](double r) {
    return Complex{r * std::exp(-0.3 * r * r), 0.2 * r * std::exp(-0.5 * r)};
  });
  const int original = par::thread_cap();

  par::set_thread_cap(1);
  const auto rhs_serial = rhs(u);
  const auto step_serial = step_rk4(u, cfl_dt(*grid));
  par::set_thread_cap(8);
  const auto rhs_parallel = rhs(u);
  const auto step_parallel = step_rk4(u, cfl_dt(*grid));
  par::set_thread_cap(original);

  CHECK(rhs_serial.values == rhs_parallel.values);
  CHECK(step_serial.values == step_parallel.values);
}

TEST_CASE("for_each covers every index exactly once") {
  const std::size_t n = (std::size_t{1} << 16) + 13;
  std::vector<int> hits(n, 0);
  int* h = hits.data();
  par::for_each(n, [=](std::size_t i) { h[i] += 1; });
  for (int v : hits) REQUIRE(v == 1);
}
