#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "csslab/observables.hpp"
#include "csslab/radial_grid.hpp"
#include "csslab/reference_solutions.hpp"

using namespace csslab;
using std::numbers::pi;

TEST_CASE("soliton closed form") {
  CHECK(soliton_value(1, 1.0) == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-14));
  CHECK(soliton_value(1, 0.0) == 0.0);
  CHECK(soliton_value(1, 1e6) < 1e-15);
  CHECK_THROWS_AS(soliton(0, make_grid(8.0, 64)), std::invalid_argument);
  const auto g = make_grid(64.0, 4096, 8.0);
  CHECK(mass(soliton(1, g)) == doctest::Approx(16.0 * pi).epsilon(1e-6));
  CHECK(soliton(2, g).values[0] == Complex{0.0, 0.0});
  CHECK(soliton(1, g).tail_sample() < 1e-4);
}

TEST_CASE("soliton derivative closed form against finite differences") {
  for (int m : {1, 2, 3}) {
    for (double r : {0.3, 1.0, 2.7}) {
      const double h = 1e-6;
      const double fd = (soliton_value(m, r + h) - soliton_value(m, r - h)) / (2 * h);
      CHECK(soliton_derivative_value(m, r) == doctest::Approx(fd).epsilon(1e-8));
    }
  }
  CHECK(soliton_derivative_value(1, 0.0) ==
        doctest::Approx(2.0 * std::sqrt(8.0)).epsilon(1e-14));
  CHECK(soliton_derivative_value(2, 0.0) == 0.0);
}

TEST_CASE("apply_scaling") {
  const auto g = make_grid(32.0, 8192, 1.0);
  const auto q = soliton(1, g);
  SUBCASE("identity at lambda = 1") {
    CHECK(apply_scaling(q, 1.0).values == q.values);
  }
  SUBCASE("preserves mass within interpolation tolerance") {
    for (double lam : {0.7, 1.6}) {
      CHECK(mass(apply_scaling(q, lam)) == doctest::Approx(mass(q)).epsilon(1e-5));
    }
  }
  SUBCASE("energy scales as 1/lambda^2 on a smooth bump") {
    auto u = sample_field(1, g, [](double r) {
      return Complex{r * std::exp(-r * r), 0.3 * r * std::exp(-1.5 * r * r)};
    });
    const double lam = 1.3;
    CHECK(energy_direct(apply_scaling(u, lam)) ==
          doctest::Approx(energy_direct(u) / (lam * lam)).epsilon(1e-4));
  }
  SUBCASE("leakage vanishes for contraction, reported for expansion") {
    CHECK(scaling_leakage(q, 0.8) == 0.0);
    const double leak = scaling_leakage(q, 2.0);
    CHECK(leak == doctest::Approx(tail_mass(q, 16.0)).epsilon(1e-12));
    CHECK(leak > 0.0);
  }
  SUBCASE("rejects nonpositive lambda") {
    CHECK_THROWS_AS(apply_scaling(q, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(apply_scaling(q, -2.0), std::invalid_argument);
  }
}

TEST_CASE("apply_phase") {
  const auto g = make_grid(32.0, 2048, 1.0);
  const auto q = soliton(1, g);
  CHECK(apply_phase(q, 0.0).values == q.values);
  const auto mq = apply_phase(q, pi);
  for (int i = 0; i < g->n; ++i)
    CHECK(mq.values[i].real() == doctest::Approx(-q.values[i].real()).epsilon(1e-14));
  // observables are invariant under a global phase
  auto u = sample_field(1, g, [](double r) {
    return Complex{r * std::exp(-r * r), 0.0} * std::polar(1.0, 0.2 * r * r);
  });
  const auto v = apply_phase(u, 1.234);
  CHECK(mass(v) == doctest::Approx(mass(u)).epsilon(1e-13));
  CHECK(energy_direct(v) == doctest::Approx(energy_direct(u)).epsilon(1e-12));
  CHECK(virial(v) == doctest::Approx(virial(u)).epsilon(1e-12));
  CHECK(variance(v) == doctest::Approx(variance(u)).epsilon(1e-13));
}

TEST_CASE("phase and scaling commute") {
  const auto g = make_grid(32.0, 2048, 1.0);
  const auto q = soliton(1, g);
  const auto a = apply_phase(apply_scaling(q, 1.7), 0.9);
  const auto b = apply_scaling(apply_phase(q, 0.9), 1.7);
  for (int i = 0; i < g->n; ++i)
    CHECK(std::abs(a.values[i] - b.values[i]) < 1e-13);
}

TEST_CASE("pseudoconformal transform") {
  const auto g = make_grid(32.0, 8192, 1.0);
  const auto q = soliton(1, g);
  SUBCASE("rejects t = 0 and mismatched snapshot times") {
    CHECK_THROWS_AS(pseudoconformal(q, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(pseudoconformal(q, 2.0, -1.0), std::invalid_argument);
  }
  SUBCASE("preserves mass") {
    const auto v = pseudoconformal(q, 2.0, -0.5);
    CHECK(mass(v) == doctest::Approx(mass(q)).epsilon(1e-4));
  }
  SUBCASE("maps the static Q to the blowup snapshot at t = -1") {
    const auto v = pseudoconformal(q, 1.0, -1.0);
    const auto s = blowup_profile(1, -1.0, g);
    double worst = 0.0;
    for (int i = 0; i < g->n; ++i)
      worst = std::max(worst, std::abs(v.values[i] - s.values[i]));
    CHECK(worst < 1e-10);
    // amplitude Q, phase e^{-i r^2/4}
    const int i_mid = g->n / 3;
    const double r = g->nodes[i_mid];
    CHECK(std::abs(v.values[i_mid] -
                   q.values[i_mid] * std::polar(1.0, -r * r / 4.0)) < 1e-10);
  }
  SUBCASE("virial flips sign under t -> -t at |t| = 1") {
    const auto back = pseudoconformal(q, 1.0, -1.0);
    const auto fwd = pseudoconformal(q, -1.0, 1.0);
    CHECK(virial(fwd) == doctest::Approx(-virial(back)).epsilon(1e-10));
  }
}

TEST_CASE("blowup profile") {
  const auto g = make_grid(32.0, 8192, 1.0);
  CHECK_THROWS_AS(blowup_profile(1, 0.0, g), std::invalid_argument);
  CHECK_THROWS_AS(blowup_profile(1, 0.5, g), std::invalid_argument);
  const auto q = soliton(1, g);
  const auto s1 = blowup_profile(1, -1.0, g);
  for (int i = 0; i < g->n; i += 97)
    CHECK(std::abs(s1.values[i]) ==
          doctest::Approx(q.values[i].real()).epsilon(1e-13));
  for (double t : {-1.0, -0.5, -0.25})
    CHECK(mass(blowup_profile(1, t, g)) == doctest::Approx(mass(q)).epsilon(1e-4));
}

TEST_CASE("lambda_Q") {
  const auto g = make_grid(64.0, 8192, 4.0);
  for (int m : {1, 2}) {
    const auto lq = lambda_Q(m, g);
    const auto q = soliton(m, g);
    CHECK(std::abs(inner_product(lq, q)) < 1e-4 * inner_product(q, q));
    CHECK(lq.values[0] == Complex{0.0, 0.0});
    // r Q' + Q = 0 exactly at r = 1 for every m; positive core, negative tail
    for (int i = 1; i < g->n; ++i) {
      if (g->nodes[i] < 0.99) CHECK(lq.values[i].real() > 0.0);
      if (g->nodes[i] > 1.01) CHECK(lq.values[i].real() < 0.0);
    }
  }
}

TEST_CASE("tilde_Q") {
  const auto g = make_grid(64.0, 8192, 1.0);
  const auto tq = tilde_Q(1, *g);
  SUBCASE("nonpositive with vanishing endpoint") {
    CHECK(tq.back() == 0.0);
    for (double v : tq) CHECK(v <= 0.0);
  }
  SUBCASE("d_dr tilde_Q = Q at second order") {
    auto defect_at = [](int n) {
      const auto gg = make_grid(64.0, n, 1.0);
      const auto t = tilde_Q(1, *gg);
      std::vector<Complex> tc(t.begin(), t.end());
      const auto d = d_dr_samples(tc, *gg);
      double worst = 0.0;
      for (int i = 0; i + 1 < gg->n; ++i)
        worst = std::max(worst,
                         std::abs(d[i].real() - soliton_value(1, gg->nodes[i])));
      return worst;
    };
    CHECK(defect_at(8192) < 2e-3);
    CHECK(defect_at(4096) / defect_at(8192) == doctest::Approx(4.0).epsilon(0.3));
  }
  SUBCASE("square-integrable in the plane, refinement-stable") {
    auto l2_at = [](int n) {
      const auto gg = make_grid(64.0, n, 1.0);
      const auto t = tilde_Q(1, *gg);
      std::vector<double> t2(gg->n);
      for (int i = 0; i < gg->n; ++i) t2[i] = t[i] * t[i];
      return integrate_planar(t2, *gg);
    };
    const double a = l2_at(4096);
    const double b = l2_at(8192);
    CHECK(std::isfinite(a));
    CHECK(a == doctest::Approx(b).epsilon(1e-3));
  }
  SUBCASE("tail bound is the closed-form envelope") {
    CHECK(tilde_Q_tail_bound(1, 64.0) ==
          doctest::Approx(std::sqrt(8.0) / (64.0 * 64.0)).epsilon(1e-12));
  }
}

TEST_CASE("normalize_phase wraps into [0, 2 pi)") {
  CHECK(normalize_phase(0.0) == 0.0);
  CHECK(normalize_phase(7.0) == doctest::Approx(7.0 - 2.0 * pi));
  CHECK(normalize_phase(-1.0) == doctest::Approx(2.0 * pi - 1.0));
}
