#include "csslab/evolution.hpp"

#include <cmath>
#include <stdexcept>

#include "csslab/parallel.hpp"

namespace csslab {

const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::completed: return "completed";
    case RunStatus::blowup_underresolved: return "blowup_underresolved";
    case RunStatus::instability_detected: return "instability_detected";
  }
  return "unknown";
}

namespace {

// Precomputed per-grid stencils and scratch buffers for the stepper.
struct Stepper {
  const RadialGrid& g;
  int m;
  int n;
  std::vector<double> d1l, d1c, d1r;  // first-derivative stencil, interior
  std::vector<double> d2l, d2c, d2r;  // second-derivative stencil, interior
  std::vector<double> inv_r;
  std::vector<double> u2, ath, at;
  std::vector<Complex> k, acc, tmp;

  Stepper(const RadialGrid& grid, int m_in)
      : g(grid), m(m_in), n(grid.n) {
    d1l.assign(n, 0.0); d1c.assign(n, 0.0); d1r.assign(n, 0.0);
    d2l.assign(n, 0.0); d2c.assign(n, 0.0); d2r.assign(n, 0.0);
    inv_r.assign(n, 0.0);
    for (int i = 1; i + 1 < n; ++i) {
      const double h1 = g.nodes[i] - g.nodes[i - 1];
      const double h2 = g.nodes[i + 1] - g.nodes[i];
      d1l[i] = -h2 / (h1 * (h1 + h2));
      d1c[i] = (h2 - h1) / (h1 * h2);
      d1r[i] = h1 / (h2 * (h1 + h2));
      d2l[i] = 2.0 / (h1 * (h1 + h2));
      d2c[i] = -2.0 / (h1 * h2);
      d2r[i] = 2.0 / (h2 * (h1 + h2));
      inv_r[i] = 1.0 / g.nodes[i];
    }
    inv_r[n - 1] = 1.0 / g.nodes[n - 1];
    u2.assign(n, 0.0);
    ath.assign(n, 0.0);
    at.assign(n, 0.0);
    k.assign(n, Complex{});
    acc.assign(n, Complex{});
    tmp.assign(n, Complex{});
  }

  void rhs_into(const std::vector<Complex>& u, std::vector<Complex>& out) {
    const Complex* uv = u.data();
    double* u2p = u2.data();
    par::for_each(static_cast<std::size_t>(n),
                  [=](std::size_t i) { u2p[i] = std::norm(uv[i]); });

    // gauge potentials: prefix then suffix trapezoid, sequential by design
    double acc_th = 0.0;
    double prev = 0.0;
    ath[0] = 0.0;
    for (int i = 1; i < n; ++i) {
      const double cur = u2[i] * g.nodes[i];
      acc_th += 0.5 * (prev + cur) * (g.nodes[i] - g.nodes[i - 1]);
      ath[i] = -0.5 * acc_th;
      prev = cur;
    }
    double acc_t = 0.0;
    double next = (m + ath[n - 1]) * u2[n - 1] * inv_r[n - 1];
    at[n - 1] = 0.0;
    for (int i = n - 2; i >= 0; --i) {
      const double cur = i == 0 ? 0.0 : (m + ath[i]) * u2[i] * inv_r[i];
      acc_t += 0.5 * (cur + next) * (g.nodes[i + 1] - g.nodes[i]);
      at[i] = -acc_t;
      next = cur;
    }

    const double* athp = ath.data();
    const double* atp = at.data();
    const double* irp = inv_r.data();
    const double* c1l = d1l.data(); const double* c1c = d1c.data();
    const double* c1r = d1r.data(); const double* c2l = d2l.data();
    const double* c2c = d2c.data(); const double* c2r = d2r.data();
    const double mm = static_cast<double>(m);
    Complex* o = out.data();
    par::for_each(static_cast<std::size_t>(n - 2), [=](std::size_t kk) {
      const std::size_t i = kk + 1;
      const Complex lap =
          c2l[i] * uv[i - 1] + c2c[i] * uv[i] + c2r[i] * uv[i + 1] +
          irp[i] * (c1l[i] * uv[i - 1] + c1c[i] * uv[i] + c1r[i] * uv[i + 1]);
      const double vr = (mm + athp[i]) * irp[i];
      const Complex bracket = lap + (u2p[i] - vr * vr - atp[i]) * uv[i];
      o[i] = Complex{-bracket.imag(), bracket.real()};  // i * bracket
    });
    o[0] = Complex{};
    o[n - 1] = Complex{};
  }

  void step(std::vector<Complex>& u, double dt) {
    Complex* up = u.data();
    Complex* kp = k.data();
    Complex* ap = acc.data();
    Complex* tp = tmp.data();
    const std::size_t nn = static_cast<std::size_t>(n);

    rhs_into(u, k);
    par::for_each(nn, [=](std::size_t i) {
      ap[i] = up[i] + (dt / 6.0) * kp[i];
      tp[i] = up[i] + (dt / 2.0) * kp[i];
    });
    rhs_into(tmp, k);
    par::for_each(nn, [=](std::size_t i) {
      ap[i] += (dt / 3.0) * kp[i];
      tp[i] = up[i] + (dt / 2.0) * kp[i];
    });
    rhs_into(tmp, k);
    par::for_each(nn, [=](std::size_t i) {
      ap[i] += (dt / 3.0) * kp[i];
      tp[i] = up[i] + dt * kp[i];
    });
    rhs_into(tmp, k);
    par::for_each(nn, [=](std::size_t i) { up[i] = ap[i] + (dt / 6.0) * kp[i]; });
    u[0] = Complex{};  // the boundary value is untouched: every k vanishes there
  }
};

bool all_finite(const std::vector<Complex>& v) {
  for (const auto& z : v) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

}  // namespace

EquivariantField rhs(const EquivariantField& u) {
  require_valid(u);
  Stepper st(*u.grid, u.m);
  EquivariantField out = make_field(u.m, u.grid);
  st.rhs_into(u.values, out.values);
  if (!all_finite(out.values))
    throw std::runtime_error("rhs: non-finite intermediate values");
  return out;
}

double cfl_dt(const RadialGrid& grid, double c_cfl) {
  const double h = grid.min_spacing();
  return c_cfl * h * h;
}

EquivariantField step_rk4(const EquivariantField& u, double dt) {
  require_valid(u);
  if (std::abs(dt) > cfl_dt(*u.grid) * (1.0 + 1e-12))
    throw std::invalid_argument("step_rk4: dt exceeds the cfl step");
  Stepper st(*u.grid, u.m);
  EquivariantField out = u;
  st.step(out.values, dt);
  if (!all_finite(out.values))
    throw std::runtime_error("step_rk4: instability detected");
  return out;
}

TrajectoryRecord evolve(const EvolutionConfig& config,
                        const EquivariantField& u0) {
  require_valid(u0);
  if (config.t_end <= config.t_start)
    throw std::invalid_argument("evolve: need t_end > t_start");
  const auto& g = *u0.grid;

  const double dt_req =
      config.dt > 0.0 ? config.dt : cfl_dt(g, config.c_cfl);
  const double horizon = config.t_end - config.t_start;
  const long steps = std::max(1L, static_cast<long>(std::ceil(horizon / dt_req)));
  const double dt = horizon / static_cast<double>(steps);
  const long every =
      config.monitor_every > 0
          ? config.monitor_every
          : std::max(1L, steps / 200);

  std::vector<CutoffFamily> cutoffs;
  cutoffs.reserve(config.cutoff_radii.size());
  for (double R : config.cutoff_radii) cutoffs.push_back(make_cutoffs(g, R));

  std::optional<ProfilePair> profiles;
  SymmetryParams fit_guess = config.fit_guess;
  if (config.fit_modulation) profiles = make_profiles(u0.m, u0.grid);

  TrajectoryRecord rec;
  rec.dt_used = dt;
  rec.status = RunStatus::completed;

  // The rhs vanishes at both ends, so the origin stays pinned at zero and
  // the outer node keeps its initial sample (homogeneous Dirichlet for
  // data vanishing at r_max; clipping a slowly decaying tail to zero would
  // inject a grid-scale kink instead).
  EquivariantField u = u0;
  u.values[0] = Complex{};
  Stepper st(g, u0.m);

  auto monitor = [&](double t) -> bool {
    if (!all_finite(u.values)) {
      rec.status = RunStatus::instability_detected;
      rec.message = "non-finite field values at t = " + std::to_string(t);
      return false;
    }
    MonitorRow row;
    row.t = t;
    row.report = conserved_report(u);
    for (double R : config.tail_radii) row.tail_mass.push_back(tail_mass(u, R));
    for (const auto& c : cutoffs)
      row.localized_virial.push_back(localized_virial(u, c));
    if (profiles) {
      try {
        ModulationFit fit = decompose(u, fit_guess, *profiles,
                                      DecomposeOptions{config.newton_tol});
        if (fit.converged) {
          fit_guess.lambda = fit.lambda;
          fit_guess.gamma = fit.gamma;
        }
        row.fit = std::move(fit);
      } catch (const std::exception&) {
        row.fit.reset();
      }
    }
    const bool fit_ok = row.fit && row.fit->converged;
    const double core = fit_ok ? row.fit->lambda : 0.0;
    rec.rows.push_back(std::move(row));
    if (config.store_snapshots) rec.snapshots.emplace_back(t, u);
    if (fit_ok) {
      int inside = 0;
      for (int i = 1; i < g.n && g.nodes[i] <= core; ++i) ++inside;
      if (inside < config.min_core_nodes) {
        rec.status = RunStatus::blowup_underresolved;
        rec.message = "core scale under-resolved at t = " + std::to_string(t);
        return false;
      }
    }
    return true;
  };

  if (!monitor(config.t_start)) return rec;
  for (long s = 1; s <= steps; ++s) {
    st.step(u.values, dt);
    rec.steps_taken = s;
    if (s % every == 0 || s == steps) {
      const double t = config.t_start + dt * static_cast<double>(s);
      if (!monitor(t)) return rec;
    }
  }
  return rec;
}

}  // namespace csslab
