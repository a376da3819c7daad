#pragma once

#include <optional>
#include <string>
#include <vector>

#include "csslab/modulation.hpp"
#include "csslab/observables.hpp"
#include "csslab/radial_grid.hpp"

namespace csslab {

enum class RunStatus { completed, blowup_underresolved, instability_detected };

const char* to_string(RunStatus s);

struct EvolutionConfig {
  int m = 1;
  double r_max = 32.0;
  int n = 2048;
  double stretch = 1.0;
  double dt = 0.0;  // <= 0 selects cfl_dt(grid, c_cfl)
  double c_cfl = 0.2;
  double t_start = 0.0;
  double t_end = 1.0;
  int monitor_every = 0;  // steps between monitor rows, 0 = auto (~200 rows)
  std::vector<double> tail_radii;
  std::vector<double> cutoff_radii;
  bool store_snapshots = false;
  bool fit_modulation = false;
  SymmetryParams fit_guess;
  double newton_tol = 1e-12;
  int min_core_nodes = 8;
};

struct MonitorRow {
  double t = 0.0;
  ConservedReport report;
  std::vector<double> tail_mass;        // one per tail radius
  std::vector<double> localized_virial; // one per cutoff radius
  std::optional<ModulationFit> fit;
};

struct TrajectoryRecord {
  std::vector<MonitorRow> rows;
  std::vector<std::pair<double, EquivariantField>> snapshots;
  RunStatus status = RunStatus::completed;
  std::string message;
  double dt_used = 0.0;
  long steps_taken = 0;
};

/// d_t u solved from the gauge-covariant flow: i [Lap_r u - ((m+A_theta)/r)^2 u
/// + |u|^2 u] - i A_t u, with the gauge potentials recomputed from u and the
/// origin/boundary values pinned to zero.
EquivariantField rhs(const EquivariantField& u);

/// c_cfl * h_min^2, explicit stability step for the Laplacian stiffness.
double cfl_dt(const RadialGrid& grid, double c_cfl = 0.2);

/// One classical 4-stage step; gauge potentials recomputed at every stage.
EquivariantField step_rk4(const EquivariantField& u, double dt);

TrajectoryRecord evolve(const EvolutionConfig& config,
                        const EquivariantField& u0);

}  // namespace csslab
