#pragma once

#include <vector>

#include "csslab/radial_grid.hpp"

namespace csslab {

/// Scalar functionals of one snapshot. energy_direct equals
/// kinetic + gauge_potential_term - quartic_term by construction.
struct ConservedReport {
  double mass = 0.0;
  double energy_direct = 0.0;
  double energy_selfdual = 0.0;
  double kinetic = 0.0;
  double gauge_potential_term = 0.0;
  double quartic_term = 0.0;
  double virial = 0.0;
  double variance = 0.0;
};

/// Cutoff family of the localized virial: chi is 1 on [0, R], 0 beyond 2R
/// (quintic smoothstep bridge), phi = chi^2 and psi = (1/r) int_0^r phi,
/// so d_dr(r psi) = phi. psi = 1 for r <= R and
/// psi = R (1 + tail_constant)/r for r >= 2R.
struct CutoffFamily {
  std::vector<double> psi;
  std::vector<double> phi;
  std::vector<double> chi;
  double R = 0.0;
  double tail_constant = 0.0;  // int_R^{2R} chi^2 dr / R, in (0, 1)
};

/// Exact bridge integral of the quintic smoothstep, int_0^1 (1-s5(x))^2 dx.
inline constexpr double kCutoffTailConstant = 181.0 / 462.0;

double mass(const EquivariantField& u);

struct EnergyTerms {
  double kinetic = 0.0;
  double gauge_potential = 0.0;
  double quartic = 0.0;
  double direct() const { return kinetic + gauge_potential - quartic; }
};

EnergyTerms energy_terms(const EquivariantField& u);
double energy_direct(const EquivariantField& u);

/// (1/2) || D_u u ||^2, nonnegative by construction.
double energy_selfdual(const EquivariantField& u);

/// int Im(conj(u) r d_r u) dx.
double virial(const EquivariantField& u);

double localized_virial(const EquivariantField& u, const CutoffFamily& cutoffs);

/// int r^2 |u|^2 dx.
double variance(const EquivariantField& u);

/// Planar mass at radii >= R; integrates r times the piecewise-linear
/// interpolant of |u|^2, which keeps the result monotone in R.
/// R >= r_max gives 0.
double tail_mass(const EquivariantField& u, double R);

CutoffFamily make_cutoffs(const RadialGrid& grid, double R);

ConservedReport conserved_report(const EquivariantField& u);

}  // namespace csslab
