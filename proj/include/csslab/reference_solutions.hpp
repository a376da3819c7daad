#pragma once

#include "csslab/radial_grid.hpp"

namespace csslab {

/// Scale/phase parameters of the symmetry group; lambda > 0, gamma taken
/// mod 2 pi.
struct SymmetryParams {
  double lambda = 1.0;
  double gamma = 0.0;
  double t = 0.0;
};

double normalize_phase(double gamma);

/// Jackiw-Pi vortex Q(r) = sqrt(8) (m+1) r^m / (1 + r^{2m+2}).
double soliton_value(int m, double r);
double soliton_derivative_value(int m, double r);

EquivariantField soliton(int m, GridPtr grid);

/// Lambda Q = r Q'(r) + Q(r), evaluated from the closed-form derivative.
EquivariantField lambda_Q(int m, GridPtr grid);

/// Resamples (1/lambda) u(r/lambda) onto u's grid by cubic interpolation.
/// Source values beyond r_max are treated as zero; see scaling_leakage.
EquivariantField apply_scaling(const EquivariantField& u, double lambda);

/// Planar mass of u beyond r_max/lambda, the part apply_scaling pushes
/// outside the domain (zero for lambda <= 1).
double scaling_leakage(const EquivariantField& u, double lambda);

EquivariantField apply_phase(const EquivariantField& u, double gamma);

/// [C u](t, r) = (1/|t|) u(-1/t, r/|t|) e^{i r^2 / 4t}; the caller supplies
/// the snapshot u(s, .) with s = -1/t.
EquivariantField pseudoconformal(const EquivariantField& u_snapshot, double s,
                                 double t);

/// S(t, r) = (1/|t|) Q(r/|t|) e^{i r^2 / 4t} for t < 0, evaluated from the
/// closed forms (no interpolation). This is the pseudoconformal image of Q
/// and satisfies the variance law d/dt var = 4 virial; the sign of the
/// exponent is fixed by that identity.
EquivariantField blowup_profile(int m, double t, GridPtr grid);

/// tilde_Q(r) = -int_r^{r_max} Q dr', suffix trapezoid; <= 0 everywhere,
/// tilde_Q(r_max) = 0.
std::vector<double> tilde_Q(int m, const RadialGrid& grid);

/// Bound on the neglected tail -int_{r_max}^inf Q dr using
/// Q <= sqrt(8)(m+1) r^{-(m+2)}.
double tilde_Q_tail_bound(int m, double r_max);

}  // namespace csslab
