#pragma once

#include <array>

#include "csslab/gauge_fields.hpp"
#include "csslab/radial_grid.hpp"
#include "csslab/reference_solutions.hpp"

namespace csslab {

/// Orthogonality profiles Z1 = chi_c LambdaQ and Z2 = chi_c iQ with a
/// smoothstep cutoff chi_c supported in r <= 8. The pairing matrix of
/// (LambdaQ, iQ) against (Z1, Z2) is diagonal by construction; det_value
/// is its determinant.
struct ProfilePair {
  EquivariantField z1;
  EquivariantField z2;
  double det_value = 0.0;
};

ProfilePair make_profiles(int m, GridPtr grid);

/// Fit u = [Q + eps]_{lambda, gamma} with (eps, Z1)_r = (eps, Z2)_r = 0,
/// where [w]_{lambda,gamma}(r) = (1/lambda) e^{i gamma} w(r/lambda).
/// eps is expressed at the reference scale (lambda = 1 frame).
struct ModulationFit {
  double lambda = 1.0;
  double gamma = 0.0;
  EquivariantField eps;
  double eps_l2 = 0.0;
  double eps_h1m = 0.0;
  std::array<double, 2> orth_residuals{0.0, 0.0};
  bool converged = false;
  int iterations = 0;
};

struct DecomposeOptions {
  double newton_tol = 1e-12;
  int max_iterations = 50;
  double fd_step_rel = 1e-6;
  double lambda_divergence_factor = 1e3;  // lambda leaving this band aborts
};

ModulationFit decompose(const EquivariantField& u, SymmetryParams guess,
                        const ProfilePair& profiles,
                        const DecomposeOptions& opts = {});

/// (E[Q + eps] - E[Q]) / ||eps||_{H1m-semi}^2 after projecting eps onto the
/// orthogonal complement of {LambdaQ, iQ} w.r.t. (., Z1)_r, (., Z2)_r.
/// Subtracting the discrete E[Q] isolates the quadratic form; in the
/// continuum E[Q] = 0 and the two definitions coincide.
struct CoercivityResult {
  double ratio = 0.0;
  double projection_magnitude = 0.0;  // size of the removed component
  double eps_seminorm = 0.0;
};

CoercivityResult coercivity_ratio(const EquivariantField& eps,
                                  const ProfilePair& profiles,
                                  double seminorm_bound = 0.1);

/// min ||L_Q f||_{L2} / ||f||_{H1m-semi} over the complement of {Z1, Z2},
/// via a dense generalized symmetric eigensolve on the (Re, Im) node
/// vectors. Also reports the unrestricted minimum (near-kernel directions
/// LambdaQ, iQ present) and the restricted maximum.
struct SpectralGapResult {
  double restricted = 0.0;
  double unrestricted = 0.0;
  double upper = 0.0;
  int n = 0;
};

SpectralGapResult lq_spectral_gap(int m, GridPtr grid,
                                  const ProfilePair& profiles);

}  // namespace csslab
