#pragma once

#include <vector>

#include "csslab/radial_grid.hpp"

namespace csslab {

/// Sampled gauge potentials of a field snapshot. a_theta is nonincreasing
/// with a_theta[0] == 0 and a_theta[n-1] == -mass/(4 pi); a_t vanishes at
/// r_max under the domain truncation.
struct GaugeData {
  std::vector<double> a_theta;
  std::vector<double> a_t;
  double source_mass = 0.0;
};

/// A_theta[p, q](r) = -1/2 int_0^r Re(conj(p) q) r' dr', prefix trapezoid.
std::vector<double> a_theta_bilinear(const EquivariantField& p,
                                     const EquivariantField& q);

/// A_theta[u] = a_theta_bilinear(u, u); shares its code path, so the two
/// agree bit for bit.
std::vector<double> a_theta(const EquivariantField& u);

/// A_t[u](r) = -int_r^{r_max} (m + A_theta[u]) |u|^2 dr'/r', suffix
/// trapezoid with the origin convention |u|^2/r -> 0.
std::vector<double> a_t(const EquivariantField& u);

GaugeData gauge_data(const EquivariantField& u);

/// Neglected-tail bound for the truncated A_t integral,
/// |m + A_theta(r_max)| * tail_sample-based estimate / r_max.
double a_t_truncation_bound(const EquivariantField& u);

/// D_u f = d_dr f - ((m + A_theta[u])/r) f.
EquivariantField covariant_D(const EquivariantField& background,
                             const EquivariantField& f);

/// L_Q eps = D_Q eps - (2 A_theta[Q, eps]/r) Q with Q cached per grid.
class LinearizedLQ {
 public:
  LinearizedLQ(int m, GridPtr grid);

  EquivariantField apply(const EquivariantField& eps) const;

  const EquivariantField& vortex() const { return q_; }

 private:
  EquivariantField q_;
  std::vector<double> v_over_r_;  // (m + A_theta[Q])/r
};

}  // namespace csslab
