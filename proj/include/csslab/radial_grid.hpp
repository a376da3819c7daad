#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace csslab {

using Complex = std::complex<double>;

/// Radial nodes on [0, r_max] with composite trapezoid weights.
/// nodes[0] == 0, nodes are strictly increasing, weights are nonnegative
/// and sum to r_max.
struct RadialGrid {
  std::vector<double> nodes;
  std::vector<double> weights;
  double r_max = 0.0;
  double stretch = 1.0;
  int n = 0;

  double min_spacing() const;
};

inline constexpr int kMinGridNodes = 16;

using GridPtr = std::shared_ptr<const RadialGrid>;

/// stretch == 1 gives uniform spacing; stretch > 1 clusters nodes near the
/// origin geometrically, with node density at 0 a factor `stretch` higher
/// than at r_max.
GridPtr make_grid(double r_max, int n, double stretch = 1.0);

/// Complex radial profile u(r) of an m-equivariant field u(r) e^{im theta}.
/// values[0] == 0 for valid fields (u ~ r^m near the origin, m >= 1).
struct EquivariantField {
  int m = 1;
  GridPtr grid;
  std::vector<Complex> values;

  double tail_sample() const { return std::abs(values.back()); }
};

EquivariantField make_field(int m, GridPtr grid);
EquivariantField sample_field(int m, GridPtr grid,
                              const std::function<Complex(double)>& f);

void require_valid(const EquivariantField& u);
void require_same_grid(const EquivariantField& a, const EquivariantField& b);

/// 2 pi * sum_i w_i f_i r_i, the planar integral of a radial profile.
double integrate_planar(std::span<const double> samples, const RadialGrid& g);

/// Re sum_i w_i f_i conj(g_i) r_i (no 2 pi factor).
double inner_product(const EquivariantField& f, const EquivariantField& g);

/// Second-order stencils: centered 3-point in the interior, one-sided
/// 3-point at both ends. The output is a generic radial profile; the
/// values[0] == 0 invariant is not enforced on derivatives.
EquivariantField d_dr(const EquivariantField& f);

std::vector<Complex> d_dr_samples(std::span<const Complex> samples,
                                  const RadialGrid& g);

/// ( ||d_dr f||^2 + ||(m/r) f||^2 + ||f||^2 )^{1/2}, planar L2 norms.
double h1m_norm(const EquivariantField& f);
/// Homogeneous variant, drops the ||f||^2 term.
double h1m_seminorm(const EquivariantField& f);

double l2_norm(const EquivariantField& f);

/// Division by r with the equivariant origin convention f(0)/0 := 0.
inline double over_r(double value, double r) { return r > 0.0 ? value / r : 0.0; }

}  // namespace csslab
