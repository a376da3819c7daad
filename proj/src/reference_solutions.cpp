#include "csslab/reference_solutions.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "csslab/interpolate.hpp"
#include "csslab/observables.hpp"

namespace csslab {

double normalize_phase(double gamma) {
  const double two_pi = 2.0 * std::numbers::pi;
  double g = std::fmod(gamma, two_pi);
  if (g < 0.0) g += two_pi;
  return g;
}

double soliton_value(int m, double r) {
  const double c = std::sqrt(8.0) * (m + 1);
  return c * std::pow(r, m) / (1.0 + std::pow(r, 2 * m + 2));
}

double soliton_derivative_value(int m, double r) {
  const double c = std::sqrt(8.0) * (m + 1);
  if (r == 0.0) return m == 1 ? c : 0.0;
  const double p = std::pow(r, 2 * m + 2);
  const double d = 1.0 + p;
  // Q'(r) = c r^{m-1} [ m - (m+2) r^{2m+2} ] / (1 + r^{2m+2})^2
  return c * std::pow(r, m - 1) * (m - (m + 2) * p) / (d * d);
}

EquivariantField soliton(int m, GridPtr grid) {
  if (m < 1) throw std::invalid_argument("soliton: m must be >= 1");
  return sample_field(m, std::move(grid), [m](double r) {
    return Complex{soliton_value(m, r), 0.0};
  });
}

EquivariantField lambda_Q(int m, GridPtr grid) {
  if (m < 1) throw std::invalid_argument("lambda_Q: m must be >= 1");
  return sample_field(m, std::move(grid), [m](double r) {
    return Complex{r * soliton_derivative_value(m, r) + soliton_value(m, r), 0.0};
  });
}

EquivariantField apply_scaling(const EquivariantField& u, double lambda) {
  require_valid(u);
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("apply_scaling: lambda must be positive");
  if (lambda == 1.0) return u;
  const auto& g = *u.grid;
  EquivariantField out = make_field(u.m, u.grid);
  const double inv = 1.0 / lambda;
  for (int i = 1; i < g.n; ++i) {
    out.values[i] =
        inv * interp_cubic<Complex>(g.nodes, u.values, g.nodes[i] * inv);
  }
  return out;
}

double scaling_leakage(const EquivariantField& u, double lambda) {
  require_valid(u);
  if (lambda <= 1.0) return 0.0;
  return tail_mass(u, u.grid->r_max / lambda);
}

EquivariantField apply_phase(const EquivariantField& u, double gamma) {
  require_valid(u);
  EquivariantField out = u;
  const Complex phase = std::polar(1.0, gamma);
  for (auto& v : out.values) v *= phase;
  return out;
}

EquivariantField pseudoconformal(const EquivariantField& u_snapshot, double s,
                                 double t) {
  require_valid(u_snapshot);
  if (t == 0.0) throw std::invalid_argument("pseudoconformal: t must be nonzero");
  if (std::abs(s * t + 1.0) > 1e-9)
    throw std::invalid_argument("pseudoconformal: snapshot time must be s = -1/t");
  const auto& g = *u_snapshot.grid;
  EquivariantField out = make_field(u_snapshot.m, u_snapshot.grid);
  const double inv = 1.0 / std::abs(t);
  for (int i = 1; i < g.n; ++i) {
    const double r = g.nodes[i];
    const Complex base =
        interp_cubic<Complex>(g.nodes, u_snapshot.values, r * inv);
    out.values[i] = inv * base * std::polar(1.0, r * r / (4.0 * t));
  }
  return out;
}

EquivariantField blowup_profile(int m, double t, GridPtr grid) {
  if (!(t < 0.0)) throw std::invalid_argument("blowup_profile: t must be negative");
  if (m < 1) throw std::invalid_argument("blowup_profile: m must be >= 1");
  const double lam = 1.0 / std::abs(t);
  return sample_field(m, std::move(grid), [=](double r) {
    return lam * soliton_value(m, lam * r) * std::polar(1.0, r * r / (4.0 * t));
  });
}

std::vector<double> tilde_Q(int m, const RadialGrid& grid) {
  if (m < 1) throw std::invalid_argument("tilde_Q: m must be >= 1");
  const int n = grid.n;
  std::vector<double> out(n);
  double acc = 0.0;
  double next = soliton_value(m, grid.nodes[n - 1]);
  out[n - 1] = 0.0;
  for (int i = n - 2; i >= 0; --i) {
    const double cur = soliton_value(m, grid.nodes[i]);
    acc += 0.5 * (cur + next) * (grid.nodes[i + 1] - grid.nodes[i]);
    out[i] = -acc;
    next = cur;
  }
  return out;
}

double tilde_Q_tail_bound(int m, double r_max) {
  return std::sqrt(8.0) * std::pow(r_max, -(m + 1));
}

}  // namespace csslab
