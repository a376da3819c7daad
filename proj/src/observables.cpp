#include "csslab/observables.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "csslab/gauge_fields.hpp"
#include "csslab/parallel.hpp"

namespace csslab {

double mass(const EquivariantField& u) {
  require_valid(u);
  const auto& g = *u.grid;
  const Complex* uv = u.values.data();
  const double* w = g.weights.data();
  const double* r = g.nodes.data();
  const double s = par::block_sum(u.values.size(), [=](std::size_t i) {
    return w[i] * r[i] * std::norm(uv[i]);
  });
  return 2.0 * std::numbers::pi * s;
}

EnergyTerms energy_terms(const EquivariantField& u) {
  require_valid(u);
  const auto& g = *u.grid;
  const auto ath = a_theta(u);
  const auto du = d_dr_samples(u.values, g);
  const double m = static_cast<double>(u.m);
  const Complex* uv = u.values.data();
  const Complex* dv = du.data();
  const double* a = ath.data();
  const double* w = g.weights.data();
  const double* r = g.nodes.data();
  const std::size_t n = u.values.size();
  EnergyTerms e;
  e.kinetic = 2.0 * std::numbers::pi *
              par::block_sum(n, [=](std::size_t i) {
                return 0.5 * w[i] * r[i] * std::norm(dv[i]);
              });
  e.gauge_potential = 2.0 * std::numbers::pi *
                      par::block_sum(n, [=](std::size_t i) {
                        const double vr = over_r(m + a[i], r[i]);
                        return 0.5 * w[i] * r[i] * vr * vr * std::norm(uv[i]);
                      });
  e.quartic = 2.0 * std::numbers::pi *
              par::block_sum(n, [=](std::size_t i) {
                const double u2 = std::norm(uv[i]);
                return 0.25 * w[i] * r[i] * u2 * u2;
              });
  return e;
}

double energy_direct(const EquivariantField& u) { return energy_terms(u).direct(); }

double energy_selfdual(const EquivariantField& u) {
  const auto d = covariant_D(u, u);
  const auto& g = *u.grid;
  const Complex* dv = d.values.data();
  const double* w = g.weights.data();
  const double* r = g.nodes.data();
  const double s = par::block_sum(d.values.size(), [=](std::size_t i) {
    return w[i] * r[i] * std::norm(dv[i]);
  });
  return std::numbers::pi * s;  // (1/2) * 2 pi
}

double virial(const EquivariantField& u) {
  require_valid(u);
  const auto& g = *u.grid;
  const auto du = d_dr_samples(u.values, g);
  const Complex* uv = u.values.data();
  const Complex* dv = du.data();
  const double* w = g.weights.data();
  const double* r = g.nodes.data();
  const double s = par::block_sum(u.values.size(), [=](std::size_t i) {
    const Complex p = std::conj(uv[i]) * dv[i];
    return w[i] * r[i] * r[i] * p.imag();
  });
  return 2.0 * std::numbers::pi * s;
}

double localized_virial(const EquivariantField& u, const CutoffFamily& cutoffs) {
  require_valid(u);
  const auto& g = *u.grid;
  if (cutoffs.psi.size() != u.values.size())
    throw std::invalid_argument("localized_virial: cutoffs built on another grid");
  const auto du = d_dr_samples(u.values, g);
  const Complex* uv = u.values.data();
  const Complex* dv = du.data();
  const double* psi = cutoffs.psi.data();
  const double* w = g.weights.data();
  const double* r = g.nodes.data();
  const double s = par::block_sum(u.values.size(), [=](std::size_t i) {
    const Complex p = std::conj(uv[i]) * dv[i];
    return w[i] * r[i] * r[i] * psi[i] * p.imag();
  });
  return 2.0 * std::numbers::pi * s;
}

double variance(const EquivariantField& u) {
  require_valid(u);
  const auto& g = *u.grid;
  const Complex* uv = u.values.data();
  const double* w = g.weights.data();
  const double* r = g.nodes.data();
  const double s = par::block_sum(u.values.size(), [=](std::size_t i) {
    return w[i] * r[i] * r[i] * r[i] * std::norm(uv[i]);
  });
  return 2.0 * std::numbers::pi * s;
}

double tail_mass(const EquivariantField& u, double R) {
  require_valid(u);
  const auto& g = *u.grid;
  if (!(R > 0.0)) throw std::invalid_argument("tail_mass: R must be positive");
  if (R >= g.r_max) return 0.0;
  const int n = g.n;
  // exact integral of r * (piecewise linear |u|^2) over each cell
  auto cell = [&](double ra, double ga, double rb, double gb) {
    return (rb - ra) * (ga * (2.0 * ra + rb) + gb * (ra + 2.0 * rb)) / 6.0;
  };
  int j = 0;
  while (j + 1 < n && g.nodes[j + 1] <= R) ++j;
  // partial cell [R, nodes[j+1]]
  const double ga = std::norm(u.values[j]);
  const double gb = std::norm(u.values[j + 1]);
  const double t = (R - g.nodes[j]) / (g.nodes[j + 1] - g.nodes[j]);
  const double gR = ga + t * (gb - ga);
  double acc = cell(R, gR, g.nodes[j + 1], gb);
  for (int i = j + 1; i + 1 < n; ++i) {
    acc += cell(g.nodes[i], std::norm(u.values[i]), g.nodes[i + 1],
                std::norm(u.values[i + 1]));
  }
  return 2.0 * std::numbers::pi * acc;
}

namespace {

double smoothstep5(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
}

}  // namespace

CutoffFamily make_cutoffs(const RadialGrid& grid, double R) {
  if (!(R > 0.0)) throw std::invalid_argument("make_cutoffs: R must be positive");
  if (2.0 * R > grid.r_max)
    throw std::invalid_argument("make_cutoffs: need 2R <= r_max");
  const int n = grid.n;
  CutoffFamily c;
  c.R = R;
  c.chi.resize(n);
  c.phi.resize(n);
  c.psi.resize(n);
  for (int i = 0; i < n; ++i) {
    c.chi[i] = 1.0 - smoothstep5((grid.nodes[i] - R) / R);
    c.phi[i] = c.chi[i] * c.chi[i];
  }
  // psi = (1/r) prefix-trapezoid of phi; exact on [0, R] where phi == 1
  double acc = 0.0;
  c.psi[0] = 1.0;
  for (int i = 1; i < n; ++i) {
    acc += 0.5 * (c.phi[i - 1] + c.phi[i]) * (grid.nodes[i] - grid.nodes[i - 1]);
    c.psi[i] = acc / grid.nodes[i];
  }
  c.tail_constant = acc / R - 1.0;  // phi vanishes beyond 2R, acc = R(1 + c0)
  return c;
}

ConservedReport conserved_report(const EquivariantField& u) {
  ConservedReport rep;
  rep.mass = mass(u);
  const auto e = energy_terms(u);
  rep.kinetic = e.kinetic;
  rep.gauge_potential_term = e.gauge_potential;
  rep.quartic_term = e.quartic;
  rep.energy_direct = e.direct();
  rep.energy_selfdual = energy_selfdual(u);
  rep.virial = virial(u);
  rep.variance = variance(u);
  return rep;
}

}  // namespace csslab
