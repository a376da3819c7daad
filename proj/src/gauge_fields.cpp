#include "csslab/gauge_fields.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "csslab/parallel.hpp"
#include "csslab/reference_solutions.hpp"

namespace csslab {

std::vector<double> a_theta_bilinear(const EquivariantField& p,
                                     const EquivariantField& q) {
  require_same_grid(p, q);
  const auto& g = *p.grid;
  const int n = g.n;
  std::vector<double> out(n);
  // prefix trapezoid of Re(conj(p) q) r' dr', scaled by -1/2
  double acc = 0.0;
  double prev = 0.0;  // integrand at node i-1
  out[0] = 0.0;
  for (int i = 1; i < n; ++i) {
    const Complex a = p.values[i];
    const Complex b = q.values[i];
    const double cur = (a.real() * b.real() + a.imag() * b.imag()) * g.nodes[i];
    acc += 0.5 * (prev + cur) * (g.nodes[i] - g.nodes[i - 1]);
    out[i] = -0.5 * acc;
    prev = cur;
  }
  return out;
}

std::vector<double> a_theta(const EquivariantField& u) {
  return a_theta_bilinear(u, u);
}

std::vector<double> a_t(const EquivariantField& u) {
  require_valid(u);
  const auto& g = *u.grid;
  const int n = g.n;
  const double m = static_cast<double>(u.m);
  const auto ath = a_theta(u);
  std::vector<double> out(n);
  // suffix trapezoid of (m + A_theta) |u|^2 dr'/r' from r_max inward
  double acc = 0.0;
  double next = (m + ath[n - 1]) * std::norm(u.values[n - 1]) / g.nodes[n - 1];
  out[n - 1] = 0.0;
  for (int i = n - 2; i >= 0; --i) {
    const double cur =
        i == 0 ? 0.0 : (m + ath[i]) * std::norm(u.values[i]) / g.nodes[i];
    acc += 0.5 * (cur + next) * (g.nodes[i + 1] - g.nodes[i]);
    out[i] = -acc;
    next = cur;
  }
  return out;
}

GaugeData gauge_data(const EquivariantField& u) {
  GaugeData d;
  d.a_theta = a_theta(u);
  d.a_t = a_t(u);
  const auto& g = *u.grid;
  std::vector<double> u2(g.n);
  for (int i = 0; i < g.n; ++i) u2[i] = std::norm(u.values[i]);
  d.source_mass = integrate_planar(u2, g);
  return d;
}

double a_t_truncation_bound(const EquivariantField& u) {
  require_valid(u);
  const auto ath = a_theta(u);
  const double m = static_cast<double>(u.m);
  const double v_end = std::abs(m + ath.back());
  const double tail = std::norm(u.values.back());
  return v_end * tail / u.grid->r_max;
}

EquivariantField covariant_D(const EquivariantField& background,
                             const EquivariantField& f) {
  require_same_grid(background, f);
  const auto& g = *f.grid;
  const auto ath = a_theta(background);
  EquivariantField out;
  out.m = f.m;
  out.grid = f.grid;
  out.values = d_dr_samples(f.values, g);
  const double m = static_cast<double>(f.m);
  const double* r = g.nodes.data();
  const double* a = ath.data();
  const Complex* fv = f.values.data();
  Complex* o = out.values.data();
  par::for_each(f.values.size(), [=](std::size_t i) {
    o[i] -= over_r(m + a[i], r[i]) * fv[i];
  });
  return out;
}

LinearizedLQ::LinearizedLQ(int m, GridPtr grid)
    : q_(soliton(m, std::move(grid))) {
  const auto ath = a_theta(q_);
  const auto& g = *q_.grid;
  v_over_r_.resize(g.n);
  for (int i = 0; i < g.n; ++i)
    v_over_r_[i] = over_r(static_cast<double>(m) + ath[i], g.nodes[i]);
}

EquivariantField LinearizedLQ::apply(const EquivariantField& eps) const {
  require_same_grid(q_, eps);
  const auto& g = *eps.grid;
  const auto bil = a_theta_bilinear(q_, eps);
  EquivariantField out;
  out.m = eps.m;
  out.grid = eps.grid;
  out.values = d_dr_samples(eps.values, g);
  const double* r = g.nodes.data();
  const double* b = bil.data();
  const double* vr = v_over_r_.data();
  const Complex* ev = eps.values.data();
  const Complex* qv = q_.values.data();
  Complex* o = out.values.data();
  par::for_each(eps.values.size(), [=](std::size_t i) {
    o[i] -= vr[i] * ev[i] + over_r(2.0 * b[i], r[i]) * qv[i];
  });
  return out;
}

}  // namespace csslab
