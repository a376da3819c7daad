#include "csslab/radial_grid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "csslab/parallel.hpp"

namespace csslab {

double RadialGrid::min_spacing() const {
  double h = nodes[1] - nodes[0];
  for (int i = 1; i + 1 < n; ++i) h = std::min(h, nodes[i + 1] - nodes[i]);
  return h;
}

GridPtr make_grid(double r_max, int n, double stretch) {
  if (!std::isfinite(r_max) || r_max <= 0.0)
    throw std::invalid_argument("make_grid: r_max must be finite and positive");
  if (n < kMinGridNodes)
    throw std::invalid_argument("make_grid: need at least 16 nodes");
  if (!std::isfinite(stretch) || stretch < 1.0)
    throw std::invalid_argument("make_grid: stretch must be >= 1");

  auto g = std::make_shared<RadialGrid>();
  g->r_max = r_max;
  g->stretch = stretch;
  g->n = n;
  g->nodes.resize(n);
  g->weights.resize(n);

  for (int i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) / (n - 1);
    if (stretch == 1.0) {
      g->nodes[i] = r_max * x;
    } else {
      // node density proportional to 1/(b + r) with b = r_max/(stretch - 1),
      // so density at 0 is `stretch` times the density at r_max
      g->nodes[i] = r_max * (std::pow(stretch, x) - 1.0) / (stretch - 1.0);
    }
  }
  g->nodes[0] = 0.0;
  g->nodes[n - 1] = r_max;

  g->weights[0] = 0.5 * (g->nodes[1] - g->nodes[0]);
  for (int i = 1; i + 1 < n; ++i)
    g->weights[i] = 0.5 * (g->nodes[i + 1] - g->nodes[i - 1]);
  g->weights[n - 1] = 0.5 * (g->nodes[n - 1] - g->nodes[n - 2]);
  return g;
}

EquivariantField make_field(int m, GridPtr grid) {
  if (m < 1) throw std::invalid_argument("equivariance index m must be >= 1");
  if (!grid) throw std::invalid_argument("field requires a grid");
  EquivariantField u;
  u.m = m;
  u.grid = std::move(grid);
  u.values.assign(u.grid->n, Complex{0.0, 0.0});
  return u;
}

EquivariantField sample_field(int m, GridPtr grid,
                              const std::function<Complex(double)>& f) {
  EquivariantField u = make_field(m, std::move(grid));
  for (int i = 1; i < u.grid->n; ++i) u.values[i] = f(u.grid->nodes[i]);
  return u;
}

void require_valid(const EquivariantField& u) {
  if (!u.grid || static_cast<int>(u.values.size()) != u.grid->n)
    throw std::invalid_argument("field/grid size mismatch");
  if (u.m < 1) throw std::invalid_argument("equivariance index m must be >= 1");
}

void require_same_grid(const EquivariantField& a, const EquivariantField& b) {
  require_valid(a);
  require_valid(b);
  if (a.m != b.m) throw std::invalid_argument("equivariance index mismatch");
  if (a.grid == b.grid) return;
  const auto& ga = *a.grid;
  const auto& gb = *b.grid;
  if (ga.n != gb.n || ga.r_max != gb.r_max || ga.nodes != gb.nodes)
    throw std::invalid_argument("grid mismatch");
}

double integrate_planar(std::span<const double> samples, const RadialGrid& g) {
  if (static_cast<int>(samples.size()) != g.n)
    throw std::invalid_argument("integrate_planar: sample/grid length mismatch");
  const double* f = samples.data();
  const double* w = g.weights.data();
  const double* r = g.nodes.data();
  const double s = par::block_sum(samples.size(),
                                  [=](std::size_t i) { return w[i] * f[i] * r[i]; });
  return 2.0 * std::numbers::pi * s;
}

double inner_product(const EquivariantField& f, const EquivariantField& g) {
  require_same_grid(f, g);
  const auto& gr = *f.grid;
  const Complex* a = f.values.data();
  const Complex* b = g.values.data();
  const double* w = gr.weights.data();
  const double* r = gr.nodes.data();
  return par::block_sum(f.values.size(), [=](std::size_t i) {
    return w[i] * r[i] * (a[i].real() * b[i].real() + a[i].imag() * b[i].imag());
  });
}

std::vector<Complex> d_dr_samples(std::span<const Complex> samples,
                                  const RadialGrid& g) {
  const int n = g.n;
  if (static_cast<int>(samples.size()) != n)
    throw std::invalid_argument("d_dr: sample/grid length mismatch");
  std::vector<Complex> out(n);
  const Complex* f = samples.data();
  const double* r = g.nodes.data();
  Complex* o = out.data();
  par::for_each(static_cast<std::size_t>(n - 2), [=](std::size_t k) {
    const std::size_t i = k + 1;
    const double h1 = r[i] - r[i - 1];
    const double h2 = r[i + 1] - r[i];
    o[i] = (-h2 / (h1 * (h1 + h2))) * f[i - 1] +
           ((h2 - h1) / (h1 * h2)) * f[i] +
           (h1 / (h2 * (h1 + h2))) * f[i + 1];
  });
  {
    const double a = r[1] - r[0], b = r[2] - r[1];
    o[0] = (-(2.0 * a + b) / (a * (a + b))) * f[0] + ((a + b) / (a * b)) * f[1] -
           (a / (b * (a + b))) * f[2];
  }
  {
    const double a = r[n - 2] - r[n - 3], b = r[n - 1] - r[n - 2];
    o[n - 1] = (b / (a * (a + b))) * f[n - 3] - ((a + b) / (a * b)) * f[n - 2] +
               ((2.0 * b + a) / (b * (a + b))) * f[n - 1];
  }
  return out;
}

EquivariantField d_dr(const EquivariantField& f) {
  require_valid(f);
  EquivariantField out;
  out.m = f.m;
  out.grid = f.grid;
  out.values = d_dr_samples(f.values, *f.grid);
  return out;
}

namespace {

double h1m_norm_impl(const EquivariantField& f, bool homogeneous) {
  require_valid(f);
  const auto& g = *f.grid;
  const auto df = d_dr_samples(f.values, g);
  const Complex* u = f.values.data();
  const Complex* du = df.data();
  const double* w = g.weights.data();
  const double* r = g.nodes.data();
  const double m = static_cast<double>(f.m);
  const double grad = par::block_sum(f.values.size(), [=](std::size_t i) {
    return w[i] * r[i] * std::norm(du[i]);
  });
  const double hardy = par::block_sum(f.values.size(), [=](std::size_t i) {
    const double mr = over_r(m, r[i]);
    return w[i] * r[i] * mr * mr * std::norm(u[i]);
  });
  double total = grad + hardy;
  if (!homogeneous) {
    total += par::block_sum(f.values.size(), [=](std::size_t i) {
      return w[i] * r[i] * std::norm(u[i]);
    });
  }
  return std::sqrt(2.0 * std::numbers::pi * total);
}

}  // namespace

double h1m_norm(const EquivariantField& f) { return h1m_norm_impl(f, false); }

double h1m_seminorm(const EquivariantField& f) { return h1m_norm_impl(f, true); }

double l2_norm(const EquivariantField& f) {
  require_valid(f);
  const auto& g = *f.grid;
  const Complex* u = f.values.data();
  const double* w = g.weights.data();
  const double* r = g.nodes.data();
  const double s = par::block_sum(f.values.size(), [=](std::size_t i) {
    return w[i] * r[i] * std::norm(u[i]);
  });
  return std::sqrt(2.0 * std::numbers::pi * s);
}

}  // namespace csslab
