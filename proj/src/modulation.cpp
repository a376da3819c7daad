#include "csslab/modulation.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "csslab/interpolate.hpp"
#include "csslab/observables.hpp"

namespace csslab {

namespace {

double smoothstep5(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
}

// cutoff for the Z profiles: 1 on [0, 6], 0 beyond 8
double profile_cutoff(double r) { return 1.0 - smoothstep5((r - 6.0) / 2.0); }

// lambda e^{-i gamma} u(lambda r) - Q, the residual field at reference scale
EquivariantField unscale_minus_Q(const EquivariantField& u,
                                 const EquivariantField& q, double lambda,
                                 double gamma) {
  const auto& g = *u.grid;
  EquivariantField eps = make_field(u.m, u.grid);
  const Complex phase = std::polar(lambda, -gamma);
  for (int i = 1; i < g.n; ++i) {
    eps.values[i] =
        phase * interp_cubic<Complex>(g.nodes, u.values, lambda * g.nodes[i]) -
        q.values[i];
  }
  return eps;
}

}  // namespace

ProfilePair make_profiles(int m, GridPtr grid) {
  auto lq = lambda_Q(m, grid);
  auto q = soliton(m, grid);
  ProfilePair p;
  p.z1 = make_field(m, grid);
  p.z2 = make_field(m, grid);
  for (int i = 0; i < grid->n; ++i) {
    const double chi = profile_cutoff(grid->nodes[i]);
    p.z1.values[i] = chi * lq.values[i];
    p.z2.values[i] = Complex{0.0, 1.0} * chi * q.values[i];
  }
  // det of [[(LambdaQ,Z1), (iQ,Z1)], [(LambdaQ,Z2), (iQ,Z2)]]; the
  // off-diagonal entries vanish under the real pairing
  const double d11 = inner_product(lq, p.z1);
  const double d12 = inner_product(apply_phase(q, std::numbers::pi / 2), p.z1);
  const double d21 = inner_product(lq, p.z2);
  const double d22 = inner_product(apply_phase(q, std::numbers::pi / 2), p.z2);
  p.det_value = d11 * d22 - d12 * d21;
  const double scale = l2_norm(lq) * l2_norm(q);
  if (std::abs(p.det_value) < 1e-6 * scale * scale)
    throw std::invalid_argument("make_profiles: degenerate profile pair");
  return p;
}

ModulationFit decompose(const EquivariantField& u, SymmetryParams guess,
                        const ProfilePair& profiles,
                        const DecomposeOptions& opts) {
  require_same_grid(u, profiles.z1);
  const auto q = soliton(u.m, u.grid);
  const double u_norm = l2_norm(u);
  const double tol = opts.newton_tol * std::max(1.0, u_norm);

  double lambda = guess.lambda;
  double gamma = guess.gamma;
  if (!(lambda > 0.0)) throw std::invalid_argument("decompose: guess lambda <= 0");

  auto residual = [&](double lam, double gam, EquivariantField* eps_out)
      -> std::array<double, 2> {
    EquivariantField eps = unscale_minus_Q(u, q, lam, gam);
    std::array<double, 2> f{inner_product(eps, profiles.z1),
                            inner_product(eps, profiles.z2)};
    if (eps_out) *eps_out = std::move(eps);
    return f;
  };

  ModulationFit fit;
  EquivariantField eps;
  std::array<double, 2> f = residual(lambda, gamma, &eps);
  int it = 0;
  for (; it < opts.max_iterations; ++it) {
    if (std::max(std::abs(f[0]), std::abs(f[1])) <= tol) break;
    const double dl = opts.fd_step_rel * lambda;
    const double dg = opts.fd_step_rel;
    const auto fl_p = residual(lambda + dl, gamma, nullptr);
    const auto fl_m = residual(lambda - dl, gamma, nullptr);
    const auto fg_p = residual(lambda, gamma + dg, nullptr);
    const auto fg_m = residual(lambda, gamma - dg, nullptr);
    double j00 = (fl_p[0] - fl_m[0]) / (2.0 * dl);
    double j10 = (fl_p[1] - fl_m[1]) / (2.0 * dl);
    double j01 = (fg_p[0] - fg_m[0]) / (2.0 * dg);
    double j11 = (fg_p[1] - fg_m[1]) / (2.0 * dg);
    double det = j00 * j11 - j01 * j10;
    const double jnorm = std::abs(j00) + std::abs(j01) + std::abs(j10) + std::abs(j11);
    if (std::abs(det) < 1e-14 * jnorm * jnorm + 1e-300) {
      // damp a near-singular Jacobian instead of bailing out
      const double mu = 1e-6 * jnorm + 1e-12;
      j00 += mu;
      j11 += mu;
      det = j00 * j11 - j01 * j10;
    }
    double step_l = (j11 * f[0] - j01 * f[1]) / det;
    double step_g = (-j10 * f[0] + j00 * f[1]) / det;
    // clamp to keep the iteration inside the basin
    const double max_l = 0.25 * lambda;
    if (std::abs(step_l) > max_l) step_l *= max_l / std::abs(step_l);
    if (std::abs(step_g) > 0.5) step_g *= 0.5 / std::abs(step_g);
    lambda -= step_l;
    gamma -= step_g;
    if (!(lambda > guess.lambda * (1.0 / opts.lambda_divergence_factor)) ||
        !(lambda < guess.lambda * opts.lambda_divergence_factor))
      throw std::runtime_error("decompose: lambda diverged from the guess band");
    f = residual(lambda, gamma, &eps);
  }

  fit.lambda = lambda;
  fit.gamma = normalize_phase(gamma);
  fit.orth_residuals = f;
  fit.converged = std::max(std::abs(f[0]), std::abs(f[1])) <= tol;
  fit.iterations = it;
  fit.eps_l2 = l2_norm(eps);
  fit.eps_h1m = h1m_seminorm(eps);
  fit.eps = std::move(eps);
  return fit;
}

CoercivityResult coercivity_ratio(const EquivariantField& eps,
                                  const ProfilePair& profiles,
                                  double seminorm_bound) {
  require_same_grid(eps, profiles.z1);
  const int m = eps.m;
  const auto q = soliton(m, eps.grid);
  const auto lq = lambda_Q(m, eps.grid);
  const auto iq = apply_phase(q, std::numbers::pi / 2);

  CoercivityResult res;
  EquivariantField work = eps;
  // project onto the {Z1, Z2}-orthogonal complement; the pairing matrix of
  // (LambdaQ, iQ) against (Z1, Z2) is diagonal
  const double a = inner_product(work, profiles.z1) / inner_product(lq, profiles.z1);
  const double b = inner_product(work, profiles.z2) / inner_product(iq, profiles.z2);
  for (int i = 0; i < eps.grid->n; ++i)
    work.values[i] -= a * lq.values[i] + b * iq.values[i];
  res.projection_magnitude = std::hypot(a, b);

  res.eps_seminorm = h1m_seminorm(work);
  if (res.eps_seminorm == 0.0)
    throw std::invalid_argument("coercivity_ratio: eps vanishes after projection");
  if (res.eps_seminorm > seminorm_bound)
    throw std::invalid_argument("coercivity_ratio: eps exceeds the smallness bound");

  EquivariantField sum = q;
  for (int i = 0; i < eps.grid->n; ++i) sum.values[i] += work.values[i];
  const double e_q = energy_direct(q);
  const double e_sum = energy_direct(sum);
  res.ratio = (e_sum - e_q) / (res.eps_seminorm * res.eps_seminorm);
  return res;
}

namespace {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// interior-node matrices for the dense solve; boundary values are pinned
struct DenseOps {
  Mat deriv;       // d_dr on interior dofs
  Vec v_over_r;    // (m + A_theta[Q])/r
  Vec q;           // Q at interior nodes
  Vec inv_r;       // 1/r
  Vec wl2;         // 2 pi w r
  Vec wr;          // w r (pairing weight)
  Mat cum;         // prefix trapezoid against r' dr'
  Vec mr2;         // (m/r)^2
};

DenseOps build_dense(int m, const RadialGrid& g) {
  const int n = g.n;
  const int ni = n - 2;
  DenseOps d;
  d.deriv = Mat::Zero(ni, ni);
  for (int i = 1; i <= ni; ++i) {
    const double h1 = g.nodes[i] - g.nodes[i - 1];
    const double h2 = g.nodes[i + 1] - g.nodes[i];
    const int row = i - 1;
    if (i - 1 >= 1) d.deriv(row, i - 2) = -h2 / (h1 * (h1 + h2));
    d.deriv(row, row) = (h2 - h1) / (h1 * h2);
    if (i + 1 <= ni) d.deriv(row, i) = h1 / (h2 * (h1 + h2));
  }
  auto qf = soliton(m, std::make_shared<RadialGrid>(g));
  const auto ath = a_theta(qf);
  d.v_over_r = Vec(ni);
  d.q = Vec(ni);
  d.inv_r = Vec(ni);
  d.wl2 = Vec(ni);
  d.wr = Vec(ni);
  d.mr2 = Vec(ni);
  for (int i = 1; i <= ni; ++i) {
    const int row = i - 1;
    d.v_over_r(row) = (m + ath[i]) / g.nodes[i];
    d.q(row) = qf.values[i].real();
    d.inv_r(row) = 1.0 / g.nodes[i];
    d.wl2(row) = 2.0 * std::numbers::pi * g.weights[i] * g.nodes[i];
    d.wr(row) = g.weights[i] * g.nodes[i];
    const double mr = m / g.nodes[i];
    d.mr2(row) = mr * mr;
  }
  // cum(i, j): trapezoid weights of int_0^{r_i} f r' dr' on interior dofs
  d.cum = Mat::Zero(ni, ni);
  for (int i = 1; i <= ni; ++i) {
    const int row = i - 1;
    for (int j = 1; j < i; ++j) {
      const double h = g.nodes[j + 1] - g.nodes[j];
      d.cum(row, j - 1) += 0.5 * h * g.nodes[j];
      if (j + 1 <= ni) d.cum(row, j) += 0.5 * h * g.nodes[j + 1];
    }
    // the [r_0, r_1] cell: integrand vanishes at r_0 = 0
    const double h0 = g.nodes[1] - g.nodes[0];
    d.cum(row, 0) += 0.5 * h0 * g.nodes[1];
  }
  return d;
}

double smallest_gen_eig(const Mat& a, const Mat& b) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(a, b, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("lq_spectral_gap: generalized eigensolve failed");
  return es.eigenvalues()(0);
}

double largest_gen_eig(const Mat& a, const Mat& b) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(a, b, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("lq_spectral_gap: generalized eigensolve failed");
  return es.eigenvalues()(es.eigenvalues().size() - 1);
}

}  // namespace

SpectralGapResult lq_spectral_gap(int m, GridPtr grid,
                                  const ProfilePair& profiles) {
  const auto& g = *grid;
  const int ni = g.n - 2;
  if (static_cast<int>(profiles.z1.values.size()) != g.n)
    throw std::invalid_argument("lq_spectral_gap: profiles on another grid");
  const DenseOps d = build_dense(m, g);

  // real-linear L_Q on (Re, Im): block diagonal because Q is real.
  // Re block carries the bilinear gauge correction, Im block is D_Q alone.
  Mat l_re = d.deriv;
  l_re -= d.v_over_r.asDiagonal();
  // -(2 A_theta[Q, f]/r) Q  ==>  + diag(Q/r) cum diag(Q) acting on Re f
  l_re += (d.q.cwiseProduct(d.inv_r)).asDiagonal() * d.cum * d.q.asDiagonal();
  Mat l_im = d.deriv;
  l_im -= d.v_over_r.asDiagonal();

  // H1m seminorm gram and L2 gram of L f
  Mat b_h = d.deriv.transpose() * d.wl2.asDiagonal() * d.deriv;
  b_h += Mat((d.wl2.cwiseProduct(d.mr2)).asDiagonal());
  Mat a_re = l_re.transpose() * d.wl2.asDiagonal() * l_re;
  Mat a_im = l_im.transpose() * d.wl2.asDiagonal() * l_im;

  // pairing constraint representers on interior dofs
  Vec z_re(ni), z_im(ni);
  for (int i = 1; i <= ni; ++i) {
    z_re(i - 1) = d.wr(i - 1) * profiles.z1.values[i].real();
    z_im(i - 1) = d.wr(i - 1) * profiles.z2.values[i].imag();
  }

  auto constrained = [&](const Mat& a, const Vec& z, bool largest) {
    Eigen::HouseholderQR<Mat> qr(z);
    Mat qfull = qr.householderQ() * Mat::Identity(ni, ni);
    Mat p = qfull.rightCols(ni - 1);
    Mat ap = p.transpose() * a * p;
    Mat bp = p.transpose() * b_h * p;
    return largest ? largest_gen_eig(ap, bp) : smallest_gen_eig(ap, bp);
  };

  SpectralGapResult res;
  res.n = g.n;
  const double lo_re = constrained(a_re, z_re, false);
  const double lo_im = constrained(a_im, z_im, false);
  const double hi_re = constrained(a_re, z_re, true);
  const double hi_im = constrained(a_im, z_im, true);
  const double un_re = smallest_gen_eig(a_re, b_h);
  const double un_im = smallest_gen_eig(a_im, b_h);
  if (lo_re < -1e-10 || lo_im < -1e-10)
    throw std::runtime_error("lq_spectral_gap: numerical rank deficiency");
  res.restricted = std::sqrt(std::max(0.0, std::min(lo_re, lo_im)));
  res.unrestricted = std::sqrt(std::max(0.0, std::min(un_re, un_im)));
  res.upper = std::sqrt(std::max(hi_re, hi_im));
  return res;
}

}  // namespace csslab
