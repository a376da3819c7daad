// Acceptance suite: one pass/fail line per criterion.
//
//   acceptance                 runs every criterion
//   acceptance --criterion k   runs criterion k (repeatable)
//
// Exit code 0 iff every executed criterion passed.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "csslab/harness.hpp"
#include "csslab/interpolate.hpp"
#include "csslab/modulation.hpp"
#include "csslab/observables.hpp"
#include "csslab/parallel.hpp"

using namespace csslab;
using std::numbers::pi;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("%s criterion %2d: %s\n", pass ? "PASS" : "FAIL", criterion,
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// criteria 4, 5 and 6 share the same two trajectories
std::map<std::string, RunReport> g_runs;

const RunReport& soliton_run() {
  auto it = g_runs.find("soliton");
  if (it == g_runs.end()) {
    ScenarioConfig cfg = default_config(Scenario::soliton_static);
    std::printf("  [running soliton_static: n=%d r_max=%g stretch=%g dt=cfl]\n",
                cfg.n, cfg.r_max, cfg.stretch);
    std::fflush(stdout);
    it = g_runs.emplace("soliton", run_scenario(cfg)).first;
  }
  return it->second;
}

const RunReport& blowup_run(int n) {
  const std::string key = "blowup" + std::to_string(n);
  auto it = g_runs.find(key);
  if (it == g_runs.end()) {
    ScenarioConfig cfg = default_config(Scenario::blowup_track);
    cfg.n = n;
    cfg.stretch = 12.0;
    cfg.c_cfl = 0.45;
    std::printf("  [running blowup_track: n=%d r_max=%g stretch=%g c_cfl=%g]\n",
                cfg.n, cfg.r_max, cfg.stretch, cfg.c_cfl);
    std::fflush(stdout);
    it = g_runs.emplace(key, run_scenario(cfg)).first;
  }
  return it->second;
}

double summary_value(const RunReport& rep, const std::string& key) {
  for (const auto& [k, v] : rep.summary)
    if (k == key) return v;
  return std::nan("");
}

EquivariantField random_smooth(GridPtr g, int m, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> nb(2, 4);
  std::uniform_real_distribution<double> center(0.5, 5.0);
  std::uniform_real_distribution<double> width(0.4, 2.0);
  std::normal_distribution<double> amp(0.0, 1.0);
  EquivariantField u = make_field(m, g);
  const int k = nb(rng);
  for (int b = 0; b < k; ++b) {
    const double c = center(rng);
    const double w = width(rng);
    const Complex a{amp(rng), amp(rng)};
    for (int i = 1; i < g->n - 1; ++i) {
      const double r = g->nodes[i];
      u.values[i] += a * std::pow(r / c, m) * std::exp(-(r - c) * (r - c) / (w * w));
    }
  }
  return u;
}

// ---------------------------------------------------------------------------

void criterion_1() {
  // mass(Q) = 8 pi (m+1) within 1e-6 relative at N = 4096, R = 64
  const auto g = make_grid(64.0, 4096, 8.0);
  bool pass = true;
  double worst = 0.0;
  for (int m : {1, 2, 3}) {
    const double rel =
        std::abs(mass(soliton(m, g)) - 8.0 * pi * (m + 1)) / (8.0 * pi * (m + 1));
    worst = std::max(worst, rel);
    pass = pass && rel <= 1e-6;
  }
  report(1, pass, "vortex mass 8pi(m+1), m in {1,2,3}: worst rel err " +
                      fmt(worst) + " (tol 1e-6)");
}

void criterion_2() {
  // energy_direct(Q) and energy_selfdual(Q) both below 1e-6 M^2/R_max,
  // each decaying at order h^2.  The self-dual form passes at every m.
  // The direct form is a cancellation of three O(10) terms whose centered
  // stencils and cumulative trapezoids leave an O(h^2) bias with an O(1)
  // constant (about -1.9e-2 + -6.5e-3 uniform at m=1); no grid in the
  // geometric-stretch family reaches the threshold at N = 4096, so this
  // half fails and the line reports both measured values.
  bool pass = true;
  std::string detail;
  for (int m : {1, 2, 3}) {
    const auto g1 = make_grid(64.0, 2048, 8.0);
    const auto g2 = make_grid(64.0, 4096, 8.0);
    const auto q1 = soliton(m, g1);
    const auto q2 = soliton(m, g2);
    const double mass_q = 8.0 * pi * (m + 1);
    const double thr = 1e-6 * mass_q * mass_q / 64.0;
    const double ed1 = std::abs(energy_direct(q1));
    const double ed2 = std::abs(energy_direct(q2));
    const double es1 = energy_selfdual(q1);
    const double es2 = energy_selfdual(q2);
    const bool ok = ed2 <= thr && es2 <= thr && ed1 / ed2 > 3.0 && es1 / es2 > 3.0;
    pass = pass && ok;
    detail += "m=" + std::to_string(m) + ": |E_dir|=" + fmt(ed2) +
              " E_sd=" + fmt(es2) + " thr=" + fmt(thr) + "; ";
  }
  report(2, pass, "self-duality of Q at N=4096 R=64: " + detail);
}

void criterion_3() {
  const auto g = make_grid(16.0, 16385, 1.0);
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto u = random_smooth(g, 1, rng);
    const double ed = energy_direct(u);
    const double esd = energy_selfdual(u);
    const double mu = mass(u);
    const double tol = 1e-5 * (std::abs(ed) + mu * mu / (16.0 * 16.0));
    worst = std::max(worst, std::abs(ed - esd) / tol);
  }
  report(3, worst <= 1.0,
         "energy-form equivalence on 20 random fields: worst |Ed-Esd|/tol " +
             fmt(worst) + " (needs <= 1)");
}

void criterion_4() {
  const auto& rep = soliton_run();
  const double dev = summary_value(rep, "max_rel_l2_deviation");
  const double md = summary_value(rep, "mass_drift_rel");
  const double ed = summary_value(rep, "energy_drift_rel");
  const bool pass = rep.status == RunStatus::completed && dev <= 1e-4 &&
                    md <= 1e-6 && ed <= 1e-5;
  report(4, pass, "soliton staticity over unit time at N=2048: L2 dev " +
                      fmt(dev) + " (tol 1e-4), mass drift " + fmt(md) +
                      " (tol 1e-6), energy drift " + fmt(ed) + " (tol 1e-5)");
}

void criterion_5() {
  const auto& fine = blowup_run(4096);
  const auto& coarse = blowup_run(2048);
  const double err_fine = summary_value(fine, "final_oracle_rel_l2_error");
  const double err_coarse = summary_value(coarse, "final_oracle_rel_l2_error");
  const double order = std::log2(err_coarse / err_fine);
  const double lam = summary_value(fine, "max_lambda_fit_rel_error_in_regime");
  const double regime_rows = summary_value(fine, "lambda_fit_regime_rows");
  const bool pass = fine.status == RunStatus::completed && err_fine <= 1e-3 &&
                    order >= 1.5 && lam <= 0.02 && regime_rows >= 3;
  report(5, pass,
         "blowup oracle to t=-0.25: rel L2 err " + fmt(err_fine) +
             " (tol 1e-3), order " + fmt(order) + " (needs >= 1.5), lambda fit " +
             fmt(lam) + " in the alpha* regime over " + fmt(regime_rows) +
             " rows (tol 0.02)");
}

void criterion_6() {
  const auto& sol = soliton_run();
  const auto& blow = blowup_run(4096);
  const double v1 = summary_value(sol, "virial_identity_violation");
  const double w1 = summary_value(sol, "variance_identity_violation");
  const double v2 = summary_value(blow, "virial_identity_violation");
  const double w2 = summary_value(blow, "variance_identity_violation");
  const double worst = std::max({v1, w1, v2, w2});
  report(6, worst <= 1e-3,
         "virial/variance identities along criteria-4/5 trajectories: worst "
         "violation " + fmt(worst) + " (tol 1e-3; soliton " + fmt(std::max(v1, w1)) +
             ", blowup " + fmt(std::max(v2, w2)) + ")");
}

void criterion_7() {
  struct Setup { double t, r_max; int n; };
  const Setup setups[] = {{-1.0, 24.0, 1048577},
                          {-0.5, 16.0, 2097153},
                          {-0.25, 10.0, 4194305}};
  bool pass = true;
  double worst = 0.0;
  for (const auto& s : setups) {
    const auto g = make_grid(s.r_max, s.n, 1.0);
    for (int m : {1, 2, 3}) {
      const auto snap = blowup_profile(m, s.t, g);
      const double var = variance(snap);
      const double e = energy_direct(snap);
      const double rel = std::abs(var - 8.0 * e * s.t * s.t) / var;
      worst = std::max(worst, rel);
      pass = pass && rel <= 1e-6;
    }
  }
  report(7, pass,
         "pseudoconformal variance law var = 8 E t^2 on exact snapshots, "
         "m in {1,2,3}, t in {-1,-0.5,-0.25}: worst rel " + fmt(worst) +
             " (tol 1e-6)");
}

void criterion_8() {
  const auto g = make_grid(32.0, 8193, 1.0);
  const auto profiles = make_profiles(1, g);
  const auto q = soliton(1, g);
  const auto lq = lambda_Q(1, g);
  const auto iq = apply_phase(q, pi / 2);
  const double d11 = inner_product(lq, profiles.z1);
  const double d22 = inner_product(iq, profiles.z2);
  std::mt19937_64 rng(4096);
  std::uniform_real_distribution<double> lam_d(0.5, 2.0);
  std::uniform_real_distribution<double> gam_d(0.0, 2.0 * pi);
  std::uniform_real_distribution<double> jitter(-0.1, 0.1);
  bool pass = true;
  double worst_param = 0.0, worst_orth = 0.0;
  int converged = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const double lam_true = lam_d(rng);
    const double gam_true = gam_d(rng);
    auto eps = random_smooth(g, 1, rng);
    const double a = inner_product(eps, profiles.z1) / d11;
    const double b = inner_product(eps, profiles.z2) / d22;
    for (int i = 0; i < g->n; ++i)
      eps.values[i] -= a * lq.values[i] + b * iq.values[i];
    const double eps_l2 = 0.01;
    const double s = eps_l2 / l2_norm(eps);
    for (auto& v : eps.values) v *= s;
    // synthesize with the closed-form vortex so no truncation cliff enters
    EquivariantField u = make_field(1, g);
    const Complex phase = std::polar(1.0 / lam_true, gam_true);
    for (int i = 1; i < g->n; ++i) {
      const double rho = g->nodes[i] / lam_true;
      u.values[i] = phase * (soliton_value(1, rho) +
                             interp_cubic<Complex>(g->nodes, eps.values, rho));
    }
    SymmetryParams guess;
    guess.lambda = lam_true * (1.0 + jitter(rng));
    guess.gamma = gam_true + jitter(rng);
    const auto fit = decompose(u, guess, profiles);
    if (!fit.converged) { pass = false; continue; }
    ++converged;
    const double tol_param = 1e-6 + 10.0 * eps_l2 * eps_l2;
    const double dl = std::abs(fit.lambda - lam_true) / lam_true;
    const double dg = std::abs(std::remainder(fit.gamma - gam_true, 2.0 * pi));
    worst_param = std::max({worst_param, dl, dg});
    worst_orth = std::max(worst_orth, std::max(std::abs(fit.orth_residuals[0]),
                                               std::abs(fit.orth_residuals[1])));
    pass = pass && dl <= tol_param && dg <= tol_param && worst_orth <= 1e-10;
  }
  report(8, pass,
         "decomposition recovery over 100 synthetic trials: " +
             std::to_string(converged) + " converged, worst param err " +
             fmt(worst_param) + " (tol " + fmt(1e-6 + 1e-3) +
             "), worst orthogonality residual " + fmt(worst_orth) + " (tol 1e-10)");
}

void criterion_9() {
  // coercivity band on the certification domain, then the dense gap
  bool pass = true;
  std::string detail;
  double band_lo[2] = {0, 0}, band_hi[2] = {0, 0};
  for (int level = 0; level < 2; ++level) {
    const int n = level == 0 ? 16385 : 32769;
    const auto g = make_grid(8.0, n, 1.0);
    const auto profiles = make_profiles(1, g);
    const auto q = soliton(1, g);
    const auto lq = lambda_Q(1, g);
    const auto iq = apply_phase(q, pi / 2);
    const double d11 = inner_product(lq, profiles.z1);
    const double d22 = inner_product(iq, profiles.z2);
    std::mt19937_64 rng(999);  // same draws at both levels
    double lo = 1e300, hi = -1e300;
    for (int trial = 0; trial < 100; ++trial) {
      auto eps = random_smooth(g, 1, rng);
      const double a = inner_product(eps, profiles.z1) / d11;
      const double b = inner_product(eps, profiles.z2) / d22;
      for (int i = 0; i < g->n; ++i)
        eps.values[i] -= a * lq.values[i] + b * iq.values[i];
      const double s = 0.01 / h1m_seminorm(eps);
      for (auto& v : eps.values) v *= s;
      const double ratio = coercivity_ratio(eps, profiles).ratio;
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    band_lo[level] = lo;
    band_hi[level] = hi;
  }
  const bool band_ok = band_lo[0] > 0.0 && band_hi[0] / band_lo[0] <= 10.0;
  const bool stable = std::abs(band_lo[1] - band_lo[0]) <= 0.05 * band_lo[0] &&
                      std::abs(band_hi[1] - band_hi[0]) <= 0.05 * band_hi[0];
  pass = band_ok && stable;
  detail = "band [" + fmt(band_lo[0]) + ", " + fmt(band_hi[0]) + "] spread " +
           fmt(band_hi[0] / band_lo[0]) + " (<=10), refinement shift " +
           fmt(std::max(std::abs(band_lo[1] - band_lo[0]) / band_lo[0],
                        std::abs(band_hi[1] - band_hi[0]) / band_hi[0])) +
           " (<=0.05)";

  std::vector<double> gaps;
  double collapse = 0.0;
  for (int n : {128, 256, 512}) {
    const auto g = make_grid(8.0, n, 1.0);
    const auto res = lq_spectral_gap(1, g, make_profiles(1, g));
    gaps.push_back(res.restricted);
    if (n == 512) collapse = res.restricted / std::max(res.unrestricted, 1e-300);
    pass = pass && res.restricted > 0.0;
  }
  for (std::size_t i = 1; i < gaps.size(); ++i)
    pass = pass && std::abs(gaps[i] - gaps[i - 1]) <= 0.05 * gaps[i];
  pass = pass && collapse >= 100.0;
  detail += "; gap " + fmt(gaps[0]) + "/" + fmt(gaps[1]) + "/" + fmt(gaps[2]) +
            " over N in {128,256,512}, collapse x" + fmt(collapse) +
            " without the Z-restriction (>=100)";
  report(9, pass, "coercivity certification: " + detail);
}

void criterion_10() {
  ScenarioConfig cfg = default_config(Scenario::subthreshold_scatter);
  std::printf("  [running subthreshold_scatter: n=%d r_max=%g t_end=%g]\n",
              cfg.n, cfg.r_max, cfg.t_end);
  std::fflush(stdout);
  const RunReport rep = run_scenario(cfg);
  const double decay = summary_value(rep, "supnorm_decay_factor");
  const double monotone = summary_value(rep, "tail_monotone_after_transient");
  const double transient = summary_value(rep, "tail_transient_end_row");
  const bool pass = rep.status == RunStatus::completed && decay >= 2.0 &&
                    monotone == 1.0 &&
                    transient <= 0.25 * static_cast<double>(rep.rows.size());
  report(10, pass,
         "sub-threshold dispersion at half the soliton mass: sup-norm decay x" +
             fmt(decay) + " (needs >= 2), tail(R=8) monotone after row " +
             fmt(transient) + " of " + fmt(double(rep.rows.size())));
}

void criterion_11() {
  namespace fs = std::filesystem;
  auto run_with_cap = [](const ScenarioConfig& cfg, int cap, const fs::path& dir) {
    const int original = par::thread_cap();
    par::set_thread_cap(cap);
    emit_reports(run_scenario(cfg), dir.string());
    par::set_thread_cap(original);
    std::ifstream in(dir / "series.csv", std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  bool pass = true;
  std::string detail;
  ScenarioConfig virial = default_config(Scenario::virial_check);
  virial.n = 1024;
  virial.t_end = 0.05;
  ScenarioConfig sweep = default_config(Scenario::coercivity_sweep);
  sweep.n = 8193;
  sweep.trials = 10;
  int idx = 0;
  for (const ScenarioConfig& cfg : {virial, sweep}) {
    const fs::path base =
        fs::temp_directory_path() / ("csslab_acc11_" + std::to_string(idx++));
    fs::remove_all(base);
    const std::string a = run_with_cap(cfg, 1, base / "a");
    const std::string b = run_with_cap(cfg, 8, base / "b");
    const std::string c = run_with_cap(cfg, 8, base / "c");
    const bool same = !a.empty() && a == b && b == c;
    pass = pass && same;
    detail += std::string(to_string(cfg.scenario)) + (same ? " ok" : " DIFFERS") + "; ";
    fs::remove_all(base);
  }
  report(11, pass, "determinism: byte-identical series.csv across repeats and "
                   "thread caps: " + detail);
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc)
      selected.push_back(std::atoi(argv[++i]));
  }
  if (selected.empty()) selected = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};

  for (int k : selected) {
    switch (k) {
      case 1: criterion_1(); break;
      case 2: criterion_2(); break;
      case 3: criterion_3(); break;
      case 4: criterion_4(); break;
      case 5: criterion_5(); break;
      case 6: criterion_6(); break;
      case 7: criterion_7(); break;
      case 8: criterion_8(); break;
      case 9: criterion_9(); break;
      case 10: criterion_10(); break;
      case 11: criterion_11(); break;
      default:
        std::fprintf(stderr, "unknown criterion %d\n", k);
        return 2;
    }
  }
  return g_failures == 0 ? 0 : 1;
}
