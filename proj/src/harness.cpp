#include "csslab/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "json.hpp"

namespace csslab {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

Scenario scenario_from_string(const std::string& name) {
  if (name == "soliton_static") return Scenario::soliton_static;
  if (name == "blowup_track") return Scenario::blowup_track;
  if (name == "subthreshold_scatter") return Scenario::subthreshold_scatter;
  if (name == "virial_check") return Scenario::virial_check;
  if (name == "coercivity_sweep") return Scenario::coercivity_sweep;
  if (name == "spectral_gap") return Scenario::spectral_gap;
  if (name == "liouville_diagnostic") return Scenario::liouville_diagnostic;
  throw ConfigError("unknown scenario: " + name);
}

const char* to_string(Scenario s) {
  switch (s) {
    case Scenario::soliton_static: return "soliton_static";
    case Scenario::blowup_track: return "blowup_track";
    case Scenario::subthreshold_scatter: return "subthreshold_scatter";
    case Scenario::virial_check: return "virial_check";
    case Scenario::coercivity_sweep: return "coercivity_sweep";
    case Scenario::spectral_gap: return "spectral_gap";
    case Scenario::liouville_diagnostic: return "liouville_diagnostic";
  }
  return "unknown";
}

ScenarioConfig default_config(Scenario s) {
  ScenarioConfig c;
  c.scenario = s;
  switch (s) {
    case Scenario::soliton_static:
      c.r_max = 16.0; c.n = 2048; c.stretch = 20.0;
      c.t_start = 0.0; c.t_end = 1.0;
      c.tail_radii = {4.0, 8.0};
      c.store_snapshots = true;
      break;
    case Scenario::blowup_track:
      c.r_max = 16.0; c.n = 4096; c.stretch = 8.0;
      c.t_start = -1.0; c.t_end = -0.25;
      c.tail_radii = {4.0, 8.0};
      c.store_snapshots = true;
      break;
    case Scenario::subthreshold_scatter:
      c.r_max = 32.0; c.n = 2048; c.stretch = 1.0;
      c.t_start = 0.0; c.t_end = 2.0;
      c.store_snapshots = true;
      break;
    case Scenario::virial_check:
      c.r_max = 32.0; c.n = 2048; c.stretch = 8.0;
      c.t_start = 0.0; c.t_end = 0.5;
      break;
    case Scenario::coercivity_sweep:
      // r_max = 8 keeps the linearized operator's restricted gap O(1);
      // larger domains admit slowly varying far-field modes whose
      // quadratic form collapses logarithmically and the band with it
      c.r_max = 8.0; c.n = 16385; c.stretch = 1.0;
      c.tail_radii = {4.0};
      c.cutoff_radii = {4.0};
      break;
    case Scenario::spectral_gap:
      c.r_max = 8.0;
      break;
    case Scenario::liouville_diagnostic:
      c.r_max = 32.0; c.n = 4096; c.stretch = 20.0;
      c.t_start = 0.0; c.t_end = 0.25;
      c.store_snapshots = true;
      break;
  }
  return c;
}

namespace {

void validate(const ScenarioConfig& c) {
  if (c.m < 1) throw ConfigError("m must be >= 1");
  if (!(c.r_max > 0.0)) throw ConfigError("r_max must be positive");
  if (c.n < kMinGridNodes) throw ConfigError("n must be at least 16");
  if (!(c.stretch >= 1.0)) throw ConfigError("stretch must be >= 1");
  if (c.dt < 0.0) throw ConfigError("dt must be positive or 0 (auto)");
  if (!(c.c_cfl > 0.0)) throw ConfigError("c_cfl must be positive");
  const bool evolves = c.scenario == Scenario::soliton_static ||
                       c.scenario == Scenario::blowup_track ||
                       c.scenario == Scenario::subthreshold_scatter ||
                       c.scenario == Scenario::virial_check ||
                       c.scenario == Scenario::liouville_diagnostic;
  if (evolves && !(c.t_end > c.t_start))
    throw ConfigError("t_end must exceed t_start");
  if (c.scenario == Scenario::blowup_track && !(c.t_end < 0.0))
    throw ConfigError("blowup_track requires t_end < 0");
  for (double R : c.tail_radii)
    if (!(R > 0.0)) throw ConfigError("tail radii must be positive");
  for (double R : c.cutoff_radii)
    if (!(R > 0.0 && 2.0 * R <= c.r_max))
      throw ConfigError("cutoff radii must satisfy 0 < 2R <= r_max");
  if (c.trials < 1) throw ConfigError("trials must be >= 1");
  if (!(c.eps_amplitude > 0.0 && c.eps_amplitude <= c.alpha_star))
    throw ConfigError("eps_amplitude must lie in (0, alpha_star]");
  for (int n : c.gap_sizes)
    if (n < kMinGridNodes) throw ConfigError("gap sizes must be at least 16");
}

std::string fmt_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string fmt_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ScenarioConfig parse_config_json(const std::string& json_text) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  if (!j.contains("scenario")) throw ConfigError("config requires a scenario");
  ScenarioConfig c = default_config(scenario_from_string(j.at("scenario")));
  for (auto& [key, val] : j.items()) {
    try {
      if (key == "scenario") continue;
      else if (key == "m") c.m = val.get<int>();
      else if (key == "r_max") c.r_max = val.get<double>();
      else if (key == "n") c.n = val.get<int>();
      else if (key == "stretch") c.stretch = val.get<double>();
      else if (key == "dt") {
        if (val.is_string()) {
          if (val.get<std::string>() != "auto")
            throw ConfigError("dt must be a number or \"auto\"");
          c.dt = 0.0;
        } else c.dt = val.get<double>();
      } else if (key == "c_cfl") c.c_cfl = val.get<double>();
      else if (key == "t_start") c.t_start = val.get<double>();
      else if (key == "t_end") c.t_end = val.get<double>();
      else if (key == "monitor_every") c.monitor_every = val.get<int>();
      else if (key == "tail_radii") c.tail_radii = val.get<std::vector<double>>();
      else if (key == "cutoff_radii") c.cutoff_radii = val.get<std::vector<double>>();
      else if (key == "eta_ladder") c.eta_ladder = val.get<std::vector<double>>();
      else if (key == "seed") c.seed = val.get<unsigned long>();
      else if (key == "out_dir") c.out_dir = val.get<std::string>();
      else if (key == "store_snapshots") c.store_snapshots = val.get<bool>();
      else if (key == "mass_fraction") c.mass_fraction = val.get<double>();
      else if (key == "trials") c.trials = val.get<int>();
      else if (key == "eps_amplitude") c.eps_amplitude = val.get<double>();
      else if (key == "gap_sizes") c.gap_sizes = val.get<std::vector<int>>();
      else if (key == "alpha_star") c.alpha_star = val.get<double>();
      else if (key == "newton_tol") c.newton_tol = val.get<double>();
      else throw ConfigError("unknown config key: " + key);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError("bad value for key '" + key + "': " + e.what());
    }
  }
  validate(c);
  return c;
}

ScenarioConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_json(ss.str());
}

void apply_override(ScenarioConfig& cfg, const std::string& key_value) {
  const auto pos = key_value.find('=');
  if (pos == std::string::npos)
    throw ConfigError("override must look like key=value: " + key_value);
  const std::string key = key_value.substr(0, pos);
  std::string val = key_value.substr(pos + 1);
  ordered_json j = ordered_json::object();
  j["scenario"] = to_string(cfg.scenario);
  ordered_json parsed;
  try {
    parsed = ordered_json::parse(val);
  } catch (...) {
    parsed = val;  // bare strings are allowed unquoted
  }
  j[key] = parsed;
  // round-trip through the parser so overrides get the same validation
  ordered_json echo = ordered_json::parse(config_to_json(cfg));
  echo[key] = parsed;
  cfg = parse_config_json(echo.dump());
}

std::string config_to_json(const ScenarioConfig& c) {
  ordered_json j;
  j["scenario"] = to_string(c.scenario);
  j["m"] = c.m;
  j["r_max"] = c.r_max;
  j["n"] = c.n;
  j["stretch"] = c.stretch;
  if (c.dt > 0.0) j["dt"] = c.dt; else j["dt"] = "auto";
  j["c_cfl"] = c.c_cfl;
  j["t_start"] = c.t_start;
  j["t_end"] = c.t_end;
  j["monitor_every"] = c.monitor_every;
  j["tail_radii"] = c.tail_radii;
  j["cutoff_radii"] = c.cutoff_radii;
  j["eta_ladder"] = c.eta_ladder;
  j["seed"] = c.seed;
  j["out_dir"] = c.out_dir;
  j["store_snapshots"] = c.store_snapshots;
  j["mass_fraction"] = c.mass_fraction;
  j["trials"] = c.trials;
  j["eps_amplitude"] = c.eps_amplitude;
  j["gap_sizes"] = c.gap_sizes;
  j["alpha_star"] = c.alpha_star;
  j["newton_tol"] = c.newton_tol;
  return j.dump(2);
}

namespace {

SeriesRow to_series_row(const MonitorRow& m) {
  SeriesRow r;
  r.t = m.t;
  r.report = m.report;
  r.tail_mass = m.tail_mass;
  r.localized_virial = m.localized_virial;
  if (m.fit) {
    r.has_fit = true;
    r.lambda_fit = m.fit->lambda;
    r.gamma_fit = m.fit->gamma;
    r.eps_l2 = m.fit->eps_l2;
    r.eps_h1m = m.fit->eps_h1m;
  }
  return r;
}

SnapshotData to_snapshot(double t, const EquivariantField& u) {
  SnapshotData s;
  s.t = t;
  const int n = u.grid->n;
  s.r.resize(n);
  s.re.resize(n);
  s.im.resize(n);
  for (int i = 0; i < n; ++i) {
    s.r[i] = u.grid->nodes[i];
    s.re[i] = u.values[i].real();
    s.im[i] = u.values[i].imag();
  }
  return s;
}

EquivariantField field_from_snapshot(int m, const GridPtr& grid,
                                     const SnapshotData& s) {
  EquivariantField u = make_field(m, grid);
  for (int i = 0; i < grid->n; ++i) u.values[i] = Complex{s.re[i], s.im[i]};
  return u;
}

EvolutionConfig to_evolution_config(const ScenarioConfig& c) {
  EvolutionConfig e;
  e.m = c.m;
  e.r_max = c.r_max;
  e.n = c.n;
  e.stretch = c.stretch;
  e.dt = c.dt;
  e.c_cfl = c.c_cfl;
  e.t_start = c.t_start;
  e.t_end = c.t_end;
  e.monitor_every = c.monitor_every;
  e.tail_radii = c.tail_radii;
  e.cutoff_radii = c.cutoff_radii;
  e.store_snapshots = c.store_snapshots;
  e.newton_tol = c.newton_tol;
  return e;
}

// A r^m e^{-r^2} with A solved by bisection to hit the target planar mass
EquivariantField bump_with_mass(int m, const GridPtr& grid, double target) {
  EquivariantField prof = sample_field(m, grid, [m](double r) {
    return Complex{std::pow(r, m) * std::exp(-r * r), 0.0};
  });
  auto mass_at = [&](double a) {
    EquivariantField u = prof;
    for (auto& v : u.values) v *= a;
    return mass(u);
  };
  double lo = 0.0, hi = 1.0;
  while (mass_at(hi) < target) hi *= 2.0;
  for (int it = 0; it < 200 && (hi - lo) > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mass_at(mid) < target ? lo : hi) = mid;
  }
  const double a = 0.5 * (lo + hi);
  EquivariantField u = prof;
  for (auto& v : u.values) v *= a;
  return u;
}

EquivariantField random_smooth_field(int m, const GridPtr& grid,
                                     std::mt19937_64& rng, int min_bumps,
                                     int max_bumps) {
  std::uniform_int_distribution<int> nb(min_bumps, max_bumps);
  std::uniform_real_distribution<double> center(0.5, 5.0);
  std::uniform_real_distribution<double> width(0.4, 2.0);
  std::normal_distribution<double> amp(0.0, 1.0);
  const int k = nb(rng);
  EquivariantField u = make_field(m, grid);
  for (int b = 0; b < k; ++b) {
    const double c = center(rng);
    const double w = width(rng);
    const Complex a{amp(rng), amp(rng)};
    for (int i = 1; i < grid->n - 1; ++i) {
      const double r = grid->nodes[i];
      const double arg = (r - c) / w;
      u.values[i] += a * std::pow(r / c, m) * std::exp(-arg * arg);
    }
  }
  return u;
}

}  // namespace

std::string series_csv_header(const ScenarioConfig& cfg) {
  std::string h = "t,mass,energy_direct,energy_selfdual,virial,variance";
  for (double R : cfg.tail_radii) h += ",tail_mass_R" + fmt_g(R);
  for (double R : cfg.cutoff_radii) h += ",localized_virial_R" + fmt_g(R);
  h += ",lambda_fit,gamma_fit,eps_l2,eps_h1m";
  return h;
}

std::vector<std::pair<std::string, double>> summarize(
    const ScenarioConfig& cfg, const std::vector<SeriesRow>& rows,
    const std::vector<SnapshotData>& snapshots) {
  std::vector<std::pair<std::string, double>> out;
  if (rows.empty()) return out;

  const double m0 = rows.front().report.mass;
  const double e0 = rows.front().report.energy_direct;
  const double energy_scale =
      std::max(std::abs(e0), (m0 / cfg.r_max) * (m0 / cfg.r_max));

  auto drift_metrics = [&]() {
    double md = 0.0, ed = 0.0;
    for (const auto& r : rows) {
      md = std::max(md, std::abs(r.report.mass - m0));
      ed = std::max(ed, std::abs(r.report.energy_direct - e0));
    }
    out.emplace_back("mass_drift_rel", md / m0);
    out.emplace_back("energy_drift_rel", ed / energy_scale);
  };

  auto identity_metrics = [&]() {
    double vir_scale = 4.0 * energy_scale;
    for (const auto& r : rows)
      vir_scale = std::max(vir_scale, std::abs(4.0 * r.report.energy_direct));
    double var_scale = 4.0 * energy_scale;
    for (const auto& r : rows)
      var_scale = std::max(var_scale, std::abs(4.0 * r.report.virial));
    double worst_vir = 0.0, worst_var = 0.0;
    for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
      const double dt2 = rows[i + 1].t - rows[i - 1].t;
      const double dvir =
          (rows[i + 1].report.virial - rows[i - 1].report.virial) / dt2;
      const double dvar =
          (rows[i + 1].report.variance - rows[i - 1].report.variance) / dt2;
      worst_vir = std::max(
          worst_vir, std::abs(dvir - 4.0 * rows[i].report.energy_direct));
      worst_var =
          std::max(worst_var, std::abs(dvar - 4.0 * rows[i].report.virial));
    }
    out.emplace_back("virial_identity_violation", worst_vir / vir_scale);
    out.emplace_back("variance_identity_violation", worst_var / var_scale);
  };

  auto deviation_from_first_snapshot = [&]() {
    if (snapshots.size() < 2) return;
    const auto grid = make_grid(cfg.r_max, cfg.n, cfg.stretch);
    const auto u0 = field_from_snapshot(cfg.m, grid, snapshots.front());
    const double n0 = l2_norm(u0);
    double worst = 0.0;
    for (const auto& s : snapshots) {
      auto u = field_from_snapshot(cfg.m, grid, s);
      for (int i = 0; i < grid->n; ++i) u.values[i] -= u0.values[i];
      worst = std::max(worst, l2_norm(u) / n0);
    }
    out.emplace_back("max_rel_l2_deviation", worst);
  };

  switch (cfg.scenario) {
    case Scenario::soliton_static: {
      deviation_from_first_snapshot();
      drift_metrics();
      identity_metrics();
      break;
    }
    case Scenario::blowup_track: {
      const auto grid = make_grid(cfg.r_max, cfg.n, cfg.stretch);
      double worst = 0.0, final_err = 0.0;
      for (const auto& s : snapshots) {
        const auto oracle = blowup_profile(cfg.m, s.t, grid);
        auto u = field_from_snapshot(cfg.m, grid, s);
        for (int i = 0; i < grid->n; ++i) u.values[i] -= oracle.values[i];
        const double err = l2_norm(u) / l2_norm(oracle);
        worst = std::max(worst, err);
        final_err = err;
      }
      out.emplace_back("max_oracle_rel_l2_error", worst);
      out.emplace_back("final_oracle_rel_l2_error", final_err);
      double worst_fit = 0.0;
      for (const auto& r : rows) {
        if (!r.has_fit) continue;
        worst_fit = std::max(worst_fit, std::abs(r.lambda_fit / std::abs(r.t) - 1.0));
      }
      out.emplace_back("max_lambda_fit_rel_error", worst_fit);
      // The decomposition contract holds in the small-energy regime
      // sqrt(E) <= alpha* ||u||_{H1m}; the snapshot S(t) enters it as
      // t -> 0^-, and only there does lambda_fit have to track |t|.
      double worst_fit_regime = 0.0;
      int regime_rows = 0;
      for (std::size_t i = 0; i < rows.size() && i < snapshots.size(); ++i) {
        if (!rows[i].has_fit) continue;
        const auto u = field_from_snapshot(cfg.m, grid, snapshots[i]);
        const double e = std::sqrt(std::max(rows[i].report.energy_direct, 0.0));
        if (e > cfg.alpha_star * h1m_norm(u)) continue;
        ++regime_rows;
        worst_fit_regime = std::max(
            worst_fit_regime, std::abs(rows[i].lambda_fit / std::abs(rows[i].t) - 1.0));
      }
      out.emplace_back("max_lambda_fit_rel_error_in_regime", worst_fit_regime);
      out.emplace_back("lambda_fit_regime_rows", static_cast<double>(regime_rows));
      drift_metrics();
      identity_metrics();
      break;
    }
    case Scenario::subthreshold_scatter: {
      if (!snapshots.empty()) {
        auto sup = [](const SnapshotData& s) {
          double v = 0.0;
          for (std::size_t i = 0; i < s.re.size(); ++i)
            v = std::max(v, std::hypot(s.re[i], s.im[i]));
          return v;
        };
        out.emplace_back("supnorm_decay_factor",
                         sup(snapshots.front()) / sup(snapshots.back()));
      }
      std::size_t col = 0;
      for (std::size_t i = 0; i < cfg.tail_radii.size(); ++i)
        if (cfg.tail_radii[i] == 8.0) col = i;
      std::size_t transient = rows.size();
      for (std::size_t k = 0; k < rows.size(); ++k) {
        bool ok = true;
        for (std::size_t i = k; i + 1 < rows.size(); ++i)
          if (rows[i + 1].tail_mass[col] <= rows[i].tail_mass[col]) { ok = false; break; }
        if (ok) { transient = k; break; }
      }
      out.emplace_back("tail_transient_end_row", static_cast<double>(transient));
      out.emplace_back("tail_monotone_after_transient",
                       transient + 1 < rows.size() ? 1.0 : 0.0);
      out.emplace_back("tail_growth_factor",
                       rows.back().tail_mass[col] /
                           std::max(rows.front().tail_mass[col], 1e-300));
      drift_metrics();
      break;
    }
    case Scenario::virial_check: {
      drift_metrics();
      identity_metrics();
      break;
    }
    case Scenario::coercivity_sweep: {
      const auto grid = make_grid(cfg.r_max, cfg.n, cfg.stretch);
      const double e_q = energy_direct(soliton(cfg.m, grid));
      double lo = 1e300, hi = -1e300;
      for (const auto& r : rows) {
        const double ratio =
            (r.report.energy_direct - e_q) / (r.eps_h1m * r.eps_h1m);
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
      }
      out.emplace_back("band_lo", lo);
      out.emplace_back("band_hi", hi);
      out.emplace_back("band_spread", hi / lo);
      out.emplace_back("reference_energy", e_q);
      break;
    }
    case Scenario::spectral_gap: {
      for (int n : cfg.gap_sizes) {
        const auto grid = make_grid(cfg.r_max, n, cfg.stretch);
        const auto profiles = make_profiles(cfg.m, grid);
        const auto gap = lq_spectral_gap(cfg.m, grid, profiles);
        out.emplace_back("gap_n" + std::to_string(n), gap.restricted);
        out.emplace_back("gap_unrestricted_n" + std::to_string(n),
                         gap.unrestricted);
        out.emplace_back("gap_upper_n" + std::to_string(n), gap.upper);
      }
      break;
    }
    case Scenario::liouville_diagnostic: {
      for (std::size_t i = 0; i < cfg.tail_radii.size(); ++i) {
        double sup_tail = 0.0;
        for (const auto& r : rows) sup_tail = std::max(sup_tail, r.tail_mass[i]);
        const std::string rl = fmt_g(cfg.tail_radii[i]);
        out.emplace_back("sup_tail_mass_R" + rl, sup_tail);
        for (double eta : cfg.eta_ladder)
          out.emplace_back("tail_R" + rl + "_below_eta" + fmt_g(eta),
                           sup_tail < eta ? 1.0 : 0.0);
      }
      double eps_sup = 0.0, eps_final = 0.0;
      for (const auto& r : rows) {
        if (!r.has_fit) continue;
        eps_sup = std::max(eps_sup, r.eps_l2);
        eps_final = r.eps_l2;
      }
      out.emplace_back("eps_l2_sup", eps_sup);
      out.emplace_back("eps_l2_final", eps_final);
      // Localized-virial rate and cutoff energy, both reported; the
      // relating constant is left to the analyst.
      for (std::size_t c = 0; c < cfg.cutoff_radii.size(); ++c) {
        double rate = 0.0;
        for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
          const double dt2 = rows[i + 1].t - rows[i - 1].t;
          rate = std::max(rate, std::abs((rows[i + 1].localized_virial[c] -
                                          rows[i - 1].localized_virial[c]) /
                                         dt2));
        }
        out.emplace_back("max_localized_virial_rate_R" + fmt_g(cfg.cutoff_radii[c]),
                         rate);
      }
      if (!snapshots.empty() && !cfg.cutoff_radii.empty()) {
        const auto grid = make_grid(cfg.r_max, cfg.n, cfg.stretch);
        auto u = field_from_snapshot(cfg.m, grid, snapshots.back());
        for (double R : cfg.cutoff_radii) {
          const auto cut = make_cutoffs(*grid, R);
          EquivariantField cu = u;
          for (int i = 0; i < grid->n; ++i) cu.values[i] *= cut.chi[i];
          out.emplace_back("cutoff_energy_R" + fmt_g(R), energy_direct(cu));
        }
      }
      drift_metrics();
      break;
    }
  }
  return out;
}

RunReport run_scenario(const ScenarioConfig& cfg) {
  validate(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  RunReport rep;
  rep.config = cfg;

  auto run_evolution = [&](const EquivariantField& u0, bool fit,
                           SymmetryParams guess = {}) {
    EvolutionConfig ec = to_evolution_config(cfg);
    ec.fit_modulation = fit;
    ec.fit_guess = guess;
    TrajectoryRecord rec = evolve(ec, u0);
    rep.status = rec.status;
    for (const auto& row : rec.rows) rep.rows.push_back(to_series_row(row));
    for (const auto& [t, u] : rec.snapshots)
      rep.snapshots.push_back(to_snapshot(t, u));
  };

  const auto grid = make_grid(cfg.r_max, cfg.n, cfg.stretch);
  switch (cfg.scenario) {
    case Scenario::soliton_static:
      run_evolution(soliton(cfg.m, grid), false);
      break;
    case Scenario::blowup_track: {
      EquivariantField u0 = blowup_profile(cfg.m, cfg.t_start, grid);
      SymmetryParams guess;
      guess.lambda = std::abs(cfg.t_start);
      run_evolution(u0, true, guess);
      break;
    }
    case Scenario::subthreshold_scatter: {
      const double target = cfg.mass_fraction * 8.0 * std::numbers::pi *
                            (cfg.m + 1);
      run_evolution(bump_with_mass(cfg.m, grid, target), false);
      break;
    }
    case Scenario::virial_check: {
      std::mt19937_64 rng(cfg.seed);
      EquivariantField u0 = random_smooth_field(cfg.m, grid, rng, 2, 4);
      run_evolution(u0, false);
      break;
    }
    case Scenario::coercivity_sweep: {
      const auto profiles = make_profiles(cfg.m, grid);
      const auto q = soliton(cfg.m, grid);
      const auto lq = lambda_Q(cfg.m, grid);
      const auto iq = apply_phase(q, std::numbers::pi / 2);
      const double d11 = inner_product(lq, profiles.z1);
      const double d22 = inner_product(iq, profiles.z2);
      std::mt19937_64 rng(cfg.seed);
      for (int trial = 0; trial < cfg.trials; ++trial) {
        EquivariantField eps = random_smooth_field(cfg.m, grid, rng, 2, 4);
        const double a = inner_product(eps, profiles.z1) / d11;
        const double b = inner_product(eps, profiles.z2) / d22;
        for (int i = 0; i < grid->n; ++i)
          eps.values[i] -= a * lq.values[i] + b * iq.values[i];
        const double s = cfg.eps_amplitude / h1m_seminorm(eps);
        for (auto& v : eps.values) v *= s;
        EquivariantField sum = q;
        for (int i = 0; i < grid->n; ++i) sum.values[i] += eps.values[i];
        SeriesRow row;
        row.t = static_cast<double>(trial);
        row.report = conserved_report(sum);
        for (double R : cfg.tail_radii) row.tail_mass.push_back(tail_mass(sum, R));
        for (double R : cfg.cutoff_radii)
          row.localized_virial.push_back(
              localized_virial(sum, make_cutoffs(*grid, R)));
        row.has_fit = true;
        row.lambda_fit = 1.0;
        row.gamma_fit = 0.0;
        row.eps_l2 = l2_norm(eps);
        row.eps_h1m = h1m_seminorm(eps);
        rep.rows.push_back(std::move(row));
      }
      rep.status = RunStatus::completed;
      break;
    }
    case Scenario::spectral_gap: {
      for (int n : cfg.gap_sizes) {
        const auto g = make_grid(cfg.r_max, n, cfg.stretch);
        const auto q = soliton(cfg.m, g);
        SeriesRow row;
        row.t = static_cast<double>(n);
        row.report = conserved_report(q);
        for (double R : cfg.tail_radii) row.tail_mass.push_back(tail_mass(q, R));
        for (double R : cfg.cutoff_radii)
          row.localized_virial.push_back(
              localized_virial(q, make_cutoffs(*g, R)));
        rep.rows.push_back(std::move(row));
      }
      rep.status = RunStatus::completed;
      break;
    }
    case Scenario::liouville_diagnostic: {
      SymmetryParams guess;
      run_evolution(soliton(cfg.m, grid), true, guess);
      break;
    }
  }

  rep.summary = summarize(cfg, rep.rows, rep.snapshots);
  rep.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return rep;
}

namespace {

void atomic_write(const fs::path& target, const std::string& content) {
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + tmp.string());
    out << content;
  }
  fs::rename(tmp, target);
}

}  // namespace

void emit_reports(const RunReport& report, const std::string& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + out_dir);

  // series.csv
  std::string csv = series_csv_header(report.config) + "\n";
  for (const auto& r : report.rows) {
    csv += fmt_full(r.t);
    csv += ',' + fmt_full(r.report.mass);
    csv += ',' + fmt_full(r.report.energy_direct);
    csv += ',' + fmt_full(r.report.energy_selfdual);
    csv += ',' + fmt_full(r.report.virial);
    csv += ',' + fmt_full(r.report.variance);
    for (double v : r.tail_mass) csv += ',' + fmt_full(v);
    for (double v : r.localized_virial) csv += ',' + fmt_full(v);
    if (r.has_fit) {
      csv += ',' + fmt_full(r.lambda_fit) + ',' + fmt_full(r.gamma_fit) + ',' +
             fmt_full(r.eps_l2) + ',' + fmt_full(r.eps_h1m);
    } else {
      csv += ",,,,";
    }
    csv += '\n';
  }
  atomic_write(fs::path(out_dir) / "series.csv", csv);

  // run.json
  ordered_json j;
  j["config"] = ordered_json::parse(config_to_json(report.config));
  j["status"] = to_string(report.status);
  j["wall_time_s"] = report.wall_time_s;
  ordered_json s = ordered_json::object();
  for (const auto& [k, v] : report.summary) s[k] = v;
  j["summary"] = s;
  atomic_write(fs::path(out_dir) / "run.json", j.dump(2) + "\n");

  // snapshots
  if (!report.snapshots.empty()) {
    const fs::path dir = fs::path(out_dir) / "snapshots";
    fs::create_directories(dir);
    for (std::size_t k = 0; k < report.snapshots.size(); ++k) {
      const auto& s = report.snapshots[k];
      std::string body = "r,re_u,im_u\n";
      for (std::size_t i = 0; i < s.r.size(); ++i) {
        body += fmt_full(s.r[i]);
        body += ',' + fmt_full(s.re[i]);
        body += ',' + fmt_full(s.im[i]);
        body += '\n';
      }
      char name[32];
      std::snprintf(name, sizeof name, "snapshot_%05zu.csv", k);
      atomic_write(dir / name, body);
    }
  }
}

std::vector<SeriesRow> read_series_csv(const std::string& path,
                                       const ScenarioConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("empty series file: " + path);
  if (line != series_csv_header(cfg))
    throw std::runtime_error("series header mismatch in " + path);
  std::vector<SeriesRow> rows;
  const std::size_t nt = cfg.tail_radii.size();
  const std::size_t nc = cfg.cutoff_radii.size();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    // a trailing empty cell is not returned by getline; pad
    while (cells.size() < 6 + nt + nc + 4) cells.emplace_back();
    SeriesRow r;
    std::size_t k = 0;
    auto num = [&](std::size_t i) { return std::strtod(cells[i].c_str(), nullptr); };
    r.t = num(k++);
    r.report.mass = num(k++);
    r.report.energy_direct = num(k++);
    r.report.energy_selfdual = num(k++);
    r.report.virial = num(k++);
    r.report.variance = num(k++);
    for (std::size_t i = 0; i < nt; ++i) r.tail_mass.push_back(num(k++));
    for (std::size_t i = 0; i < nc; ++i) r.localized_virial.push_back(num(k++));
    if (!cells[k].empty()) {
      r.has_fit = true;
      r.lambda_fit = num(k);
      r.gamma_fit = num(k + 1);
      r.eps_l2 = num(k + 2);
      r.eps_h1m = num(k + 3);
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<SnapshotData> read_snapshots_dir(const std::string& dir) {
  std::vector<fs::path> files;
  if (fs::exists(dir))
    for (const auto& e : fs::directory_iterator(dir))
      if (e.path().extension() == ".csv") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<SnapshotData> out;
  for (const auto& f : files) {
    std::ifstream in(f);
    std::string line;
    std::getline(in, line);  // header
    SnapshotData s;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      double r, re, im;
      if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &r, &re, &im) == 3) {
        s.r.push_back(r);
        s.re.push_back(re);
        s.im.push_back(im);
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace csslab
