#pragma once

#include <string>
#include <utility>
#include <vector>

#include "csslab/evolution.hpp"

namespace csslab {

enum class Scenario {
  soliton_static,
  blowup_track,
  subthreshold_scatter,
  virial_check,
  coercivity_sweep,
  spectral_gap,
  liouville_diagnostic,
};

Scenario scenario_from_string(const std::string& name);
const char* to_string(Scenario s);

/// Thrown for invalid configuration; the CLI maps it to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ScenarioConfig {
  Scenario scenario = Scenario::soliton_static;
  int m = 1;
  double r_max = 32.0;
  int n = 2048;
  double stretch = 1.0;
  double dt = 0.0;  // 0 = auto (cfl)
  double c_cfl = 0.2;
  double t_start = 0.0;
  double t_end = 1.0;
  int monitor_every = 0;
  std::vector<double> tail_radii{4.0, 8.0, 16.0};
  std::vector<double> cutoff_radii{4.0};
  std::vector<double> eta_ladder{1e-2, 1e-3};
  unsigned long seed = 12345;
  std::string out_dir = "out";
  bool store_snapshots = false;
  // scenario-specific knobs
  double mass_fraction = 0.5;   // subthreshold bump mass / soliton mass
  int trials = 100;             // coercivity sweep
  double eps_amplitude = 0.01;  // H1m seminorm of the sweep perturbations
  std::vector<int> gap_sizes{128, 256, 512};
  double alpha_star = 0.1;
  double newton_tol = 1e-12;
};

ScenarioConfig default_config(Scenario s);
ScenarioConfig parse_config_json(const std::string& json_text);
ScenarioConfig load_config_file(const std::string& path);
void apply_override(ScenarioConfig& cfg, const std::string& key_value);
std::string config_to_json(const ScenarioConfig& cfg);

struct SeriesRow {
  double t = 0.0;
  ConservedReport report;
  std::vector<double> tail_mass;
  std::vector<double> localized_virial;
  bool has_fit = false;
  double lambda_fit = 0.0;
  double gamma_fit = 0.0;
  double eps_l2 = 0.0;
  double eps_h1m = 0.0;
};

struct SnapshotData {
  double t = 0.0;
  std::vector<double> r;
  std::vector<double> re;
  std::vector<double> im;
};

struct RunReport {
  ScenarioConfig config;
  std::vector<SeriesRow> rows;
  std::vector<SnapshotData> snapshots;
  std::vector<std::pair<std::string, double>> summary;
  RunStatus status = RunStatus::completed;
  double wall_time_s = 0.0;
};

RunReport run_scenario(const ScenarioConfig& cfg);

/// Every summary metric is recomputed from the emitted rows/snapshots; the
/// CSV round-trips through %.17g, so re-ingesting reproduces it bit for bit.
std::vector<std::pair<std::string, double>> summarize(
    const ScenarioConfig& cfg, const std::vector<SeriesRow>& rows,
    const std::vector<SnapshotData>& snapshots);

std::string series_csv_header(const ScenarioConfig& cfg);

/// Writes run.json, series.csv and (when present) snapshots/*.csv.
/// All writes go to a temp file first and are renamed into place.
void emit_reports(const RunReport& report, const std::string& out_dir);

std::vector<SeriesRow> read_series_csv(const std::string& path,
                                       const ScenarioConfig& cfg);
std::vector<SnapshotData> read_snapshots_dir(const std::string& dir);

}  // namespace csslab
