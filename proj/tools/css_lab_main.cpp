#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "csslab/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"css-lab: equivariant Chern-Simons-Schrodinger scenario runner"};

  std::string scenario_name;
  std::string config_path;
  std::string out_dir;
  std::vector<std::string> overrides;
  app.add_option("--scenario", scenario_name,
                 "scenario name (soliton_static, blowup_track, "
                 "subthreshold_scatter, virial_check, coercivity_sweep, "
                 "spectral_gap, liouville_diagnostic)");
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--out", out_dir, "output directory (default from config)");
  app.add_option("--override", overrides, "key=value config overrides");

  CLI11_PARSE(app, argc, argv);

  csslab::ScenarioConfig cfg;
  try {
    if (!config_path.empty()) {
      cfg = csslab::load_config_file(config_path);
      if (!scenario_name.empty() &&
          csslab::scenario_from_string(scenario_name) != cfg.scenario)
        throw csslab::ConfigError("--scenario disagrees with the config file");
    } else if (!scenario_name.empty()) {
      cfg = csslab::default_config(csslab::scenario_from_string(scenario_name));
    } else {
      std::fprintf(stderr, "error: need --scenario or --config\n");
      return 2;
    }
    for (const auto& kv : overrides) csslab::apply_override(cfg, kv);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  }

  try {
    const csslab::RunReport report = csslab::run_scenario(cfg);
    csslab::emit_reports(report, cfg.out_dir);
    std::printf("scenario %s: status=%s wall_time=%.2fs rows=%zu -> %s\n",
                csslab::to_string(cfg.scenario), csslab::to_string(report.status),
                report.wall_time_s, report.rows.size(), cfg.out_dir.c_str());
    for (const auto& [k, v] : report.summary)
      std::printf("  %-42s %.12g\n", k.c_str(), v);
    if (report.status != csslab::RunStatus::completed) return 1;
    return 0;
  } catch (const csslab::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "runtime error: %s\n", e.what());
    return 1;
  }
}
