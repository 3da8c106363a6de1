// SPDX-FileCopyrightText: Copyright (c) 2026 The evosurf-ch Authors
// SPDX-License-Identifier: Apache-2.0

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "evosurf/config.hpp"
#include "evosurf/output.hpp"
#include "evosurf/simulation.hpp"
#include "evosurf/sweep.hpp"
#include "evosurf/verify.hpp"

namespace {

using namespace evosurf;

void print_admissibility(const AdmissibilityReport& report) {
  std::printf("verdict: %s, m_max = %.10g\n", to_string(report.verdict), report.max_m);
  if (report.predicted_breakdown_time)
    std::printf("predicted breakdown time: %.10g\n", *report.predicted_breakdown_time);
  std::fflush(stdout);
}

int cmd_simulate(const std::string& config_path) {
  const RunConfig cfg = parse_config(config_path);
  const EvolvingSurface surface = make_surface(cfg.surface);
  const Potential potential = make_potential(cfg);
  const SchemeConfig scheme = make_scheme(cfg);
  const Vector u0 = initial_samples(cfg, surface.reference_mesh);

  // Singular potentials: report the admissibility verdict before stepping.
  if (cfg.potential_kind == "log" || cfg.potential_kind == "obstacle")
    print_admissibility(admissibility_profile(surface, u0, 101, cfg.dt));

  std::filesystem::create_directories(cfg.output_directory);
  DiagnosticsWriter writer(
      (std::filesystem::path(cfg.output_directory) / "diagnostics.csv").string());

  int output_index = 0;
  RunOptions options;
  options.every_n_steps = cfg.every_n_steps;
  options.advective_mode = cfg.advective_mode;
  options.on_output = [&](const SimState& state, const AssembledForms&, const DiagnosticsRow& row) {
    writer.write(row);
    if (cfg.snapshots) {
      const auto dir = std::filesystem::path(cfg.output_directory);
      write_snapshot(state, (dir / snapshot_filename(output_index, "txt")).string());
      if (cfg.vtk) write_legacy_vtk(state, (dir / snapshot_filename(output_index, "vtk")).string());
    }
    ++output_index;
  };

  const Trajectory traj = run_simulation(surface, potential, scheme, u0, options);
  if (!traj.completed) {
    std::fprintf(stderr, "run failed: %s\n", traj.error.c_str());
    return 1;
  }
  std::printf("completed %d output rows, final t = %.10g\n",
              static_cast<int>(traj.rows.size()), traj.rows.back().obs.t);
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& parameter,
              const std::vector<double>& values, int workers) {
  const RunConfig cfg = parse_config(config_path);
  std::filesystem::create_directories(cfg.output_directory);
  const SweepOutcome outcome = run_sweep(cfg, parameter, values, workers, cfg.output_directory);
  const std::string summary =
      (std::filesystem::path(cfg.output_directory) / "sweep_summary.csv").string();
  write_sweep_summary(outcome, summary);
  bool all_ok = true;
  for (const auto& row : outcome.rows) {
    std::printf("%s = %-12.6g max_excess = %-14.8g distance = %-14.8g %s\n",
                parameter.c_str(), row.value, row.max_excess, row.distance_to_reference,
                row.completed ? "ok" : ("FAILED: " + row.error).c_str());
    all_ok = all_ok && row.completed;
  }
  std::printf("summary written to %s\n", summary.c_str());
  return all_ok ? 0 : 1;
}

int cmd_verify() {
  const std::vector<VerifyResult> results = run_verification();
  bool all_pass = true;
  for (const auto& r : results) {
    std::printf("%-4s %s%s%s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                r.detail.empty() ? "" : "  -- ", r.detail.c_str());
    all_pass = all_pass && r.pass;
  }
  return all_pass ? 0 : 1;
}

int cmd_admissibility(const std::string& config_path) {
  const RunConfig cfg = parse_config(config_path);
  const EvolvingSurface surface = make_surface(cfg.surface);
  const Vector u0 = initial_samples(cfg, surface.reference_mesh);
  const AdmissibilityReport report = admissibility_profile(surface, u0, 201, cfg.dt);
  print_admissibility(report);
  std::printf("t, m\n");
  for (std::size_t k = 0; k < report.samples.size(); k += std::max<std::size_t>(1, report.samples.size() / 20))
    std::printf("%.6g, %.10g\n", report.samples[k].first, report.samples[k].second);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cahn-Hilliard simulator on prescribed evolving surfaces"};
  app.require_subcommand(1);

  std::string config_path;
  auto* simulate = app.add_subcommand("simulate", "run a simulation from a config file");
  simulate->add_option("config", config_path, "config file")->required();

  std::string sweep_config, sweep_param;
  std::vector<double> sweep_values;
  int workers = 0;
  auto* sweep = app.add_subcommand("sweep", "run a parameter sweep");
  sweep->add_option("config", sweep_config, "config file")->required();
  sweep->add_option("--param", sweep_param, "log_delta | penalty_delta | theta")->required();
  sweep->add_option("--values", sweep_values, "comma-separated values")
      ->required()
      ->delimiter(',');
  sweep->add_option("--workers", workers, "parallel sub-runs (default: EVOSURF_WORKERS or cores)");

  auto* verify = app.add_subcommand("verify", "run the built-in invariant checks");

  std::string adm_config;
  auto* admissibility = app.add_subcommand("admissibility", "admissibility profile for a config");
  admissibility->add_option("config", adm_config, "config file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return cmd_simulate(config_path);
    if (sweep->parsed()) return cmd_sweep(sweep_config, sweep_param, sweep_values, workers);
    if (verify->parsed()) return cmd_verify();
    if (admissibility->parsed()) return cmd_admissibility(adm_config);
  } catch (const evosurf::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
