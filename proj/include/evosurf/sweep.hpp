// SPDX-FileCopyrightText: Copyright (c) 2026 The evosurf-ch Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EVOSURF_SWEEP_HPP
#define EVOSURF_SWEEP_HPP

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <future>
#include <limits>
#include <sstream>
#include <thread>
#include <vector>

#include "evosurf/config.hpp"
#include "evosurf/output.hpp"
#include "evosurf/simulation.hpp"

namespace evosurf {

struct SweepRow {
  double value = 0.0;
  double max_excess = std::numeric_limits<double>::quiet_NaN();
  double distance_to_reference = std::numeric_limits<double>::quiet_NaN();
  double wall_time_s = 0.0;
  bool completed = false;
  std::string error;
};

struct SweepOutcome {
  std::string parameter;
  std::vector<SweepRow> rows;
};

namespace detail {

struct CapturedRun {
  std::vector<double> times;
  std::vector<Vector> states;
  std::vector<SparseMatrix> mass;
  double max_excess = 0.0;
  Trajectory trajectory;
};

inline CapturedRun execute_capturing(const RunConfig& cfg, const std::string& diagnostics_path) {
  CapturedRun run;
  const EvolvingSurface surface = make_surface(cfg.surface);
  const Potential potential = make_potential(cfg);
  const SchemeConfig scheme = make_scheme(cfg);
  const Vector u0 = initial_samples(cfg, surface.reference_mesh);

  std::optional<DiagnosticsWriter> writer;
  if (!diagnostics_path.empty()) writer.emplace(diagnostics_path);

  RunOptions options;
  options.every_n_steps = cfg.every_n_steps;
  options.advective_mode = cfg.advective_mode;
  options.on_output = [&run, &writer](const SimState& s, const AssembledForms& f,
                                      const DiagnosticsRow& row) {
    run.times.push_back(s.t);
    run.states.push_back(s.u);
    run.mass.push_back(f.M);
    run.max_excess = std::max(run.max_excess, row.obs.phase_excess);
    if (writer) writer->write(row);
  };
  run.trajectory = run_simulation(surface, potential, scheme, u0, options);
  return run;
}

/// Time-integrated L2 distance between two captured runs over their common
/// output times (trapezoid rule on ||u_a - u_b||^2, square root at the end).
inline double trajectory_distance(const CapturedRun& a, const CapturedRun& b) {
  const std::size_t n = std::min(a.states.size(), b.states.size());
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  double integral = 0.0;
  double prev_sq = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const Vector z = a.states[k] - b.states[k];
    const double sq = z.dot(a.mass[k] * z);
    if (k > 0) integral += 0.5 * (sq + prev_sq) * (a.times[k] - a.times[k - 1]);
    prev_sq = sq;
  }
  return std::sqrt(std::max(0.0, integral));
}

inline int sweep_worker_count(int requested) {
  if (const char* env = std::getenv("EVOSURF_WORKERS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  if (requested >= 1) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace detail

/// Run one simulation per parameter value and summarize scalar metrics.
/// Parameters: log_delta and theta apply to logarithmic runs, penalty_delta to
/// obstacle runs. The distance column is measured against the obstacle-penalty
/// reference (theta sweeps) or the smallest-value run (delta sweeps). Sub-runs
/// execute concurrently up to the worker cap; each owns its output directory.
inline SweepOutcome run_sweep(const RunConfig& base, const std::string& parameter,
                              const std::vector<double>& values, int workers = 0,
                              const std::string& output_dir = "") {
  if (values.empty()) throw ConfigError("empty sweep: no parameter values given");
  if (parameter != "log_delta" && parameter != "penalty_delta" && parameter != "theta")
    throw ConfigError("unknown sweep parameter '" + parameter +
                      "' (expected log_delta, penalty_delta or theta)");
  if ((parameter == "log_delta" || parameter == "theta") && base.potential_kind != "log")
    throw ConfigError("sweep parameter '" + parameter + "' requires potential.kind = log");
  if (parameter == "penalty_delta" && base.potential_kind != "obstacle")
    throw ConfigError("sweep parameter 'penalty_delta' requires potential.kind = obstacle");

  auto configure = [&](double value) {
    RunConfig cfg = base;
    if (parameter == "theta")
      cfg.theta = value;
    else
      cfg.delta = value;
    return cfg;
  };
  auto subdir = [&](const std::string& label) {
    if (output_dir.empty()) return std::string();
    const std::filesystem::path dir = std::filesystem::path(output_dir) / label;
    std::filesystem::create_directories(dir);
    return (dir / "diagnostics.csv").string();
  };
  auto value_label = [&](double v) {
    std::ostringstream os;
    os << parameter << "_" << v;
    return os.str();
  };

  // Reference run, computed first and serially. Delta sweeps reuse the
  // smallest-value run as their own row instead of running it twice.
  detail::CapturedRun reference;
  bool have_reference = false;
  double reused_value = std::numeric_limits<double>::quiet_NaN();
  if (parameter == "theta") {
    RunConfig ref = base;
    ref.potential_kind = "obstacle";
    ref.model = Model::CH1Obstacle;
    reference = detail::execute_capturing(ref, subdir("reference_obstacle"));
    have_reference = reference.trajectory.completed;
  } else {
    const double ref_value = *std::min_element(values.begin(), values.end());
    reference = detail::execute_capturing(configure(ref_value), subdir(value_label(ref_value)));
    have_reference = reference.trajectory.completed;
    reused_value = ref_value;
  }

  SweepOutcome outcome;
  outcome.parameter = parameter;
  outcome.rows.resize(values.size());

  const int n_workers = detail::sweep_worker_count(workers);
  std::size_t next = 0;
  while (next < values.size()) {
    const std::size_t batch = std::min<std::size_t>(n_workers, values.size() - next);
    std::vector<std::future<void>> jobs;
    for (std::size_t j = 0; j < batch; ++j) {
      const std::size_t idx = next + j;
      jobs.push_back(std::async(std::launch::async, [&, idx] {
        SweepRow& row = outcome.rows[idx];
        row.value = values[idx];
        const auto start = std::chrono::steady_clock::now();
        try {
          if (values[idx] == reused_value) {
            row.completed = reference.trajectory.completed;
            row.error = reference.trajectory.error;
            row.max_excess = reference.max_excess;
            row.distance_to_reference = 0.0;
          } else {
            const detail::CapturedRun run =
                detail::execute_capturing(configure(values[idx]), subdir(value_label(values[idx])));
            row.completed = run.trajectory.completed;
            row.error = run.trajectory.error;
            row.max_excess = run.max_excess;
            if (have_reference)
              row.distance_to_reference = detail::trajectory_distance(run, reference);
          }
        } catch (const std::exception& e) {
          row.completed = false;
          row.error = e.what();
        }
        row.wall_time_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      }));
    }
    for (auto& job : jobs) job.get();
    next += batch;
  }
  return outcome;
}

inline void write_sweep_summary(const SweepOutcome& outcome, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open sweep summary file: " + path);
  out << "value,max_excess,distance_to_reference,wall_time_s,completed\n";
  for (const auto& row : outcome.rows) {
    out << format_float(row.value) << "," << format_float(row.max_excess) << ","
        << format_float(row.distance_to_reference) << "," << format_float(row.wall_time_s) << ","
        << (row.completed ? "true" : "false") << "\n";
  }
}

}  // namespace evosurf

#endif
