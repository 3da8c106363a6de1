// SPDX-FileCopyrightText: Copyright (c) 2026 The evosurf-ch Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EVOSURF_SIMULATION_HPP
#define EVOSURF_SIMULATION_HPP

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "evosurf/diagnostics.hpp"
#include "evosurf/forms.hpp"
#include "evosurf/potentials.hpp"
#include "evosurf/stepper.hpp"
#include "evosurf/surface.hpp"

namespace evosurf {

/// One row of the diagnostics table (the CSV schema adds newton_iters and m_eta
/// to the observables).
struct DiagnosticsRow {
  ObservablesRow obs;
  int newton_iters = 0;
  double m_eta = 0.0;
};

struct RunOptions {
  int every_n_steps = 10;
  bool keep_snapshots = false;  // retain SimState at every output time
  int admissibility_samples = 101;
  AdvectiveMode advective_mode = AdvectiveMode::FollowTangential;
  // Called at every output time with the state, its forms and the fresh row.
  std::function<void(const SimState&, const AssembledForms&, const DiagnosticsRow&)> on_output;
};

struct Trajectory {
  std::vector<DiagnosticsRow> rows;
  std::vector<SimState> snapshots;                    // populated when keep_snapshots
  std::optional<AdmissibilityReport> admissibility;   // singular potentials only
  bool completed = false;
  std::string error;        // empty when completed
  int error_step = -1;
  double error_time = 0.0;
  SimState final_state;
};

namespace detail {

inline bool is_singular(const Potential& p) {
  return std::holds_alternative<LogPotential>(p) || std::holds_alternative<ObstaclePenalty>(p);
}

inline ObservablesRow model_observables(Model model, const SimState& s, const AssembledForms& f,
                                        const Potential& p) {
  return model == Model::CHrho ? observables_weighted(s, f, p) : observables(s, f, p);
}

}  // namespace detail

/// Advance mesh and state in lockstep from t = 0 to t_end, emitting diagnostics
/// every `every_n_steps`. For singular potentials the admissibility profile is
/// computed first; a Breakdown verdict flags the predicted failure time but the
/// run proceeds. Step errors abort the run with the last diagnostics retained.
inline Trajectory run_simulation(const EvolvingSurface& surface, const Potential& potential,
                                 const SchemeConfig& cfg, const Vector& u0_samples,
                                 const RunOptions& options = {}) {
  if (!(cfg.dt > 0)) throw std::invalid_argument("run_simulation: dt must be positive");
  const int n_steps = static_cast<int>(std::llround(cfg.t_end / cfg.dt));
  if (n_steps < 1 || std::abs(n_steps * cfg.dt - cfg.t_end) > 1e-9 * std::max(1.0, cfg.t_end))
    throw std::invalid_argument("run_simulation: t_end must be a positive multiple of dt");

  if (cfg.model == Model::CH1Obstacle && !std::holds_alternative<ObstaclePenalty>(potential))
    throw std::invalid_argument("run_simulation: obstacle model requires the obstacle potential");

  Trajectory traj;
  EvolvingSurface horizon = surface;
  horizon.t_final = std::max(surface.t_final, cfg.t_end);
  if (detail::is_singular(potential))
    traj.admissibility = admissibility_profile(horizon, u0_samples, options.admissibility_samples,
                                               cfg.dt);

  SimState state;
  state.t = 0.0;
  state.mesh = surface.reference_mesh;
  AssembledForms forms =
      assemble_forms(state.mesh, surface.velocity, 0.0, options.advective_mode);
  state.u = l2_project(forms, u0_samples);
  state.w = initial_chemical_potential(forms, potential, state.u, cfg.model);
  const double integral0 = forms.lumped_mass.dot(state.u);

  NewtonWorkspace workspace;
  auto emit = [&](const StepStats* stats) {
    DiagnosticsRow row;
    row.obs = detail::model_observables(cfg.model, state, forms, potential);
    row.newton_iters = stats ? stats->newton_iters : 0;
    row.m_eta = std::abs(integral0) / forms.area;
    traj.rows.push_back(row);
    if (options.keep_snapshots) traj.snapshots.push_back(state);
    if (options.on_output) options.on_output(state, forms, row);
  };
  emit(nullptr);

  for (int step = 1; step <= n_steps; ++step) {
    const double t_now = (step - 1) * cfg.dt;
    const double t_next = step * cfg.dt;
    try {
      MovingMesh mesh_next = advect_mesh(surface, t_now, t_next, state.mesh, cfg.dt);
      AssembledForms forms_next =
          assemble_forms(mesh_next, surface.velocity, t_next, options.advective_mode);
      std::pair<SimState, StepStats> result = [&] {
        switch (cfg.model) {
          case Model::CH1Obstacle:
            return step_ch1_obstacle(state, forms_next, forms, std::get<ObstaclePenalty>(potential),
                                     cfg, mesh_next, &workspace);
          case Model::CHrho:
            return step_ch_rho(state, forms_next, forms, potential, cfg, mesh_next, &workspace);
          case Model::CH1:
          default:
            return step_ch1(state, forms_next, forms, potential, cfg, mesh_next, &workspace);
        }
      }();
      state = std::move(result.first);
      forms = std::move(forms_next);
      if (step % options.every_n_steps == 0) emit(&result.second);
    } catch (const std::exception& e) {
      traj.error = std::string(e.what()) + " [step " + std::to_string(step) + ", t = " +
                   std::to_string(t_next) + "]";
      traj.error_step = step;
      traj.error_time = t_next;
      traj.final_state = state;
      return traj;
    }
  }
  traj.completed = true;
  traj.final_state = state;
  return traj;
}

}  // namespace evosurf

#endif
