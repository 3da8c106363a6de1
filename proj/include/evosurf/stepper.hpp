// SPDX-FileCopyrightText: Copyright (c) 2026 The evosurf-ch Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EVOSURF_STEPPER_HPP
#define EVOSURF_STEPPER_HPP

#include <Eigen/SparseLU>
#include <cmath>
#include <functional>
#include <optional>

#include "evosurf/forms.hpp"
#include "evosurf/mesh.hpp"
#include "evosurf/potentials.hpp"

namespace evosurf {

enum class Model { CH1, CH1Obstacle, CHrho };
enum class Splitting { ConvexConcave, FullyImplicit };

struct SchemeConfig {
  double dt = 1e-3;
  double t_end = 0.1;
  Model model = Model::CH1;
  Splitting splitting = Splitting::ConvexConcave;
  double newton_tol = 1e-10;
  int newton_max = 50;
  double penalty_delta = 1e-3;
  double log_delta = 0.0;
  // Optional nodal source added to the conservation equation (manufactured solutions).
  std::function<Vector(double)> source;
};

struct SimState {
  double t = 0.0;
  Vector u;  // order parameter coefficients
  Vector w;  // chemical potential coefficients
  MovingMesh mesh;
};

struct StepStats {
  int newton_iters = 0;
  double residual = 0.0;
  double constraint_excess = 0.0;  // int [|u|-1]_+ after the step (obstacle model)
};

/// Reusable factorization; the coupled Jacobian keeps one sparsity pattern across
/// Newton iterations and time steps, so the symbolic analysis runs once.
class NewtonWorkspace {
public:
  void solve(const SparseMatrix& jac, const Vector& rhs, Vector& out) {
    if (!analyzed_) {
      lu_.analyzePattern(jac);
      analyzed_ = true;
    }
    lu_.factorize(jac);
    if (lu_.info() != Eigen::Success) {
      // Pattern drift or breakdown: redo the full decomposition once.
      lu_.compute(jac);
      if (lu_.info() != Eigen::Success)
        throw SolverError("Newton linear solve: factorization failed", {});
    }
    out = lu_.solve(rhs);
    if (lu_.info() != Eigen::Success) throw SolverError("Newton linear solve failed", {});
  }

private:
  Eigen::SparseLU<SparseMatrix> lu_;
  bool analyzed_ = false;
};

namespace detail {

struct NonlinearTerm {
  // Nodal derivative of the potential term as it enters the chemical-potential
  // equation, split into the implicit part and its derivative plus the explicit part.
  std::function<double(double)> implicit_prime;
  std::function<double(double)> implicit_second;
  std::function<double(double)> explicit_prime;  // evaluated at the previous state
  bool guard_unit_interval = false;              // exact-log safeguard
};

inline NonlinearTerm make_nonlinear_term(const Potential& p, Splitting splitting) {
  NonlinearTerm term;
  std::visit(
      [&](const auto& pot) {
        using T = std::decay_t<decltype(pot)>;
        if (splitting == Splitting::ConvexConcave) {
          term.implicit_prime = [pot](double r) { return pot.convex_prime(r); };
          term.implicit_second = [pot](double r) { return pot.convex_second(r); };
          term.explicit_prime = [pot](double r) { return pot.concave_prime(r); };
        } else {
          term.implicit_prime = [pot](double r) { return pot.eval(r).first; };
          term.implicit_second = [pot](double r) { return pot.eval(r).second; };
          term.explicit_prime = [](double) { return 0.0; };
        }
        if constexpr (std::is_same_v<T, LogPotential>) term.guard_unit_interval = pot.exact();
      },
      p);
  return term;
}

struct SystemMatrices {
  const SparseMatrix* mass_next;     // pairs with w and the time difference
  const SparseMatrix* mass_now;
  const SparseMatrix* advect_next;   // may be null (zero)
  const SparseMatrix* stiff_w_next;  // stiffness acting on w in the first equation
  const SparseMatrix* stiff_u_next;  // stiffness acting on u in the second equation
  const Vector* lumped_next;         // quadrature weights for the nodal F' term
};

/// One implicit Euler step of the coupled system
///   mass_next u - mass_now u_old + dt (advect u + stiff_w w) = dt mass_next f
///   stiff_u u + lumped .* F'(u) - mass_next w = 0
/// with the implicit potential part handled by damped Newton. The first block is
/// linear, so any full Newton step restores the discrete conservation identity
/// to factorization roundoff.
inline std::pair<Vector, StepStats> implicit_euler_step(
    const SystemMatrices& sys, const Vector& u_old, const Vector& w_old,
    const NonlinearTerm& term, double dt, double t_next, const SchemeConfig& cfg,
    NewtonWorkspace* workspace) {
  const int n = static_cast<int>(u_old.size());
  const Vector rhs_mass = *sys.mass_now * u_old;
  Vector source = Vector::Zero(n);
  if (cfg.source) source = *sys.mass_next * cfg.source(t_next);

  Vector u = u_old, w = w_old;
  if (term.guard_unit_interval)
    u = u.cwiseMin(1.0 - 1e-12).cwiseMax(-1.0 + 1e-12);

  Vector expl(n);
  for (int i = 0; i < n; ++i) expl[i] = term.explicit_prime(u_old[i]);

  auto residual = [&](const Vector& uu, const Vector& ww, Vector& r) {
    Vector impl(n);
    for (int i = 0; i < n; ++i) impl[i] = term.implicit_prime(uu[i]);
    r.resize(2 * n);
    r.head(n) = *sys.mass_next * uu - rhs_mass + dt * (*sys.stiff_w_next * ww) - dt * source;
    if (sys.advect_next) r.head(n) += dt * (*sys.advect_next * uu);
    r.tail(n) = *sys.stiff_u_next * uu + sys.lumped_next->cwiseProduct(impl + expl) -
                *sys.mass_next * ww;
  };

  NewtonWorkspace local;
  NewtonWorkspace& ws = workspace ? *workspace : local;

  Vector r;
  residual(u, w, r);
  double rnorm = r.norm();
  const double scale = std::max({1.0, rhs_mass.norm()});
  const double tol = cfg.newton_tol * scale;
  std::vector<double> history{rnorm};

  StepStats stats;
  int it = 0;
  while (rnorm > tol) {
    if (it >= cfg.newton_max)
      throw SolverError("Newton did not converge within " + std::to_string(cfg.newton_max) +
                            " iterations (residual " + std::to_string(rnorm) + ")",
                        history);
    // Assemble the block Jacobian; only the nodal diagonal changes between iterations.
    std::vector<Triplet> trip;
    trip.reserve(2 * (sys.mass_next->nonZeros() + sys.stiff_w_next->nonZeros()) + n);
    for (int k = 0; k < sys.mass_next->outerSize(); ++k)
      for (SparseMatrix::InnerIterator itm(*sys.mass_next, k); itm; ++itm) {
        trip.emplace_back(itm.row(), itm.col(), itm.value());
        trip.emplace_back(n + itm.row(), n + itm.col(), -itm.value());
      }
    if (sys.advect_next)
      for (int k = 0; k < sys.advect_next->outerSize(); ++k)
        for (SparseMatrix::InnerIterator ita(*sys.advect_next, k); ita; ++ita)
          trip.emplace_back(ita.row(), ita.col(), dt * ita.value());
    for (int k = 0; k < sys.stiff_w_next->outerSize(); ++k)
      for (SparseMatrix::InnerIterator its(*sys.stiff_w_next, k); its; ++its)
        trip.emplace_back(its.row(), n + its.col(), dt * its.value());
    for (int k = 0; k < sys.stiff_u_next->outerSize(); ++k)
      for (SparseMatrix::InnerIterator its(*sys.stiff_u_next, k); its; ++its)
        trip.emplace_back(n + its.row(), its.col(), its.value());
    for (int i = 0; i < n; ++i)
      trip.emplace_back(n + i, i, (*sys.lumped_next)[i] * term.implicit_second(u[i]));
    SparseMatrix jac(2 * n, 2 * n);
    jac.setFromTriplets(trip.begin(), trip.end());
    jac.makeCompressed();

    Vector delta;
    ws.solve(jac, -r, delta);

    Vector du = delta.head(n), dw = delta.tail(n);
    double sigma = 1.0;
    if (term.guard_unit_interval) {
      // Fraction-to-the-boundary: keep iterates strictly inside (-1, 1).
      const double eps_m = 1e-12;
      double max_step = 1.0;
      for (int i = 0; i < n; ++i) {
        if (du[i] > 0)
          max_step = std::min(max_step, (1.0 - eps_m - u[i]) / du[i]);
        else if (du[i] < 0)
          max_step = std::min(max_step, (-1.0 + eps_m - u[i]) / du[i]);
      }
      if (max_step < 1.0) sigma = 0.9 * std::max(0.0, max_step);
      if (sigma <= 1e-14)
        throw SolverError(
            "Newton iterate pinned to the logarithmic domain boundary; reduce dt or increase log_delta",
            history);
    }

    // Damped update: halve on residual increase.
    double step = sigma;
    Vector u_trial, w_trial, r_trial;
    double rnorm_trial;
    for (;;) {
      u_trial = u + step * du;
      w_trial = w + step * dw;
      residual(u_trial, w_trial, r_trial);
      rnorm_trial = r_trial.norm();
      if (rnorm_trial <= rnorm * (1.0 + 1e-12) || step < 1.0 / 1024.0) break;
      step *= 0.5;
    }
    u = u_trial;
    w = w_trial;
    r = r_trial;
    rnorm = rnorm_trial;
    history.push_back(rnorm);
    ++it;
  }
  stats.newton_iters = it;
  stats.residual = rnorm;

  Vector x(2 * n);
  x.head(n) = u;
  x.tail(n) = w;
  return {x, stats};
}

}  // namespace detail

/// One step of the conserved-order-parameter system on the advected mesh.
/// forms_now is assembled at state.t, forms_next at state.t + dt.
inline std::pair<SimState, StepStats> step_ch1(const SimState& state,
                                               const AssembledForms& forms_next,
                                               const AssembledForms& forms_now,
                                               const Potential& p, const SchemeConfig& cfg,
                                               const MovingMesh& mesh_next,
                                               NewtonWorkspace* workspace = nullptr) {
  const double dt = cfg.dt;
  detail::NonlinearTerm term = detail::make_nonlinear_term(p, cfg.splitting);
  detail::SystemMatrices sys{&forms_next.M,   &forms_now.M, forms_next.A_N.nonZeros() ? &forms_next.A_N : nullptr,
                             &forms_next.A_S, &forms_next.A_S, &forms_next.lumped_mass};
  auto [x, stats] =
      detail::implicit_euler_step(sys, state.u, state.w, term, dt, state.t + dt, cfg, workspace);
  SimState next;
  next.t = state.t + dt;
  next.mesh = mesh_next;
  const int n = static_cast<int>(state.u.size());
  next.u = x.head(n);
  next.w = x.tail(n);
  return {next, stats};
}

/// Obstacle model: same structure with the penalty nonlinearity
/// (1/delta) beta_delta(u) - u; reports the constraint excess after the step.
inline std::pair<SimState, StepStats> step_ch1_obstacle(const SimState& state,
                                                        const AssembledForms& forms_next,
                                                        const AssembledForms& forms_now,
                                                        const ObstaclePenalty& p,
                                                        const SchemeConfig& cfg,
                                                        const MovingMesh& mesh_next,
                                                        NewtonWorkspace* workspace = nullptr) {
  auto [next, stats] = step_ch1(state, forms_next, forms_now, Potential(p), cfg, mesh_next, workspace);
  double excess = 0.0;
  for (int i = 0; i < next.u.size(); ++i)
    excess += forms_next.lumped_mass[i] * std::max(0.0, std::abs(next.u[i]) - 1.0);
  stats.constraint_excess = excess;
  return {std::move(next), stats};
}

/// Weighted conservation model: the density rho multiplies the mass pairing and
/// the w-stiffness; the weighted integral of the order parameter is conserved.
inline std::pair<SimState, StepStats> step_ch_rho(const SimState& state,
                                                  const AssembledForms& forms_next,
                                                  const AssembledForms& forms_now,
                                                  const Potential& p, const SchemeConfig& cfg,
                                                  const MovingMesh& mesh_next,
                                                  NewtonWorkspace* workspace = nullptr) {
  const double dt = cfg.dt;
  detail::NonlinearTerm term = detail::make_nonlinear_term(p, cfg.splitting);
  detail::SystemMatrices sys{&forms_next.M_rho, &forms_now.M_rho,    nullptr,
                             &forms_next.A_S_rho, &forms_next.A_S, &forms_next.lumped_mass_rho};
  auto [x, stats] =
      detail::implicit_euler_step(sys, state.u, state.w, term, dt, state.t + dt, cfg, workspace);
  SimState next;
  next.t = state.t + dt;
  next.mesh = mesh_next;
  const int n = static_cast<int>(state.u.size());
  next.u = x.head(n);
  next.w = x.tail(n);
  return {next, stats};
}

/// Consistent chemical potential for the initial state: M w = A_S u + lumped F'(u)
/// (rho-weighted for the weighted model).
inline Vector initial_chemical_potential(const AssembledForms& forms, const Potential& p,
                                         const Vector& u, Model model) {
  const int n = static_cast<int>(u.size());
  Vector fprime(n);
  for (int i = 0; i < n; ++i) fprime[i] = eval_potential(p, u[i]).first;
  const bool weighted = model == Model::CHrho;
  const SparseMatrix& mass = weighted ? forms.M_rho : forms.M;
  const Vector& lumped = weighted ? forms.lumped_mass_rho : forms.lumped_mass;
  Vector rhs = forms.A_S * u + lumped.cwiseProduct(fprime);
  Eigen::SimplicialLDLT<SparseMatrix> solver(mass);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("initial_chemical_potential: factorization failed");
  return solver.solve(rhs);
}

}  // namespace evosurf

#endif
