// SPDX-FileCopyrightText: Copyright (c) 2026 The evosurf-ch Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EVOSURF_DIAGNOSTICS_HPP
#define EVOSURF_DIAGNOSTICS_HPP

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "evosurf/forms.hpp"
#include "evosurf/potentials.hpp"
#include "evosurf/stepper.hpp"
#include "evosurf/surface.hpp"

namespace evosurf {

/// Conserved and estimated quantities for one state. `energy` uses the sharp
/// potential of the configured family (NaN when the regularized state has left
/// its domain); `energy_reg` uses the regularized potential actually solved
/// with. The potential term is integrated with vertex (mass-lumped) quadrature.
struct ObservablesRow {
  double t = 0.0;
  double mass = 0.0;           // 1^T M u
  double weighted_mass = 0.0;  // 1^T M_rho u
  double area = 0.0;
  double energy = std::numeric_limits<double>::quiet_NaN();
  double energy_reg = std::numeric_limits<double>::quiet_NaN();
  double min_u = 0.0;
  double max_u = 0.0;
  double phase_excess = 0.0;  // int [|u|-1]_+
};

namespace detail {

inline double sharp_potential_value(const Potential& p, double r, bool& defined) {
  defined = true;
  if (std::holds_alternative<SmoothPotential>(p)) {
    const auto& sp = std::get<SmoothPotential>(p);
    return sp.f1(r) + sp.f2(r);
  }
  if (std::holds_alternative<LogPotential>(p)) {
    const auto& lp = std::get<LogPotential>(p);
    if (std::abs(r) >= 1.0) {
      // The limit value exists at exactly +-1; beyond that the potential is undefined.
      if (std::abs(r) > 1.0) {
        defined = false;
        return 0.0;
      }
      return 0.5 * lp.theta * 2.0 * std::log(2.0);
    }
    LogPotential exact_pot(lp.theta, 0.0);
    return exact_pot.eval(r).value;
  }
  // Obstacle: finite part of the sharp free energy; the indicator violation is
  // reported separately as phase_excess.
  return 0.5 * (1.0 - r * r);
}

}  // namespace detail

/// Compute the diagnostics row for a state with matching assembled forms.
/// Requesting the exact logarithmic energy (delta = 0) outside (-1,1) is a
/// domain error; for regularized variants the sharp column degrades to NaN.
inline ObservablesRow observables(const SimState& state, const AssembledForms& forms,
                                  const Potential& p) {
  const int n = static_cast<int>(state.u.size());
  if (forms.size() != n) throw std::invalid_argument("observables: dimension mismatch");
  ObservablesRow row;
  row.t = state.t;
  row.mass = forms.lumped_mass.dot(state.u);
  row.weighted_mass = forms.lumped_mass_rho.dot(state.u);
  row.area = forms.area;
  row.min_u = state.u.minCoeff();
  row.max_u = state.u.maxCoeff();

  const double grad_term = 0.5 * state.u.dot(forms.A_S * state.u);
  double pot_sharp = 0.0, pot_reg = 0.0, excess = 0.0;
  bool sharp_defined = true;
  const bool exact_log = std::holds_alternative<LogPotential>(p) && std::get<LogPotential>(p).exact();
  for (int i = 0; i < n; ++i) {
    const double r = state.u[i];
    const double ml = forms.lumped_mass[i];
    excess += ml * std::max(0.0, std::abs(r) - 1.0);
    if (exact_log && std::abs(r) >= 1.0)
      throw PotentialDomainError("observables: exact logarithmic energy undefined at |u| >= 1");
    bool defined = true;
    const double sharp = detail::sharp_potential_value(p, r, defined);
    if (!defined) sharp_defined = false;
    if (sharp_defined) pot_sharp += ml * sharp;
    pot_reg += ml * eval_potential(p, r).value;
  }
  row.phase_excess = excess;
  row.energy_reg = grad_term + pot_reg;
  row.energy = sharp_defined ? grad_term + pot_sharp : std::numeric_limits<double>::quiet_NaN();
  return row;
}

/// Weighted-model variant of the energy columns: |grad c|^2/2 + rho F(c), the
/// density entering through the weighted quadrature vector.
inline ObservablesRow observables_weighted(const SimState& state, const AssembledForms& forms,
                                           const Potential& p) {
  ObservablesRow row = observables(state, forms, p);
  const int n = static_cast<int>(state.u.size());
  const double grad_term = 0.5 * state.u.dot(forms.A_S * state.u);
  double pot_sharp = 0.0, pot_reg = 0.0;
  bool sharp_defined = true;
  for (int i = 0; i < n; ++i) {
    const double r = state.u[i];
    const double ml = forms.lumped_mass_rho[i];
    bool defined = true;
    const double sharp = detail::sharp_potential_value(p, r, defined);
    if (!defined) sharp_defined = false;
    if (sharp_defined) pot_sharp += ml * sharp;
    pot_reg += ml * eval_potential(p, r).value;
  }
  row.energy_reg = grad_term + pot_reg;
  row.energy = sharp_defined ? grad_term + pot_sharp : std::numeric_limits<double>::quiet_NaN();
  return row;
}

// --- admissibility analysis ---

enum class AdmissibilityVerdict { Admissible, Breakdown, Marginal };

inline const char* to_string(AdmissibilityVerdict v) {
  switch (v) {
    case AdmissibilityVerdict::Admissible: return "Admissible";
    case AdmissibilityVerdict::Breakdown: return "Breakdown";
    case AdmissibilityVerdict::Marginal: return "Marginal";
  }
  return "?";
}

/// Profile of m(t) = |int_{Gamma_0} u_0| / |Gamma(t)|. Values above 1 obstruct
/// global solutions for the singular potentials; the Marginal band flags the
/// analytically delicate m = 1 case instead of resolving it.
struct AdmissibilityReport {
  std::vector<std::pair<double, double>> samples;  // (t, m(t))
  double max_m = 0.0;
  AdmissibilityVerdict verdict = AdmissibilityVerdict::Admissible;
  std::optional<double> predicted_breakdown_time;
  static constexpr double marginal_tol = 1e-9;
};

/// Integral of the P1 interpolant of vertex samples (lumped quadrature, which
/// is exact for P1 functions).
inline double mesh_integral(const MovingMesh& mesh, const Vector& vertex_values) {
  Vector lumped = Vector::Zero(mesh.vertex_count());
  for (int e = 0; e < mesh.triangle_count(); ++e)
    for (int k = 0; k < 3; ++k) lumped[mesh.triangles[e][k]] += mesh.current_areas[e] / 3.0;
  return lumped.dot(vertex_values);
}

inline AdmissibilityReport admissibility_profile(const EvolvingSurface& surface,
                                                 const Vector& u0_samples, int sample_count,
                                                 double advect_substep = 1e-3) {
  if (sample_count < 2) throw std::invalid_argument("admissibility_profile: need >= 2 samples");
  AdmissibilityReport report;
  const double integral0 = std::abs(mesh_integral(surface.reference_mesh, u0_samples));
  MovingMesh mesh = surface.reference_mesh;
  double t_prev = 0.0;
  report.samples.reserve(sample_count);
  for (int k = 0; k < sample_count; ++k) {
    const double t = surface.t_final * k / (sample_count - 1);
    mesh = advect_mesh(surface, t_prev, t, mesh, advect_substep);
    t_prev = t;
    const double m = integral0 / mesh.total_area();
    report.samples.emplace_back(t, m);
    report.max_m = std::max(report.max_m, m);
  }
  if (report.max_m > 1.0 + AdmissibilityReport::marginal_tol)
    report.verdict = AdmissibilityVerdict::Breakdown;
  else if (report.max_m >= 1.0 - AdmissibilityReport::marginal_tol)
    report.verdict = AdmissibilityVerdict::Marginal;
  else
    report.verdict = AdmissibilityVerdict::Admissible;

  if (report.verdict == AdmissibilityVerdict::Breakdown) {
    for (std::size_t k = 0; k < report.samples.size(); ++k) {
      if (report.samples[k].second > 1.0) {
        if (k == 0) {
          report.predicted_breakdown_time = 0.0;
        } else {
          const auto [t0, m0] = report.samples[k - 1];
          const auto [t1, m1] = report.samples[k];
          report.predicted_breakdown_time = t0 + (1.0 - m0) / (m1 - m0) * (t1 - t0);
        }
        break;
      }
    }
  }
  return report;
}

/// H^-1 distance between two states sharing a mesh; the masses must agree so
/// the difference is mean-zero.
inline double hminus1_distance(const SimState& a, const SimState& b, const AssembledForms& forms,
                               double mass_tol = 1e-8) {
  if (a.u.size() != b.u.size()) throw std::invalid_argument("hminus1_distance: size mismatch");
  Vector z = a.u - b.u;
  const double mass_a = forms.lumped_mass.dot(a.u);
  const double mass_b = forms.lumped_mass.dot(b.u);
  const double scale = std::max({1.0, std::abs(mass_a), std::abs(mass_b)});
  if (std::abs(mass_a - mass_b) > mass_tol * scale)
    throw std::invalid_argument("hminus1_distance: masses differ (" + std::to_string(mass_a) +
                                " vs " + std::to_string(mass_b) + "); difference is not mean-zero");
  // Remove the tolerated residual mean exactly before inverting.
  z.array() -= forms.lumped_mass.dot(z) / forms.area;
  const auto inv = inverse_laplacian(forms, z);
  return std::sqrt(inv.norm_sq);
}

/// Closed-form bound from the generalized Gronwall inequality for
/// alpha' <= C (C0 + alpha + eps alpha^{q+1}): returns
/// (alpha0+C0) e^{TC} / (1 - eps e^{TCq} (alpha0+C0)^q)^{1/q} - C0
/// when the smallness condition eps e^{TCq} (alpha0+C0)^q < 1 holds, absent otherwise.
inline std::optional<double> gronwall_bound(double alpha0, double C, double C0, double eps,
                                            unsigned q, double T) {
  if (alpha0 < 0 || C <= 0 || C0 < 0 || eps <= 0 || q == 0 || T < 0) return std::nullopt;
  const double base = alpha0 + C0;
  const double condition = eps * std::exp(T * C * q) * std::pow(base, static_cast<double>(q));
  if (!(condition < 1.0)) return std::nullopt;
  return base * std::exp(T * C) / std::pow(1.0 - condition, 1.0 / q) - C0;
}

}  // namespace evosurf

#endif
