// SPDX-FileCopyrightText: Copyright (c) 2026 The evosurf-ch Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EVOSURF_POTENTIALS_HPP
#define EVOSURF_POTENTIALS_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "evosurf/core.hpp"

namespace evosurf {

struct PotentialEval {
  double value;   // F(r)
  double first;   // F'(r)
  double second;  // F''(r)
};

/// Smooth free energy F = F1 + F2 with convex F1 and quadratic-growth F2,
/// carrying the growth constants used by the assumption checker.
class SmoothPotential {
public:
  using Fn = std::function<double(double)>;

  Fn f1, df1, d2f1;  // convex part
  Fn f2, df2, d2f2;  // quadratic-growth part
  double alpha1 = 0, alpha2 = 0, alpha3 = 0, alpha4 = 0;
  double beta0 = 0, beta1 = 0, beta2 = 0, beta3 = 0, beta4 = 0;
  double growth_q = 1;

  /// The double-well quartic (r^2-1)^2/4, split into r^4/4 + (1-2r^2)/4.
  /// Constants are tight on the sampling range: beta1 = max(r^3 - r^4/4) = 27/4
  /// at r = 3, beta2 = max(|r|^3 - 3 r^4/4) = 1/4 at r = 1, alpha3 = 4 from
  /// r F1'(r) = 4 F1(r).
  static SmoothPotential quartic() {
    SmoothPotential p;
    p.f1 = [](double r) { return 0.25 * r * r * r * r; };
    p.df1 = [](double r) { return r * r * r; };
    p.d2f1 = [](double r) { return 3.0 * r * r; };
    p.f2 = [](double r) { return 0.25 * (1.0 - 2.0 * r * r); };
    p.df2 = [](double r) { return -r; };
    p.d2f2 = [](double) { return -1.0; };
    p.alpha1 = 0.25;
    p.beta1 = 6.75;
    p.alpha2 = 3.0;
    p.beta2 = 0.25;
    p.alpha3 = 4.0;
    p.beta3 = 0.0;
    p.alpha4 = 1.0;
    p.beta4 = 0.0;
    p.beta0 = 0.0;
    p.growth_q = 4;
    return p;
  }

  PotentialEval eval(double r) const {
    return {f1(r) + f2(r), df1(r) + df2(r), d2f1(r) + d2f2(r)};
  }
  double convex_prime(double r) const { return df1(r); }
  double convex_second(double r) const { return d2f1(r); }
  double concave_prime(double r) const { return df2(r); }
  double concave_second(double r) const { return d2f2(r); }
};

/// Logarithmic (Flory-Huggins) free energy at temperature theta (critical
/// temperature fixed to 1):
///
///   F(r) = (theta/2) [(1+r)log(1+r) + (1-r)log(1-r)] + (1-r^2)/2.
///
/// delta = 0 is the exact potential on (-1,1); delta in (0,1) replaces the
/// logarithmic part outside |r| <= 1-delta by its second-order Taylor model,
/// which is C^2 across the seams and defined on all of R. phi_delta denotes the
/// derivative of the *unscaled* logarithmic part, so exactly one theta/2 factor
/// appears in the chemical-potential equation.
class LogPotential {
public:
  double theta = 0.5;
  double delta = 0.0;

  LogPotential() = default;
  LogPotential(double theta_, double delta_) : theta(theta_), delta(delta_) {
    if (!(theta > 0.0 && theta < 1.0))
      throw std::invalid_argument("LogPotential: theta must lie in (0,1)");
    if (!(delta >= 0.0 && delta < 1.0))
      throw std::invalid_argument("LogPotential: delta must lie in [0,1)");
  }

  bool exact() const { return delta == 0.0; }

  /// Unscaled logarithmic part of the regularized potential.
  double log_part(double r) const {
    ensure_domain(r);
    if (delta > 0.0 && r > 1.0 - delta) return outer_value(r);
    if (delta > 0.0 && r < -1.0 + delta) return outer_value(-r);
    return inner_value(r);
  }

  /// phi_delta(r): derivative of the unscaled logarithmic part.
  double phi(double r) const {
    ensure_domain(r);
    if (delta > 0.0 && r > 1.0 - delta) return outer_phi(r);
    if (delta > 0.0 && r < -1.0 + delta) return -outer_phi(-r);
    return std::log1p(r) - std::log1p(-r);
  }

  double phi_prime(double r) const {
    ensure_domain(r);
    if (delta > 0.0 && std::abs(r) > 1.0 - delta) return 1.0 / delta + 1.0 / (2.0 - delta);
    return 2.0 / (1.0 - r * r);
  }

  PotentialEval eval(double r) const {
    const double s = 0.5 * theta;
    return {s * log_part(r) + 0.5 * (1.0 - r * r), s * phi(r) - r, s * phi_prime(r) - 1.0};
  }
  double convex_prime(double r) const { return 0.5 * theta * phi(r); }
  double convex_second(double r) const { return 0.5 * theta * phi_prime(r); }
  double concave_prime(double r) const { return -r; }
  double concave_second(double) const { return -1.0; }

private:
  void ensure_domain(double r) const {
    if (exact() && std::abs(r) >= 1.0)
      throw PotentialDomainError("exact logarithmic potential evaluated at r = " + std::to_string(r));
  }
  static double inner_value(double r) {
    // (1+r)log(1+r) -> 0 as r -> -1, same on the other side.
    const double a = (1.0 + r) <= 0.0 ? 0.0 : (1.0 + r) * std::log1p(r);
    const double b = (1.0 - r) <= 0.0 ? 0.0 : (1.0 - r) * std::log1p(-r);
    return a + b;
  }
  double outer_value(double r) const {
    const double om = 1.0 - r, op = 1.0 + r;
    return om * std::log(delta) + op * std::log(2.0 - delta) + om * om / (2.0 * delta) +
           op * op / (2.0 * (2.0 - delta)) - 1.0;
  }
  double outer_phi(double r) const {
    return std::log(2.0 - delta) - std::log(delta) - (1.0 - r) / delta + (1.0 + r) / (2.0 - delta);
  }
};

/// Double-obstacle free energy via penalty: F(r) = F_pen(r) + (1-r^2)/2 where
/// F_pen vanishes on [-1,1], grows cubically on the transition band of width
/// delta and quadratically with slope 1/delta beyond. phi_delta = F_pen' and
/// beta_delta = delta * phi_delta approximates the Lipschitz graph beta
/// (distance past the obstacle) with |beta - beta_delta| <= delta/2 and
/// 0 <= beta_delta' <= 1.
class ObstaclePenalty {
public:
  double delta = 1e-3;

  ObstaclePenalty() = default;
  explicit ObstaclePenalty(double delta_) : delta(delta_) {
    if (!(delta > 0.0 && delta < 1.0))
      throw std::invalid_argument("ObstaclePenalty: delta must lie in (0,1)");
  }

  double penalty_part(double r) const {
    const double a = std::abs(r);
    if (a <= 1.0) return 0.0;
    if (a <= 1.0 + delta) {
      const double s = a - 1.0;
      return s * s * s / (6.0 * delta * delta);
    }
    const double s = a - 1.0 - 0.5 * delta;
    return s * s / (2.0 * delta) + delta / 24.0;
  }

  double phi(double r) const {
    const double a = std::abs(r);
    double v;
    if (a <= 1.0)
      v = 0.0;
    else if (a <= 1.0 + delta) {
      const double s = a - 1.0;
      v = s * s / (2.0 * delta * delta);
    } else
      v = (a - 1.0 - 0.5 * delta) / delta;
    return r < 0 ? -v : v;
  }

  double phi_prime(double r) const {
    const double a = std::abs(r);
    if (a <= 1.0) return 0.0;
    if (a <= 1.0 + delta) return (a - 1.0) / (delta * delta);
    return 1.0 / delta;
  }

  double beta_delta(double r) const { return delta * phi(r); }

  static double beta_sharp(double r) {
    if (r >= 1.0) return r - 1.0;
    if (r <= -1.0) return r + 1.0;
    return 0.0;
  }

  PotentialEval eval(double r) const {
    return {penalty_part(r) + 0.5 * (1.0 - r * r), phi(r) - r, phi_prime(r) - 1.0};
  }
  double convex_prime(double r) const { return phi(r); }
  double convex_second(double r) const { return phi_prime(r); }
  double concave_prime(double r) const { return -r; }
  double concave_second(double) const { return -1.0; }
};

using Potential = std::variant<SmoothPotential, LogPotential, ObstaclePenalty>;

inline PotentialEval eval_potential(const Potential& p, double r) {
  return std::visit([r](const auto& v) { return v.eval(r); }, p);
}

struct BetaEval {
  double beta_delta;  // penalty graph delta * phi_delta(r)
  double beta;        // sharp limit
};

inline BetaEval beta_eval(const ObstaclePenalty& p, double r) {
  return {p.beta_delta(r), ObstaclePenalty::beta_sharp(r)};
}

// --- growth-assumption checking (dense sampling) ---

struct SamplingGrid {
  double lo = -10.0;
  double hi = 10.0;
  int count = 2001;
};

struct AssumptionCheck {
  std::string name;
  bool pass = true;
  double witness_r = 0.0;   // worst violating point (valid when !pass)
  double margin = 0.0;      // min over grid of rhs - lhs
};

struct AssumptionReport {
  std::vector<AssumptionCheck> checks;
  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

/// Evaluate the growth inequalities for a smooth potential over a sampling grid.
/// Failures are data (reported with the violating point), not errors.
inline AssumptionReport check_assumptions(const SmoothPotential& p, const SamplingGrid& grid) {
  if (grid.count < 1) throw std::invalid_argument("check_assumptions: empty grid");
  AssumptionReport report;
  auto run = [&](const std::string& name, auto lhs, auto rhs) {
    AssumptionCheck c;
    c.name = name;
    c.margin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid.count; ++i) {
      const double r =
          grid.count == 1 ? grid.lo : grid.lo + (grid.hi - grid.lo) * i / (grid.count - 1);
      const double l = lhs(r), rr = rhs(r);
      const double slack = 1e-12 * std::max(1.0, std::abs(rr));
      const double m = rr - l;
      if (m < c.margin) {
        c.margin = m;
        if (m < -slack) c.witness_r = r;
      }
      if (m < -slack) c.pass = false;
    }
    report.checks.push_back(c);
  };

  run("F >= beta0", [&](double) { return p.beta0; }, [&](double r) { return p.f1(r) + p.f2(r); });
  run("F1 >= 0", [](double) { return 0.0; }, [&](double r) { return p.f1(r); });
  run("F1'' >= 0 (convexity)", [](double) { return 0.0; }, [&](double r) { return p.d2f1(r); });
  run("|F1'| <= alpha1 |r|^q + beta1", [&](double r) { return std::abs(p.df1(r)); },
      [&](double r) { return p.alpha1 * std::pow(std::abs(r), p.growth_q) + p.beta1; });
  run("|F1'| <= alpha2 F1 + beta2", [&](double r) { return std::abs(p.df1(r)); },
      [&](double r) { return p.alpha2 * p.f1(r) + p.beta2; });
  run("|r F1'| <= alpha3 F1 + beta3", [&](double r) { return std::abs(r * p.df1(r)); },
      [&](double r) { return p.alpha3 * p.f1(r) + p.beta3; });
  run("|F2'| <= alpha4 |r| + beta4", [&](double r) { return std::abs(p.df2(r)); },
      [&](double r) { return p.alpha4 * std::abs(r) + p.beta4; });
  return report;
}

}  // namespace evosurf

#endif
