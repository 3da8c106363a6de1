// SPDX-FileCopyrightText: Copyright (c) 2026 The evosurf-ch Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EVOSURF_SURFACE_HPP
#define EVOSURF_SURFACE_HPP

#include <cmath>
#include <string>

#include "evosurf/mesh.hpp"
#include "evosurf/off_io.hpp"
#include "evosurf/velocity.hpp"

namespace evosurf {

/// The evolving surface: reference mesh at t = 0 plus the velocity field that
/// transports it. All geometry at later times derives from these two.
struct EvolvingSurface {
  MovingMesh reference_mesh;
  VelocityField velocity;
  double t_final = 1.0;
};

/// Catalog entry describing one of the built-in surfaces, or an external OFF mesh.
struct SurfaceSpec {
  std::string kind = "unit-sphere";  // unit-sphere | rotating-sphere | scaling-sphere |
                                     // exp-sphere | ellipsoid | off
  int level = 3;                     // icosphere subdivision level
  double radius = 1.0;               // initial sphere radius
  std::string axis = "z";            // rotation axis (x|y|z)
  double rate = 1.0;                 // rotation rad/s, or exponential scale rate
  double r_end = 0.5;                // scaling-sphere: radius at t = t_ramp
  double t_ramp = 1.0;               // scaling-sphere: ramp duration (hold afterwards)
  double amp_x = 0.0, amp_y = 0.0, amp_z = 0.0;  // ellipsoid axis amplitudes
  double omega = 1.0;                // ellipsoid oscillation frequency
  std::string mesh_path;             // kind == off
  double t_final = 1.0;
};

namespace detail {

// C^1 radius ramp: cubic smoothstep from r0 to r1 over [0, t1], constant afterwards.
// The velocity stays continuous through the ramp end and R(t1) = r1 exactly.
struct SmoothRamp {
  double r0, r1, t1;
  double value(double t) const {
    if (t <= 0) return r0;
    if (t >= t1) return r1;
    const double s = t / t1;
    return r0 + (r1 - r0) * s * s * (3 - 2 * s);
  }
  double rate(double t) const {
    if (t <= 0 || t >= t1) return 0.0;
    const double s = t / t1;
    return (r1 - r0) * 6 * s * (1 - s) / t1;
  }
};

inline Vec3 parse_axis(const std::string& axis) {
  if (axis == "x") return Vec3::UnitX();
  if (axis == "y") return Vec3::UnitY();
  if (axis == "z") return Vec3::UnitZ();
  throw MeshError("unknown rotation axis '" + axis + "' (expected x, y or z)");
}

}  // namespace detail

inline EvolvingSurface make_surface(const SurfaceSpec& spec) {
  EvolvingSurface surface;
  surface.t_final = spec.t_final;
  if (spec.kind == "off") {
    surface.reference_mesh = load_off(spec.mesh_path);
    surface.velocity = VelocityField::stationary();
    return surface;
  }
  if (spec.kind == "unit-sphere") {
    surface.reference_mesh = make_icosphere(spec.level, spec.radius);
    surface.velocity = VelocityField::stationary();
  } else if (spec.kind == "rotating-sphere") {
    surface.reference_mesh = make_icosphere(spec.level, spec.radius);
    surface.velocity = VelocityField::tangential_rotation(detail::parse_axis(spec.axis), spec.rate);
  } else if (spec.kind == "scaling-sphere") {
    if (!(spec.t_ramp > 0)) throw MeshError("scaling-sphere: t_ramp must be positive");
    if (!(spec.r_end > 0)) throw MeshError("scaling-sphere: r_end must be positive");
    surface.reference_mesh = make_icosphere(spec.level, spec.radius);
    detail::SmoothRamp ramp{spec.radius, spec.r_end, spec.t_ramp};
    surface.velocity = VelocityField::radial_scaling(
        [ramp](double t) { return ramp.value(t); }, [ramp](double t) { return ramp.rate(t); });
  } else if (spec.kind == "exp-sphere") {
    surface.reference_mesh = make_icosphere(spec.level, spec.radius);
    const double r0 = spec.radius, a = spec.rate;
    surface.velocity = VelocityField::radial_scaling(
        [r0, a](double t) { return r0 * std::exp(a * t); },
        [r0, a](double t) { return r0 * a * std::exp(a * t); });
  } else if (spec.kind == "ellipsoid") {
    surface.reference_mesh = make_icosphere(spec.level, spec.radius);
    const double w = spec.omega;
    auto rate = [w](double amp) {
      return [amp, w](double t) { return amp * w * std::cos(w * t) / (1.0 + amp * std::sin(w * t)); };
    };
    surface.velocity =
        VelocityField::anisotropic_scaling(rate(spec.amp_x), rate(spec.amp_y), rate(spec.amp_z));
  } else {
    throw MeshError("unknown surface catalog entry '" + spec.kind + "'");
  }
  return surface;
}

/// Advect mesh vertices along the flow ODE dx/dt = V(t, x) from t0 to t1 with a
/// classical 4th-order one-step method at fixed substep <= max_substep.
/// Areas, Jacobian and density are refreshed on the returned mesh.
inline MovingMesh advect_mesh(const EvolvingSurface& surface, double t0, double t1,
                              const MovingMesh& mesh, double max_substep = 1e-3) {
  if (t1 < t0) throw MeshError("advect_mesh: t1 < t0");
  MovingMesh out = mesh;
  out.time = t1;
  if (surface.velocity.kind() == VelocityKind::Stationary || t1 == t0) {
    update_geometry(out);
    return out;
  }
  if (!(max_substep > 0)) throw MeshError("advect_mesh: substep must be positive");
  const int n_steps = std::max(1, static_cast<int>(std::ceil((t1 - t0) / max_substep - 1e-12)));
  const double h = (t1 - t0) / n_steps;
  const auto& field = surface.velocity;
  for (int s = 0; s < n_steps; ++s) {
    const double t = t0 + s * h;
    for (std::size_t v = 0; v < out.vertices.size(); ++v) {
      Vec3& x = out.vertices[v];
      const Vec3 k1 = field.value(t, x);
      const Vec3 k2 = field.value(t + 0.5 * h, x + 0.5 * h * k1);
      const Vec3 k3 = field.value(t + 0.5 * h, x + 0.5 * h * k2);
      const Vec3 k4 = field.value(t + h, x + h * k3);
      x += (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4);
      if (!x.allFinite())
        throw MeshError("advect_mesh: integrator failure at t = " + std::to_string(t + h) +
                        ", vertex " + std::to_string(v));
    }
  }
  update_geometry(out);
  return out;
}

}  // namespace evosurf

#endif
