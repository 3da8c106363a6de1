// SPDX-FileCopyrightText: Copyright (c) 2026 The evosurf-ch Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EVOSURF_VELOCITY_HPP
#define EVOSURF_VELOCITY_HPP

#include <cmath>
#include <functional>
#include <utility>

#include "evosurf/core.hpp"

namespace evosurf {

enum class VelocityKind {
  Stationary,
  RadialScaling,
  AnisotropicScaling,
  TangentialRotation,
  Custom,
};

/// Ambient velocity field driving the surface evolution.
///
/// The field supplies its value and ambient Jacobian; the tangential divergence
/// on a surface with unit normal nu follows as tr(J) - nu^T J nu. An optional
/// advective tangential field V_a rides along (zero by default).
class VelocityField {
public:
  using ValueFn = std::function<Vec3(double, const Vec3&)>;
  using JacobianFn = std::function<Mat3(double, const Vec3&)>;
  using DivFn = std::function<double(double, const Vec3&, const Vec3&)>;

  VelocityField() = default;

  static VelocityField stationary() {
    VelocityField f;
    f.kind_ = VelocityKind::Stationary;
    return f;
  }

  /// V(t,x) = (R'(t)/R(t)) x. Uniform dilation about the origin.
  static VelocityField radial_scaling(std::function<double(double)> radius,
                                      std::function<double(double)> radius_rate) {
    VelocityField f;
    f.kind_ = VelocityKind::RadialScaling;
    auto rate = [radius = std::move(radius), radius_rate = std::move(radius_rate)](double t) {
      return radius_rate(t) / radius(t);
    };
    f.value_ = [rate](double t, const Vec3& x) -> Vec3 { return rate(t) * x; };
    f.jacobian_ = [rate](double t, const Vec3&) -> Mat3 { return rate(t) * Mat3::Identity(); };
    return f;
  }

  /// V(t,x) = diag(a'/a, b'/b, c'/c) x for per-axis scale functions.
  static VelocityField anisotropic_scaling(std::function<double(double)> rate_x,
                                           std::function<double(double)> rate_y,
                                           std::function<double(double)> rate_z) {
    VelocityField f;
    f.kind_ = VelocityKind::AnisotropicScaling;
    f.value_ = [=](double t, const Vec3& x) -> Vec3 {
      return Vec3(rate_x(t) * x.x(), rate_y(t) * x.y(), rate_z(t) * x.z());
    };
    f.jacobian_ = [=](double t, const Vec3&) -> Mat3 {
      Mat3 j = Mat3::Zero();
      j(0, 0) = rate_x(t);
      j(1, 1) = rate_y(t);
      j(2, 2) = rate_z(t);
      return j;
    };
    return f;
  }

  /// Rigid rotation about `axis` at `rate` rad/s. Divergence-free isometry.
  static VelocityField tangential_rotation(const Vec3& axis, double rate) {
    VelocityField f;
    f.kind_ = VelocityKind::TangentialRotation;
    const Vec3 omega = rate * axis.normalized();
    f.value_ = [omega](double, const Vec3& x) -> Vec3 { return omega.cross(x); };
    Mat3 skew;
    skew << 0, -omega.z(), omega.y(), omega.z(), 0, -omega.x(), -omega.y(), omega.x(), 0;
    f.jacobian_ = [skew](double, const Vec3&) -> Mat3 { return skew; };
    f.div_ = [](double, const Vec3&, const Vec3&) { return 0.0; };
    return f;
  }

  /// User field. The Jacobian is optional (finite differences otherwise), and the
  /// tangential divergence may be supplied directly.
  static VelocityField custom(ValueFn value, JacobianFn jacobian = nullptr, DivFn div = nullptr) {
    VelocityField f;
    f.kind_ = VelocityKind::Custom;
    f.value_ = std::move(value);
    f.jacobian_ = std::move(jacobian);
    f.div_ = std::move(div);
    return f;
  }

  VelocityKind kind() const { return kind_; }

  Vec3 value(double t, const Vec3& x) const {
    if (!value_) return Vec3::Zero();
    return value_(t, x);
  }

  Mat3 jacobian(double t, const Vec3& x) const {
    if (kind_ == VelocityKind::Stationary) return Mat3::Zero();
    if (jacobian_) return jacobian_(t, x);
    // Central differences in the ambient coordinates.
    const double h = 1e-5 * (1.0 + x.norm());
    Mat3 j;
    for (int c = 0; c < 3; ++c) {
      Vec3 xp = x, xm = x;
      xp[c] += h;
      xm[c] -= h;
      j.col(c) = (value_(t, xp) - value_(t, xm)) / (2 * h);
    }
    return j;
  }

  /// Tangential divergence on a surface with unit normal `normal`.
  double tangential_divergence(double t, const Vec3& x, const Vec3& normal) const {
    if (kind_ == VelocityKind::Stationary) return 0.0;
    if (div_) return div_(t, x, normal);
    const Mat3 j = jacobian(t, x);
    return j.trace() - normal.dot(j * normal);
  }

  void set_advective(ValueFn advective) { advective_ = std::move(advective); }
  bool has_advective() const { return static_cast<bool>(advective_); }
  Vec3 advective(double t, const Vec3& x) const {
    if (!advective_) return Vec3::Zero();
    return advective_(t, x);
  }

private:
  VelocityKind kind_ = VelocityKind::Stationary;
  ValueFn value_;
  JacobianFn jacobian_;
  DivFn div_;
  ValueFn advective_;
};

}  // namespace evosurf

#endif
