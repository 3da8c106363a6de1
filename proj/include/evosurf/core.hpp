// SPDX-FileCopyrightText: Copyright (c) 2026 The evosurf-ch Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EVOSURF_CORE_HPP
#define EVOSURF_CORE_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <stdexcept>
#include <string>
#include <vector>

namespace evosurf {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

/// Mesh construction / validation failure (non-manifold input, degenerate element, ...).
class MeshError : public std::runtime_error {
public:
  explicit MeshError(const std::string& what) : std::runtime_error(what) {}
};

/// Evaluation outside a potential's domain (exact logarithmic potential at |r| >= 1).
/// Distinct type so the time stepper can react to it.
class PotentialDomainError : public std::domain_error {
public:
  explicit PotentialDomainError(const std::string& what) : std::domain_error(what) {}
};

/// Nonlinear solve failure. Carries the residual history of the failed solve.
class SolverError : public std::runtime_error {
public:
  SolverError(const std::string& what, std::vector<double> residuals)
      : std::runtime_error(what), residual_history(std::move(residuals)) {}
  std::vector<double> residual_history;
};

/// Configuration parse or validation failure.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

inline bool approx_equal(double a, double b, double tol) { return std::abs(a - b) <= tol; }

}  // namespace evosurf

#endif
