// SPDX-FileCopyrightText: Copyright (c) 2026 The evosurf-ch Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EVOSURF_FORMS_HPP
#define EVOSURF_FORMS_HPP

#include <Eigen/SparseLU>
#include <Eigen/SparseCholesky>
#include <cmath>
#include <optional>

#include "evosurf/mesh.hpp"
#include "evosurf/velocity.hpp"

namespace evosurf {

/// Which advective velocity V_a enters the first-order form. The form uses
/// V_a^tau = V_tau - V_a, so `FollowTangential` (V_a = V_tau) switches the
/// advective term off entirely; `Zero` keeps the full tangential velocity.
/// A custom advective part attached to the VelocityField takes precedence.
enum class AdvectiveMode { FollowTangential, Zero };

/// The five bilinear forms on the current mesh, assembled with transported P1
/// hat functions, plus the density-weighted mass and stiffness for the weighted
/// conservation model.
///
/// Conventions: matrices act on coefficient vectors; the test-function index is
/// the row, so (A_N u)_j = a_N(u, chi_j). M, G, A_S, B, M_rho, A_S_rho are
/// symmetric. Row sums of A_S vanish exactly (element matrices annihilate
/// constants by construction) and A_N^T 1 = 0.
struct AssembledForms {
  SparseMatrix M;         // mass:            m(chi_i, chi_j)
  SparseMatrix G;         // divergence mass: g(chi_i, chi_j), discrete element divergence
  SparseMatrix A_S;       // stiffness:       a_S(chi_i, chi_j)
  SparseMatrix A_N;       // advection:       (A_N)_{j,i} = a_N(chi_i, chi_j)
  SparseMatrix B;         // deformation:     b(chi_i, chi_j)
  SparseMatrix M_rho;     // rho-weighted mass
  SparseMatrix A_S_rho;   // rho-weighted stiffness
  Vector lumped_mass;     // M * 1  (row sums)
  Vector lumped_mass_rho; // M_rho * 1
  double area = 0.0;
  double time_tag = 0.0;

  int size() const { return static_cast<int>(M.rows()); }
};

namespace detail {

// Tangential gradients of the three hat functions on one triangle. Built from
// the 2x2 Gram system of the edge vectors; the first gradient is the negated
// sum of the other two, so the constants are annihilated exactly.
inline void hat_gradients(const Vec3& p0, const Vec3& p1, const Vec3& p2, Vec3 grad[3]) {
  const Vec3 e1 = p1 - p0, e2 = p2 - p0;
  const double g11 = e1.dot(e1), g12 = e1.dot(e2), g22 = e2.dot(e2);
  const double det = g11 * g22 - g12 * g12;
  if (!(det > 0)) throw MeshError("assemble: degenerate element (zero Gram determinant)");
  // Rows of the Gram inverse give the contravariant basis coefficients.
  grad[1] = (g22 * e1 - g12 * e2) / det;
  grad[2] = (g11 * e2 - g12 * e1) / det;
  grad[0] = -grad[1] - grad[2];
}

}  // namespace detail

/// Assemble all forms on `mesh` (the state of the surface at time t).
/// Mass-type integrals use exact P1 quadrature; velocity-dependent entries
/// sample the field at nodes (discrete divergence) or the centroid.
inline AssembledForms assemble_forms(const MovingMesh& mesh, const VelocityField& velocity,
                                     double t, AdvectiveMode mode = AdvectiveMode::FollowTangential) {
  const int nv = mesh.vertex_count();
  const int ne = mesh.triangle_count();
  const bool moving = velocity.kind() != VelocityKind::Stationary;
  const bool advective = velocity.has_advective() || mode == AdvectiveMode::Zero;

  std::vector<Triplet> tm, tg, ts, tn, tb, tmr, tsr;
  tm.reserve(9 * ne);
  ts.reserve(9 * ne);
  tmr.reserve(9 * ne);
  tsr.reserve(9 * ne);
  if (moving) {
    tg.reserve(9 * ne);
    tb.reserve(9 * ne);
  }
  if (moving && advective) tn.reserve(9 * ne);

  for (int e = 0; e < ne; ++e) {
    const auto& tri = mesh.triangles[e];
    const Vec3& p0 = mesh.vertices[tri[0]];
    const Vec3& p1 = mesh.vertices[tri[1]];
    const Vec3& p2 = mesh.vertices[tri[2]];
    const double area = mesh.current_areas[e];
    Vec3 grad[3];
    detail::hat_gradients(p0, p1, p2, grad);

    // Exact P1 mass: area/12 * (1 + delta_ij).
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const double mij = area / 12.0 * (i == j ? 2.0 : 1.0);
        tm.emplace_back(tri[i], tri[j], mij);
        ts.emplace_back(tri[i], tri[j], area * grad[i].dot(grad[j]));
      }

    // rho-weighted mass, exact for P1 rho: int chi_i chi_j chi_k = 2A a!b!c!/(a+b+c+2)!.
    const double r0 = mesh.rho[tri[0]], r1 = mesh.rho[tri[1]], r2 = mesh.rho[tri[2]];
    const double rv[3] = {r0, r1, r2};
    const double rbar = (r0 + r1 + r2) / 3.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double mrij;
        if (i == j) {
          mrij = area * (rv[i] / 10.0 + (rv[(i + 1) % 3] + rv[(i + 2) % 3]) / 30.0);
        } else {
          const int k = 3 - i - j;
          mrij = area * ((rv[i] + rv[j]) / 30.0 + rv[k] / 60.0);
        }
        tmr.emplace_back(tri[i], tri[j], mrij);
        tsr.emplace_back(tri[i], tri[j], rbar * area * grad[i].dot(grad[j]));
      }

    if (moving) {
      // Discrete tangential divergence of the nodal velocity interpolant:
      // constant per element, and d/dt M(t) = G(t) holds for the transported basis.
      double div_h = 0.0;
      for (int k = 0; k < 3; ++k) div_h += velocity.value(t, mesh.vertices[tri[k]]).dot(grad[k]);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          tg.emplace_back(tri[i], tri[j], div_h * area / 12.0 * (i == j ? 2.0 : 1.0));

      // Deformation form, velocity Jacobian sampled at the centroid.
      const Vec3 nrm = mesh.element_normal(e);
      const Vec3 c = mesh.element_centroid(e);
      const Mat3 jac = velocity.jacobian(t, c);
      const Mat3 proj = Mat3::Identity() - nrm * nrm.transpose();
      const Mat3 tangential_jac = jac * proj;
      const double div_gamma = (proj * jac).trace();
      const Mat3 deform =
          div_gamma * Mat3::Identity() - (tangential_jac + tangential_jac.transpose());
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          tb.emplace_back(tri[i], tri[j], area * grad[i].dot(deform * grad[j]));

      if (advective) {
        // a_N(chi_i, chi_j) = int chi_i (V_tau - V_a) . grad chi_j, one-point centroid rule.
        const Vec3 vc = velocity.value(t, c);
        const Vec3 v_tau = proj * vc;
        Vec3 v_atau;
        if (velocity.has_advective())
          v_atau = v_tau - proj * velocity.advective(t, c);
        else
          v_atau = mode == AdvectiveMode::Zero ? v_tau : Vec3::Zero();
        for (int j = 0; j < 3; ++j) {
          const double row_val = area / 3.0 * v_atau.dot(grad[j]);
          for (int i = 0; i < 3; ++i) tn.emplace_back(tri[j], tri[i], row_val);
        }
      }
    }
  }

  AssembledForms forms;
  forms.time_tag = t;
  forms.area = mesh.total_area();
  auto build = [nv](SparseMatrix& m, std::vector<Triplet>& trip) {
    m.resize(nv, nv);
    m.setFromTriplets(trip.begin(), trip.end());
    m.makeCompressed();
  };
  build(forms.M, tm);
  build(forms.A_S, ts);
  build(forms.M_rho, tmr);
  build(forms.A_S_rho, tsr);
  build(forms.G, tg);
  build(forms.B, tb);
  build(forms.A_N, tn);
  forms.lumped_mass = forms.M * Vector::Ones(nv);
  forms.lumped_mass_rho = forms.M_rho * Vector::Ones(nv);
  return forms;
}

/// L2 projection onto the P1 space: solves M c = rhs with rhs the load vector
/// of the target (here the P1 interpolant of the vertex samples).
inline Vector l2_project(const AssembledForms& forms, const Vector& samples) {
  if (samples.size() != forms.size()) throw std::invalid_argument("l2_project: size mismatch");
  Eigen::SimplicialLDLT<SparseMatrix> solver(forms.M);
  if (solver.info() != Eigen::Success) throw std::runtime_error("l2_project: mass factorization failed");
  Vector rhs = forms.M * samples;
  Vector c = solver.solve(rhs);
  if (solver.info() != Eigen::Success) throw std::runtime_error("l2_project: solve failed");
  return c;
}

struct InverseLaplacianResult {
  Vector potential;      // G z, mean-zero
  double norm_sq;        // ||z||_{-1}^2 = z^T M (G z)
};

/// Mean-zero solution of the surface Poisson problem A_S (Gz) = M z with the
/// mean constraint enforced through one exact Lagrange multiplier row/column.
/// The input must have M-weighted mean zero up to `mean_tol * ||z||_{L2}`.
inline InverseLaplacianResult inverse_laplacian(const AssembledForms& forms, const Vector& z,
                                                double mean_tol = 1e-8) {
  const int n = forms.size();
  if (z.size() != n) throw std::invalid_argument("inverse_laplacian: size mismatch");
  const double z_l2 = std::sqrt(std::max(0.0, z.dot(forms.M * z)));
  const double mean = forms.lumped_mass.dot(z);
  if (std::abs(mean) > mean_tol * std::max(1e-300, z_l2) && z_l2 > 0)
    throw std::invalid_argument(
        "inverse_laplacian: input has nonzero mean (|1^T M z| = " + std::to_string(std::abs(mean)) +
        "); center the input first");
  InverseLaplacianResult result;
  if (z_l2 == 0.0) {
    result.potential = Vector::Zero(n);
    result.norm_sq = 0.0;
    return result;
  }

  std::vector<Triplet> trip;
  trip.reserve(forms.A_S.nonZeros() + 2 * n);
  for (int k = 0; k < forms.A_S.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(forms.A_S, k); it; ++it)
      trip.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
  for (int i = 0; i < n; ++i) {
    trip.emplace_back(i, n, forms.lumped_mass[i]);
    trip.emplace_back(n, i, forms.lumped_mass[i]);
  }
  SparseMatrix saddle(n + 1, n + 1);
  saddle.setFromTriplets(trip.begin(), trip.end());
  saddle.makeCompressed();

  Vector rhs = Vector::Zero(n + 1);
  rhs.head(n) = forms.M * z;
  Eigen::SparseLU<SparseMatrix> solver(saddle);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("inverse_laplacian: singular saddle system");
  Vector sol = solver.solve(rhs);
  if (solver.info() != Eigen::Success) throw std::runtime_error("inverse_laplacian: solve failed");
  result.potential = sol.head(n);
  result.norm_sq = std::max(0.0, z.dot(forms.M * result.potential));
  return result;
}

/// Discrete Poincare surrogate: C_P,h = 1 / lambda_2 for the generalized
/// eigenproblem A_S x = lambda M x. Dense solve, desk scale only.
inline double poincare_constant(const AssembledForms& forms) {
  const Eigen::MatrixXd a = Eigen::MatrixXd(forms.A_S);
  const Eigen::MatrixXd m = Eigen::MatrixXd(forms.M);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(a, m);
  if (eig.info() != Eigen::Success) throw std::runtime_error("poincare_constant: eigensolver failed");
  // First eigenvalue is the constant mode at ~0; the second is the spectral gap.
  const double lambda2 = eig.eigenvalues()(1);
  if (!(lambda2 > 0)) throw std::runtime_error("poincare_constant: nonpositive spectral gap");
  return 1.0 / lambda2;
}

}  // namespace evosurf

#endif
