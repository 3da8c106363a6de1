// SPDX-FileCopyrightText: Copyright (c) 2026 The evosurf-ch Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <random>

#include "evosurf/forms.hpp"
#include "evosurf/surface.hpp"

using namespace evosurf;

namespace {

double max_asymmetry(const SparseMatrix& m) {
  SparseMatrix diff = SparseMatrix(m.transpose()) - m;
  double worst = 0.0;
  for (int k = 0; k < diff.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(diff, k); it; ++it)
      worst = std::max(worst, std::abs(it.value()));
  return worst;
}

Vector coordinate_z(const MovingMesh& mesh) {
  Vector z(mesh.vertex_count());
  for (int v = 0; v < mesh.vertex_count(); ++v) z[v] = mesh.vertices[v].z();
  return z;
}

}  // namespace

TEST_CASE("mass matrix partitions unity into the mesh area") {
  for (int level : {1, 3}) {
    const MovingMesh mesh = make_icosphere(level);
    const AssembledForms forms = assemble_forms(mesh, VelocityField::stationary(), 0.0);
    const double mass_area = Vector::Ones(forms.size()).dot(forms.M * Vector::Ones(forms.size()));
    CHECK(std::abs(mass_area - mesh.total_area()) < 1e-12 * mesh.total_area());
  }
}

TEST_CASE("stationary velocity gives vanishing G and B") {
  const MovingMesh mesh = make_icosphere(2);
  const AssembledForms forms = assemble_forms(mesh, VelocityField::stationary(), 0.0);
  CHECK(forms.G.nonZeros() == 0);
  CHECK(forms.B.nonZeros() == 0);
  CHECK(forms.A_N.nonZeros() == 0);
}

TEST_CASE("structural symmetry and kernels") {
  SurfaceSpec spec;
  spec.kind = "ellipsoid";
  spec.level = 2;
  spec.amp_x = 0.25;
  spec.amp_z = 0.15;
  spec.omega = 0.9;
  const EvolvingSurface surf = make_surface(spec);
  const MovingMesh mesh = advect_mesh(surf, 0.0, 0.3, surf.reference_mesh, 1e-3);
  const AssembledForms forms = assemble_forms(mesh, surf.velocity, 0.3);

  CHECK(max_asymmetry(forms.M) == 0.0);
  CHECK(max_asymmetry(forms.G) == 0.0);
  CHECK(max_asymmetry(forms.M_rho) == 0.0);
  CHECK(max_asymmetry(forms.A_S) < 1e-14);
  CHECK(max_asymmetry(forms.A_S_rho) < 1e-14);
  CHECK(max_asymmetry(forms.B) < 1e-13);

  const Vector ones = Vector::Ones(forms.size());
  CHECK((forms.A_S * ones).cwiseAbs().maxCoeff() < 1e-13);
  CHECK((forms.A_S_rho * ones).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("advective form annihilates constants in the test slot") {
  // Rotation is tangential, so disabling the default cancellation leaves a
  // genuine advective matrix whose columns sum to zero.
  SurfaceSpec spec;
  spec.kind = "rotating-sphere";
  spec.level = 2;
  const EvolvingSurface surf = make_surface(spec);
  const AssembledForms forms =
      assemble_forms(surf.reference_mesh, surf.velocity, 0.0, AdvectiveMode::Zero);
  REQUIRE(forms.A_N.nonZeros() > 0);
  const Vector col_sums = forms.A_N.transpose() * Vector::Ones(forms.size());
  CHECK(col_sums.cwiseAbs().maxCoeff() < 1e-13);

  // The default mode cancels the tangential advection entirely.
  const AssembledForms cancelled = assemble_forms(surf.reference_mesh, surf.velocity, 0.0);
  CHECK(cancelled.A_N.nonZeros() == 0);
}

TEST_CASE("mass matrix is positive definite") {
  const MovingMesh mesh = make_icosphere(1);
  const AssembledForms forms = assemble_forms(mesh, VelocityField::stationary(), 0.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Eigen::MatrixXd(forms.M));
  CHECK(eig.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("surface scaling laws: mass scales by 4, stiffness is invariant") {
  MovingMesh mesh = make_icosphere(1);
  const AssembledForms before = assemble_forms(mesh, VelocityField::stationary(), 0.0);
  for (auto& v : mesh.vertices) v *= 2.0;
  update_geometry(mesh, true);
  const AssembledForms after = assemble_forms(mesh, VelocityField::stationary(), 0.0);

  SparseMatrix mass_gap = after.M - SparseMatrix(4.0 * before.M);
  SparseMatrix stiff_gap = after.A_S - before.A_S;
  double mg = 0.0, sg = 0.0;
  for (int k = 0; k < mass_gap.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(mass_gap, k); it; ++it) mg = std::max(mg, std::abs(it.value()));
  for (int k = 0; k < stiff_gap.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(stiff_gap, k); it; ++it) sg = std::max(sg, std::abs(it.value()));
  CHECK(mg < 1e-14);
  CHECK(sg < 1e-13);
}

TEST_CASE("coordinate function is a discrete Laplace eigenfunction") {
  // On the round sphere the first spherical harmonics satisfy -Lap z = 2 z.
  double prev = -1.0;
  for (int level : {3, 4}) {
    const MovingMesh mesh = make_icosphere(level);
    const AssembledForms forms = assemble_forms(mesh, VelocityField::stationary(), 0.0);
    const Vector z = coordinate_z(mesh);
    const Vector lhs = forms.A_S * z;
    const Vector rhs = 2.0 * (forms.M * z);
    const double rel = (lhs - rhs).norm() / rhs.norm();
    if (prev > 0) CHECK(rel < 0.5 * prev);
    if (level == 4) CHECK(rel < 0.02);
    prev = rel;
  }
}

TEST_CASE("L2 projection behaves as a projection") {
  const MovingMesh mesh = make_icosphere(2);
  const AssembledForms forms = assemble_forms(mesh, VelocityField::stationary(), 0.0);
  const int n = forms.size();

  SECTION("constants project to constants") {
    const Vector ones = Vector::Ones(n);
    const Vector projected = l2_project(forms, ones);
    CHECK((projected - ones).cwiseAbs().maxCoeff() < 1e-12);
  }
  SECTION("idempotence on P1 data") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Vector samples(n);
    for (int i = 0; i < n; ++i) samples[i] = unif(rng);
    const Vector once = l2_project(forms, samples);
    const Vector twice = l2_project(forms, once);
    CHECK((once - twice).cwiseAbs().maxCoeff() < 1e-12);
  }
  SECTION("the projection does not expand the L2 norm") {
    std::mt19937 rng(21);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    for (int trial = 0; trial < 100; ++trial) {
      Vector samples(n);
      for (int i = 0; i < n; ++i) samples[i] = unif(rng);
      const Vector projected = l2_project(forms, samples);
      const double before = std::sqrt(samples.dot(forms.M * samples));
      const double after = std::sqrt(projected.dot(forms.M * projected));
      CHECK(after <= before * (1.0 + 1e-10));
    }
  }
}

TEST_CASE("inverse Laplacian") {
  const MovingMesh mesh = make_icosphere(4);
  const AssembledForms forms = assemble_forms(mesh, VelocityField::stationary(), 0.0);
  const int n = forms.size();

  SECTION("zero maps to zero") {
    const auto inv = inverse_laplacian(forms, Vector::Zero(n));
    CHECK(inv.norm_sq == 0.0);
    CHECK(inv.potential.cwiseAbs().maxCoeff() == 0.0);
  }
  SECTION("coordinate eigenfunction: G z = z/2 with mesh refinement") {
    double prev = -1.0;
    for (int level : {3, 4}) {
      const MovingMesh m = make_icosphere(level);
      const AssembledForms f = assemble_forms(m, VelocityField::stationary(), 0.0);
      const Vector z = coordinate_z(m);
      const auto inv = inverse_laplacian(f, z);
      const double rel = (inv.potential - 0.5 * z).norm() / (0.5 * z).norm();
      if (prev > 0) CHECK(rel < prev);
      if (level == 4) CHECK(rel < 0.02);
      prev = rel;
    }
  }
  SECTION("the negative norm equals the Dirichlet energy of the potential") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Vector z(n);
    for (int i = 0; i < n; ++i) z[i] = unif(rng);
    z.array() -= forms.lumped_mass.dot(z) / forms.area;
    const auto inv = inverse_laplacian(forms, z);
    const double dirichlet = inv.potential.dot(forms.A_S * inv.potential);
    CHECK(inv.norm_sq >= 0.0);
    CHECK(std::abs(inv.norm_sq - dirichlet) < 1e-10 * std::abs(inv.norm_sq));
  }
  SECTION("nonzero mean input is rejected") {
    CHECK_THROWS_AS(inverse_laplacian(forms, Vector::Ones(n)), std::invalid_argument);
  }
}

TEST_CASE("discrete Poincare inequality via the spectral gap") {
  const MovingMesh mesh = make_icosphere(2);
  const AssembledForms forms = assemble_forms(mesh, VelocityField::stationary(), 0.0);
  const double cp = poincare_constant(forms);
  // Unit sphere: the continuous gap is 2, so C_P is about 1/2.
  CHECK(cp > 0.3);
  CHECK(cp < 0.7);

  std::mt19937 rng(99);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    Vector z(forms.size());
    for (int i = 0; i < z.size(); ++i) z[i] = unif(rng);
    z.array() -= forms.lumped_mass.dot(z) / forms.area;
    CHECK(z.dot(forms.M * z) <= cp * z.dot(forms.A_S * z) * (1.0 + 1e-10));
  }
}

TEST_CASE("moving mass identity: d/dt M = G for the transported basis") {
  SurfaceSpec spec;
  spec.kind = "exp-sphere";
  spec.level = 1;
  spec.rate = -0.8;
  const EvolvingSurface surf = make_surface(spec);
  const double t = 0.25, tau = 1e-4;
  const MovingMesh base = advect_mesh(surf, 0.0, t, surf.reference_mesh, 1e-4);
  const MovingMesh plus = advect_mesh(surf, t, t + tau, base, tau);
  const AssembledForms f0 = assemble_forms(base, surf.velocity, t);
  const AssembledForms f1 = assemble_forms(plus, surf.velocity, t + tau);

  const SparseMatrix fd = SparseMatrix((f1.M - f0.M) / tau);
  const SparseMatrix gap = fd - f0.G;
  double worst = 0.0;
  for (int k = 0; k < gap.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(gap, k); it; ++it)
      worst = std::max(worst, std::abs(it.value()));
  // One-sided difference: O(tau) consistency of the identity.
  CHECK(worst < 50 * tau);
}
