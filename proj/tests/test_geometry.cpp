// SPDX-FileCopyrightText: Copyright (c) 2026 The evosurf-ch Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>

#include "evosurf/forms.hpp"
#include "evosurf/off_io.hpp"
#include "evosurf/surface.hpp"

using namespace evosurf;

namespace {

// Independent flow oracle: RK4 on a single point (not the mesh machinery).
Vec3 integrate_point(const VelocityField& field, Vec3 x, double t0, double t1, int steps) {
  const double h = (t1 - t0) / steps;
  for (int s = 0; s < steps; ++s) {
    const double t = t0 + s * h;
    const Vec3 k1 = field.value(t, x);
    const Vec3 k2 = field.value(t + 0.5 * h, x + 0.5 * h * k1);
    const Vec3 k3 = field.value(t + 0.5 * h, x + 0.5 * h * k2);
    const Vec3 k4 = field.value(t + h, x + h * k3);
    x += (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return x;
}

// Quadrature oracle for the area Jacobian: integrate d(log J)/dt = div_Gamma V
// along the advected element-centroid trajectory. The caller supplies the unit
// normal along the trajectory (radial for spheres; inverse-transpose transported
// for linearly deformed surfaces).
double jacobian_quadrature_oracle(const VelocityField& field, Vec3 centroid, double t1, int steps,
                                  const std::function<Vec3(double, const Vec3&)>& normal_at) {
  double log_j = 0.0;
  const double h = t1 / steps;
  Vec3 x = centroid;
  for (int s = 0; s < steps; ++s) {
    const double t = s * h;
    auto div_at = [&](double tt, const Vec3& p) {
      return field.tangential_divergence(tt, p, normal_at(tt, p));
    };
    const Vec3 k1 = field.value(t, x);
    const Vec3 k2 = field.value(t + 0.5 * h, x + 0.5 * h * k1);
    const Vec3 k3 = field.value(t + 0.5 * h, x + 0.5 * h * k2);
    const Vec3 k4 = field.value(t + h, x + h * k3);
    const double d1 = div_at(t, x);
    const double d2 = div_at(t + 0.5 * h, x + 0.5 * h * k1);
    const double d3 = div_at(t + 0.5 * h, x + 0.5 * h * k2);
    const double d4 = div_at(t + h, x + h * k3);
    log_j += (h / 6.0) * (d1 + 2 * d2 + 2 * d3 + d4);
    x += (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return std::exp(log_j);
}

}  // namespace

TEST_CASE("icosphere approximates the round sphere area") {
  const double exact = 4.0 * M_PI;
  const MovingMesh l4 = make_icosphere(4);
  CHECK(std::abs(l4.total_area() - exact) / exact < 5e-3);

  // O(h^2) convergence of the total area.
  double prev_err = -1.0;
  for (int level = 2; level <= 4; ++level) {
    const double err = std::abs(make_icosphere(level).total_area() - exact);
    if (prev_err > 0) CHECK(err < 0.3 * prev_err);
    prev_err = err;
  }
}

TEST_CASE("icosphere counts and manifold structure") {
  for (int level = 0; level <= 3; ++level) {
    const MovingMesh mesh = make_icosphere(level);
    const long f = 20L << (2 * level);
    CHECK(mesh.triangle_count() == f);
    CHECK(mesh.vertex_count() == 10L * (1L << (2 * level)) + 2);
    REQUIRE_NOTHROW(validate_closed_manifold(mesh, true));
  }
}

TEST_CASE("stationary surface never moves") {
  SurfaceSpec spec;
  spec.kind = "unit-sphere";
  spec.level = 2;
  const EvolvingSurface surf = make_surface(spec);
  const MovingMesh moved = advect_mesh(surf, 0.0, 0.7, surf.reference_mesh, 1e-3);
  for (int v = 0; v < moved.vertex_count(); ++v)
    CHECK(moved.vertices[v] == surf.reference_mesh.vertices[v]);
  CHECK((moved.jacobian.array() - 1.0).abs().maxCoeff() == 0.0);
}

TEST_CASE("rotation is an isometry for the advected mesh") {
  SurfaceSpec spec;
  spec.kind = "rotating-sphere";
  spec.level = 3;
  spec.rate = 1.0;
  spec.t_final = M_PI;
  const EvolvingSurface surf = make_surface(spec);
  const double area0 = surf.reference_mesh.total_area();

  MovingMesh mesh = surf.reference_mesh;
  double t = 0.0;
  for (int k = 1; k <= 4; ++k) {
    const double t_next = M_PI * k / 4.0;
    mesh = advect_mesh(surf, t, t_next, mesh, 5e-3);
    t = t_next;
    CHECK(std::abs(mesh.total_area() - area0) / area0 < 1e-12);
    CHECK((mesh.jacobian.array() - 1.0).abs().maxCoeff() < 1e-12);
  }
  for (int v = 0; v < mesh.vertex_count(); ++v)
    CHECK(std::abs(mesh.vertices[v].norm() - surf.reference_mesh.vertices[v].norm()) < 1e-10);
}

TEST_CASE("radial scaling follows the closed-form flow") {
  SurfaceSpec spec;
  spec.kind = "exp-sphere";
  spec.level = 2;
  spec.rate = -1.0;  // R(t) = e^{-t}
  spec.t_final = 1.0;
  const EvolvingSurface surf = make_surface(spec);
  const MovingMesh moved = advect_mesh(surf, 0.0, 1.0, surf.reference_mesh, 1e-3);

  const double factor = std::exp(-1.0);
  for (int v = 0; v < moved.vertex_count(); ++v) {
    const Vec3 expected = factor * surf.reference_mesh.vertices[v];
    CHECK((moved.vertices[v] - expected).norm() < 1e-8);
  }

  // Uniform scaling multiplies every triangle area by the same factor squared.
  const double expected_j = std::exp(-2.0);
  CHECK((moved.jacobian.array() - expected_j).abs().maxCoeff() < 1e-10);
  const double spread = moved.jacobian.maxCoeff() - moved.jacobian.minCoeff();
  CHECK(spread < 1e-13);
}

TEST_CASE("element Jacobian agrees with the divergence quadrature oracle") {
  const auto radial_normal = [](double, const Vec3& p) { return Vec3(p.normalized()); };
  SECTION("uniform scaling, tight agreement") {
    SurfaceSpec spec;
    spec.kind = "exp-sphere";
    spec.level = 2;
    spec.rate = -1.0;
    const EvolvingSurface surf = make_surface(spec);
    const MovingMesh moved = advect_mesh(surf, 0.0, 0.5, surf.reference_mesh, 1e-3);
    for (int e = 0; e < moved.triangle_count(); e += 17) {
      const double oracle = jacobian_quadrature_oracle(
          surf.velocity, surf.reference_mesh.element_centroid(e), 0.5, 500, radial_normal);
      CHECK(std::abs(moved.jacobian[e] - oracle) < 1e-9);
    }
  }
  SECTION("anisotropic scaling, consistency under refinement") {
    // The surface stays the linear image diag(1,1,c(t)) of the initial sphere,
    // so its normal transports by the inverse transpose of that map.
    const double amp = 0.3;
    const auto normal_at = [amp](double t, const Vec3& p) {
      const double c = 1.0 + amp * std::sin(t);
      const Vec3 x0(p.x(), p.y(), p.z() / c);  // pre-image on the sphere
      const Vec3 n0 = x0.normalized();
      return Vec3(Vec3(n0.x(), n0.y(), n0.z() / c).normalized());
    };
    double prev = -1.0;
    for (int level = 1; level <= 3; ++level) {
      SurfaceSpec spec;
      spec.kind = "ellipsoid";
      spec.level = level;
      spec.amp_z = amp;
      spec.omega = 1.0;
      const EvolvingSurface surf = make_surface(spec);
      const MovingMesh moved = advect_mesh(surf, 0.0, 0.5, surf.reference_mesh, 1e-3);
      double worst = 0.0;
      for (int e = 0; e < moved.triangle_count(); ++e) {
        const double oracle = jacobian_quadrature_oracle(
            surf.velocity, surf.reference_mesh.element_centroid(e), 0.5, 200, normal_at);
        worst = std::max(worst, std::abs(moved.jacobian[e] - oracle) / oracle);
      }
      if (prev > 0) CHECK(worst < 0.7 * prev);
      prev = worst;
    }
    CHECK(prev < 2e-3);
  }
}

TEST_CASE("density is the reciprocal Jacobian") {
  SECTION("halved radius gives rho = 4") {
    SurfaceSpec spec;
    spec.kind = "scaling-sphere";
    spec.level = 2;
    spec.r_end = 0.5;
    spec.t_ramp = 1.0;
    spec.t_final = 1.0;
    const EvolvingSurface surf = make_surface(spec);
    const MovingMesh moved = advect_mesh(surf, 0.0, 1.0, surf.reference_mesh, 1e-3);
    CHECK((moved.rho.array() - 4.0).abs().maxCoeff() < 1e-8);
  }
  SECTION("stationary surface has rho = 1 exactly") {
    const MovingMesh mesh = make_icosphere(2);
    CHECK((mesh.rho.array() - 1.0).abs().maxCoeff() == 0.0);
  }
  SECTION("rho J stays pinned to 1 on uniformly scaled surfaces") {
    SurfaceSpec spec;
    spec.kind = "exp-sphere";
    spec.level = 2;
    spec.rate = 0.4;
    const EvolvingSurface surf = make_surface(spec);
    const MovingMesh moved = advect_mesh(surf, 0.0, 0.8, surf.reference_mesh, 1e-3);
    CHECK(moved.rho.minCoeff() * moved.jacobian.maxCoeff() >= 1.0 - 1e-6);
    CHECK(moved.rho.maxCoeff() * moved.jacobian.minCoeff() <= 1.0 + 1e-6);
  }
}

TEST_CASE("transport identity: d/dt of the mass pairing matches the divergence form") {
  // Transported vertex function: coefficients frozen, mesh moves.
  SurfaceSpec spec;
  spec.kind = "ellipsoid";
  spec.level = 2;
  spec.amp_x = 0.2;
  spec.amp_z = 0.3;
  spec.omega = 1.3;
  const EvolvingSurface surf = make_surface(spec);
  Vector u(surf.reference_mesh.vertex_count());
  for (int v = 0; v < u.size(); ++v) {
    const Vec3& p = surf.reference_mesh.vertices[v];
    u[v] = 0.3 + p.x() * p.x() - 0.5 * p.z();
  }

  const double t_star = 0.4;
  const MovingMesh base = advect_mesh(surf, 0.0, t_star, surf.reference_mesh, 1e-4);
  const AssembledForms forms = assemble_forms(base, surf.velocity, t_star);
  const double assembled = u.dot(forms.G * Vector::Ones(u.size()));

  double prev_err = -1.0;
  for (double tau : {2e-2, 1e-2, 5e-3}) {
    const MovingMesh plus = advect_mesh(surf, t_star, t_star + tau, base, 1e-4);
    MovingMesh minus_seed = base;
    // Advect backwards by integrating the reversed field.
    const VelocityField reversed = VelocityField::custom(
        [&surf, t_star, tau](double s, const Vec3& x) { return -surf.velocity.value(2 * t_star - s, x); });
    EvolvingSurface back{base, reversed, t_star + tau};
    const MovingMesh minus = advect_mesh(back, t_star, t_star + tau, minus_seed, 1e-4);

    auto mass_of = [&u](const MovingMesh& m) {
      Vector lumped = Vector::Zero(m.vertex_count());
      for (int e = 0; e < m.triangle_count(); ++e)
        for (int k = 0; k < 3; ++k) lumped[m.triangles[e][k]] += m.current_areas[e] / 3.0;
      return lumped.dot(u);
    };
    const double fd = (mass_of(plus) - mass_of(minus)) / (2 * tau);
    const double err = std::abs(fd - assembled);
    if (prev_err > 0) CHECK(err < 0.4 * prev_err);
    prev_err = err;
  }
  CHECK(prev_err < 1e-4);
}

TEST_CASE("area bounds hold with the sampled divergence constant") {
  for (const char* kind : {"rotating-sphere", "exp-sphere", "scaling-sphere"}) {
    SurfaceSpec spec;
    spec.kind = kind;
    spec.level = 2;
    spec.rate = kind == std::string("exp-sphere") ? -0.5 : 1.0;
    spec.r_end = 0.6;
    spec.t_ramp = 1.0;
    spec.t_final = 1.0;
    const EvolvingSurface surf = make_surface(spec);

    // Sampled bound on |div V| over time and surface points.
    double div_max = 0.0;
    MovingMesh mesh = surf.reference_mesh;
    double t = 0.0;
    std::vector<double> areas{mesh.total_area()};
    for (int k = 1; k <= 20; ++k) {
      const double t_next = k / 20.0;
      mesh = advect_mesh(surf, t, t_next, mesh, 1e-3);
      t = t_next;
      for (int e = 0; e < mesh.triangle_count(); e += 7)
        div_max = std::max(div_max, std::abs(surf.velocity.tangential_divergence(
                                        t, mesh.element_centroid(e), mesh.element_normal(e))));
      areas.push_back(mesh.total_area());
    }
    const double c_a = std::exp(div_max * 1.0) * 1.05;
    const double area0 = areas.front();
    for (double a : areas) {
      CHECK(a >= area0 / c_a);
      CHECK(a <= area0 * c_a);
    }
  }
}

TEST_CASE("density computation is path independent") {
  SurfaceSpec spec;
  spec.kind = "exp-sphere";
  spec.level = 2;
  spec.rate = -0.7;
  const EvolvingSurface surf = make_surface(spec);

  const MovingMesh one_shot = advect_mesh(surf, 0.0, 1.0, surf.reference_mesh, 1e-3);
  MovingMesh chained = surf.reference_mesh;
  chained = advect_mesh(surf, 0.0, 0.333, chained, 7.7e-4);
  chained = advect_mesh(surf, 0.333, 0.777, chained, 7.7e-4);
  chained = advect_mesh(surf, 0.777, 1.0, chained, 7.7e-4);

  CHECK((one_shot.rho - chained.rho).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("tangential rotation fields are tangential and divergence free") {
  const MovingMesh mesh = make_icosphere(2);
  const VelocityField field = VelocityField::tangential_rotation(Vec3::UnitZ(), 1.0);
  for (int v = 0; v < mesh.vertex_count(); v += 5) {
    const Vec3& x = mesh.vertices[v];
    const Vec3 normal = x.normalized();
    CHECK(std::abs(field.value(0.3, x).dot(normal)) < 1e-13);
    CHECK(std::abs(field.tangential_divergence(0.3, x, normal)) < 1e-13);
  }
}

TEST_CASE("velocity magnitude stays bounded over the horizon") {
  SurfaceSpec spec;
  spec.kind = "scaling-sphere";
  spec.level = 1;
  spec.r_end = 0.5;
  spec.t_ramp = 0.8;
  spec.t_final = 1.0;
  const EvolvingSurface surf = make_surface(spec);
  double bound = 0.0;
  for (int k = 0; k <= 50; ++k)
    for (const auto& v : surf.reference_mesh.vertices)
      bound = std::max(bound, surf.velocity.value(k / 50.0, v).norm());
  CHECK(std::isfinite(bound));
  CHECK(bound < 10.0);
}

TEST_CASE("OFF round trip and error reporting") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "evosurf_off_test";
  fs::create_directories(dir);

  SECTION("round trip preserves the mesh") {
    const MovingMesh mesh = make_icosphere(1);
    const std::string path = (dir / "sphere.off").string();
    save_off(mesh, path);
    const MovingMesh loaded = load_off(path);
    REQUIRE(loaded.vertex_count() == mesh.vertex_count());
    REQUIRE(loaded.triangle_count() == mesh.triangle_count());
    CHECK(std::abs(loaded.total_area() - mesh.total_area()) < 1e-14 * mesh.total_area());
  }
  SECTION("non-manifold meshes are rejected") {
    const std::string path = (dir / "fan.off").string();
    std::ofstream out(path);
    out << "OFF\n5 3 0\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n0 -1 0\n3 0 1 2\n3 1 0 3\n3 0 1 4\n";
    out.close();
    CHECK_THROWS_AS(load_off(path), MeshError);
  }
  SECTION("open meshes are rejected") {
    const std::string path = (dir / "open.off").string();
    std::ofstream out(path);
    out << "OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n";
    out.close();
    CHECK_THROWS_AS(load_off(path), MeshError);
  }
  SECTION("missing header is a parse error") {
    const std::string path = (dir / "bad.off").string();
    std::ofstream out(path);
    out << "FOO\n3 1 0\n";
    out.close();
    CHECK_THROWS_AS(load_off(path), MeshError);
  }
}

TEST_CASE("unknown catalog entries are rejected") {
  SurfaceSpec spec;
  spec.kind = "torus-of-revolution";
  CHECK_THROWS_AS(make_surface(spec), MeshError);
}
