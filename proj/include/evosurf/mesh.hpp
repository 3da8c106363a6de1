// SPDX-FileCopyrightText: Copyright (c) 2026 The evosurf-ch Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EVOSURF_MESH_HPP
#define EVOSURF_MESH_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <queue>
#include <utility>
#include <vector>

#include "evosurf/core.hpp"

namespace evosurf {

/// Triangulated surface at one instant. Carries the per-element area Jacobian
/// J = current_area / reference_area relative to the t = 0 mesh, and the density
/// rho = 1/J averaged onto vertices. Treat values as immutable once geometry has
/// been updated; advection produces a new mesh.
struct MovingMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;
  Vector reference_areas;  // per element, at t = 0
  Vector current_areas;    // per element
  Vector jacobian;         // per element, current/reference
  Vector rho_element;      // per element, 1/J
  Vector rho;              // per vertex, area-weighted average of rho_element
  double time = 0.0;

  int vertex_count() const { return static_cast<int>(vertices.size()); }
  int triangle_count() const { return static_cast<int>(triangles.size()); }

  double total_area() const { return current_areas.sum(); }

  Vec3 element_normal(int e) const {
    const auto& t = triangles[e];
    const Vec3 a = vertices[t[1]] - vertices[t[0]];
    const Vec3 b = vertices[t[2]] - vertices[t[0]];
    return a.cross(b).normalized();
  }

  Vec3 element_centroid(int e) const {
    const auto& t = triangles[e];
    return (vertices[t[0]] + vertices[t[1]] + vertices[t[2]]) / 3.0;
  }
};

inline double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  return 0.5 * (b - a).cross(c - a).norm();
}

/// Per-element area Jacobian J_e = area_e(t) / area_e(0).
inline Vector element_jacobian(const MovingMesh& mesh) {
  const int ne = mesh.triangle_count();
  if (mesh.reference_areas.size() != ne)
    throw MeshError("element_jacobian: reference areas not populated");
  Vector j(ne);
  for (int e = 0; e < ne; ++e) {
    const auto& t = mesh.triangles[e];
    const double area = triangle_area(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]);
    if (!(area > 0.0))
      throw MeshError("element_jacobian: degenerate element " + std::to_string(e));
    if (!(mesh.reference_areas[e] > 0.0))
      throw MeshError("element_jacobian: degenerate reference element " + std::to_string(e));
    j[e] = area / mesh.reference_areas[e];
  }
  return j;
}

/// Per-vertex density: area-weighted average of 1/J_e over incident elements.
inline Vector density_rho(const MovingMesh& mesh) {
  const int nv = mesh.vertex_count();
  const int ne = mesh.triangle_count();
  if (mesh.jacobian.size() != ne) throw MeshError("density_rho: jacobian not populated");
  Vector num = Vector::Zero(nv), den = Vector::Zero(nv);
  for (int e = 0; e < ne; ++e) {
    const double a = mesh.current_areas[e];
    const double inv_j = 1.0 / mesh.jacobian[e];
    for (int k = 0; k < 3; ++k) {
      num[mesh.triangles[e][k]] += a * inv_j;
      den[mesh.triangles[e][k]] += a;
    }
  }
  Vector rho(nv);
  for (int v = 0; v < nv; ++v) {
    if (!(den[v] > 0.0)) throw MeshError("density_rho: isolated vertex " + std::to_string(v));
    rho[v] = num[v] / den[v];
  }
  return rho;
}

/// Recompute areas, Jacobian and density from current vertex positions.
/// `as_reference` freezes the current areas as the t = 0 reference.
inline void update_geometry(MovingMesh& mesh, bool as_reference = false) {
  const int ne = mesh.triangle_count();
  Vector areas(ne);
  for (int e = 0; e < ne; ++e) {
    const auto& t = mesh.triangles[e];
    areas[e] = triangle_area(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]);
    if (!(areas[e] > 0.0))
      throw MeshError("update_geometry: degenerate element " + std::to_string(e));
  }
  mesh.current_areas = areas;
  if (as_reference) mesh.reference_areas = areas;
  mesh.jacobian = element_jacobian(mesh);
  mesh.rho_element = mesh.jacobian.cwiseInverse();
  mesh.rho = density_rho(mesh);
}

/// Closed-orientable-connected manifold validation. Throws MeshError on failure.
/// `require_sphere_topology` additionally checks Euler characteristic 2.
inline void validate_closed_manifold(const MovingMesh& mesh, bool require_sphere_topology = false) {
  const int nv = mesh.vertex_count();
  const int nf = mesh.triangle_count();
  if (nv < 3 || nf < 2) throw MeshError("mesh too small to be a closed surface");

  std::map<std::pair<int, int>, int> directed;
  std::map<std::pair<int, int>, int> undirected;
  for (int e = 0; e < nf; ++e) {
    const auto& t = mesh.triangles[e];
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2])
      throw MeshError("triangle " + std::to_string(e) + " has repeated vertices");
    for (int k = 0; k < 3; ++k) {
      const int a = t[k], b = t[(k + 1) % 3];
      if (a < 0 || a >= nv || b < 0 || b >= nv)
        throw MeshError("triangle " + std::to_string(e) + " references missing vertex");
      if (++directed[{a, b}] > 1)
        throw MeshError("non-orientable or non-manifold: directed edge (" + std::to_string(a) +
                        "," + std::to_string(b) + ") repeated");
      ++undirected[{std::min(a, b), std::max(a, b)}];
    }
  }
  for (const auto& [edge, count] : undirected) {
    if (count != 2)
      throw MeshError("edge (" + std::to_string(edge.first) + "," + std::to_string(edge.second) +
                      ") belongs to " + std::to_string(count) + " triangles, expected 2 (not closed/manifold)");
  }

  // Connectivity over the vertex graph.
  std::vector<std::vector<int>> adj(nv);
  for (const auto& [edge, count] : undirected) {
    adj[edge.first].push_back(edge.second);
    adj[edge.second].push_back(edge.first);
  }
  std::vector<char> seen(nv, 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!q.empty()) {
    const int v = q.front();
    q.pop();
    for (int w : adj[v]) {
      if (!seen[w]) {
        seen[w] = 1;
        ++reached;
        q.push(w);
      }
    }
  }
  if (reached != nv) throw MeshError("mesh is not connected");

  const long euler = static_cast<long>(nv) - static_cast<long>(undirected.size()) + nf;
  if (euler % 2 != 0) throw MeshError("Euler characteristic " + std::to_string(euler) + " is odd");
  if (require_sphere_topology && euler != 2)
    throw MeshError("expected sphere topology (Euler characteristic 2), got " + std::to_string(euler));
}

namespace detail {

inline int midpoint_index(std::map<std::pair<int, int>, int>& cache, std::vector<Vec3>& vertices,
                          int a, int b) {
  const auto key = std::make_pair(std::min(a, b), std::max(a, b));
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  const int idx = static_cast<int>(vertices.size());
  vertices.push_back(0.5 * (vertices[a] + vertices[b]));
  cache.emplace(key, idx);
  return idx;
}

}  // namespace detail

/// Icosahedron subdivided `level` times, vertices projected to the sphere of
/// the given radius. level 0 is the raw icosahedron (12 vertices, 20 faces).
inline MovingMesh make_icosphere(int level, double radius = 1.0) {
  if (level < 0) throw MeshError("make_icosphere: level must be >= 0");
  if (level > 8) throw MeshError("make_icosphere: level too large for desk scale");
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> v = {
      {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
      {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
      {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1},
  };
  std::vector<std::array<int, 3>> f = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
      {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
      {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1},
  };
  for (int l = 0; l < level; ++l) {
    std::map<std::pair<int, int>, int> cache;
    std::vector<std::array<int, 3>> next;
    next.reserve(4 * f.size());
    for (const auto& tri : f) {
      const int m01 = detail::midpoint_index(cache, v, tri[0], tri[1]);
      const int m12 = detail::midpoint_index(cache, v, tri[1], tri[2]);
      const int m20 = detail::midpoint_index(cache, v, tri[2], tri[0]);
      next.push_back({tri[0], m01, m20});
      next.push_back({tri[1], m12, m01});
      next.push_back({tri[2], m20, m12});
      next.push_back({m01, m12, m20});
    }
    f = std::move(next);
  }
  for (auto& p : v) p = radius * p.normalized();

  MovingMesh mesh;
  mesh.vertices = std::move(v);
  mesh.triangles = std::move(f);
  update_geometry(mesh, /*as_reference=*/true);
  validate_closed_manifold(mesh, /*require_sphere_topology=*/true);
  return mesh;
}

}  // namespace evosurf

#endif
