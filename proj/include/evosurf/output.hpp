// SPDX-FileCopyrightText: Copyright (c) 2026 The evosurf-ch Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EVOSURF_OUTPUT_HPP
#define EVOSURF_OUTPUT_HPP

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "evosurf/simulation.hpp"

namespace evosurf {

inline std::string format_float(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline const char* diagnostics_csv_header() {
  return "t,mass,weighted_mass,area,energy,energy_reg,min_u,max_u,phase_excess,newton_iters,m_eta";
}

inline std::string diagnostics_csv_line(const DiagnosticsRow& row) {
  std::string line;
  line.reserve(256);
  const auto& o = row.obs;
  line += format_float(o.t);
  for (double v : {o.mass, o.weighted_mass, o.area, o.energy, o.energy_reg, o.min_u, o.max_u,
                   o.phase_excess}) {
    line += ',';
    line += format_float(v);
  }
  line += ',';
  line += std::to_string(row.newton_iters);
  line += ',';
  line += format_float(row.m_eta);
  return line;
}

/// Streaming CSV writer; every row is flushed so a failed run keeps its last row.
class DiagnosticsWriter {
public:
  explicit DiagnosticsWriter(const std::string& path) : out_(path) {
    if (!out_) throw std::runtime_error("cannot open diagnostics file: " + path);
    out_ << diagnostics_csv_header() << "\n";
    out_.flush();
  }
  void write(const DiagnosticsRow& row) {
    out_ << diagnostics_csv_line(row) << "\n";
    out_.flush();
  }

private:
  std::ofstream out_;
};

/// Snapshot: one line per vertex, "x y z u w rho".
inline void write_snapshot(const SimState& state, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open snapshot file: " + path);
  char buf[192];
  for (int v = 0; v < state.mesh.vertex_count(); ++v) {
    const Vec3& p = state.mesh.vertices[v];
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g %.17g %.17g %.17g\n", p.x(), p.y(), p.z(),
                  state.u[v], state.w[v], state.mesh.rho[v]);
    out << buf;
  }
}

/// Legacy-VTK export for external viewers (POLYDATA with point data u, w, rho).
inline void write_legacy_vtk(const SimState& state, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open vtk file: " + path);
  const auto& mesh = state.mesh;
  out << "# vtk DataFile Version 3.0\nevosurf snapshot t=" << format_float(state.t)
      << "\nASCII\nDATASET POLYDATA\n";
  out << "POINTS " << mesh.vertex_count() << " double\n";
  for (const auto& p : mesh.vertices)
    out << format_float(p.x()) << " " << format_float(p.y()) << " " << format_float(p.z()) << "\n";
  out << "POLYGONS " << mesh.triangle_count() << " " << 4 * mesh.triangle_count() << "\n";
  for (const auto& t : mesh.triangles) out << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
  out << "POINT_DATA " << mesh.vertex_count() << "\n";
  auto scalars = [&](const char* name, auto value) {
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (int v = 0; v < mesh.vertex_count(); ++v) out << format_float(value(v)) << "\n";
  };
  scalars("u", [&](int v) { return state.u[v]; });
  scalars("w", [&](int v) { return state.w[v]; });
  scalars("rho", [&](int v) { return state.mesh.rho[v]; });
}

inline std::string snapshot_filename(int output_index, const char* extension) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snapshot_%06d.%s", output_index, extension);
  return buf;
}

}  // namespace evosurf

#endif
