// SPDX-FileCopyrightText: Copyright (c) 2026 The evosurf-ch Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EVOSURF_OFF_IO_HPP
#define EVOSURF_OFF_IO_HPP

#include <fstream>
#include <sstream>
#include <string>

#include "evosurf/mesh.hpp"

namespace evosurf {

namespace detail {

inline bool next_content_line(std::istream& in, std::string& line, int& line_no) {
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    bool blank = true;
    for (char c : line)
      if (!std::isspace(static_cast<unsigned char>(c))) {
        blank = false;
        break;
      }
    if (!blank) return true;
  }
  return false;
}

}  // namespace detail

/// ASCII OFF reader: "OFF" header, counts line, vertex lines, triangular face lines.
/// The result is validated as a closed orientable connected manifold.
inline MovingMesh load_off(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open OFF file: " + path);
  std::string line;
  int line_no = 0;
  if (!detail::next_content_line(in, line, line_no)) throw MeshError(path + ": empty file");
  {
    std::istringstream hs(line);
    std::string tag;
    hs >> tag;
    if (tag != "OFF") throw MeshError(path + ":" + std::to_string(line_no) + ": expected OFF header");
  }
  if (!detail::next_content_line(in, line, line_no))
    throw MeshError(path + ": missing counts line");
  long nv = 0, nf = 0, ne = 0;
  {
    std::istringstream cs(line);
    if (!(cs >> nv >> nf >> ne))
      throw MeshError(path + ":" + std::to_string(line_no) + ": malformed counts line");
  }
  if (nv <= 0 || nf <= 0) throw MeshError(path + ": non-positive vertex/face count");

  MovingMesh mesh;
  mesh.vertices.reserve(nv);
  for (long i = 0; i < nv; ++i) {
    if (!detail::next_content_line(in, line, line_no))
      throw MeshError(path + ": unexpected end of file in vertex block");
    std::istringstream vs(line);
    double x, y, z;
    if (!(vs >> x >> y >> z))
      throw MeshError(path + ":" + std::to_string(line_no) + ": malformed vertex line");
    mesh.vertices.emplace_back(x, y, z);
  }
  mesh.triangles.reserve(nf);
  for (long i = 0; i < nf; ++i) {
    if (!detail::next_content_line(in, line, line_no))
      throw MeshError(path + ": unexpected end of file in face block");
    std::istringstream fs(line);
    int count, a, b, c;
    if (!(fs >> count >> a >> b >> c) || count != 3)
      throw MeshError(path + ":" + std::to_string(line_no) + ": expected triangular face");
    mesh.triangles.push_back({a, b, c});
  }
  validate_closed_manifold(mesh);
  update_geometry(mesh, /*as_reference=*/true);
  return mesh;
}

inline void save_off(const MovingMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw MeshError("cannot write OFF file: " + path);
  out << "OFF\n" << mesh.vertex_count() << " " << mesh.triangle_count() << " 0\n";
  char buf[96];
  for (const auto& v : mesh.vertices) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", v.x(), v.y(), v.z());
    out << buf;
  }
  for (const auto& t : mesh.triangles) out << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
}

}  // namespace evosurf

#endif
