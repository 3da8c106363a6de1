// SPDX-FileCopyrightText: Copyright (c) 2026 The evosurf-ch Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EVOSURF_CONFIG_HPP
#define EVOSURF_CONFIG_HPP

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "evosurf/expression.hpp"
#include "evosurf/potentials.hpp"
#include "evosurf/stepper.hpp"
#include "evosurf/surface.hpp"

namespace evosurf {

inline bool operator==(const SurfaceSpec& a, const SurfaceSpec& b) {
  return a.kind == b.kind && a.level == b.level && a.radius == b.radius && a.axis == b.axis &&
         a.rate == b.rate && a.r_end == b.r_end && a.t_ramp == b.t_ramp && a.amp_x == b.amp_x &&
         a.amp_y == b.amp_y && a.amp_z == b.amp_z && a.omega == b.omega &&
         a.mesh_path == b.mesh_path && a.t_final == b.t_final;
}

/// Fully validated run configuration, parsed from the line-based
/// "section.key = value" format. Unknown keys are errors (fail-closed).
struct RunConfig {
  SurfaceSpec surface;

  std::string potential_kind = "smooth-quartic";  // smooth-quartic | log | obstacle
  double theta = 0.5;
  double delta = 1e-3;

  Model model = Model::CH1;
  AdvectiveMode advective_mode = AdvectiveMode::FollowTangential;

  // Exactly one of the three initial-condition sources is set.
  std::optional<double> initial_constant;
  std::string initial_expression;
  std::string initial_file;

  double dt = 1e-3;
  double t_end = 0.1;
  Splitting splitting = Splitting::ConvexConcave;
  double newton_tol = 1e-10;
  int newton_max = 50;

  std::string output_directory = "out";
  int every_n_steps = 10;
  bool snapshots = false;
  bool vtk = false;

  bool operator==(const RunConfig&) const = default;
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

struct KeyValueFile {
  std::map<std::string, std::string> values;
  std::map<std::string, int> lines;

  bool has(const std::string& key) const { return values.count(key) > 0; }

  double number(const std::string& key, double fallback) const {
    auto it = values.find(key);
    if (it == values.end()) return fallback;
    try {
      std::size_t used = 0;
      const double v = std::stod(it->second, &used);
      if (used != it->second.size()) throw std::invalid_argument("trailing characters");
      return v;
    } catch (...) {
      throw ConfigError("line " + std::to_string(lines.at(key)) + ": key '" + key +
                        "' expects a number, got '" + it->second + "'");
    }
  }
  int integer(const std::string& key, int fallback) const {
    const double v = number(key, fallback);
    if (v != std::floor(v))
      throw ConfigError("key '" + key + "' expects an integer, got " + std::to_string(v));
    return static_cast<int>(v);
  }
  bool boolean(const std::string& key, bool fallback) const {
    auto it = values.find(key);
    if (it == values.end()) return fallback;
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    throw ConfigError("key '" + key + "' expects true/false, got '" + it->second + "'");
  }
  std::string text(const std::string& key, const std::string& fallback) const {
    auto it = values.find(key);
    return it == values.end() ? fallback : it->second;
  }
};

inline KeyValueFile read_key_value_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  KeyValueFile kv;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string content = trim(line);
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key = trim(content.substr(0, eq));
    const std::string value = trim(content.substr(eq + 1));
    if (key.empty())
      throw ConfigError(path + ":" + std::to_string(line_no) + ": empty key");
    if (kv.values.count(key))
      throw ConfigError(path + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
    kv.values[key] = value;
    kv.lines[key] = line_no;
  }
  return kv;
}

inline const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "surface.kind", "surface.level", "surface.mesh_path", "surface.radius", "surface.axis",
      "surface.rate", "surface.r_end", "surface.t_ramp", "surface.amp_x", "surface.amp_y",
      "surface.amp_z", "surface.omega",
      "potential.kind", "potential.theta", "potential.delta",
      "model", "model.v_a",
      "initial.constant", "initial.expression", "initial.file",
      "scheme.dt", "scheme.t_end", "scheme.splitting", "scheme.newton_tol", "scheme.newton_max",
      "output.directory", "output.every_n_steps", "output.snapshots", "output.vtk",
  };
  return keys;
}

}  // namespace detail

inline RunConfig parse_config(const std::string& path) {
  using detail::KeyValueFile;
  KeyValueFile kv = detail::read_key_value_file(path);

  for (const auto& [key, value] : kv.values)
    if (!detail::known_keys().count(key))
      throw ConfigError(path + ":" + std::to_string(kv.lines.at(key)) + ": unknown key '" + key +
                        "'");

  RunConfig cfg;
  cfg.surface.kind = kv.text("surface.kind", "");
  if (cfg.surface.kind.empty()) throw ConfigError("missing required key 'surface.kind'");
  cfg.surface.level = kv.integer("surface.level", 3);
  cfg.surface.mesh_path = kv.text("surface.mesh_path", "");
  cfg.surface.radius = kv.number("surface.radius", 1.0);
  cfg.surface.axis = kv.text("surface.axis", "z");
  cfg.surface.rate = kv.number("surface.rate", 1.0);
  cfg.surface.r_end = kv.number("surface.r_end", 0.5);
  cfg.surface.t_ramp = kv.number("surface.t_ramp", 1.0);
  cfg.surface.amp_x = kv.number("surface.amp_x", 0.0);
  cfg.surface.amp_y = kv.number("surface.amp_y", 0.0);
  cfg.surface.amp_z = kv.number("surface.amp_z", 0.0);
  cfg.surface.omega = kv.number("surface.omega", 1.0);

  cfg.potential_kind = kv.text("potential.kind", "");
  if (cfg.potential_kind.empty()) throw ConfigError("missing required key 'potential.kind'");
  cfg.theta = kv.number("potential.theta", 0.5);
  cfg.delta = kv.number("potential.delta", 1e-3);

  const std::string model = kv.text("model", "");
  if (model.empty()) throw ConfigError("missing required key 'model'");
  if (model == "CH1")
    cfg.model = Model::CH1;
  else if (model == "CH1_obstacle")
    cfg.model = Model::CH1Obstacle;
  else if (model == "CHrho")
    cfg.model = Model::CHrho;
  else
    throw ConfigError("key 'model': expected CH1, CH1_obstacle or CHrho, got '" + model + "'");

  const std::string va = kv.text("model.v_a", "tangential");
  if (va == "tangential")
    cfg.advective_mode = AdvectiveMode::FollowTangential;
  else if (va == "zero")
    cfg.advective_mode = AdvectiveMode::Zero;
  else
    throw ConfigError("key 'model.v_a': expected tangential or zero, got '" + va + "'");

  int initial_sources = 0;
  if (kv.has("initial.constant")) {
    cfg.initial_constant = kv.number("initial.constant", 0.0);
    ++initial_sources;
  }
  if (kv.has("initial.expression")) {
    cfg.initial_expression = kv.text("initial.expression", "");
    Expression::parse(cfg.initial_expression);  // report syntax errors at parse time
    ++initial_sources;
  }
  if (kv.has("initial.file")) {
    cfg.initial_file = kv.text("initial.file", "");
    ++initial_sources;
  }
  if (initial_sources != 1)
    throw ConfigError("exactly one of initial.constant / initial.expression / initial.file is required");

  cfg.dt = kv.number("scheme.dt", 0.0);
  cfg.t_end = kv.number("scheme.t_end", 0.0);
  if (!kv.has("scheme.dt")) throw ConfigError("missing required key 'scheme.dt'");
  if (!kv.has("scheme.t_end")) throw ConfigError("missing required key 'scheme.t_end'");
  const std::string splitting = kv.text("scheme.splitting", "convex-concave");
  if (splitting == "convex-concave")
    cfg.splitting = Splitting::ConvexConcave;
  else if (splitting == "fully-implicit")
    cfg.splitting = Splitting::FullyImplicit;
  else
    throw ConfigError("key 'scheme.splitting': expected convex-concave or fully-implicit");
  cfg.newton_tol = kv.number("scheme.newton_tol", 1e-10);
  cfg.newton_max = kv.integer("scheme.newton_max", 50);

  cfg.output_directory = kv.text("output.directory", "out");
  cfg.every_n_steps = kv.integer("output.every_n_steps", 10);
  cfg.snapshots = kv.boolean("output.snapshots", false);
  cfg.vtk = kv.boolean("output.vtk", false);

  // Validation.
  const std::set<std::string> kinds = {"unit-sphere", "rotating-sphere", "scaling-sphere",
                                       "exp-sphere", "ellipsoid", "off"};
  if (!kinds.count(cfg.surface.kind))
    throw ConfigError("key 'surface.kind': unknown catalog entry '" + cfg.surface.kind + "'");
  if (cfg.surface.kind == "off") {
    if (cfg.surface.mesh_path.empty())
      throw ConfigError("surface.kind = off requires surface.mesh_path");
    if (!std::filesystem::exists(cfg.surface.mesh_path))
      throw ConfigError("surface.mesh_path: file does not exist: " + cfg.surface.mesh_path);
  }
  if (cfg.surface.level < 0 || cfg.surface.level > 7)
    throw ConfigError("surface.level must lie in [0, 7]");
  if (!(cfg.surface.radius > 0)) throw ConfigError("surface.radius must be positive");
  if (cfg.potential_kind != "smooth-quartic" && cfg.potential_kind != "log" &&
      cfg.potential_kind != "obstacle")
    throw ConfigError("key 'potential.kind': expected smooth-quartic, log or obstacle");
  if (cfg.potential_kind == "log" && !(cfg.theta > 0 && cfg.theta < 1))
    throw ConfigError("potential.theta must lie in (0,1)");
  if (cfg.potential_kind == "log" && !(cfg.delta >= 0 && cfg.delta < 1))
    throw ConfigError("potential.delta must lie in [0,1) for the logarithmic potential");
  if (cfg.potential_kind == "obstacle" && !(cfg.delta > 0 && cfg.delta < 1))
    throw ConfigError("potential.delta must lie in (0,1) for the obstacle potential");
  if (cfg.model == Model::CH1Obstacle && cfg.potential_kind != "obstacle")
    throw ConfigError("model CH1_obstacle requires potential.kind = obstacle");
  if (cfg.model == Model::CH1 && cfg.potential_kind == "obstacle")
    throw ConfigError("the obstacle potential runs under model CH1_obstacle");
  if (!(cfg.dt > 0)) throw ConfigError("scheme.dt must be positive");
  if (!(cfg.t_end >= cfg.dt)) throw ConfigError("scheme.t_end must be at least scheme.dt");
  if (!(cfg.newton_tol > 0)) throw ConfigError("scheme.newton_tol must be positive");
  if (cfg.newton_max < 1) throw ConfigError("scheme.newton_max must be >= 1");
  if (cfg.every_n_steps < 1) throw ConfigError("output.every_n_steps must be >= 1");
  if (!cfg.initial_file.empty() && !std::filesystem::exists(cfg.initial_file))
    throw ConfigError("initial.file: file does not exist: " + cfg.initial_file);

  cfg.surface.t_final = cfg.t_end;
  return cfg;
}

/// Canonical serialization; parse(serialize(cfg)) reproduces an equal config.
inline std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream out;
  char buf[64];
  auto num = [&buf](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  out << "surface.kind = " << cfg.surface.kind << "\n";
  out << "surface.level = " << cfg.surface.level << "\n";
  if (!cfg.surface.mesh_path.empty()) out << "surface.mesh_path = " << cfg.surface.mesh_path << "\n";
  out << "surface.radius = " << num(cfg.surface.radius) << "\n";
  out << "surface.axis = " << cfg.surface.axis << "\n";
  out << "surface.rate = " << num(cfg.surface.rate) << "\n";
  out << "surface.r_end = " << num(cfg.surface.r_end) << "\n";
  out << "surface.t_ramp = " << num(cfg.surface.t_ramp) << "\n";
  out << "surface.amp_x = " << num(cfg.surface.amp_x) << "\n";
  out << "surface.amp_y = " << num(cfg.surface.amp_y) << "\n";
  out << "surface.amp_z = " << num(cfg.surface.amp_z) << "\n";
  out << "surface.omega = " << num(cfg.surface.omega) << "\n";
  out << "potential.kind = " << cfg.potential_kind << "\n";
  out << "potential.theta = " << num(cfg.theta) << "\n";
  out << "potential.delta = " << num(cfg.delta) << "\n";
  out << "model = "
      << (cfg.model == Model::CH1 ? "CH1" : cfg.model == Model::CH1Obstacle ? "CH1_obstacle" : "CHrho")
      << "\n";
  out << "model.v_a = "
      << (cfg.advective_mode == AdvectiveMode::FollowTangential ? "tangential" : "zero") << "\n";
  if (cfg.initial_constant) out << "initial.constant = " << num(*cfg.initial_constant) << "\n";
  if (!cfg.initial_expression.empty()) out << "initial.expression = " << cfg.initial_expression << "\n";
  if (!cfg.initial_file.empty()) out << "initial.file = " << cfg.initial_file << "\n";
  out << "scheme.dt = " << num(cfg.dt) << "\n";
  out << "scheme.t_end = " << num(cfg.t_end) << "\n";
  out << "scheme.splitting = "
      << (cfg.splitting == Splitting::ConvexConcave ? "convex-concave" : "fully-implicit") << "\n";
  out << "scheme.newton_tol = " << num(cfg.newton_tol) << "\n";
  out << "scheme.newton_max = " << cfg.newton_max << "\n";
  out << "output.directory = " << cfg.output_directory << "\n";
  out << "output.every_n_steps = " << cfg.every_n_steps << "\n";
  out << "output.snapshots = " << (cfg.snapshots ? "true" : "false") << "\n";
  out << "output.vtk = " << (cfg.vtk ? "true" : "false") << "\n";
  return out.str();
}

/// Build the potential variant selected by the config.
inline Potential make_potential(const RunConfig& cfg) {
  if (cfg.potential_kind == "smooth-quartic") return SmoothPotential::quartic();
  if (cfg.potential_kind == "log") return LogPotential(cfg.theta, cfg.delta);
  return ObstaclePenalty(cfg.delta);
}

inline SchemeConfig make_scheme(const RunConfig& cfg) {
  SchemeConfig scheme;
  scheme.dt = cfg.dt;
  scheme.t_end = cfg.t_end;
  scheme.model = cfg.model;
  scheme.splitting = cfg.splitting;
  scheme.newton_tol = cfg.newton_tol;
  scheme.newton_max = cfg.newton_max;
  if (cfg.potential_kind == "log") scheme.log_delta = cfg.delta;
  if (cfg.potential_kind == "obstacle") scheme.penalty_delta = cfg.delta;
  return scheme;
}

/// Vertex samples of the configured initial condition on the reference mesh.
inline Vector initial_samples(const RunConfig& cfg, const MovingMesh& mesh) {
  const int nv = mesh.vertex_count();
  Vector samples(nv);
  if (cfg.initial_constant) {
    samples.setConstant(*cfg.initial_constant);
  } else if (!cfg.initial_expression.empty()) {
    const Expression expr = Expression::parse(cfg.initial_expression);
    for (int v = 0; v < nv; ++v) samples[v] = expr(mesh.vertices[v]);
  } else {
    std::ifstream in(cfg.initial_file);
    if (!in) throw ConfigError("cannot open initial.file: " + cfg.initial_file);
    for (int v = 0; v < nv; ++v)
      if (!(in >> samples[v]))
        throw ConfigError("initial.file: expected " + std::to_string(nv) + " values, got " +
                          std::to_string(v));
    double extra;
    if (in >> extra) throw ConfigError("initial.file: more values than mesh vertices");
  }
  return samples;
}

}  // namespace evosurf

#endif
