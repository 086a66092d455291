/*
 * Copyright 2026 The coni Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "coni/sim/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace coni::sim {
namespace {

using Json = nlohmann::ordered_json;

// Typed, path-tracking view of one JSON object. Every key must be consumed
// through a getter; finish() rejects the rest.
class Reader {
 public:
  Reader(const Json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) fail(path_, "expected an object");
  }

  std::string at(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return node_.contains(key) && !node_.at(key).is_null();
  }

  const Json& raw(const std::string& key) {
    seen_.insert(key);
    return node_.at(key);
  }

  void number(const std::string& key, double* out) {
    if (!has(key)) return;
    const Json& v = node_.at(key);
    if (!v.is_number()) fail(at(key), "expected a number");
    *out = v.get<double>();
    if (!std::isfinite(*out)) fail(at(key), "must be finite");
  }

  void integer(const std::string& key, int* out) {
    if (!has(key)) return;
    const Json& v = node_.at(key);
    if (!v.is_number_integer()) fail(at(key), "expected an integer");
    *out = v.get<int>();
  }

  void seed(const std::string& key, std::uint64_t* out) {
    if (!has(key)) return;
    const Json& v = node_.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      fail(at(key), "expected a non-negative integer");
    }
    *out = v.get<std::uint64_t>();
  }

  void boolean(const std::string& key, bool* out) {
    if (!has(key)) return;
    const Json& v = node_.at(key);
    if (!v.is_boolean()) fail(at(key), "expected true or false");
    *out = v.get<bool>();
  }

  void string(const std::string& key, std::string* out) {
    if (!has(key)) return;
    const Json& v = node_.at(key);
    if (!v.is_string()) fail(at(key), "expected a string");
    *out = v.get<std::string>();
  }

  template <int N>
  void vector(const std::string& key, Eigen::Matrix<double, N, 1>* out) {
    if (!has(key)) return;
    *out = read_vector<N>(node_.at(key), at(key));
  }

  void finish() const {
    for (const auto& item : node_.items()) {
      if (!seen_.count(item.key())) fail(at(item.key()), "unknown field");
    }
  }

  template <int N>
  static Eigen::Matrix<double, N, 1> read_vector(const Json& v, const std::string& path) {
    if (!v.is_array() || v.size() != static_cast<std::size_t>(N)) {
      fail(path, "expected an array of " + std::to_string(N) + " numbers");
    }
    Eigen::Matrix<double, N, 1> out;
    for (int i = 0; i < N; ++i) {
      const Json& e = v.at(static_cast<std::size_t>(i));
      if (!e.is_number()) fail(path + "[" + std::to_string(i) + "]", "expected a number");
      out(i) = e.get<double>();
      if (!std::isfinite(out(i))) fail(path + "[" + std::to_string(i) + "]", "must be finite");
    }
    return out;
  }

  [[noreturn]] static void fail(const std::string& path, const std::string& msg) {
    throw ScenarioError(path, msg);
  }

 private:
  const Json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

Json vec_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

void require(bool ok, const std::string& path, const std::string& msg) {
  if (!ok) throw ScenarioError(path, msg);
}

// ---------------------------------------------------------------- obstacles

std::optional<ObstacleKind> obstacle_kind(const std::string& name) {
  if (name == "sphere") return ObstacleKind::kSphere;
  if (name == "cylinder") return ObstacleKind::kCylinder;
  if (name == "box") return ObstacleKind::kBox;
  return std::nullopt;
}

Obstacle read_obstacle(const Json& node, const std::string& path) {
  Reader r(node, path);
  std::string kind_name;
  r.string("kind", &kind_name);
  const auto kind = obstacle_kind(kind_name);
  if (!kind) Reader::fail(r.at("kind"), "expected sphere, cylinder or box");
  Obstacle o;
  o.kind = *kind;
  r.vector("center", &o.center);
  switch (o.kind) {
    case ObstacleKind::kSphere:
      r.number("radius", &o.radius);
      break;
    case ObstacleKind::kCylinder: {
      r.number("radius", &o.radius);
      double half_height = 0.0;
      r.number("half_height", &half_height);
      o.half_extents = Vec3(o.radius, o.radius, half_height);
      require(half_height > 0.0, r.at("half_height"), "must be positive");
      break;
    }
    case ObstacleKind::kBox:
      r.vector("half_extents", &o.half_extents);
      require((o.half_extents.array() > 0.0).all(), r.at("half_extents"),
              "must be positive");
      break;
  }
  if (o.kind != ObstacleKind::kBox) require(o.radius > 0.0, r.at("radius"), "must be positive");
  r.finish();
  return o;
}

Json obstacle_json(const Obstacle& o) {
  Json j;
  j["kind"] = std::string(to_string(o.kind));
  j["center"] = vec_json(o.center);
  switch (o.kind) {
    case ObstacleKind::kSphere:
      j["radius"] = o.radius;
      break;
    case ObstacleKind::kCylinder:
      j["radius"] = o.radius;
      j["half_height"] = o.half_extents.z();
      break;
    case ObstacleKind::kBox:
      j["half_extents"] = vec_json(o.half_extents);
      break;
  }
  return j;
}

// ---------------------------------------------------------------- ugv

std::string_view program_name(UgvProgramKind kind) {
  switch (kind) {
    case UgvProgramKind::kStatic: return "static";
    case UgvProgramKind::kRotate: return "rotate";
    case UgvProgramKind::kWaypoints: return "waypoints";
    case UgvProgramKind::kRandomGoals: return "random_goals";
  }
  return "static";
}

UgvProgram read_program(const Json& node, const std::string& path) {
  Reader r(node, path);
  UgvProgram p;
  std::string kind = "static";
  r.string("kind", &kind);
  if (kind == "static") {
    p.kind = UgvProgramKind::kStatic;
  } else if (kind == "rotate") {
    p.kind = UgvProgramKind::kRotate;
  } else if (kind == "waypoints") {
    p.kind = UgvProgramKind::kWaypoints;
  } else if (kind == "random_goals") {
    p.kind = UgvProgramKind::kRandomGoals;
  } else {
    Reader::fail(r.at("kind"), "expected static, rotate, waypoints or random_goals");
  }
  r.number("omega", &p.omega);
  if (r.has("waypoints")) {
    const Json& list = r.raw("waypoints");
    require(list.is_array(), r.at("waypoints"), "expected an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      p.waypoints.push_back(Reader::read_vector<2>(
          list[i], r.at("waypoints") + "[" + std::to_string(i) + "]"));
    }
  }
  r.boolean("loop", &p.loop);
  r.number("v_max", &p.v_max);
  r.number("omega_max", &p.omega_max);
  r.number("a_max", &p.a_max);
  r.number("alpha_max", &p.alpha_max);
  r.seed("seed", &p.seed);
  r.number("goal_min_distance", &p.goal_min_distance);
  r.number("goal_max_distance", &p.goal_max_distance);
  r.number("body_radius", &p.body_radius);
  r.number("goal_clearance", &p.goal_clearance);
  r.finish();

  require(p.v_max > 0.0, r.at("v_max"), "must be positive");
  require(p.omega_max > 0.0, r.at("omega_max"), "must be positive");
  require(p.a_max > 0.0, r.at("a_max"), "must be positive");
  require(p.alpha_max > 0.0, r.at("alpha_max"), "must be positive");
  require(p.goal_min_distance > 0.0 && p.goal_max_distance >= p.goal_min_distance,
          r.at("goal_max_distance"), "must satisfy 0 < goal_min_distance <= goal_max_distance");
  require(p.body_radius >= 0.0, r.at("body_radius"), "must be non-negative");
  require(p.goal_clearance >= 0.0, r.at("goal_clearance"), "must be non-negative");
  if (p.kind == UgvProgramKind::kWaypoints) {
    require(!p.waypoints.empty(), r.at("waypoints"), "needs at least one waypoint");
  }
  return p;
}

Json program_json(const UgvProgram& p) {
  Json j;
  j["kind"] = std::string(program_name(p.kind));
  j["omega"] = p.omega;
  Json wp = Json::array();
  for (const auto& w : p.waypoints) wp.push_back(vec_json(w));
  j["waypoints"] = wp;
  j["loop"] = p.loop;
  j["v_max"] = p.v_max;
  j["omega_max"] = p.omega_max;
  j["a_max"] = p.a_max;
  j["alpha_max"] = p.alpha_max;
  j["seed"] = p.seed;
  j["goal_min_distance"] = p.goal_min_distance;
  j["goal_max_distance"] = p.goal_max_distance;
  j["body_radius"] = p.body_radius;
  j["goal_clearance"] = p.goal_clearance;
  return j;
}

// ---------------------------------------------------------------- task

Task read_task(const Json& node, const std::string& path) {
  Reader r(node, path);
  Task t;
  std::string kind = "leader_follow";
  r.string("kind", &kind);
  if (kind == "leader_follow") {
    t.kind = TaskKind::kLeaderFollow;
  } else if (kind == "orbit") {
    t.kind = TaskKind::kOrbit;
  } else if (kind == "land") {
    t.kind = TaskKind::kLand;
  } else {
    Reader::fail(r.at("kind"), "expected leader_follow, orbit or land");
  }
  r.vector("offset", &t.offset);
  r.number("radius", &t.radius);
  r.number("omega", &t.omega);
  r.vector("center", &t.center);
  r.vector("platform", &t.platform);
  r.vector("approach", &t.approach);
  r.number("approach_distance", &t.approach_distance);
  r.number("descent_speed", &t.descent_speed);
  r.finish();
  require(t.radius >= 0.0, r.at("radius"), "must be non-negative");
  require(t.approach.norm() > 0.0, r.at("approach"), "must be non-zero");
  require(t.approach_distance >= 0.0, r.at("approach_distance"), "must be non-negative");
  require(t.descent_speed > 0.0, r.at("descent_speed"), "must be positive");
  return t;
}

Json task_json(const Task& t) {
  Json j;
  j["kind"] = std::string(to_string(t.kind));
  j["offset"] = vec_json(t.offset);
  j["radius"] = t.radius;
  j["omega"] = t.omega;
  j["center"] = vec_json(t.center);
  j["platform"] = vec_json(t.platform);
  j["approach"] = vec_json(t.approach);
  j["approach_distance"] = t.approach_distance;
  j["descent_speed"] = t.descent_speed;
  return j;
}

// ---------------------------------------------------------------- configs

SensorConfig read_sensor(const Json& node, const std::string& path) {
  Reader r(node, path);
  SensorConfig s;
  r.integer("azimuth_rays", &s.azimuth_rays);
  r.integer("elevation_rays", &s.elevation_rays);
  r.number("elevation_min", &s.elevation_min);
  r.number("elevation_max", &s.elevation_max);
  r.number("max_range", &s.max_range);
  r.number("rate", &s.rate);
  r.number("point_radius", &s.point_radius);
  r.finish();
  require(s.azimuth_rays >= 1, r.at("azimuth_rays"), "must be at least 1");
  require(s.elevation_rays >= 1, r.at("elevation_rays"), "must be at least 1");
  require(s.elevation_min <= s.elevation_max, r.at("elevation_max"),
          "must not be below elevation_min");
  require(s.max_range > 0.0, r.at("max_range"), "must be positive");
  require(s.rate > 0.0, r.at("rate"), "must be positive");
  require(s.point_radius >= 0.0, r.at("point_radius"), "must be non-negative");
  return s;
}

Json sensor_json(const SensorConfig& s) {
  Json j;
  j["azimuth_rays"] = s.azimuth_rays;
  j["elevation_rays"] = s.elevation_rays;
  j["elevation_min"] = s.elevation_min;
  j["elevation_max"] = s.elevation_max;
  j["max_range"] = s.max_range;
  j["rate"] = s.rate;
  j["point_radius"] = s.point_radius;
  return j;
}

template <typename F>
void check_params(const std::string& path, F&& validate) {
  try {
    validate();
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(path, e.what());
  }
}

TrajectoryParams read_planner(const Json& node, const std::string& path) {
  Reader r(node, path);
  TrajectoryParams p;
  r.number("k_p", &p.k_p);
  r.number("dt", &p.dt);
  r.integer("horizon", &p.horizon);
  r.number("theta_low", &p.theta_low);
  r.number("g", &p.g);
  r.finish();
  check_params(path, [&] { p.validate(); });
  return p;
}

Json planner_json(const TrajectoryParams& p) {
  Json j;
  j["k_p"] = p.k_p;
  j["dt"] = p.dt;
  j["horizon"] = p.horizon;
  j["theta_low"] = p.theta_low;
  j["g"] = p.g;
  return j;
}

ModulationParams read_modulation(const Json& node, const std::string& path) {
  Reader r(node, path);
  ModulationParams p;
  r.number("robot_radius", &p.robot_radius);
  r.number("dist_scale", &p.dist_scale);
  r.number("dist_power", &p.dist_power);
  r.number("max_weight", &p.max_weight);
  r.number("align_power", &p.align_power);
  r.finish();
  check_params(path, [&] { p.validate(); });
  return p;
}

Json modulation_json(const ModulationParams& p) {
  Json j;
  j["robot_radius"] = p.robot_radius;
  j["dist_scale"] = p.dist_scale;
  j["dist_power"] = p.dist_power;
  j["max_weight"] = p.max_weight;
  j["align_power"] = p.align_power;
  return j;
}

MpcConfig read_mpc(const Json& node, const std::string& path) {
  Reader r(node, path);
  MpcConfig c;
  r.integer("horizon_steps", &c.horizon_steps);
  r.number("dt", &c.dt);
  r.vector("q_weights", &c.q_weights);
  r.vector("r_weights", &c.r_weights);
  r.vector("q_final", &c.q_final);
  r.number("thrust_min", &c.thrust_min);
  r.number("thrust_max", &c.thrust_max);
  r.number("omega_rp", &c.omega_rp);
  r.number("omega_yaw", &c.omega_yaw);
  r.integer("max_iterations", &c.max_iterations);
  r.number("convergence_tol", &c.convergence_tol);
  r.finish();
  check_params(path, [&] { c.validate(); });
  return c;
}

Json mpc_json(const MpcConfig& c) {
  Json j;
  j["horizon_steps"] = c.horizon_steps;
  j["dt"] = c.dt;
  j["q_weights"] = vec_json(c.q_weights);
  j["r_weights"] = vec_json(c.r_weights);
  j["q_final"] = vec_json(c.q_final);
  j["thrust_min"] = c.thrust_min;
  j["thrust_max"] = c.thrust_max;
  j["omega_rp"] = c.omega_rp;
  j["omega_yaw"] = c.omega_yaw;
  j["max_iterations"] = c.max_iterations;
  j["convergence_tol"] = c.convergence_tol;
  return j;
}

// ---------------------------------------------------------------- overrides

// "a.b[2].c" or "a.b.2.c" -> JSON pointer tokens.
std::vector<std::string> split_key(const std::string& key) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : key) {
    if (ch == '.' || ch == '[' || ch == ']') {
      if (!current.empty()) tokens.push_back(current);
      current.clear();
    } else {
      current.push_back(ch);
    }
  }
  if (!current.empty()) tokens.push_back(current);
  return tokens;
}

void apply_override(Json* doc, const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ScenarioError("override", "expected key=value, got '" + text + "'");
  }
  const std::string key = text.substr(0, eq);
  const std::string value_text = text.substr(eq + 1);
  Json value = Json::parse(value_text, nullptr, false);
  if (value.is_discarded()) value = value_text;

  const auto tokens = split_key(key);
  if (tokens.empty()) throw ScenarioError("override", "empty key in '" + text + "'");
  Json* node = doc;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::string& tok = tokens[i];
    const bool last = i + 1 == tokens.size();
    if (node->is_array()) {
      std::size_t idx = 0;
      try {
        std::size_t used = 0;
        idx = std::stoul(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw ScenarioError(key, "expected an array index at '" + tok + "'");
      }
      if (idx >= node->size()) throw ScenarioError(key, "index out of range");
      node = &(*node)[idx];
    } else {
      if (node->is_null()) *node = Json::object();
      if (!node->is_object()) throw ScenarioError(key, "cannot descend into a scalar");
      node = &(*node)[tok];
    }
    if (last) *node = value;
  }
}

}  // namespace

// ---------------------------------------------------------------- tasks

Task Task::leader_follow(const Vec3& offset) {
  Task t;
  t.kind = TaskKind::kLeaderFollow;
  t.offset = offset;
  return t;
}

Task Task::orbit(double radius, double omega, const Vec3& center) {
  Task t;
  t.kind = TaskKind::kOrbit;
  t.radius = radius;
  t.omega = omega;
  t.center = center;
  return t;
}

Task Task::land(const Vec3& platform, const Vec3& approach, double distance,
                double speed) {
  Task t;
  t.kind = TaskKind::kLand;
  t.platform = platform;
  t.approach = approach;
  t.approach_distance = distance;
  t.descent_speed = speed;
  return t;
}

std::string_view to_string(TaskKind kind) {
  switch (kind) {
    case TaskKind::kLeaderFollow: return "leader_follow";
    case TaskKind::kOrbit: return "orbit";
    case TaskKind::kLand: return "land";
  }
  return "leader_follow";
}

Vec3 task_goal(const Task& task, double t) {
  switch (task.kind) {
    case TaskKind::kLeaderFollow:
      return task.offset;
    case TaskKind::kOrbit:
      return task.center +
             task.radius * Vec3(std::cos(task.omega * t), std::sin(task.omega * t), 0.0);
    case TaskKind::kLand: {
      const double remaining =
          std::max(0.0, task.approach_distance - task.descent_speed * std::max(0.0, t));
      return task.platform + remaining * task.approach.normalized();
    }
  }
  return task.offset;
}

// ---------------------------------------------------------------- spec

void ScenarioSpec::validate() const {
  require(schema_version == kScenarioSchemaVersion, "schema_version",
          "unsupported version " + std::to_string(schema_version) + " (expected " +
              std::to_string(kScenarioSchemaVersion) + ")");
  require(duration > 0.0, "duration", "must be positive");
  require(success_clearance >= 0.0, "success_clearance", "must be non-negative");
  require((bounds.max.array() > bounds.min.array()).all(), "bounds.max",
          "must exceed bounds.min in every axis");
  for (std::size_t i = 0; i < obstacles.size(); ++i) {
    const Obstacle& o = obstacles[i];
    const std::string path = "obstacles[" + std::to_string(i) + "]";
    if (o.kind == ObstacleKind::kBox) {
      require((o.half_extents.array() > 0.0).all(), path + ".half_extents", "must be positive");
    } else {
      require(o.radius > 0.0, path + ".radius", "must be positive");
    }
    if (o.kind == ObstacleKind::kCylinder) {
      require(o.half_extents.z() > 0.0, path + ".half_height", "must be positive");
    }
  }
  require(random_obstacles.count >= 0, "random_obstacles.count", "must be non-negative");
  require(random_obstacles.radius_min > 0.0, "random_obstacles.radius_min", "must be positive");
  require(random_obstacles.radius_max >= random_obstacles.radius_min,
          "random_obstacles.radius_max", "must not be below radius_min");
  require(keep_out >= 0.0, "keep_out", "must be non-negative");
  require(sim_dt > 0.0 && sim_dt <= 0.001 + 1e-12, "sim_dt", "must lie in (0, 0.001]");
  require(control_rate > 0.0, "control_rate", "must be positive");
  require(1.0 / control_rate >= sim_dt, "control_rate", "period must not be below sim_dt");
  require(sensor.rate > 0.0, "sensor.rate", "must be positive");
  require(1.0 / sensor.rate >= sim_dt, "sensor.rate", "period must not be below sim_dt");
  require(sensor.azimuth_rays >= 1, "sensor.azimuth_rays", "must be at least 1");
  require(sensor.elevation_rays >= 1, "sensor.elevation_rays", "must be at least 1");
  require(sensor.max_range > 0.0, "sensor.max_range", "must be positive");
  require(transient >= 0.0, "transient", "must be non-negative");
  require(noise.accel_std >= 0.0, "noise.accel_std", "must be non-negative");
  require(noise.gyro_std >= 0.0, "noise.gyro_std", "must be non-negative");
  require(noise.input_delay_ticks >= 0, "noise.input_delay_ticks", "must be non-negative");
  check_params("planner", [&] { planner.validate(); });
  check_params("modulation", [&] { modulation.validate(); });
  check_params("mpc", [&] { mpc.validate(); });

  // Obstacle-free start region around both vehicles.
  const Vec3 ugv_pos(ugv_start.x(), ugv_start.y(), 0.0);
  const Mat3 rot = Eigen::AngleAxisd(ugv_start.z(), Vec3::UnitZ()).toRotationMatrix();
  const Vec3 uav_pos = ugv_pos + rot * uav_start.value_or(task_goal(task, 0.0));
  for (std::size_t i = 0; i < obstacles.size(); ++i) {
    if (signed_distance(obstacles[i], uav_pos) <= modulation.robot_radius) {
      throw ScenarioError("obstacles[" + std::to_string(i) + "]",
                          "overlaps the UAV start position");
    }
  }
}

ScenarioSpec parse_scenario(std::string_view json_text,
                            const std::vector<std::string>& overrides) {
  Json doc = Json::parse(json_text, nullptr, false, true);
  if (doc.is_discarded()) throw ScenarioError("$", "not valid JSON");
  for (const auto& o : overrides) apply_override(&doc, o);

  Reader r(doc, "");
  ScenarioSpec s;
  r.integer("schema_version", &s.schema_version);
  require(s.schema_version == kScenarioSchemaVersion, "schema_version",
          "unsupported version " + std::to_string(s.schema_version) + " (expected " +
              std::to_string(kScenarioSchemaVersion) + ")");
  r.string("name", &s.name);
  r.seed("seed", &s.seed);
  r.number("duration", &s.duration);
  r.number("success_clearance", &s.success_clearance);
  if (r.has("bounds")) {
    Reader b(r.raw("bounds"), "bounds");
    b.vector("min", &s.bounds.min);
    b.vector("max", &s.bounds.max);
    b.finish();
  }
  if (r.has("obstacles")) {
    const Json& list = r.raw("obstacles");
    require(list.is_array(), "obstacles", "expected an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      s.obstacles.push_back(read_obstacle(list[i], "obstacles[" + std::to_string(i) + "]"));
    }
  }
  if (r.has("random_obstacles")) {
    Reader ro(r.raw("random_obstacles"), "random_obstacles");
    ro.integer("count", &s.random_obstacles.count);
    ro.number("radius_min", &s.random_obstacles.radius_min);
    ro.number("radius_max", &s.random_obstacles.radius_max);
    ro.seed("seed", &s.random_obstacles.seed);
    ro.finish();
  }
  r.number("keep_out", &s.keep_out);
  r.vector("ugv_start", &s.ugv_start);
  if (r.has("ugv_program")) s.ugv_program = read_program(r.raw("ugv_program"), "ugv_program");
  if (r.has("uav_start")) {
    s.uav_start = Reader::read_vector<3>(r.raw("uav_start"), "uav_start");
  }
  if (r.has("task")) s.task = read_task(r.raw("task"), "task");
  if (r.has("sensor")) s.sensor = read_sensor(r.raw("sensor"), "sensor");
  if (r.has("planner")) s.planner = read_planner(r.raw("planner"), "planner");
  if (r.has("modulation")) s.modulation = read_modulation(r.raw("modulation"), "modulation");
  if (r.has("mpc")) s.mpc = read_mpc(r.raw("mpc"), "mpc");
  r.number("sim_dt", &s.sim_dt);
  r.number("control_rate", &s.control_rate);
  r.number("transient", &s.transient);
  r.boolean("stop_on_failure", &s.stop_on_failure);
  if (r.has("noise")) {
    Reader n(r.raw("noise"), "noise");
    n.number("accel_std", &s.noise.accel_std);
    n.number("gyro_std", &s.noise.gyro_std);
    n.integer("input_delay_ticks", &s.noise.input_delay_ticks);
    n.finish();
  }
  r.finish();
  s.validate();
  return s;
}

ScenarioSpec load_scenario(const std::string& path,
                           const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("$", "cannot open scenario file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str(), overrides);
}

std::string scenario_to_json(const ScenarioSpec& s, int indent) {
  Json j;
  j["schema_version"] = s.schema_version;
  j["name"] = s.name;
  j["seed"] = s.seed;
  j["duration"] = s.duration;
  j["success_clearance"] = s.success_clearance;
  j["bounds"] = {{"min", vec_json(s.bounds.min)}, {"max", vec_json(s.bounds.max)}};
  Json obstacles = Json::array();
  for (const auto& o : s.obstacles) obstacles.push_back(obstacle_json(o));
  j["obstacles"] = obstacles;
  j["random_obstacles"] = {{"count", s.random_obstacles.count},
                           {"radius_min", s.random_obstacles.radius_min},
                           {"radius_max", s.random_obstacles.radius_max},
                           {"seed", s.random_obstacles.seed}};
  j["keep_out"] = s.keep_out;
  j["ugv_start"] = vec_json(s.ugv_start);
  j["ugv_program"] = program_json(s.ugv_program);
  j["uav_start"] = s.uav_start ? vec_json(*s.uav_start) : Json(nullptr);
  j["task"] = task_json(s.task);
  j["sensor"] = sensor_json(s.sensor);
  j["planner"] = planner_json(s.planner);
  j["modulation"] = modulation_json(s.modulation);
  j["mpc"] = mpc_json(s.mpc);
  j["sim_dt"] = s.sim_dt;
  j["control_rate"] = s.control_rate;
  j["transient"] = s.transient;
  j["stop_on_failure"] = s.stop_on_failure;
  j["noise"] = {{"accel_std", s.noise.accel_std},
                {"gyro_std", s.noise.gyro_std},
                {"input_delay_ticks", s.noise.input_delay_ticks}};
  return j.dump(indent);
}

}  // namespace coni::sim
