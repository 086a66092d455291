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

#ifndef CONI_SIM_SCENARIO_HPP_
#define CONI_SIM_SCENARIO_HPP_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "coni/mpc.hpp"
#include "coni/sim/geometry.hpp"
#include "coni/sim/lidar.hpp"
#include "coni/sim/ugv.hpp"
#include "coni/trajectory.hpp"

namespace coni::sim {

inline constexpr int kScenarioSchemaVersion = 1;

enum class TaskKind { kLeaderFollow, kOrbit, kLand };

/// Where the UAV should be, in frame N, as a function of time.
struct Task {
  TaskKind kind = TaskKind::kLeaderFollow;
  Vec3 offset = Vec3(1.0, 0.0, 0.5);    // leader_follow
  double radius = 1.0;                  // orbit
  double omega = 0.5;                   // orbit
  Vec3 center = Vec3(1.0, 0.0, 0.5);    // orbit
  Vec3 platform = Vec3(0.0, 0.0, 0.4);  // land
  Vec3 approach = Vec3(-1.0, 0.0, 1.0); // land, direction from the platform
  double approach_distance = 1.5;       // land, start distance (m)
  double descent_speed = 0.3;           // land, m/s

  static Task leader_follow(const Vec3& offset);
  static Task orbit(double radius, double omega, const Vec3& center);
  static Task land(const Vec3& platform, const Vec3& approach,
                   double distance, double speed);
};

std::string_view to_string(TaskKind kind);

/// Goal in frame N at time t.
Vec3 task_goal(const Task& task, double t);

struct NoiseConfig {
  double accel_std = 0.0;  // m/s^2, added to the reported specific force
  double gyro_std = 0.0;   // rad/s, added to the reported body rate
  int input_delay_ticks = 0;  // control periods between solve and actuation
};

struct ScenarioSpec {
  int schema_version = kScenarioSchemaVersion;
  std::string name = "scenario";
  std::uint64_t seed = 0;
  double duration = 20.0;
  double success_clearance = 0.1;

  MapBounds bounds;
  std::vector<Obstacle> obstacles;
  RandomObstacleSpec random_obstacles;  // count 0 disables
  double keep_out = 1.5;  // obstacle-free radius around the start poses

  Vec3 ugv_start = Vec3::Zero();  // x, y, yaw
  UgvProgram ugv_program;
  std::optional<Vec3> uav_start;  // frame N; defaults to the task goal

  Task task;
  SensorConfig sensor;
  TrajectoryParams planner;
  ModulationParams modulation;
  MpcConfig mpc;

  double sim_dt = 0.001;
  double control_rate = 100.0;
  double transient = 2.0;  // seconds excluded from the tracking error
  bool stop_on_failure = true;
  NoiseConfig noise;

  /// Throws ScenarioError naming the offending field.
  void validate() const;
};

/// Schema or validation failure. `path` is a dotted field path such as
/// "obstacles[2].radius".
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(std::string path, const std::string& message)
      : std::runtime_error(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// Parses and validates a scenario document. `overrides` are "a.b.c=value"
/// strings applied to the document tree before parsing; values are read as
/// JSON when possible and as strings otherwise.
ScenarioSpec parse_scenario(std::string_view json_text,
                            const std::vector<std::string>& overrides = {});
ScenarioSpec load_scenario(const std::string& path,
                           const std::vector<std::string>& overrides = {});

/// Serializes every field (the inverse of parse_scenario).
std::string scenario_to_json(const ScenarioSpec& spec, int indent = 2);

}  // namespace coni::sim

#endif  // CONI_SIM_SCENARIO_HPP_
