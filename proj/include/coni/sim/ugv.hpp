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

#ifndef CONI_SIM_UGV_HPP_
#define CONI_SIM_UGV_HPP_

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "coni/dynamics.hpp"
#include "coni/sim/geometry.hpp"

namespace coni::sim {

/// Planar unicycle on the ground plane of the world frame.
struct UgvState {
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;
  double speed = 0.0;     // forward, m/s
  double yaw_rate = 0.0;  // rad/s
  double accel = 0.0;     // forward acceleration over the last step
  double yaw_accel = 0.0;

  Vec3 position() const { return Vec3(x, y, 0.0); }
  Quat orientation() const;
  Vec3 velocity() const;          // world frame
  Vec3 acceleration() const;      // world frame, body origin
  Vec3 body_rate() const { return Vec3(0.0, 0.0, yaw_rate); }
};

enum class UgvProgramKind { kStatic, kRotate, kWaypoints, kRandomGoals };

struct UgvProgram {
  UgvProgramKind kind = UgvProgramKind::kStatic;
  double omega = 0.0;                    // rotate
  std::vector<Eigen::Vector2d> waypoints;  // waypoints
  bool loop = false;                     // waypoints
  double v_max = 0.5;
  double omega_max = 0.5;
  double a_max = 1.0;      // forward acceleration limit, m/s^2
  double alpha_max = 3.0;  // yaw acceleration limit, rad/s^2
  std::uint64_t seed = 0;  // random goals
  double goal_min_distance = 2.0;
  double goal_max_distance = 8.0;
  double body_radius = 0.5;     // footprint used for goal clearance
  double goal_clearance = 0.3;  // extra margin beyond the footprint

  static UgvProgram stationary() { return UgvProgram{}; }
  static UgvProgram rotate(double omega);
  static UgvProgram waypoint_path(std::vector<Eigen::Vector2d> points,
                                  double v_max, double omega_max);
  static UgvProgram random_goals(double v_max, double omega_max,
                                 std::uint64_t seed);
};

/// IMU specific force, body rate and angular acceleration the UGV reports.
/// The angular acceleration is always reported as zero.
NonInertialQuantities imu_reading(const UgvState& state);

/// Executes a motion program. Goal-seeking programs turn in place toward the
/// next goal, then drive with a trapezoidal speed profile under the
/// program's limits.
class UgvDriver {
 public:
  UgvDriver(UgvProgram program, MapBounds bounds,
            std::span<const Obstacle> obstacles);

  /// Initial state consistent with the program (rotate starts spinning).
  UgvState initial_state(double x, double y, double yaw) const;

  /// Advances the state by dt and returns the reading at the new state.
  NonInertialQuantities step(UgvState* state, double dt);

  const std::vector<Eigen::Vector2d>& visited_goals() const { return goals_; }

 private:
  void command(const UgvState& s, double* v_cmd, double* w_cmd);
  bool pick_random_goal(const UgvState& s);
  bool segment_clear(const Eigen::Vector2d& a, const Eigen::Vector2d& b) const;

  UgvProgram program_;
  MapBounds bounds_;
  std::span<const Obstacle> obstacles_;
  std::mt19937_64 rng_;
  std::vector<Eigen::Vector2d> goals_;
  std::size_t goal_index_ = 0;
  bool has_goal_ = false;
  double retry_timer_ = 0.0;
};

}  // namespace coni::sim

#endif  // CONI_SIM_UGV_HPP_
