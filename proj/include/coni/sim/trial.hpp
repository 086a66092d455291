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

#ifndef CONI_SIM_TRIAL_HPP_
#define CONI_SIM_TRIAL_HPP_

#include <ostream>
#include <string>
#include <vector>

#include "coni/dynamics.hpp"
#include "coni/sim/scenario.hpp"

namespace coni::sim {

/// Ground truth. `uav` holds world-frame position, velocity and attitude.
struct WorldState {
  UgvState ugv;
  RelativeState uav;
  double time = 0.0;
};

/// UAV state as seen from the UGV body frame: position and attitude
/// relative to N, and the rate of change of the relative position in N.
RelativeState relative_observation(const WorldState& world);

/// World-frame UAV state placing it at `rel` relative to the UGV.
RelativeState world_from_relative(const UgvState& ugv, const RelativeState& rel);

/// Sweep of the scenario obstacles from the UAV, in frame N.
SampleCloud lidar_sample(const WorldState& world,
                         std::span<const Obstacle> obstacles,
                         const SensorConfig& sensor);

/// One row per control tick.
struct TraceRow {
  double time = 0.0;
  UgvState ugv;
  RelativeState uav_world;
  RelativeState relative;
  ReferenceSample reference;
  Vec3 goal = Vec3::Zero();
  ControlInput input;
  double clearance = 0.0;
  int cloud_size = 0;
  bool plan_collided = false;
};

struct TrialMetrics {
  bool success = false;
  double min_clearance = 0.0;  // obstacle distance minus robot radius (m)
  double tracking_rmse = 0.0;  // after the transient (m)
  double final_goal_error = 0.0;
  double mean_plan_time = 0.0;  // wall-clock seconds
  double max_plan_time = 0.0;
  double mean_solve_time = 0.0;
  double max_solve_time = 0.0;
  double mean_iterations = 0.0;
  int plans = 0;
  int solves = 0;
  double simulated_time = 0.0;
  bool aborted = false;  // diverged or non-finite
  bool landed = false;   // land task completed
  std::string diagnostic;
  std::vector<TraceRow> trace;
};

struct TrialOptions {
  bool record_trace = false;
};

/// Closed-loop simulation of one scenario: world physics at sim_dt, LiDAR at
/// the sensor rate with a fresh plan per sweep, MPC at control_rate applying
/// its first input to the UAV. Deterministic for a given spec, except for
/// the wall-clock timing fields.
TrialMetrics run_trial(const ScenarioSpec& spec, const TrialOptions& options = {});

/// Obstacles of the scenario, including the seeded random ones.
std::vector<Obstacle> scenario_obstacles(const ScenarioSpec& spec);

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace);

inline constexpr int kTraceSchemaVersion = 1;

}  // namespace coni::sim

#endif  // CONI_SIM_TRIAL_HPP_
