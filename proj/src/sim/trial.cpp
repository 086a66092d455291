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

#include "coni/sim/trial.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <iomanip>
#include <limits>
#include <random>

#include "coni/mpc.hpp"
#include "coni/trajectory.hpp"

namespace coni::sim {
namespace {

constexpr double kLandingRadius = 0.05;
constexpr double kLandingSpeed = 0.2;
constexpr double kNearbyMargin = 3.0;

// splitmix64 finalizer; decorrelates the sub-seeds of one scenario seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

int ticks_per(double period, double dt) {
  return std::max(1, static_cast<int>(std::lround(period / dt)));
}

Vec3 start_relative_position(const ScenarioSpec& spec) {
  return spec.uav_start.value_or(task_goal(spec.task, 0.0));
}

}  // namespace

RelativeState relative_observation(const WorldState& world) {
  const Quat q_n = world.ugv.orientation();
  const Mat3 rot_t = to_matrix(q_n).transpose();
  RelativeState rel;
  rel.p = rot_t * (world.uav.p - world.ugv.position());
  rel.q = normalized(hamilton(conjugate(q_n), world.uav.q));
  rel.v = rot_t * (world.uav.v - world.ugv.velocity()) -
          world.ugv.body_rate().cross(rel.p);
  return rel;
}

RelativeState world_from_relative(const UgvState& ugv, const RelativeState& rel) {
  const Quat q_n = ugv.orientation();
  const Mat3 rot = to_matrix(q_n);
  RelativeState w;
  w.p = ugv.position() + rot * rel.p;
  w.v = ugv.velocity() + rot * (rel.v + ugv.body_rate().cross(rel.p));
  w.q = normalized(hamilton(q_n, rel.q));
  return w;
}

SampleCloud lidar_sample(const WorldState& world,
                         std::span<const Obstacle> obstacles,
                         const SensorConfig& sensor) {
  return lidar_sample(world.uav.p, world.ugv.position(), world.ugv.orientation(),
                      obstacles, sensor);
}

std::vector<Obstacle> scenario_obstacles(const ScenarioSpec& spec) {
  std::vector<Obstacle> out = spec.obstacles;
  if (spec.random_obstacles.count > 0) {
    RandomObstacleSpec random = spec.random_obstacles;
    random.seed = derive_seed(derive_seed(spec.seed, 1), random.seed);
    UgvState ugv;
    ugv.x = spec.ugv_start.x();
    ugv.y = spec.ugv_start.y();
    ugv.yaw = spec.ugv_start.z();
    RelativeState rel;
    rel.p = start_relative_position(spec);
    const std::vector<Vec3> keep_clear = {ugv.position(),
                                          world_from_relative(ugv, rel).p};
    const auto extra = random_cylinders(spec.bounds, random, keep_clear, spec.keep_out);
    out.insert(out.end(), extra.begin(), extra.end());
  }
  return out;
}

TrialMetrics run_trial(const ScenarioSpec& spec, const TrialOptions& options) {
  spec.validate();
  using Clock = std::chrono::steady_clock;

  TrialMetrics metrics;
  const std::vector<Obstacle> obstacles = scenario_obstacles(spec);

  UgvProgram program = spec.ugv_program;
  program.seed = derive_seed(derive_seed(spec.seed, 2), program.seed);
  UgvDriver driver(program, spec.bounds, obstacles);

  WorldState world;
  world.ugv = driver.initial_state(spec.ugv_start.x(), spec.ugv_start.y(),
                                   spec.ugv_start.z());
  RelativeState start;
  start.p = start_relative_position(spec);
  world.uav = world_from_relative(world.ugv, start);

  std::mt19937_64 noise_rng(derive_seed(spec.seed, 3));
  std::normal_distribution<double> unit_normal(0.0, 1.0);
  const auto measure = [&](const UgvState& ugv) {
    NonInertialQuantities n = imu_reading(ugv);
    if (spec.noise.accel_std > 0.0) {
      for (int i = 0; i < 3; ++i) n.a_imu(i) += spec.noise.accel_std * unit_normal(noise_rng);
    }
    if (spec.noise.gyro_std > 0.0) {
      for (int i = 0; i < 3; ++i) n.omega_n(i) += spec.noise.gyro_std * unit_normal(noise_rng);
    }
    return n;
  };

  const int control_period = ticks_per(1.0 / spec.control_rate, spec.sim_dt);
  const int sensor_period = ticks_per(1.0 / spec.sensor.rate, spec.sim_dt);
  const auto total_ticks = static_cast<long>(std::lround(spec.duration / spec.sim_dt));
  const double control_dt = control_period * spec.sim_dt;
  const double robot_radius = spec.modulation.robot_radius;
  const double divergence_radius = 10.0 * spec.bounds.extent();

  NonInertialQuantities imu = measure(world.ugv);
  ReferenceTrajectory plan;
  double plan_time = 0.0;
  int last_cloud_size = 0;
  std::optional<MpcSolution> previous;
  std::deque<ControlInput> pending;
  ControlInput applied = ControlInput::hover();
  std::vector<Obstacle> nearby;

  double min_clearance = std::numeric_limits<double>::infinity();
  double sq_error_sum = 0.0;
  long error_samples = 0;
  double plan_time_sum = 0.0, solve_time_sum = 0.0;
  long iteration_sum = 0;

  const auto refresh_nearby = [&] {
    nearby.clear();
    for (const Obstacle& o : obstacles) {
      if ((o.center - world.uav.p).norm() - o.bounding_radius() < kNearbyMargin) {
        nearby.push_back(o);
      }
    }
  };
  const auto clearance_now = [&] {
    return min_signed_distance(nearby, world.uav.p) - robot_radius;
  };

  refresh_nearby();
  min_clearance = clearance_now();

  for (long tick = 0; tick <= total_ticks; ++tick) {
    world.time = static_cast<double>(tick) * spec.sim_dt;

    if (tick % sensor_period == 0) {
      refresh_nearby();
      const SampleCloud cloud = lidar_sample(world, obstacles, spec.sensor);
      const RelativeState rel = relative_observation(world);
      const auto t0 = Clock::now();
      plan = gen_trajectory(rel.p, cloud, imu, task_goal(spec.task, world.time),
                            spec.planner, spec.modulation);
      const double elapsed = std::chrono::duration<double>(Clock::now() - t0).count();
      plan_time = world.time;
      last_cloud_size = static_cast<int>(cloud.points.size());
      plan_time_sum += elapsed;
      metrics.max_plan_time = std::max(metrics.max_plan_time, elapsed);
      ++metrics.plans;
    }

    if (tick % control_period == 0) {
      const RelativeState rel = relative_observation(world);
      const Vec3 goal = task_goal(spec.task, world.time);
      const auto window = reference_window(plan, world.time - plan_time,
                                           spec.mpc.horizon_steps + 1, spec.mpc.dt);
      std::optional<std::vector<ControlInput>> warm;
      if (previous) warm = shift_inputs(*previous, control_dt, spec.mpc.dt);
      MpcSolution sol = solve(rel, window, imu, spec.mpc, warm);
      solve_time_sum += sol.solve_time;
      iteration_sum += sol.iterations;
      metrics.max_solve_time = std::max(metrics.max_solve_time, sol.solve_time);
      ++metrics.solves;

      pending.push_back(sol.inputs.front());
      if (static_cast<int>(pending.size()) > spec.noise.input_delay_ticks) {
        applied = pending.front();
        pending.pop_front();
      }
      previous = std::move(sol);

      const double err = (rel.p - goal).norm();
      metrics.final_goal_error = err;
      if (world.time >= spec.transient) {
        sq_error_sum += err * err;
        ++error_samples;
      }
      if (options.record_trace) {
        TraceRow row;
        row.time = world.time;
        row.ugv = world.ugv;
        row.uav_world = world.uav;
        row.relative = rel;
        row.reference = window.front();
        row.goal = goal;
        row.input = applied;
        row.clearance = clearance_now();
        row.cloud_size = last_cloud_size;
        row.plan_collided = plan.collided;
        metrics.trace.push_back(row);
      }
      if (spec.task.kind == TaskKind::kLand &&
          (rel.p - spec.task.platform).norm() < kLandingRadius &&
          rel.v.norm() < kLandingSpeed) {
        metrics.landed = true;
        break;
      }
    }
    if (tick == total_ticks) break;

    world.uav = integrate_rk4(world.uav, applied, NonInertialQuantities::world(),
                              spec.sim_dt);
    const NonInertialQuantities truth = driver.step(&world.ugv, spec.sim_dt);
    (void)truth;
    imu = measure(world.ugv);
    world.time = static_cast<double>(tick + 1) * spec.sim_dt;

    const double rel_dist = (world.uav.p - world.ugv.position()).norm();
    if (!world.uav.p.allFinite() || !world.uav.v.allFinite() ||
        rel_dist > divergence_radius) {
      metrics.aborted = true;
      metrics.diagnostic = "UAV state diverged at t=" + std::to_string(world.time);
      break;
    }
    const double clearance = clearance_now();
    min_clearance = std::min(min_clearance, clearance);
    if (clearance <= spec.success_clearance && spec.stop_on_failure) {
      metrics.diagnostic = "clearance violated at t=" + std::to_string(world.time);
      break;
    }
  }

  metrics.simulated_time = world.time;
  metrics.min_clearance = min_clearance;
  metrics.success = !metrics.aborted && min_clearance > spec.success_clearance;
  if (!metrics.success && metrics.diagnostic.empty()) {
    metrics.diagnostic = "clearance violated";
  }
  metrics.tracking_rmse =
      error_samples > 0 ? std::sqrt(sq_error_sum / static_cast<double>(error_samples)) : 0.0;
  metrics.mean_plan_time = metrics.plans > 0 ? plan_time_sum / metrics.plans : 0.0;
  metrics.mean_solve_time = metrics.solves > 0 ? solve_time_sum / metrics.solves : 0.0;
  metrics.mean_iterations =
      metrics.solves > 0 ? static_cast<double>(iteration_sum) / metrics.solves : 0.0;
  return metrics;
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace) {
  out << "# coni trace schema_version=" << kTraceSchemaVersion << "\n";
  out << "time,ugv_x,ugv_y,ugv_yaw,ugv_speed,ugv_yaw_rate,"
         "uav_x,uav_y,uav_z,uav_qw,uav_qx,uav_qy,uav_qz,"
         "rel_px,rel_py,rel_pz,rel_vx,rel_vy,rel_vz,rel_qw,rel_qx,rel_qy,rel_qz,"
         "ref_px,ref_py,ref_pz,ref_vx,ref_vy,ref_vz,ref_qw,ref_qx,ref_qy,ref_qz,"
         "goal_x,goal_y,goal_z,thrust,omega_x,omega_y,omega_z,"
         "clearance,cloud_size,plan_collided\n";
  out << std::setprecision(9);
  const auto vec = [&](const Vec3& v) { out << v.x() << ',' << v.y() << ',' << v.z() << ','; };
  const auto quat = [&](const Quat& q) {
    out << q.w() << ',' << q.x() << ',' << q.y() << ',' << q.z() << ',';
  };
  for (const TraceRow& r : trace) {
    out << r.time << ',' << r.ugv.x << ',' << r.ugv.y << ',' << r.ugv.yaw << ','
        << r.ugv.speed << ',' << r.ugv.yaw_rate << ',';
    vec(r.uav_world.p);
    quat(r.uav_world.q);
    vec(r.relative.p);
    vec(r.relative.v);
    quat(r.relative.q);
    vec(r.reference.p);
    vec(r.reference.v);
    quat(r.reference.q);
    vec(r.goal);
    out << r.input.thrust << ',';
    vec(r.input.omega);
    out << r.clearance << ',' << r.cloud_size << ',' << (r.plan_collided ? 1 : 0) << '\n';
  }
}

}  // namespace coni::sim
