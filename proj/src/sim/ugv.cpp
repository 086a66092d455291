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

#include "coni/sim/ugv.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace coni::sim {
namespace {

constexpr double kArrivalRadius = 0.2;
constexpr double kTurnInPlace = 0.5;  // heading error above which v = 0
constexpr double kHeadingGain = 2.0;
constexpr double kGoalRetryPeriod = 1.0;
constexpr double kFootprintHeight = 0.25;

double wrap_angle(double a) {
  return std::remainder(a, 2.0 * std::numbers::pi);
}

}  // namespace

Quat UgvState::orientation() const {
  return Quat(std::cos(0.5 * yaw), 0.0, 0.0, std::sin(0.5 * yaw));
}

Vec3 UgvState::velocity() const {
  return Vec3(speed * std::cos(yaw), speed * std::sin(yaw), 0.0);
}

Vec3 UgvState::acceleration() const {
  const Vec3 heading(std::cos(yaw), std::sin(yaw), 0.0);
  const Vec3 left(-std::sin(yaw), std::cos(yaw), 0.0);
  return accel * heading + speed * yaw_rate * left;
}

UgvProgram UgvProgram::rotate(double omega) {
  UgvProgram p;
  p.kind = UgvProgramKind::kRotate;
  p.omega = omega;
  p.omega_max = std::abs(omega);
  return p;
}

UgvProgram UgvProgram::waypoint_path(std::vector<Eigen::Vector2d> points,
                                     double v_max, double omega_max) {
  UgvProgram p;
  p.kind = UgvProgramKind::kWaypoints;
  p.waypoints = std::move(points);
  p.v_max = v_max;
  p.omega_max = omega_max;
  return p;
}

UgvProgram UgvProgram::random_goals(double v_max, double omega_max,
                                    std::uint64_t seed) {
  UgvProgram p;
  p.kind = UgvProgramKind::kRandomGoals;
  p.v_max = v_max;
  p.omega_max = omega_max;
  p.seed = seed;
  return p;
}

NonInertialQuantities imu_reading(const UgvState& state) {
  // Body-frame specific force: forward acceleration, centripetal term and the
  // gravity reaction.
  NonInertialQuantities n;
  n.a_imu = Vec3(state.accel, state.speed * state.yaw_rate, kGravity);
  n.omega_n = state.body_rate();
  n.beta_n = Vec3::Zero();
  return n;
}

UgvDriver::UgvDriver(UgvProgram program, MapBounds bounds,
                     std::span<const Obstacle> obstacles)
    : program_(std::move(program)), bounds_(bounds), obstacles_(obstacles),
      rng_(program_.seed) {
  if (program_.kind == UgvProgramKind::kWaypoints) {
    goals_ = program_.waypoints;
    has_goal_ = !goals_.empty();
  }
}

UgvState UgvDriver::initial_state(double x, double y, double yaw) const {
  UgvState s;
  s.x = x;
  s.y = y;
  s.yaw = yaw;
  if (program_.kind == UgvProgramKind::kRotate) s.yaw_rate = program_.omega;
  return s;
}

bool UgvDriver::segment_clear(const Eigen::Vector2d& a,
                              const Eigen::Vector2d& b) const {
  const double margin = program_.body_radius + program_.goal_clearance;
  const double length = (b - a).norm();
  const int samples = std::max(1, static_cast<int>(std::ceil(length / 0.1)));
  for (int i = 0; i <= samples; ++i) {
    const Eigen::Vector2d p = a + (b - a) * (static_cast<double>(i) / samples);
    const Vec3 q(p.x(), p.y(), kFootprintHeight);
    if (min_signed_distance(obstacles_, q) < margin) return false;
  }
  return true;
}

bool UgvDriver::pick_random_goal(const UgvState& s) {
  const double margin = 1.0;
  std::uniform_real_distribution<double> ux(bounds_.min.x() + margin,
                                            bounds_.max.x() - margin);
  std::uniform_real_distribution<double> uy(bounds_.min.y() + margin,
                                            bounds_.max.y() - margin);
  const Eigen::Vector2d from(s.x, s.y);
  for (int attempt = 0; attempt < 200; ++attempt) {
    const Eigen::Vector2d goal(ux(rng_), uy(rng_));
    const double d = (goal - from).norm();
    if (d < program_.goal_min_distance || d > program_.goal_max_distance) continue;
    if (!segment_clear(from, goal)) continue;
    goals_.push_back(goal);
    goal_index_ = goals_.size() - 1;
    return true;
  }
  return false;
}

void UgvDriver::command(const UgvState& s, double* v_cmd, double* w_cmd) {
  *v_cmd = 0.0;
  *w_cmd = 0.0;
  switch (program_.kind) {
    case UgvProgramKind::kStatic:
      return;
    case UgvProgramKind::kRotate:
      *w_cmd = program_.omega;
      return;
    case UgvProgramKind::kWaypoints:
    case UgvProgramKind::kRandomGoals:
      break;
  }
  if (!has_goal_) return;
  const Eigen::Vector2d goal = goals_[goal_index_];
  const Eigen::Vector2d delta = goal - Eigen::Vector2d(s.x, s.y);
  const double dist = delta.norm();
  if (dist < kArrivalRadius) {
    if (program_.kind == UgvProgramKind::kRandomGoals) {
      has_goal_ = false;
    } else if (goal_index_ + 1 < goals_.size()) {
      ++goal_index_;
    } else if (program_.loop) {
      goal_index_ = 0;
    } else {
      has_goal_ = false;
    }
    return;
  }
  const double err = wrap_angle(std::atan2(delta.y(), delta.x()) - s.yaw);
  *w_cmd = std::clamp(kHeadingGain * err, -program_.omega_max, program_.omega_max);
  if (std::abs(err) < kTurnInPlace) {
    const double stopping = std::sqrt(2.0 * program_.a_max * std::max(dist - 0.05, 0.0));
    *v_cmd = std::min(program_.v_max, stopping) * std::cos(err);
  }
}

NonInertialQuantities UgvDriver::step(UgvState* s, double dt) {
  if (program_.kind == UgvProgramKind::kRandomGoals && !has_goal_) {
    retry_timer_ -= dt;
    if (retry_timer_ <= 0.0 && s->speed == 0.0) {
      has_goal_ = pick_random_goal(*s);
      if (!has_goal_) retry_timer_ = kGoalRetryPeriod;
    }
  }
  double v_cmd = 0.0, w_cmd = 0.0;
  command(*s, &v_cmd, &w_cmd);

  s->accel = std::clamp((v_cmd - s->speed) / dt, -program_.a_max, program_.a_max);
  s->yaw_accel = std::clamp((w_cmd - s->yaw_rate) / dt, -program_.alpha_max,
                            program_.alpha_max);
  if (program_.kind == UgvProgramKind::kStatic) {
    s->accel = 0.0;
    s->yaw_accel = 0.0;
  }
  const double v0 = s->speed;
  const double yaw0 = s->yaw;
  s->speed += s->accel * dt;
  s->yaw_rate += s->yaw_accel * dt;
  // Exact for piecewise-constant accelerations up to second order.
  const double yaw_mid = yaw0 + 0.5 * dt * s->yaw_rate;
  const double v_mid = 0.5 * (v0 + s->speed);
  s->x += v_mid * std::cos(yaw_mid) * dt;
  s->y += v_mid * std::sin(yaw_mid) * dt;
  s->yaw = wrap_angle(yaw0 + 0.5 * dt * (s->yaw_rate + (s->yaw_rate - s->yaw_accel * dt)));
  if (std::abs(s->speed) < 1e-12) s->speed = 0.0;
  return imu_reading(*s);
}

}  // namespace coni::sim
