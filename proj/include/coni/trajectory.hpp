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

#ifndef CONI_TRAJECTORY_HPP_
#define CONI_TRAJECTORY_HPP_

#include <numbers>
#include <vector>

#include "coni/dynamics.hpp"
#include "coni/modulation.hpp"
#include "coni/se3.hpp"

namespace coni {

struct TrajectoryParams {
  double k_p = 1.0;       // proportional gain toward the goal (1/s)
  double dt = 0.1;        // spacing of reference samples (s)
  int horizon = 20;       // number of samples
  double theta_low = std::numbers::pi / 3.0;  // min thrust-axis elevation
  double g = kGravity;

  void validate() const;
};

struct ReferenceSample {
  Vec3 p = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  Quat q = Quat::Identity();
};

/// Output of gen_trajectory. Sample i is the reference at (i + 1) * dt after
/// the planning instant; `start` holds the planning position with the seed
/// velocity so the window can be interpolated from time zero.
struct ReferenceTrajectory {
  std::vector<ReferenceSample> samples;
  ReferenceSample start;
  double dt = 0.1;
  bool collided = false;
};

/// x / |x| when |x| >= 1, else x.
Vec3 bound(const Vec3& x);

/// bound(-k_p * (p_ref - p_goal)).
Vec3 initial_velocity(const Vec3& p_ref, const Vec3& p_goal, double k_p);

/// Thrust axis required to realize the acceleration implied by v_last ->
/// v_ref in the moving frame, clamped to elevation >= theta_low.
Vec3 thrust_direction(const Vec3& p_ref, const Vec3& v_ref, const Vec3& v_last,
                      const NonInertialQuantities& n, double dt,
                      double theta_low, bool* degenerate = nullptr);

/// Rotates a unit vector toward +z in its vertical plane until its elevation
/// reaches theta_low. Vectors already inside the cone are returned unchanged.
Vec3 clamp_to_cone(const Vec3& z_axis, double theta_low);

/// Attitude whose z axis is the clamped thrust direction and whose x axis
/// stays in the plane of N's x axis (yaw locked to the ground vehicle).
/// Returns `fallback` when the required specific force vanishes.
Quat reference_attitude(const Vec3& p_ref, const Vec3& v_ref,
                        const Vec3& v_last, const NonInertialQuantities& n,
                        double dt, double theta_low,
                        const Quat& fallback = Quat::Identity());

/// Iterative local trajectory from p_now toward p_goal, avoiding the samples
/// in `cloud`. Cloud and n are treated as constant over the window. Cost is
/// O(|cloud| * horizon).
ReferenceTrajectory gen_trajectory(const Vec3& p_now, const SampleCloud& cloud,
                                   const NonInertialQuantities& n,
                                   const Vec3& p_goal,
                                   const TrajectoryParams& params,
                                   const ModulationParams& mod_params);

/// `count` references spaced by `spacing`, the first at `offset` seconds
/// after the planning instant. Positions and velocities are interpolated
/// linearly, attitudes by slerp; times past the end hold the last sample.
std::vector<ReferenceSample> reference_window(const ReferenceTrajectory& traj,
                                              double offset, int count,
                                              double spacing);

}  // namespace coni

#endif  // CONI_TRAJECTORY_HPP_
