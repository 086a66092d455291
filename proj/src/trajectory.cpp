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

#include "coni/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace coni {

void TrajectoryParams::validate() const {
  if (!(k_p > 0.0)) throw std::invalid_argument("k_p must be positive");
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (!(theta_low > 0.0 && theta_low < 0.5 * std::numbers::pi)) {
    throw std::invalid_argument("theta_low must lie in (0, pi/2)");
  }
  if (!(g > 0.0)) throw std::invalid_argument("g must be positive");
}

Vec3 bound(const Vec3& x) {
  const double n = x.norm();
  return n >= 1.0 ? Vec3(x / n) : x;
}

Vec3 initial_velocity(const Vec3& p_ref, const Vec3& p_goal, double k_p) {
  return bound(-k_p * (p_ref - p_goal));
}

Vec3 clamp_to_cone(const Vec3& z_axis, double theta_low) {
  const double min_z = std::sin(theta_low);
  if (z_axis.z() >= min_z) return z_axis;
  Eigen::Vector2d horizontal(z_axis.x(), z_axis.y());
  const double h = horizontal.norm();
  // Straight down has no vertical plane; tip toward +x.
  horizontal = h > 1e-12 ? Eigen::Vector2d(horizontal / h)
                         : Eigen::Vector2d::UnitX();
  const double c = std::cos(theta_low);
  return Vec3(c * horizontal.x(), c * horizontal.y(), min_z);
}

Vec3 thrust_direction(const Vec3& p_ref, const Vec3& v_ref, const Vec3& v_last,
                      const NonInertialQuantities& n, double dt,
                      double theta_low, bool* degenerate) {
  const Vec3 a_ref = (v_ref - v_last) / dt;
  const Vec3 t = a_ref - frame_acceleration(p_ref, v_ref, n);
  const double norm = t.norm();
  if (degenerate != nullptr) *degenerate = norm < 1e-9;
  if (norm < 1e-9) return Vec3::UnitZ();
  return clamp_to_cone(t / norm, theta_low);
}

Quat reference_attitude(const Vec3& p_ref, const Vec3& v_ref,
                        const Vec3& v_last, const NonInertialQuantities& n,
                        double dt, double theta_low, const Quat& fallback) {
  if (!(dt > 0.0)) throw std::invalid_argument("reference_attitude: dt <= 0");
  bool degenerate = false;
  const Vec3 z = thrust_direction(p_ref, v_ref, v_last, n, dt, theta_low,
                                  &degenerate);
  if (degenerate) return fallback;
  const Vec3 y = z.cross(Vec3::UnitX()).normalized();
  const Vec3 x = y.cross(z);
  Mat3 r;
  r.col(0) = x;
  r.col(1) = y;
  r.col(2) = z;
  return from_matrix(r);
}

ReferenceTrajectory gen_trajectory(const Vec3& p_now, const SampleCloud& cloud,
                                   const NonInertialQuantities& n,
                                   const Vec3& p_goal,
                                   const TrajectoryParams& params,
                                   const ModulationParams& mod_params) {
  if (!all_finite(p_now)) {
    throw std::invalid_argument("gen_trajectory: non-finite position");
  }
  ReferenceTrajectory traj;
  traj.dt = params.dt;
  traj.samples.reserve(static_cast<std::size_t>(params.horizon));

  Vec3 p_last = p_now;
  const Vec3 v_seed = initial_velocity(p_last, p_goal, params.k_p);
  const ModulationResult seed =
      modulation_matrix(p_last, v_seed, cloud, mod_params);
  Vec3 v_last = seed.matrix * v_seed;
  Quat q_last = Quat::Identity();
  if (seed.collided) {
    traj.collided = true;
    v_last.setZero();
  }
  traj.start = ReferenceSample{p_now, v_last, q_last};

  for (int i = 0; i < params.horizon; ++i) {
    const Vec3 p_ref = p_last + v_last * params.dt;
    Vec3 v_ref = Vec3::Zero();
    Quat q_ref = q_last;
    if (!traj.collided) {
      const Vec3 v_init = initial_velocity(p_ref, p_goal, params.k_p);
      const ModulationResult mod =
          modulation_matrix(p_ref, v_init, cloud, mod_params);
      if (mod.collided) {
        traj.collided = true;
      } else {
        v_ref = mod.matrix * v_init;
        q_ref = reference_attitude(p_ref, v_ref, v_last, n, params.dt,
                                   params.theta_low, q_last);
      }
    }
    traj.samples.push_back(ReferenceSample{p_ref, v_ref, q_ref});
    p_last = p_ref;
    v_last = v_ref;
    q_last = q_ref;
  }
  if (!traj.samples.empty()) traj.start.q = traj.samples.front().q;
  return traj;
}

std::vector<ReferenceSample> reference_window(const ReferenceTrajectory& traj,
                                              double offset, int count,
                                              double spacing) {
  std::vector<ReferenceSample> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  const auto node = [&](std::size_t i) -> const ReferenceSample& {
    return i == 0 ? traj.start : traj.samples[i - 1];
  };
  const std::size_t last = traj.samples.size();
  for (int k = 0; k < count; ++k) {
    const double t = std::max(0.0, offset + k * spacing);
    const double s = t / traj.dt;
    const auto i = static_cast<std::size_t>(std::floor(s));
    if (i >= last) {
      out.push_back(node(last));
      continue;
    }
    const double a = s - static_cast<double>(i);
    const ReferenceSample& lo = node(i);
    const ReferenceSample& hi = node(i + 1);
    out.push_back(ReferenceSample{(1.0 - a) * lo.p + a * hi.p,
                                  (1.0 - a) * lo.v + a * hi.v,
                                  lo.q.slerp(a, hi.q).normalized()});
  }
  return out;
}

}  // namespace coni
