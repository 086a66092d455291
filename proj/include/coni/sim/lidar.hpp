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

#ifndef CONI_SIM_LIDAR_HPP_
#define CONI_SIM_LIDAR_HPP_

#include <span>
#include <vector>

#include "coni/modulation.hpp"
#include "coni/sim/geometry.hpp"

namespace coni::sim {

/// Instantaneous azimuth x elevation sweep. The grid is fixed in the ground
/// vehicle's frame N and cast from the UAV position.
struct SensorConfig {
  int azimuth_rays = 64;
  int elevation_rays = 16;
  double elevation_min = -1.0472;  // rad
  double elevation_max = 1.0472;   // rad
  double max_range = 10.0;         // m
  double rate = 10.0;              // Hz
  double point_radius = 0.05;      // m, carried into the cloud

  /// Unit ray directions in frame N, azimuth-major order.
  std::vector<Vec3> directions() const;
};

/// First hit of every ray against the analytic primitives, converted into
/// frame N of a vehicle at (ugv_position, ugv_orientation). Rays without a
/// hit within max_range contribute no point.
SampleCloud lidar_sample(const Vec3& uav_position, const Vec3& ugv_position,
                         const Quat& ugv_orientation,
                         std::span<const Obstacle> obstacles,
                         const SensorConfig& sensor);

}  // namespace coni::sim

#endif  // CONI_SIM_LIDAR_HPP_
