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

#include "coni/sim/lidar.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace coni::sim {

std::vector<Vec3> SensorConfig::directions() const {
  std::vector<Vec3> out;
  out.reserve(static_cast<std::size_t>(azimuth_rays * elevation_rays));
  for (int i = 0; i < azimuth_rays; ++i) {
    const double az = 2.0 * std::numbers::pi * i / azimuth_rays;
    for (int j = 0; j < elevation_rays; ++j) {
      const double el =
          elevation_rays == 1
              ? 0.5 * (elevation_min + elevation_max)
              : elevation_min + (elevation_max - elevation_min) * j / (elevation_rays - 1);
      out.emplace_back(std::cos(el) * std::cos(az), std::cos(el) * std::sin(az),
                       std::sin(el));
    }
  }
  return out;
}

SampleCloud lidar_sample(const Vec3& uav_position, const Vec3& ugv_position,
                         const Quat& ugv_orientation,
                         std::span<const Obstacle> obstacles,
                         const SensorConfig& sensor) {
  SampleCloud cloud;
  cloud.point_radius = sensor.point_radius;

  struct Candidate {
    const Obstacle* obstacle;
    Vec3 rel;  // center relative to the sensor
    double bound_sq;
    double bound;
  };
  std::vector<Candidate> nearby;
  for (const Obstacle& o : obstacles) {
    const Vec3 rel = o.center - uav_position;
    const double bound = o.bounding_radius();
    if (rel.norm() - bound > sensor.max_range) continue;
    nearby.push_back(Candidate{&o, rel, bound * bound, bound});
  }
  if (nearby.empty()) return cloud;

  const Mat3 rot = to_matrix(ugv_orientation);
  const Mat3 rot_t = rot.transpose();
  const Vec3 origin_n = rot_t * (uav_position - ugv_position);
  for (const Vec3& dir_n : sensor.directions()) {
    const Vec3 dir = rot * dir_n;
    double best = std::numeric_limits<double>::infinity();
    for (const Candidate& c : nearby) {
      const double along = c.rel.dot(dir);
      if (along + c.bound < 0.0 || along - c.bound > best) continue;
      if (c.rel.squaredNorm() - along * along > c.bound_sq) continue;
      const auto t = ray_intersect(*c.obstacle, uav_position, dir, sensor.max_range);
      if (t && *t < best) best = *t;
    }
    if (best <= sensor.max_range) cloud.points.push_back(origin_n + best * dir_n);
  }
  return cloud;
}

}  // namespace coni::sim
