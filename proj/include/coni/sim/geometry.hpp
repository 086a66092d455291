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

#ifndef CONI_SIM_GEOMETRY_HPP_
#define CONI_SIM_GEOMETRY_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "coni/se3.hpp"

namespace coni::sim {

enum class ObstacleKind { kSphere, kCylinder, kBox };

std::string_view to_string(ObstacleKind kind);

/// World-static analytic obstacle. Cylinders are vertical: `center` is the
/// midpoint of the axis, `radius` the radius and `half_extents.z()` the half
/// height. Boxes are axis aligned and use `half_extents` only.
struct Obstacle {
  ObstacleKind kind = ObstacleKind::kSphere;
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
  Vec3 half_extents = Vec3::Zero();

  static Obstacle sphere(const Vec3& center, double radius);
  static Obstacle cylinder(double x, double y, double z_min, double z_max,
                           double radius);
  static Obstacle box(const Vec3& center, const Vec3& half_extents);

  /// Radius of a sphere about `center` enclosing the primitive.
  double bounding_radius() const;
};

/// Negative inside, zero on the surface.
double signed_distance(const Obstacle& obstacle, const Vec3& point);

/// Distance along a unit direction to the first surface hit within
/// [0, max_range]. An origin inside the primitive hits at zero.
std::optional<double> ray_intersect(const Obstacle& obstacle, const Vec3& origin,
                                    const Vec3& direction, double max_range);

/// Minimum signed distance over all obstacles (+inf when there are none).
double min_signed_distance(std::span<const Obstacle> obstacles,
                           const Vec3& point);

struct MapBounds {
  Vec3 min = Vec3(-13.0, -10.0, 0.0);
  Vec3 max = Vec3(13.0, 10.0, 3.0);

  bool contains(const Vec3& p) const;
  double extent() const { return (max - min).norm(); }
};

struct RandomObstacleSpec {
  int count = 0;
  double radius_min = 0.3;
  double radius_max = 0.8;
  std::uint64_t seed = 0;
};

/// Vertical cylinders spanning the map height, placed uniformly within the
/// bounds. Placements whose surface comes within `keep_out` of any of the
/// `keep_clear` points (horizontal distance) are rejected and redrawn.
std::vector<Obstacle> random_cylinders(const MapBounds& bounds,
                                       const RandomObstacleSpec& spec,
                                       std::span<const Vec3> keep_clear,
                                       double keep_out);

}  // namespace coni::sim

#endif  // CONI_SIM_GEOMETRY_HPP_
