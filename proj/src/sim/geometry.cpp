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

#include "coni/sim/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace coni::sim {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::optional<double> first_root_in_range(double a, double half_b, double c,
                                          double max_range) {
  const double disc = half_b * half_b - a * c;
  if (disc < 0.0) return std::nullopt;
  const double root = std::sqrt(disc);
  const double t0 = (-half_b - root) / a;
  const double t1 = (-half_b + root) / a;
  if (t0 >= 0.0 && t0 <= max_range) return t0;
  if (t0 < 0.0 && t1 >= 0.0) return 0.0;  // origin inside
  return std::nullopt;
}

std::optional<double> ray_sphere(const Obstacle& s, const Vec3& o,
                                 const Vec3& d, double max_range) {
  const Vec3 oc = o - s.center;
  return first_root_in_range(d.squaredNorm(), oc.dot(d),
                             oc.squaredNorm() - s.radius * s.radius, max_range);
}

std::optional<double> ray_box(const Vec3& center, const Vec3& half,
                              const Vec3& o, const Vec3& d, double max_range) {
  double t_near = -kInf, t_far = kInf;
  for (int i = 0; i < 3; ++i) {
    const double lo = center(i) - half(i);
    const double hi = center(i) + half(i);
    if (std::abs(d(i)) < 1e-300) {
      if (o(i) < lo || o(i) > hi) return std::nullopt;
      continue;
    }
    double t0 = (lo - o(i)) / d(i);
    double t1 = (hi - o(i)) / d(i);
    if (t0 > t1) std::swap(t0, t1);
    t_near = std::max(t_near, t0);
    t_far = std::min(t_far, t1);
    if (t_near > t_far) return std::nullopt;
  }
  if (t_far < 0.0) return std::nullopt;
  const double t = std::max(t_near, 0.0);
  if (t > max_range) return std::nullopt;
  return t;
}

std::optional<double> ray_cylinder(const Obstacle& c, const Vec3& o,
                                   const Vec3& d, double max_range) {
  const double z_lo = c.center.z() - c.half_extents.z();
  const double z_hi = c.center.z() + c.half_extents.z();
  const double r2 = c.radius * c.radius;
  const double ox = o.x() - c.center.x(), oy = o.y() - c.center.y();
  const bool inside_radial = ox * ox + oy * oy <= r2;
  if (inside_radial && o.z() >= z_lo && o.z() <= z_hi) return 0.0;

  double best = kInf;
  // Lateral surface.
  const double a = d.x() * d.x() + d.y() * d.y();
  if (a > 1e-300) {
    const double half_b = ox * d.x() + oy * d.y();
    const double cc = ox * ox + oy * oy - r2;
    const double disc = half_b * half_b - a * cc;
    if (disc >= 0.0) {
      const double t = (-half_b - std::sqrt(disc)) / a;
      if (t >= 0.0) {
        const double z = o.z() + t * d.z();
        if (z >= z_lo && z <= z_hi) best = t;
      }
    }
  }
  // End caps.
  if (std::abs(d.z()) > 1e-300) {
    for (const double zc : {z_lo, z_hi}) {
      const double t = (zc - o.z()) / d.z();
      if (t < 0.0 || t >= best) continue;
      const double x = ox + t * d.x(), y = oy + t * d.y();
      if (x * x + y * y <= r2) best = t;
    }
  }
  if (best <= max_range) return best;
  return std::nullopt;
}

}  // namespace

std::string_view to_string(ObstacleKind kind) {
  switch (kind) {
    case ObstacleKind::kSphere:
      return "sphere";
    case ObstacleKind::kCylinder:
      return "cylinder";
    case ObstacleKind::kBox:
      return "box";
  }
  return "unknown";
}

Obstacle Obstacle::sphere(const Vec3& center, double radius) {
  return Obstacle{ObstacleKind::kSphere, center, radius, Vec3::Zero()};
}

Obstacle Obstacle::cylinder(double x, double y, double z_min, double z_max,
                            double radius) {
  return Obstacle{ObstacleKind::kCylinder, Vec3(x, y, 0.5 * (z_min + z_max)),
                  radius, Vec3(radius, radius, 0.5 * (z_max - z_min))};
}

Obstacle Obstacle::box(const Vec3& center, const Vec3& half_extents) {
  return Obstacle{ObstacleKind::kBox, center, 0.0, half_extents};
}

double Obstacle::bounding_radius() const {
  switch (kind) {
    case ObstacleKind::kSphere:
      return radius;
    case ObstacleKind::kCylinder:
      return std::hypot(radius, half_extents.z());
    case ObstacleKind::kBox:
      return half_extents.norm();
  }
  return 0.0;
}

double signed_distance(const Obstacle& obstacle, const Vec3& point) {
  const Vec3 rel = point - obstacle.center;
  switch (obstacle.kind) {
    case ObstacleKind::kSphere:
      return rel.norm() - obstacle.radius;
    case ObstacleKind::kCylinder: {
      const double dr = std::hypot(rel.x(), rel.y()) - obstacle.radius;
      const double dz = std::abs(rel.z()) - obstacle.half_extents.z();
      const double outside = std::hypot(std::max(dr, 0.0), std::max(dz, 0.0));
      return outside + std::min(std::max(dr, dz), 0.0);
    }
    case ObstacleKind::kBox: {
      const Vec3 q = rel.cwiseAbs() - obstacle.half_extents;
      return q.cwiseMax(0.0).norm() + std::min(q.maxCoeff(), 0.0);
    }
  }
  return kInf;
}

std::optional<double> ray_intersect(const Obstacle& obstacle, const Vec3& origin,
                                    const Vec3& direction, double max_range) {
  switch (obstacle.kind) {
    case ObstacleKind::kSphere:
      return ray_sphere(obstacle, origin, direction, max_range);
    case ObstacleKind::kCylinder:
      return ray_cylinder(obstacle, origin, direction, max_range);
    case ObstacleKind::kBox:
      return ray_box(obstacle.center, obstacle.half_extents, origin, direction,
                     max_range);
  }
  return std::nullopt;
}

double min_signed_distance(std::span<const Obstacle> obstacles,
                           const Vec3& point) {
  double best = kInf;
  for (const Obstacle& o : obstacles) {
    best = std::min(best, signed_distance(o, point));
  }
  return best;
}

bool MapBounds::contains(const Vec3& p) const {
  return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
}

std::vector<Obstacle> random_cylinders(const MapBounds& bounds,
                                       const RandomObstacleSpec& spec,
                                       std::span<const Vec3> keep_clear,
                                       double keep_out) {
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> ux(bounds.min.x(), bounds.max.x());
  std::uniform_real_distribution<double> uy(bounds.min.y(), bounds.max.y());
  std::uniform_real_distribution<double> ur(spec.radius_min, spec.radius_max);
  std::vector<Obstacle> out;
  out.reserve(static_cast<std::size_t>(std::max(spec.count, 0)));
  int attempts = 0;
  while (static_cast<int>(out.size()) < spec.count && attempts < 1000 * (spec.count + 1)) {
    ++attempts;
    const double x = ux(rng), y = uy(rng), r = ur(rng);
    bool blocked = false;
    for (const Vec3& p : keep_clear) {
      if (std::hypot(p.x() - x, p.y() - y) - r < keep_out) {
        blocked = true;
        break;
      }
    }
    if (blocked) continue;
    out.push_back(Obstacle::cylinder(x, y, bounds.min.z(), bounds.max.z(), r));
  }
  return out;
}

}  // namespace coni::sim
