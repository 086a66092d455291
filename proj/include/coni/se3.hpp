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

#ifndef CONI_SE3_HPP_
#define CONI_SE3_HPP_

#include <cmath>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace coni {

// Quaternions follow the Hamilton convention, scalar-first in every
// serialized form, right-handed. A quaternion q_AB maps vectors expressed in
// frame B into frame A: v_A = q_AB * v_B * q_AB^-1.
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;

inline constexpr double kGravity = 9.8;

/// Cross-product matrix: skew(v) * u == v.cross(u).
inline Mat3 skew(const Vec3& v) {
  Mat3 s;
  s << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return s;
}

/// Pure quaternion (w = 0) holding v in its vector part.
inline Quat pure(const Vec3& v) { return Quat(0.0, v.x(), v.y(), v.z()); }

/// Hamilton product. Works on non-unit and pure quaternions.
inline Quat hamilton(const Quat& a, const Quat& b) {
  return Quat(a.w() * b.w() - a.x() * b.x() - a.y() * b.y() - a.z() * b.z(),
              a.w() * b.x() + a.x() * b.w() + a.y() * b.z() - a.z() * b.y(),
              a.w() * b.y() - a.x() * b.z() + a.y() * b.w() + a.z() * b.x(),
              a.w() * b.z() + a.x() * b.y() - a.y() * b.x() + a.z() * b.w());
}

inline Quat conjugate(const Quat& q) { return Quat(q.w(), -q.x(), -q.y(), -q.z()); }

/// Sandwich product q * (0, v) * q^-1 for a unit quaternion.
inline Vec3 rotate(const Quat& q, const Vec3& v) {
  // Expanded form of the sandwich product; equal to it for unit q.
  const Vec3 u(q.x(), q.y(), q.z());
  const Vec3 t = 2.0 * u.cross(v);
  return v + q.w() * t + u.cross(t);
}

/// Rotation matrix of a unit quaternion.
inline Mat3 to_matrix(const Quat& q) {
  const double w = q.w(), x = q.x(), y = q.y(), z = q.z();
  Mat3 r;
  r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
       2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
       2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return r;
}

/// Unit quaternion of a proper rotation matrix (Shepperd's method), w >= 0.
Quat from_matrix(const Mat3& r);

/// Normalizes q; the zero quaternion maps to identity.
inline Quat normalized(const Quat& q) {
  const double n = q.coeffs().norm();
  if (!(n > 0.0)) return Quat::Identity();
  return Quat(q.w() / n, q.x() / n, q.y() / n, q.z() / n);
}

inline Quat axis_angle(const Vec3& axis, double angle) {
  return Quat(Eigen::AngleAxisd(angle, axis.normalized()));
}

/// Yaw angle (rotation about +z) of a unit quaternion, ZYX convention.
inline double yaw_of(const Quat& q) {
  return std::atan2(2.0 * (q.w() * q.z() + q.x() * q.y()),
                    1.0 - 2.0 * (q.y() * q.y() + q.z() * q.z()));
}

inline bool all_finite(const Vec3& v) { return v.allFinite(); }
inline bool all_finite(const Quat& q) { return q.coeffs().allFinite(); }

}  // namespace coni

#endif  // CONI_SE3_HPP_
