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

#ifndef CONI_MODULATION_HPP_
#define CONI_MODULATION_HPP_

#include <vector>

#include "coni/se3.hpp"

namespace coni {

/// One sensor sweep of raw obstacle samples, expressed in frame N. Each point
/// stands for a small ball of radius `point_radius`.
struct SampleCloud {
  std::vector<Vec3> points;
  double point_radius = 0.05;
};

struct ModulationParams {
  double robot_radius = 0.3;  // enclosing sphere of the vehicle (m)
  double dist_scale = 0.5;    // distance at which a point has unit weight (m)
  double dist_power = 2.0;    // exponent on the distance ratio
  double max_weight = 3.0;    // cap on the weight sum used for normalization
  double align_power = 2.0;   // exponent on the velocity alignment cosine

  /// Throws std::invalid_argument naming the first non-positive field.
  void validate() const;
};

struct ReferenceDirection {
  Vec3 r = Vec3::Zero();
  bool collided = false;
};

struct Eigenvalues {
  double radial = 1.0;      // applied along r/|r|
  double tangential = 1.0;  // applied to both tangent directions
};

struct ModulationResult {
  Vec3 r = Vec3::Zero();
  Mat3 basis = Mat3::Identity();
  Mat3 diagonal = Mat3::Identity();
  Mat3 matrix = Mat3::Identity();
  Eigenvalues eigenvalues;
  bool collided = false;
};

/// Distance-weighted sum of unit vectors pointing from each sample to xi.
///
/// Raw weights are (dist_scale / D)^dist_power with D the clearance between
/// the point and the robot sphere. When the raw sum exceeds one, weights are
/// divided by min(sum, max_weight); the resulting |r| may therefore exceed
/// one close to dense samples. A point with D <= 0 sets `collided` and
/// contributes with weight max_weight.
ReferenceDirection weighted_reference_direction(const Vec3& xi,
                                                const SampleCloud& cloud,
                                                const ModulationParams& params);

/// Symmetric orthonormal Householder basis whose first column is r/|r|.
/// Throws std::invalid_argument if r is zero or non-finite.
Mat3 gen_basis_matrix(const Vec3& r);

/// Radial and tangential scalings for a reference direction and the nominal
/// velocity, including the relaxation applied when moving away from the
/// virtual obstacle. A zero v_init disables the relaxation.
Eigenvalues eigenvalues(const Vec3& r, const Vec3& v_init,
                        const ModulationParams& params);

/// E * diag(radial, tangential, tangential) * E. Identity when r vanishes.
ModulationResult modulation_matrix(const Vec3& xi, const Vec3& v_init,
                                   const SampleCloud& cloud,
                                   const ModulationParams& params);

/// Modulated velocity M(xi, v_init) * v_init.
Vec3 modulate(const Vec3& xi, const Vec3& v_init, const SampleCloud& cloud,
              const ModulationParams& params);

}  // namespace coni

#endif  // CONI_MODULATION_HPP_
