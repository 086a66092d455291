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

#include "coni/modulation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace coni {
namespace {

// Integer exponents are common and much cheaper than std::pow.
double ratio_power(double ratio, double power) {
  if (power == 1.0) return ratio;
  if (power == 2.0) return ratio * ratio;
  if (power == 3.0) return ratio * ratio * ratio;
  if (power == 4.0) {
    const double sq = ratio * ratio;
    return sq * sq;
  }
  return std::pow(ratio, power);
}

}  // namespace

void ModulationParams::validate() const {
  auto check = [](double value, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value)) {
      throw std::invalid_argument(std::string(name) + " must be positive");
    }
  };
  check(robot_radius, "robot_radius");
  check(dist_scale, "dist_scale");
  check(dist_power, "dist_power");
  check(max_weight, "max_weight");
  check(align_power, "align_power");
}

ReferenceDirection weighted_reference_direction(
    const Vec3& xi, const SampleCloud& cloud, const ModulationParams& params) {
  ReferenceDirection out;
  double weight_sum = 0.0;
  Vec3 weighted = Vec3::Zero();
  // Normalization is a common scalar, so a single pass accumulates both the
  // raw weight sum and the raw weighted direction.
  for (const Vec3& point : cloud.points) {
    const Vec3 diff = xi - point;
    const double dist = diff.norm();
    const double clearance = dist - params.robot_radius;
    double w;
    if (clearance > 0.0) {
      w = ratio_power(params.dist_scale / clearance, params.dist_power);
    } else {
      out.collided = true;
      w = params.max_weight;
    }
    weight_sum += w;
    if (dist > 0.0) weighted += (w / dist) * diff;
  }
  const double capped = std::min(weight_sum, params.max_weight);
  out.r = capped > 1.0 ? Vec3(weighted / capped) : weighted;
  return out;
}

Mat3 gen_basis_matrix(const Vec3& r) {
  const double norm = r.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw std::invalid_argument("gen_basis_matrix: reference direction is zero");
  }
  const Vec3 rn = r / norm;
  const Vec3 e1 = Vec3::UnitX();
  const Vec3 w = rn.x() > 0.0 ? Vec3(rn + e1) : Vec3(rn - e1);
  Mat3 e = Mat3::Identity() - 2.0 * w * w.transpose() / w.squaredNorm();
  if (r.dot(e * e1) < 0.0) e = -e;
  return e;
}

Eigenvalues eigenvalues(const Vec3& r, const Vec3& v_init,
                        const ModulationParams& params) {
  constexpr double kHalfPi = 0.5 * std::numbers::pi;
  const double norm = r.norm();
  const double r_dot_v = r.dot(v_init);

  double radial = norm < 2.0 ? std::cos(kHalfPi * norm) : -1.0;
  if (r_dot_v > 0.0 && norm > 1.0) radial = -radial;
  const double tangential =
      norm < 1.0 ? 1.0 + std::sin(kHalfPi * norm) : 2.0 * std::sin(kHalfPi / norm);

  const double p = norm > 1.0 ? 1.0 / norm : 1.0;
  double align = 0.0;
  const double v_norm = v_init.norm();
  if (norm > 0.0 && v_norm > 0.0) {
    const double cosine = r_dot_v / (norm * v_norm);
    align = std::pow(std::max(0.0, cosine), params.align_power);
  }
  const double sign = align > 0.0 ? 1.0 : 0.0;

  Eigenvalues out;
  out.tangential = p * align + (1.0 - p * align) * tangential;
  out.radial = sign * p * out.tangential + (1.0 - sign * p) * radial;
  return out;
}

ModulationResult modulation_matrix(const Vec3& xi, const Vec3& v_init,
                                   const SampleCloud& cloud,
                                   const ModulationParams& params) {
  ModulationResult out;
  const ReferenceDirection dir =
      weighted_reference_direction(xi, cloud, params);
  out.r = dir.r;
  out.collided = dir.collided;
  if (!(dir.r.norm() > 0.0)) return out;

  out.basis = gen_basis_matrix(dir.r);
  out.eigenvalues = eigenvalues(dir.r, v_init, params);
  out.diagonal = Vec3(out.eigenvalues.radial, out.eigenvalues.tangential,
                      out.eigenvalues.tangential)
                     .asDiagonal();
  // The basis is its own inverse.
  out.matrix = out.basis * out.diagonal * out.basis;
  return out;
}

Vec3 modulate(const Vec3& xi, const Vec3& v_init, const SampleCloud& cloud,
              const ModulationParams& params) {
  return modulation_matrix(xi, v_init, cloud, params).matrix * v_init;
}

}  // namespace coni
