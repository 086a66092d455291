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

#ifndef CONI_TESTS_ORACLES_HPP_
#define CONI_TESTS_ORACLES_HPP_

// Reference implementations written from the defining formulas, sharing no
// code with the library beyond Eigen types.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

namespace coni::oracle {

using V3 = Eigen::Vector3d;
using M3 = Eigen::Matrix3d;

inline M3 hat(const V3& w) {
  M3 k;
  k << 0, -w.z(), w.y(), w.z(), 0, -w.x(), -w.y(), w.x(), 0;
  return k;
}

/// Rigid quadrotor in an inertial z-up world, state (p, v, R). Inputs are
/// mass-normalized thrust along body z and body rates, held constant over a
/// step; the step is the closed-form solution for constant inputs.
struct WorldQuadrotor {
  V3 p = V3::Zero();
  V3 v = V3::Zero();
  M3 rot = M3::Identity();

  void advance(double thrust, const V3& omega, double h, double g = 9.8) {
    const double theta = omega.norm();
    M3 exp_h, int1, int2;
    if (theta < 1e-9) {
      const M3 k = hat(omega);
      exp_h = M3::Identity() + h * k;
      int1 = h * M3::Identity() + 0.5 * h * h * k;
      int2 = 0.5 * h * h * M3::Identity() + h * h * h / 6.0 * k;
    } else {
      const M3 k = hat(omega / theta);
      const double s = std::sin(theta * h), c = std::cos(theta * h);
      exp_h = M3::Identity() + s * k + (1.0 - c) * k * k;
      int1 = h * M3::Identity() + (1.0 - c) / theta * k + (h - s / theta) * k * k;
      int2 = 0.5 * h * h * M3::Identity() + (h / theta - s / (theta * theta)) * k +
             (0.5 * h * h - (1.0 - c) / (theta * theta)) * k * k;
    }
    const V3 e3 = V3::UnitZ();
    p += v * h + thrust * rot * int2 * e3 - 0.5 * g * h * h * e3;
    v += thrust * rot * int1 * e3 - g * h * e3;
    rot = rot * exp_h;
  }
};

/// Reference direction: plain transcription of the weighted sum with the
/// capped normalization.
inline V3 reference_direction(const V3& xi, const std::vector<V3>& points, double robot_radius,
                              double dist_scale, double dist_power, double max_weight) {
  std::vector<double> w;
  std::vector<V3> dirs;
  double sum = 0.0;
  for (const V3& o : points) {
    const double d = (xi - o).norm();
    const double wo = std::pow(dist_scale / (d - robot_radius), dist_power);
    w.push_back(wo);
    dirs.push_back((xi - o) / d);
    sum += wo;
  }
  const double capped = std::min(sum, max_weight);
  V3 r = V3::Zero();
  for (std::size_t i = 0; i < w.size(); ++i) {
    r += (capped > 1.0 ? w[i] / capped : w[i]) * dirs[i];
  }
  return r;
}

struct Lambdas {
  double radial;
  double tangential;
};

inline Lambdas eigenvalues(const V3& r, const V3& v, double align_power) {
  const double pi = std::numbers::pi;
  const double nr = r.norm();
  double lr = nr < 2.0 ? std::cos(pi / 2.0 * nr) : -1.0;
  if (r.dot(v) > 0.0 && nr > 1.0) lr = -lr;
  const double lt = nr < 1.0 ? 1.0 + std::sin(pi / 2.0 * nr) : 2.0 * std::sin(pi / (2.0 * nr));
  const double p = std::min(1.0, 1.0 / nr);
  double sa = 0.0;
  if (v.norm() > 0.0 && nr > 0.0) {
    sa = std::pow(std::max(0.0, r.dot(v) / (nr * v.norm())), align_power);
  }
  const double sg = sa > 0.0 ? 1.0 : 0.0;
  Lambdas out;
  out.tangential = p * sa + (1.0 - p * sa) * lt;
  out.radial = sg * p * out.tangential + (1.0 - sg * p) * lr;
  return out;
}

}  // namespace coni::oracle

#endif  // CONI_TESTS_ORACLES_HPP_
