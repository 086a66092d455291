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

#ifndef CONI_DYNAMICS_HPP_
#define CONI_DYNAMICS_HPP_

#include <Eigen/Core>

#include "coni/se3.hpp"

namespace coni {

inline constexpr int kStateDim = 10;
inline constexpr int kInputDim = 4;

using StateVector = Eigen::Matrix<double, kStateDim, 1>;
using InputVector = Eigen::Matrix<double, kInputDim, 1>;
using StateMatrix = Eigen::Matrix<double, kStateDim, kStateDim>;
using InputMatrix = Eigen::Matrix<double, kStateDim, kInputDim>;

/// Quadrotor state expressed in the ground vehicle's body frame N.
/// `v` is the time derivative of `p` as seen from N, `q` maps UAV body
/// vectors into N.
struct RelativeState {
  Vec3 p = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  Quat q = Quat::Identity();

  /// Packed as [p, v, qw, qx, qy, qz].
  StateVector to_vector() const;
  static RelativeState from_vector(const StateVector& x);
};

/// Mass-normalized collective thrust (m/s^2) and body rate (rad/s).
struct ControlInput {
  double thrust = kGravity;
  Vec3 omega = Vec3::Zero();

  InputVector to_vector() const;
  static ControlInput from_vector(const InputVector& u);
  static ControlInput hover() { return ControlInput{}; }
};

/// Parameters of the moving frame: IMU specific force, body rate and angular
/// acceleration of the ground vehicle, all in N.
struct NonInertialQuantities {
  Vec3 a_imu = Vec3(0.0, 0.0, kGravity);
  Vec3 omega_n = Vec3::Zero();
  Vec3 beta_n = Vec3::Zero();

  /// Quantities of a frame at rest in an inertial world (z up).
  static NonInertialQuantities world() { return NonInertialQuantities{}; }
};

struct StateDerivative {
  Vec3 p_dot;
  Vec3 v_dot;
  Quat q_dot;  // not a unit quaternion
};

/// Relative quadrotor flow in a non-inertial frame. Throws
/// std::invalid_argument on non-finite input.
StateDerivative derivative(const RelativeState& x, const ControlInput& u,
                           const NonInertialQuantities& n);

/// Fictitious acceleration felt at (p, v) in N, excluding thrust:
/// -[beta]p - 2[Omega]v - [Omega]^2 p - a_imu.
Vec3 frame_acceleration(const Vec3& p, const Vec3& v,
                        const NonInertialQuantities& n);

/// One explicit RK4 step with N held constant; the quaternion is
/// renormalized afterwards. Throws std::invalid_argument unless
/// 0 < dt <= 0.1.
RelativeState integrate_rk4(const RelativeState& x, const ControlInput& u,
                            const NonInertialQuantities& n, double dt);

/// True when n describes a frame at rest in the world (gravity-only IMU
/// reading, no rotation), so the flow reduces to world-frame dynamics.
bool is_degenerate(const NonInertialQuantities& n, double tol = 1e-9);

/// Vector form of derivative(); no finiteness check.
StateVector flow(const StateVector& x, const InputVector& u,
                 const NonInertialQuantities& n);

/// Jacobians of flow() with respect to state and input.
void flow_jacobians(const StateVector& x, const InputVector& u,
                    const NonInertialQuantities& n, StateMatrix* a,
                    InputMatrix* b);

/// Discrete RK4 step on the packed state, including renormalization.
StateVector step(const StateVector& x, const InputVector& u,
                 const NonInertialQuantities& n, double dt);

/// Exact Jacobians of step() (RK4 stages and renormalization chained).
StateVector step_with_jacobians(const StateVector& x, const InputVector& u,
                                const NonInertialQuantities& n, double dt,
                                StateMatrix* a, InputMatrix* b);

}  // namespace coni

#endif  // CONI_DYNAMICS_HPP_
