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

#include "coni/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace coni {
namespace {

using Mat4 = Eigen::Matrix4d;
using Vec4 = Eigen::Vector4d;

// a (x) b == left_product(a) * b, quaternions packed [w, x, y, z].
Mat4 left_product(double w, const Vec3& u) {
  Mat4 m;
  m << w, -u.x(), -u.y(), -u.z(),
       u.x(), w, -u.z(), u.y(),
       u.y(), u.z(), w, -u.x(),
       u.z(), -u.y(), u.x(), w;
  return m;
}

// a (x) b == right_product(b) * a.
Mat4 right_product(double w, const Vec3& u) {
  Mat4 m;
  m << w, -u.x(), -u.y(), -u.z(),
       u.x(), w, u.z(), -u.y(),
       u.y(), -u.z(), w, u.x(),
       u.z(), u.y(), -u.x(), w;
  return m;
}

// Thrust direction q (x) e3 (x) q*, homogeneous in q.
Vec3 thrust_axis(const Vec4& q) {
  const double w = q(0), x = q(1), y = q(2), z = q(3);
  return Vec3(2.0 * (x * z + w * y), 2.0 * (y * z - w * x),
              w * w - x * x - y * y + z * z);
}

void renormalize(StateVector* x) {
  const double n = x->tail<4>().norm();
  if (n > 0.0) x->tail<4>() /= n;
}

}  // namespace

StateVector RelativeState::to_vector() const {
  StateVector x;
  x << p, v, q.w(), q.x(), q.y(), q.z();
  return x;
}

RelativeState RelativeState::from_vector(const StateVector& x) {
  RelativeState s;
  s.p = x.segment<3>(0);
  s.v = x.segment<3>(3);
  s.q = Quat(x(6), x(7), x(8), x(9));
  return s;
}

InputVector ControlInput::to_vector() const {
  InputVector u;
  u << thrust, omega;
  return u;
}

ControlInput ControlInput::from_vector(const InputVector& u) {
  return ControlInput{u(0), u.tail<3>()};
}

Vec3 frame_acceleration(const Vec3& p, const Vec3& v,
                        const NonInertialQuantities& n) {
  const Vec3& w = n.omega_n;
  return -n.beta_n.cross(p) - 2.0 * w.cross(v) - w.cross(w.cross(p)) - n.a_imu;
}

StateVector flow(const StateVector& x, const InputVector& u,
                 const NonInertialQuantities& n) {
  const Vec3 p = x.segment<3>(0);
  const Vec3 v = x.segment<3>(3);
  const Vec4 q = x.tail<4>();
  StateVector dx;
  dx.segment<3>(0) = v;
  dx.segment<3>(3) = frame_acceleration(p, v, n) + u(0) * thrust_axis(q);
  dx.tail<4>() = -0.5 * left_product(0.0, n.omega_n) * q +
                 0.5 * right_product(0.0, u.tail<3>()) * q;
  return dx;
}

StateDerivative derivative(const RelativeState& x, const ControlInput& u,
                           const NonInertialQuantities& n) {
  if (!all_finite(x.p) || !all_finite(x.v) || !all_finite(x.q) ||
      !std::isfinite(u.thrust) || !all_finite(u.omega) ||
      !all_finite(n.a_imu) || !all_finite(n.omega_n) || !all_finite(n.beta_n)) {
    throw std::invalid_argument("derivative: non-finite input");
  }
  const StateVector dx = flow(x.to_vector(), u.to_vector(), n);
  return StateDerivative{dx.segment<3>(0), dx.segment<3>(3),
                         Quat(dx(6), dx(7), dx(8), dx(9))};
}

void flow_jacobians(const StateVector& x, const InputVector& u,
                    const NonInertialQuantities& n, StateMatrix* a,
                    InputMatrix* b) {
  const Vec3& w = n.omega_n;
  const Mat3 sw = skew(w);
  const double qw = x(6), qx = x(7), qy = x(8), qz = x(9);
  const double thrust = u(0);

  a->setZero();
  a->block<3, 3>(0, 3).setIdentity();
  a->block<3, 3>(3, 0) = -skew(n.beta_n) - sw * sw;
  a->block<3, 3>(3, 3) = -2.0 * sw;
  Eigen::Matrix<double, 3, 4> dthrust_dq;
  dthrust_dq << qy, qz, qw, qx,
                -qx, -qw, qz, qy,
                qw, -qx, -qy, qz;
  a->block<3, 4>(3, 6) = 2.0 * thrust * dthrust_dq;
  a->block<4, 4>(6, 6) = -0.5 * left_product(0.0, w) +
                         0.5 * right_product(0.0, u.tail<3>());

  b->setZero();
  b->block<3, 1>(3, 0) = thrust_axis(x.tail<4>());
  b->block<4, 3>(6, 1) =
      0.5 * left_product(qw, Vec3(qx, qy, qz)).rightCols<3>();
}

StateVector step(const StateVector& x, const InputVector& u,
                 const NonInertialQuantities& n, double dt) {
  const StateVector k1 = flow(x, u, n);
  const StateVector k2 = flow(x + 0.5 * dt * k1, u, n);
  const StateVector k3 = flow(x + 0.5 * dt * k2, u, n);
  const StateVector k4 = flow(x + dt * k3, u, n);
  StateVector next = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  renormalize(&next);
  return next;
}

StateVector step_with_jacobians(const StateVector& x, const InputVector& u,
                                const NonInertialQuantities& n, double dt,
                                StateMatrix* a, InputMatrix* b) {
  StateMatrix a1, a2, a3, a4;
  InputMatrix b1, b2, b3, b4;

  const StateVector k1 = flow(x, u, n);
  flow_jacobians(x, u, n, &a1, &b1);
  const StateVector x2 = x + 0.5 * dt * k1;
  const StateVector k2 = flow(x2, u, n);
  flow_jacobians(x2, u, n, &a2, &b2);
  const StateVector x3 = x + 0.5 * dt * k2;
  const StateVector k3 = flow(x3, u, n);
  flow_jacobians(x3, u, n, &a3, &b3);
  const StateVector x4 = x + dt * k3;
  const StateVector k4 = flow(x4, u, n);
  flow_jacobians(x4, u, n, &a4, &b4);

  const StateMatrix eye = StateMatrix::Identity();
  const StateMatrix dk1_dx = a1;
  const InputMatrix dk1_du = b1;
  const StateMatrix dk2_dx = a2 * (eye + 0.5 * dt * dk1_dx);
  const InputMatrix dk2_du = a2 * (0.5 * dt * dk1_du) + b2;
  const StateMatrix dk3_dx = a3 * (eye + 0.5 * dt * dk2_dx);
  const InputMatrix dk3_du = a3 * (0.5 * dt * dk2_du) + b3;
  const StateMatrix dk4_dx = a4 * (eye + dt * dk3_dx);
  const InputMatrix dk4_du = a4 * (dt * dk3_du) + b4;

  StateVector next = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  *a = eye + (dt / 6.0) * (dk1_dx + 2.0 * dk2_dx + 2.0 * dk3_dx + dk4_dx);
  *b = (dt / 6.0) * (dk1_du + 2.0 * dk2_du + 2.0 * dk3_du + dk4_du);

  // Chain through q -> q / |q|.
  const double norm = next.tail<4>().norm();
  if (norm > 0.0) {
    const Vec4 qn = next.tail<4>() / norm;
    const Mat4 proj = (Mat4::Identity() - qn * qn.transpose()) / norm;
    a->bottomRows<4>() = (proj * a->bottomRows<4>()).eval();
    b->bottomRows<4>() = (proj * b->bottomRows<4>()).eval();
    next.tail<4>() = qn;
  }
  return next;
}

RelativeState integrate_rk4(const RelativeState& x, const ControlInput& u,
                            const NonInertialQuantities& n, double dt) {
  if (!(dt > 0.0) || dt > 0.1) {
    throw std::invalid_argument("integrate_rk4: dt must lie in (0, 0.1]");
  }
  // Validates finiteness of all inputs.
  (void)derivative(x, u, n);
  return RelativeState::from_vector(step(x.to_vector(), u.to_vector(), n, dt));
}

bool is_degenerate(const NonInertialQuantities& n, double tol) {
  return (n.a_imu - Vec3(0.0, 0.0, kGravity)).cwiseAbs().maxCoeff() <= tol &&
         n.omega_n.cwiseAbs().maxCoeff() <= tol &&
         n.beta_n.cwiseAbs().maxCoeff() <= tol;
}

}  // namespace coni
