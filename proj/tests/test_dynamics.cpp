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

#include <cmath>
#include <limits>
#include <stdexcept>

#include <gtest/gtest.h>

#include "coni/dynamics.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

namespace coni {
namespace {

using testing::Rng;
using testing::rotation_distance;

NonInertialQuantities rotating(double rate) {
  NonInertialQuantities n;
  n.omega_n = Vec3(0.0, 0.0, rate);
  return n;
}

TEST(Dynamics, HoverIsEquilibrium) {
  const StateDerivative d =
      derivative(RelativeState{}, ControlInput::hover(), NonInertialQuantities::world());
  EXPECT_LT(d.p_dot.norm(), 1e-15);
  EXPECT_LT(d.v_dot.norm(), 1e-12);
  EXPECT_LT(d.q_dot.coeffs().norm(), 1e-15);
}

TEST(Dynamics, FreeFall) {
  ControlInput u;
  u.thrust = 0.0;
  const StateDerivative d = derivative(RelativeState{}, u, NonInertialQuantities::world());
  EXPECT_NEAR((d.v_dot - Vec3(0.0, 0.0, -kGravity)).norm(), 0.0, 1e-12);
}

TEST(Dynamics, CentrifugalTerm) {
  RelativeState x;
  x.p = Vec3(1.0, 0.0, 0.0);
  const StateDerivative d = derivative(x, ControlInput::hover(), rotating(0.5));
  EXPECT_NEAR((d.v_dot - Vec3(0.25, 0.0, 0.0)).norm(), 0.0, 1e-12);
}

TEST(Dynamics, CoriolisAndEulerTerms) {
  Rng rng(11);
  for (int i = 0; i < 50; ++i) {
    NonInertialQuantities n;
    n.omega_n = rng.vec(-1.0, 1.0);
    n.beta_n = rng.vec(-1.0, 1.0);
    n.a_imu = rng.vec(-3.0, 3.0) + Vec3(0.0, 0.0, kGravity);
    RelativeState x;
    x.p = rng.vec(-2.0, 2.0);
    x.v = rng.vec(-2.0, 2.0);
    x.q = rng.quat();
    ControlInput u;
    u.thrust = rng.uniform(0.0, 20.0);
    u.omega = rng.vec(-2.0, 2.0);
    const StateDerivative d = derivative(x, u, n);
    const Vec3 expected = -n.beta_n.cross(x.p) - 2.0 * n.omega_n.cross(x.v) -
                          n.omega_n.cross(n.omega_n.cross(x.p)) +
                          x.q.toRotationMatrix() * Vec3(0.0, 0.0, u.thrust) - n.a_imu;
    EXPECT_NEAR((d.v_dot - expected).norm(), 0.0, 1e-11);
    EXPECT_NEAR((d.p_dot - x.v).norm(), 0.0, 0.0);
    const Quat qw(0.0, n.omega_n.x(), n.omega_n.y(), n.omega_n.z());
    const Quat qb(0.0, u.omega.x(), u.omega.y(), u.omega.z());
    const Eigen::Vector4d q_dot =
        -0.5 * (qw * x.q).coeffs() + 0.5 * (x.q * qb).coeffs();
    EXPECT_NEAR((d.q_dot.coeffs() - q_dot).norm(), 0.0, 1e-12);
  }
}

TEST(Dynamics, BodyRateTurnsAttitudeForward) {
  ControlInput u;
  u.omega = Vec3(0.0, 0.0, 1.0);
  RelativeState x = {};
  for (int i = 0; i < 100; ++i) x = integrate_rk4(x, u, NonInertialQuantities::world(), 0.01);
  EXPECT_NEAR(yaw_of(x.q), 1.0, 1e-9);
}

TEST(Dynamics, WorldFixedPointSeenFromRotatingFrame) {
  // A point resting in the world, observed from a frame spinning at w about
  // z, moves along p(t) = Rz(-wt) p0 with v = -w x p.
  const double w = 0.5;
  const NonInertialQuantities n = rotating(w);
  RelativeState x;
  x.p = Vec3(1.0, 0.0, 0.5);
  x.v = -n.omega_n.cross(x.p);
  const double dt = 0.001;
  const int steps = 2000;
  for (int i = 0; i < steps; ++i) x = integrate_rk4(x, ControlInput::hover(), n, dt);
  const double t = steps * dt;
  const Vec3 expected = Eigen::AngleAxisd(-w * t, Vec3::UnitZ()) * Vec3(1.0, 0.0, 0.5);
  EXPECT_NEAR((x.p - expected).norm(), 0.0, 1e-9);
  const Quat q_expected(Eigen::AngleAxisd(-w * t, Vec3::UnitZ()));
  EXPECT_NEAR(rotation_distance(x.q, q_expected), 0.0, 1e-9);
}

TEST(Dynamics, HoverStepIsFixedPoint) {
  for (double dt : {0.001, 0.01, 0.1}) {
    const RelativeState x =
        integrate_rk4(RelativeState{}, ControlInput::hover(), NonInertialQuantities::world(), dt);
    EXPECT_LT(x.p.norm(), 1e-12);
    EXPECT_LT(x.v.norm(), 1e-12);
    EXPECT_LT(rotation_distance(x.q, Quat::Identity()), 1e-12);
  }
}

TEST(Dynamics, PureYawClosedForm) {
  ControlInput u;
  u.omega = Vec3(0.0, 0.0, 1.0);
  RelativeState x;
  x.p = Vec3(0.3, -0.2, 1.0);
  const Vec3 p0 = x.p;
  for (int i = 0; i < 1000; ++i) x = integrate_rk4(x, u, NonInertialQuantities::world(), 0.001);
  EXPECT_NEAR(yaw_of(x.q), 1.0, 1e-6);
  EXPECT_NEAR((x.p - p0).norm(), 0.0, 1e-9);
  EXPECT_NEAR(x.q.norm(), 1.0, 1e-12);
}

TEST(Dynamics, StepHalvingConverges) {
  Rng rng(5);
  const NonInertialQuantities n = rotating(0.5);
  RelativeState coarse, fine;
  for (int k = 0; k < 100; ++k) {
    ControlInput u;
    u.thrust = rng.uniform(7.0, 12.0);
    u.omega = rng.vec(-1.0, 1.0);
    for (int i = 0; i < 10; ++i) coarse = integrate_rk4(coarse, u, n, 0.001);
    for (int i = 0; i < 20; ++i) fine = integrate_rk4(fine, u, n, 0.0005);
  }
  EXPECT_LT((coarse.p - fine.p).norm(), 1e-9);
  EXPECT_LT((coarse.v - fine.v).norm(), 1e-9);
  EXPECT_LT(rotation_distance(coarse.q, fine.q), 1e-9);
}

TEST(Dynamics, MatchesClosedFormWorldQuadrotor) {
  Rng rng(9);
  RelativeState x;
  oracle::WorldQuadrotor w;
  for (int k = 0; k < 40; ++k) {
    ControlInput u;
    u.thrust = rng.uniform(5.0, 14.0);
    u.omega = rng.vec(-1.5, 1.5);
    for (int i = 0; i < 25; ++i) {
      x = integrate_rk4(x, u, NonInertialQuantities::world(), 0.001);
      w.advance(u.thrust, u.omega, 0.001);
    }
  }
  EXPECT_LT((x.p - w.p).norm(), 1e-8);
  EXPECT_LT((x.v - w.v).norm(), 1e-8);
  EXPECT_LT((x.q.toRotationMatrix() - w.rot).norm(), 1e-8);
}

TEST(Dynamics, RejectsNonFiniteInput) {
  RelativeState x;
  x.p.x() = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(derivative(x, ControlInput::hover(), NonInertialQuantities::world()),
               std::invalid_argument);
  ControlInput u;
  u.thrust = std::numeric_limits<double>::infinity();
  EXPECT_THROW(derivative(RelativeState{}, u, NonInertialQuantities::world()),
               std::invalid_argument);
}

TEST(Dynamics, RejectsBadStepSize) {
  for (double dt : {0.0, -0.01, 0.2}) {
    EXPECT_THROW(integrate_rk4(RelativeState{}, ControlInput::hover(),
                               NonInertialQuantities::world(), dt),
                 std::invalid_argument);
  }
}

TEST(Dynamics, DegenerateDetection) {
  EXPECT_TRUE(is_degenerate(NonInertialQuantities::world()));
  EXPECT_FALSE(is_degenerate(rotating(0.5)));
  NonInertialQuantities zero;
  zero.a_imu = Vec3::Zero();
  EXPECT_FALSE(is_degenerate(zero));
}

TEST(Dynamics, VectorRoundTrip) {
  Rng rng(2);
  RelativeState x;
  x.p = rng.vec(-1.0, 1.0);
  x.v = rng.vec(-1.0, 1.0);
  x.q = rng.quat();
  const RelativeState y = RelativeState::from_vector(x.to_vector());
  EXPECT_EQ(x.p, y.p);
  EXPECT_EQ(x.v, y.v);
  EXPECT_EQ(x.q.coeffs(), y.q.coeffs());
}

class JacobianTest : public ::testing::Test {
 protected:
  void SetUp() override {
    Rng rng(21);
    n_.omega_n = rng.vec(-0.8, 0.8);
    n_.beta_n = rng.vec(-0.5, 0.5);
    n_.a_imu = Vec3(0.3, -0.2, kGravity);
    RelativeState s;
    s.p = rng.vec(-1.0, 1.0);
    s.v = rng.vec(-1.0, 1.0);
    s.q = rng.quat();
    x_ = s.to_vector();
    u_ << 9.0, 0.3, -0.4, 0.2;
  }

  template <typename F>
  void finite_difference(F f, StateMatrix* a, InputMatrix* b) const {
    const double h = 1e-6;
    for (int i = 0; i < kStateDim; ++i) {
      StateVector xp = x_, xm = x_;
      xp(i) += h;
      xm(i) -= h;
      a->col(i) = (f(xp, u_) - f(xm, u_)) / (2.0 * h);
    }
    for (int i = 0; i < kInputDim; ++i) {
      InputVector up = u_, um = u_;
      up(i) += h;
      um(i) -= h;
      b->col(i) = (f(x_, up) - f(x_, um)) / (2.0 * h);
    }
  }

  NonInertialQuantities n_;
  StateVector x_;
  InputVector u_;
};

TEST_F(JacobianTest, FlowMatchesFiniteDifference) {
  StateMatrix a, a_fd;
  InputMatrix b, b_fd;
  flow_jacobians(x_, u_, n_, &a, &b);
  finite_difference([&](const StateVector& x, const InputVector& u) { return flow(x, u, n_); },
                    &a_fd, &b_fd);
  EXPECT_LT((a - a_fd).cwiseAbs().maxCoeff(), 1e-7);
  EXPECT_LT((b - b_fd).cwiseAbs().maxCoeff(), 1e-7);
}

TEST_F(JacobianTest, StepMatchesFiniteDifference) {
  const double dt = 0.05;
  StateMatrix a, a_fd;
  InputMatrix b, b_fd;
  const StateVector next = step_with_jacobians(x_, u_, n_, dt, &a, &b);
  EXPECT_LT((next - step(x_, u_, n_, dt)).norm(), 1e-15);
  finite_difference(
      [&](const StateVector& x, const InputVector& u) { return step(x, u, n_, dt); }, &a_fd,
      &b_fd);
  EXPECT_LT((a - a_fd).cwiseAbs().maxCoeff(), 1e-7);
  EXPECT_LT((b - b_fd).cwiseAbs().maxCoeff(), 1e-7);
}

}  // namespace
}  // namespace coni
