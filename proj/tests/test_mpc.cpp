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
#include <vector>

#include <gtest/gtest.h>

#include "coni/mpc.hpp"
#include "test_support.hpp"

namespace coni {
namespace {

using testing::Rng;

std::vector<ReferenceSample> hover_reference(const Vec3& p, int nodes) {
  std::vector<ReferenceSample> r(static_cast<std::size_t>(nodes));
  for (auto& s : r) s.p = p;
  return r;
}

bool inside_box(const ControlInput& u, const MpcConfig& cfg) {
  const InputVector v = u.to_vector();
  return (v.array() >= cfg.lower().array()).all() && (v.array() <= cfg.upper().array()).all();
}

TEST(StageCost, PerfectTrackingIsZero) {
  RelativeState x;
  x.p = Vec3(1.0, 2.0, 3.0);
  ReferenceSample r;
  r.p = x.p;
  EXPECT_EQ(stage_cost(x, r, ControlInput::hover(), MpcConfig{}), 0.0);
}

TEST(StageCost, QuaternionSignIsIrrelevant) {
  const Quat q = axis_angle(Vec3(0.2, 1.0, -0.5), 0.7);
  RelativeState x;
  x.q = Quat(-q.w(), -q.x(), -q.y(), -q.z());
  ReferenceSample r;
  r.q = q;
  EXPECT_NEAR(stage_cost(x, r, ControlInput::hover(), MpcConfig{}), 0.0, 1e-20);
}

TEST(StageCost, SinglePositionTerm) {
  MpcConfig cfg;
  cfg.q_weights.setZero();
  cfg.q_weights(0) = 200.0;
  cfg.r_weights.setZero();
  RelativeState x;
  x.p = Vec3(1.0, 0.0, 0.0);
  EXPECT_DOUBLE_EQ(stage_cost(x, ReferenceSample{}, ControlInput::hover(), cfg), 200.0);
}

TEST(StageCost, InputTermIsRelativeToHover) {
  MpcConfig cfg;
  cfg.q_weights.setZero();
  ControlInput u;
  u.thrust = kGravity + 2.0;
  u.omega = Vec3(0.0, 1.0, 0.0);
  EXPECT_NEAR(stage_cost(RelativeState{}, ReferenceSample{}, u, cfg), 5.0, 1e-12);
}

TEST(MpcConfig, Validate) {
  MpcConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.thrust_max = 5.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = MpcConfig{};
  cfg.horizon_steps = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = MpcConfig{};
  cfg.q_weights(3) = -1.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(Solve, EquilibriumStaysAtHover) {
  const MpcConfig cfg;
  RelativeState x0;
  x0.p = Vec3(1.0, 0.0, 0.5);
  const auto ref = hover_reference(x0.p, cfg.horizon_steps + 1);
  const MpcSolution s = solve(x0, ref, NonInertialQuantities::world(), cfg);
  ASSERT_EQ(s.inputs.size(), static_cast<std::size_t>(cfg.horizon_steps));
  for (const ControlInput& u : s.inputs) {
    EXPECT_NEAR(u.thrust, kGravity, 1e-6);
    EXPECT_LT(u.omega.norm(), 1e-6);
  }
  EXPECT_LT((s.predicted_states.back().p - x0.p).norm(), 1e-3);
}

TEST(Solve, ContractsOnRandomProblems) {
  Rng rng(31);
  MpcConfig cfg;
  for (int k = 0; k < 30; ++k) {
    NonInertialQuantities n;
    n.omega_n = Vec3(0.0, 0.0, rng.uniform(-1.0, 1.0));
    n.a_imu = Vec3(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), kGravity);
    RelativeState x0;
    x0.p = rng.vec(-2.0, 2.0);
    x0.v = rng.vec(-1.5, 1.5);
    x0.q = axis_angle(rng.unit(), rng.uniform(0.0, 0.6));
    std::vector<ReferenceSample> ref(static_cast<std::size_t>(cfg.horizon_steps + 1));
    for (std::size_t i = 0; i < ref.size(); ++i) {
      ref[i].p = Vec3(3.0 * std::sin(0.1 * i), 0.0, 1.0);
    }
    const MpcSolution s = solve(x0, ref, n, cfg);
    for (const ControlInput& u : s.inputs) EXPECT_TRUE(inside_box(u, cfg));
    EXPECT_LE(s.cost, s.hover_cost + 1e-9);
    EXPECT_NEAR(s.cost, sequence_cost(x0, ref, s.inputs, n, cfg), 1e-9 * (1.0 + s.cost));
    // Predicted states are the exact rollout of the returned inputs.
    RelativeState x = x0;
    ASSERT_EQ(s.predicted_states.size(), s.inputs.size() + 1);
    for (std::size_t i = 0; i < s.inputs.size(); ++i) {
      EXPECT_LT((x.p - s.predicted_states[i].p).norm(), 1e-12);
      x = RelativeState::from_vector(step(x.to_vector(), s.inputs[i].to_vector(), n, cfg.dt));
    }
    EXPECT_LT((x.p - s.predicted_states.back().p).norm(), 1e-12);
    for (std::size_t i = 1; i < s.cost_history.size(); ++i) {
      EXPECT_LE(s.cost_history[i], s.cost_history[i - 1] + 1e-12);
    }
  }
}

TEST(Solve, PadsShortReference) {
  const MpcConfig cfg;
  RelativeState x0;
  const auto ref = hover_reference(Vec3(0.5, 0.0, 0.0), 3);
  const MpcSolution s = solve(x0, ref, NonInertialQuantities::world(), cfg);
  EXPECT_EQ(s.inputs.size(), static_cast<std::size_t>(cfg.horizon_steps));
  EXPECT_LT(s.cost, s.hover_cost);
}

TEST(Solve, NonFiniteRolloutFallsBackToHover) {
  const MpcConfig cfg;
  NonInertialQuantities n;
  n.a_imu = Vec3(0.0, 0.0, 1e308);
  const auto ref = hover_reference(Vec3::Zero(), cfg.horizon_steps + 1);
  const MpcSolution s = solve(RelativeState{}, ref, n, cfg);
  EXPECT_FALSE(s.converged);
  ASSERT_EQ(s.inputs.size(), static_cast<std::size_t>(cfg.horizon_steps));
  for (const ControlInput& u : s.inputs) {
    EXPECT_EQ(u.thrust, kGravity);
    EXPECT_EQ(u.omega, Vec3::Zero());
  }
}

TEST(Solve, RejectsNonFiniteInitialState) {
  const MpcConfig cfg;
  RelativeState x0;
  x0.p.x() = std::numeric_limits<double>::quiet_NaN();
  const auto ref = hover_reference(Vec3::Zero(), cfg.horizon_steps + 1);
  EXPECT_THROW(solve(x0, ref, NonInertialQuantities::world(), cfg), std::invalid_argument);
}

TEST(ShiftInputs, InterpolatesAndHolds) {
  MpcSolution prev;
  for (int i = 0; i < 4; ++i) {
    ControlInput u;
    u.thrust = 10.0 + i;
    prev.inputs.push_back(u);
  }
  const std::vector<ControlInput> s = shift_inputs(prev, 0.05, 0.1);
  ASSERT_EQ(s.size(), 4u);
  EXPECT_NEAR(s[0].thrust, 10.5, 1e-12);
  EXPECT_NEAR(s[2].thrust, 12.5, 1e-12);
  EXPECT_NEAR(s[3].thrust, 13.0, 1e-12);
  const std::vector<ControlInput> same = shift_inputs(prev, 0.0, 0.1);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(same[i].thrust, prev.inputs[i].thrust);
}

TEST(ClosedLoop, RecoversHoverOffset) {
  const MpcConfig cfg;
  const NonInertialQuantities n = NonInertialQuantities::world();
  const Vec3 goal(1.0, 0.0, 0.5);
  const auto ref = hover_reference(goal, cfg.horizon_steps + 1);
  RelativeState x;
  x.p = goal + Vec3(0.5, 0.0, 0.0);
  std::optional<std::vector<ControlInput>> warm;
  for (int tick = 0; tick < 300; ++tick) {
    const MpcSolution s = solve(x, ref, n, cfg, warm);
    warm = shift_inputs(s, 0.01, cfg.dt);
    for (int i = 0; i < 10; ++i) x = integrate_rk4(x, s.inputs.front(), n, 0.001);
  }
  EXPECT_LT((x.p - goal).norm(), 0.05);
}

}  // namespace
}  // namespace coni
