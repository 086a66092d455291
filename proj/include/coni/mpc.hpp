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

#ifndef CONI_MPC_HPP_
#define CONI_MPC_HPP_

#include <optional>
#include <span>
#include <vector>

#include "coni/dynamics.hpp"
#include "coni/trajectory.hpp"

namespace coni {

struct MpcConfig {
  int horizon_steps = 20;
  double dt = 0.1;
  // State weights packed [p(3), v(3), q(4)]; input weights [T, wx, wy, wz].
  StateVector q_weights = (StateVector() << 200, 200, 500, 10, 10, 10, 50, 50,
                           50, 50).finished();
  InputVector r_weights = (InputVector() << 1, 1, 1, 1).finished();
  StateVector q_final = (StateVector() << 200, 200, 500, 10, 10, 10, 50, 50,
                         50, 50).finished();
  double thrust_min = 2.0;
  double thrust_max = 20.0;
  double omega_rp = 3.0;
  double omega_yaw = 2.0;
  int max_iterations = 20;
  double convergence_tol = 1e-4;  // relative cost decrease

  InputVector lower() const;
  InputVector upper() const;
  /// Throws std::invalid_argument when hover is infeasible, a weight is
  /// negative, or the horizon is empty.
  void validate() const;
};

struct MpcSolution {
  std::vector<ControlInput> inputs;
  std::vector<RelativeState> predicted_states;
  double cost = 0.0;
  double hover_cost = 0.0;  // cost of the all-hover input sequence
  int iterations = 0;
  bool converged = false;
  double solve_time = 0.0;  // seconds, wall clock
  std::vector<double> cost_history;  // cost after each accepted iterate
};

/// ||x - x_ref||^2_Q + ||u - u_hover||^2_R with a sign-aligned quaternion
/// difference.
double stage_cost(const RelativeState& x, const ReferenceSample& x_ref,
                  const ControlInput& u, const MpcConfig& cfg);

/// Weighted state term only, used for the terminal node with q_final.
double state_cost(const RelativeState& x, const ReferenceSample& x_ref,
                  const StateVector& weights);

/// Total horizon cost of an input sequence rolled out from x0. `reference`
/// must hold horizon_steps + 1 nodes.
double sequence_cost(const RelativeState& x0,
                     std::span<const ReferenceSample> reference,
                     std::span<const ControlInput> inputs,
                     const NonInertialQuantities& n, const MpcConfig& cfg);

/// Input sequence of a previous solution advanced by `elapsed` seconds, with
/// linear interpolation between nodes and the last input held.
std::vector<ControlInput> shift_inputs(const MpcSolution& previous,
                                       double elapsed, double dt);

/// Box-constrained iterative LQR over an RK4 single-shooting rollout.
///
/// `reference` supplies the nodes 0..horizon_steps; shorter references are
/// padded with their last element. The returned inputs always satisfy the
/// box, the predicted states are the exact rollout, and the cost never
/// exceeds the all-hover sequence. A non-finite rollout yields the hover
/// sequence with converged = false.
MpcSolution solve(const RelativeState& x0,
                  std::span<const ReferenceSample> reference,
                  const NonInertialQuantities& n, const MpcConfig& cfg,
                  const std::optional<std::vector<ControlInput>>& warm_start =
                      std::nullopt);

/// Convenience overload: the reference window starts at the trajectory's
/// planning instant.
MpcSolution solve(const RelativeState& x0, const ReferenceTrajectory& traj,
                  const NonInertialQuantities& n, const MpcConfig& cfg,
                  const std::optional<std::vector<ControlInput>>& warm_start =
                      std::nullopt);

}  // namespace coni

#endif  // CONI_MPC_HPP_
