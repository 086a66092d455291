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

#include "coni/mpc.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Cholesky>

namespace coni {
namespace {

using InputSquare = Eigen::Matrix<double, kInputDim, kInputDim>;
using GainMatrix = Eigen::Matrix<double, kInputDim, kStateDim>;
using FreeMask = std::array<bool, kInputDim>;

constexpr double kMuInit = 1e-6;
constexpr double kMuMin = 1e-8;
constexpr double kMuMax = 1e8;
constexpr double kMuGrowth = 10.0;
constexpr std::array<double, 8> kStepSizes = {1.0,   0.5,   0.25,  0.125,
                                              0.0625, 0.03125, 0.01, 0.001};

StateVector reference_vector(const ReferenceSample& ref) {
  StateVector x;
  x << ref.p, ref.v, ref.q.w(), ref.q.x(), ref.q.y(), ref.q.z();
  return x;
}

// x - x_ref with the reference quaternion flipped into the same hemisphere.
StateVector state_error(const StateVector& x, const StateVector& ref) {
  StateVector e = x - ref;
  if (x.tail<4>().dot(ref.tail<4>()) < 0.0) e.tail<4>() = x.tail<4>() + ref.tail<4>();
  return e;
}

InputVector hover_vector() { return ControlInput::hover().to_vector(); }

InputVector clamp_input(const InputVector& u, const InputVector& lo,
                        const InputVector& hi) {
  return u.cwiseMax(lo).cwiseMin(hi);
}

struct BoxQpResult {
  InputVector x = InputVector::Zero();
  FreeMask free{};
  bool ok = false;
};

// Projected-Newton solve of min 0.5 x'Hx + g'x subject to lo <= x <= hi.
BoxQpResult box_qp(const InputSquare& h, const InputVector& g,
                   const InputVector& lo, const InputVector& hi,
                   const InputVector& x0) {
  BoxQpResult out;
  InputVector x = clamp_input(x0, lo, hi);
  const auto objective = [&](const InputVector& y) {
    return 0.5 * y.dot(h * y) + g.dot(y);
  };
  double value = objective(x);
  for (int iter = 0; iter < 50; ++iter) {
    const InputVector grad = g + h * x;
    int n_free = 0;
    for (int i = 0; i < kInputDim; ++i) {
      const bool at_lo = x(i) <= lo(i) && grad(i) > 0.0;
      const bool at_hi = x(i) >= hi(i) && grad(i) < 0.0;
      out.free[static_cast<std::size_t>(i)] = !(at_lo || at_hi);
      if (out.free[static_cast<std::size_t>(i)]) ++n_free;
    }
    if (n_free == 0) break;

    Eigen::MatrixXd h_ff(n_free, n_free);
    Eigen::VectorXd g_f(n_free);
    std::array<int, kInputDim> index{};
    for (int i = 0, a = 0; i < kInputDim; ++i) {
      if (out.free[static_cast<std::size_t>(i)]) index[static_cast<std::size_t>(a++)] = i;
    }
    for (int a = 0; a < n_free; ++a) {
      g_f(a) = grad(index[static_cast<std::size_t>(a)]);
      for (int b = 0; b < n_free; ++b) {
        h_ff(a, b) = h(index[static_cast<std::size_t>(a)], index[static_cast<std::size_t>(b)]);
      }
    }
    if (g_f.norm() < 1e-12) break;
    Eigen::LLT<Eigen::MatrixXd> llt(h_ff);
    if (llt.info() != Eigen::Success) return out;
    const Eigen::VectorXd step_f = -llt.solve(g_f);
    InputVector step = InputVector::Zero();
    for (int a = 0; a < n_free; ++a) step(index[static_cast<std::size_t>(a)]) = step_f(a);

    double alpha = 1.0;
    bool improved = false;
    while (alpha > 1e-10) {
      const InputVector candidate = clamp_input(x + alpha * step, lo, hi);
      const double candidate_value = objective(candidate);
      if (candidate_value < value - 1e-12 * std::abs(value) ||
          (candidate_value <= value && alpha == 1.0)) {
        const double change = (candidate - x).norm();
        x = candidate;
        value = candidate_value;
        improved = change > 1e-12;
        break;
      }
      alpha *= 0.5;
    }
    if (!improved) break;
  }
  // Final active set at the solution.
  const InputVector grad = g + h * x;
  for (int i = 0; i < kInputDim; ++i) {
    const bool at_lo = x(i) <= lo(i) && grad(i) >= 0.0;
    const bool at_hi = x(i) >= hi(i) && grad(i) <= 0.0;
    out.free[static_cast<std::size_t>(i)] = !(at_lo || at_hi);
  }
  out.x = x;
  out.ok = true;
  return out;
}

class Ilqr {
 public:
  Ilqr(const StateVector& x0, std::vector<StateVector> refs,
       const NonInertialQuantities& n, const MpcConfig& cfg)
      : x0_(x0), refs_(std::move(refs)), n_(n), cfg_(cfg),
        horizon_(static_cast<std::size_t>(cfg.horizon_steps)),
        lo_(cfg.lower()), hi_(cfg.upper()) {
    xs_.resize(horizon_ + 1);
    us_.resize(horizon_);
    a_.resize(horizon_);
    b_.resize(horizon_);
    k_.assign(horizon_, InputVector::Zero());
    gains_.assign(horizon_, GainMatrix::Zero());
  }

  // Rolls out `inputs` (clamped) and returns the cost, or NaN if the rollout
  // is not finite.
  double rollout(const std::vector<InputVector>& inputs,
                 std::vector<StateVector>* xs,
                 std::vector<InputVector>* us) const {
    (*xs)[0] = x0_;
    double cost = 0.0;
    for (std::size_t k = 0; k < horizon_; ++k) {
      (*us)[k] = clamp_input(inputs[k], lo_, hi_);
      cost += running_cost((*xs)[k], (*us)[k], k);
      (*xs)[k + 1] = step((*xs)[k], (*us)[k], n_, cfg_.dt);
    }
    cost += terminal_cost((*xs)[horizon_]);
    for (const auto& x : *xs) {
      if (!x.allFinite()) return std::numeric_limits<double>::quiet_NaN();
    }
    return std::isfinite(cost) ? cost : std::numeric_limits<double>::quiet_NaN();
  }

  double initialize(const std::vector<InputVector>& inputs) {
    cost_ = rollout(inputs, &xs_, &us_);
    return cost_;
  }

  // Runs until convergence or the iteration cap. Each accepted iterate has
  // strictly lower cost than the previous one.
  void optimize(MpcSolution* sol) {
    std::vector<StateVector> xs_try(horizon_ + 1);
    std::vector<InputVector> us_try(horizon_);
    double mu = kMuInit;
    sol->cost_history.push_back(cost_);
    for (int iter = 0; iter < cfg_.max_iterations; ++iter) {
      sol->iterations = iter + 1;
      for (std::size_t k = 0; k < horizon_; ++k) {
        step_with_jacobians(xs_[k], us_[k], n_, cfg_.dt, &a_[k], &b_[k]);
      }
      double dv1 = 0.0, dv2 = 0.0;
      while (!backward(mu, &dv1, &dv2)) {
        mu = std::max(mu * kMuGrowth, kMuInit);
        if (mu > kMuMax) return;
      }
      if (-dv1 < cfg_.convergence_tol * 1e-3 * std::max(1.0, cost_)) {
        sol->converged = true;
        return;
      }

      bool accepted = false;
      for (const double alpha : kStepSizes) {
        xs_try[0] = x0_;
        double cost = 0.0;
        for (std::size_t k = 0; k < horizon_; ++k) {
          const InputVector u = us_[k] + alpha * k_[k] +
                                gains_[k] * (xs_try[k] - xs_[k]);
          us_try[k] = clamp_input(u, lo_, hi_);
          cost += running_cost(xs_try[k], us_try[k], k);
          xs_try[k + 1] = step(xs_try[k], us_try[k], n_, cfg_.dt);
        }
        cost += terminal_cost(xs_try[horizon_]);
        if (std::isfinite(cost) && cost < cost_) {
          const double decrease = cost_ - cost;
          const double previous = cost_;
          xs_.swap(xs_try);
          us_.swap(us_try);
          cost_ = cost;
          sol->cost_history.push_back(cost_);
          accepted = true;
          mu = std::max(mu / kMuGrowth, kMuMin);
          if (decrease < cfg_.convergence_tol * previous) {
            sol->converged = true;
            return;
          }
          break;
        }
      }
      if (!accepted) {
        mu *= kMuGrowth;
        if (mu > kMuMax) {
          // No descent left at any regularization: a local minimum.
          sol->converged = true;
          return;
        }
      }
    }
  }

  double cost() const { return cost_; }
  const std::vector<StateVector>& states() const { return xs_; }
  const std::vector<InputVector>& inputs() const { return us_; }

 private:
  double running_cost(const StateVector& x, const InputVector& u,
                      std::size_t k) const {
    const StateVector e = state_error(x, refs_[k]);
    const InputVector du = u - hover_vector();
    return e.dot(cfg_.q_weights.cwiseProduct(e)) +
           du.dot(cfg_.r_weights.cwiseProduct(du));
  }

  double terminal_cost(const StateVector& x) const {
    const StateVector e = state_error(x, refs_[horizon_]);
    return e.dot(cfg_.q_final.cwiseProduct(e));
  }

  bool backward(double mu, double* dv1, double* dv2) {
    *dv1 = 0.0;
    *dv2 = 0.0;
    const StateVector e_n = state_error(xs_[horizon_], refs_[horizon_]);
    StateVector vx = 2.0 * cfg_.q_final.cwiseProduct(e_n);
    StateMatrix vxx = (2.0 * cfg_.q_final).asDiagonal();
    for (std::size_t kk = horizon_; kk-- > 0;) {
      const StateMatrix& a = a_[kk];
      const InputMatrix& b = b_[kk];
      const StateVector e = state_error(xs_[kk], refs_[kk]);
      const StateVector lx = 2.0 * cfg_.q_weights.cwiseProduct(e);
      const InputVector lu =
          2.0 * cfg_.r_weights.cwiseProduct(us_[kk] - hover_vector());

      const StateVector qx = lx + a.transpose() * vx;
      const InputVector qu = lu + b.transpose() * vx;
      const Eigen::Matrix<double, kStateDim, kStateDim> vxx_a = vxx * a;
      StateMatrix qxx = a.transpose() * vxx_a;
      qxx.diagonal() += 2.0 * cfg_.q_weights;
      InputSquare quu = b.transpose() * vxx * b;
      quu.diagonal() += 2.0 * cfg_.r_weights;
      const GainMatrix qux = b.transpose() * vxx_a;

      InputSquare quu_reg = quu;
      quu_reg.diagonal().array() += mu;
      const BoxQpResult qp = box_qp(quu_reg, qu, lo_ - us_[kk], hi_ - us_[kk],
                                    k_[kk]);
      if (!qp.ok) return false;

      GainMatrix gain = GainMatrix::Zero();
      int n_free = 0;
      for (bool f : qp.free) n_free += f ? 1 : 0;
      if (n_free > 0) {
        std::array<int, kInputDim> index{};
        for (int i = 0, j = 0; i < kInputDim; ++i) {
          if (qp.free[static_cast<std::size_t>(i)]) index[static_cast<std::size_t>(j++)] = i;
        }
        Eigen::MatrixXd h_ff(n_free, n_free);
        Eigen::MatrixXd qux_f(n_free, kStateDim);
        for (int i = 0; i < n_free; ++i) {
          qux_f.row(i) = qux.row(index[static_cast<std::size_t>(i)]);
          for (int j = 0; j < n_free; ++j) {
            h_ff(i, j) = quu_reg(index[static_cast<std::size_t>(i)], index[static_cast<std::size_t>(j)]);
          }
        }
        Eigen::LLT<Eigen::MatrixXd> llt(h_ff);
        if (llt.info() != Eigen::Success) return false;
        const Eigen::MatrixXd k_f = -llt.solve(qux_f);
        for (int i = 0; i < n_free; ++i) gain.row(index[static_cast<std::size_t>(i)]) = k_f.row(i);
      }
      k_[kk] = qp.x;
      gains_[kk] = gain;

      const InputVector& kff = k_[kk];
      *dv1 += kff.dot(qu);
      *dv2 += 0.5 * kff.dot(quu * kff);
      vx = qx + gain.transpose() * (quu * kff) + gain.transpose() * qu +
           qux.transpose() * kff;
      vxx = qxx + gain.transpose() * quu * gain + gain.transpose() * qux +
            qux.transpose() * gain;
      vxx = 0.5 * (vxx + vxx.transpose()).eval();
    }
    return true;
  }

  StateVector x0_;
  std::vector<StateVector> refs_;
  NonInertialQuantities n_;
  const MpcConfig& cfg_;
  std::size_t horizon_;
  InputVector lo_, hi_;
  std::vector<StateVector> xs_;
  std::vector<InputVector> us_;
  std::vector<StateMatrix> a_;
  std::vector<InputMatrix> b_;
  std::vector<InputVector> k_;
  std::vector<GainMatrix> gains_;
  double cost_ = 0.0;
};

std::vector<StateVector> padded_reference(
    std::span<const ReferenceSample> reference, std::size_t nodes) {
  if (reference.empty()) {
    throw std::invalid_argument("solve: empty reference");
  }
  std::vector<StateVector> refs;
  refs.reserve(nodes);
  for (std::size_t k = 0; k < nodes; ++k) {
    refs.push_back(reference_vector(reference[std::min(k, reference.size() - 1)]));
  }
  return refs;
}

void fill_solution(const std::vector<StateVector>& xs,
                   const std::vector<InputVector>& us, MpcSolution* sol) {
  sol->inputs.clear();
  sol->predicted_states.clear();
  for (const auto& u : us) sol->inputs.push_back(ControlInput::from_vector(u));
  for (const auto& x : xs) sol->predicted_states.push_back(RelativeState::from_vector(x));
}

}  // namespace

InputVector MpcConfig::lower() const {
  return InputVector(thrust_min, -omega_rp, -omega_rp, -omega_yaw);
}

InputVector MpcConfig::upper() const {
  return InputVector(thrust_max, omega_rp, omega_rp, omega_yaw);
}

void MpcConfig::validate() const {
  if (horizon_steps < 1) throw std::invalid_argument("horizon_steps must be >= 1");
  if (!(dt > 0.0 && dt <= 0.1)) throw std::invalid_argument("dt must lie in (0, 0.1]");
  if (!(thrust_min < kGravity && kGravity < thrust_max)) {
    throw std::invalid_argument("thrust bounds must bracket hover thrust");
  }
  if (!(omega_rp > 0.0) || !(omega_yaw > 0.0)) {
    throw std::invalid_argument("body-rate bounds must be positive");
  }
  if ((q_weights.array() < 0.0).any() || (q_final.array() < 0.0).any() ||
      (r_weights.array() < 0.0).any()) {
    throw std::invalid_argument("weights must be non-negative");
  }
  if (max_iterations < 0) throw std::invalid_argument("max_iterations must be >= 0");
}

double state_cost(const RelativeState& x, const ReferenceSample& x_ref,
                  const StateVector& weights) {
  const StateVector e = state_error(x.to_vector(), reference_vector(x_ref));
  return e.dot(weights.cwiseProduct(e));
}

double stage_cost(const RelativeState& x, const ReferenceSample& x_ref,
                  const ControlInput& u, const MpcConfig& cfg) {
  const InputVector du = u.to_vector() - hover_vector();
  return state_cost(x, x_ref, cfg.q_weights) + du.dot(cfg.r_weights.cwiseProduct(du));
}

double sequence_cost(const RelativeState& x0,
                     std::span<const ReferenceSample> reference,
                     std::span<const ControlInput> inputs,
                     const NonInertialQuantities& n, const MpcConfig& cfg) {
  const auto horizon = static_cast<std::size_t>(cfg.horizon_steps);
  if (inputs.size() < horizon) {
    throw std::invalid_argument("sequence_cost: too few inputs");
  }
  const std::vector<StateVector> refs = padded_reference(reference, horizon + 1);
  StateVector x = x0.to_vector();
  double cost = 0.0;
  for (std::size_t k = 0; k < horizon; ++k) {
    const InputVector u = inputs[k].to_vector();
    const StateVector e = state_error(x, refs[k]);
    const InputVector du = u - hover_vector();
    cost += e.dot(cfg.q_weights.cwiseProduct(e)) + du.dot(cfg.r_weights.cwiseProduct(du));
    x = step(x, u, n, cfg.dt);
  }
  const StateVector e = state_error(x, refs[horizon]);
  return cost + e.dot(cfg.q_final.cwiseProduct(e));
}

std::vector<ControlInput> shift_inputs(const MpcSolution& previous,
                                       double elapsed, double dt) {
  std::vector<ControlInput> out;
  const std::size_t count = previous.inputs.size();
  out.reserve(count);
  if (count == 0) return out;
  for (std::size_t k = 0; k < count; ++k) {
    const double s = (static_cast<double>(k) * dt + elapsed) / dt;
    const auto i = static_cast<std::size_t>(std::floor(s));
    if (i + 1 >= count) {
      out.push_back(previous.inputs.back());
      continue;
    }
    const double a = s - static_cast<double>(i);
    const InputVector u = (1.0 - a) * previous.inputs[i].to_vector() +
                          a * previous.inputs[i + 1].to_vector();
    out.push_back(ControlInput::from_vector(u));
  }
  return out;
}

MpcSolution solve(const RelativeState& x0,
                  std::span<const ReferenceSample> reference,
                  const NonInertialQuantities& n, const MpcConfig& cfg,
                  const std::optional<std::vector<ControlInput>>& warm_start) {
  const auto started = std::chrono::steady_clock::now();
  if (!all_finite(x0.p) || !all_finite(x0.v) || !all_finite(x0.q)) {
    throw std::invalid_argument("solve: non-finite initial state");
  }
  const auto horizon = static_cast<std::size_t>(cfg.horizon_steps);
  Ilqr ilqr(x0.to_vector(), padded_reference(reference, horizon + 1), n, cfg);

  MpcSolution sol;
  const std::vector<InputVector> hover(horizon, hover_vector());
  double cost = ilqr.initialize(hover);
  sol.hover_cost = cost;
  const auto finish = [&] {
    sol.solve_time = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - started)
                         .count();
    return sol;
  };
  if (std::isnan(cost)) {
    fill_solution(ilqr.states(), ilqr.inputs(), &sol);
    sol.cost = cost;
    return finish();
  }
  if (warm_start.has_value() && !warm_start->empty()) {
    std::vector<InputVector> warm(horizon);
    for (std::size_t k = 0; k < horizon; ++k) {
      warm[k] = (*warm_start)[std::min(k, warm_start->size() - 1)].to_vector();
    }
    std::vector<StateVector> xs(horizon + 1);
    std::vector<InputVector> us(horizon);
    const double warm_cost = ilqr.rollout(warm, &xs, &us);
    if (!std::isnan(warm_cost) && warm_cost < cost) cost = ilqr.initialize(warm);
  }
  ilqr.optimize(&sol);
  sol.cost = ilqr.cost();
  fill_solution(ilqr.states(), ilqr.inputs(), &sol);
  return finish();
}

MpcSolution solve(const RelativeState& x0, const ReferenceTrajectory& traj,
                  const NonInertialQuantities& n, const MpcConfig& cfg,
                  const std::optional<std::vector<ControlInput>>& warm_start) {
  const std::vector<ReferenceSample> window =
      reference_window(traj, 0.0, cfg.horizon_steps + 1, cfg.dt);
  return solve(x0, window, n, cfg, warm_start);
}

}  // namespace coni
