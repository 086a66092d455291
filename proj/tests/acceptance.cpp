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

// Acceptance checks. Prints one line per criterion and exits non-zero when
// any criterion fails. Pass criterion numbers as arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <optional>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "coni/bench.hpp"
#include "coni/dynamics.hpp"
#include "coni/modulation.hpp"
#include "coni/mpc.hpp"
#include "coni/sim/batch.hpp"
#include "coni/sim/scenario.hpp"
#include "coni/sim/trial.hpp"
#include "coni/trajectory.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

namespace coni {
namespace {

using testing::Rng;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

// 1. Relative dynamics in a frame at rest reproduce a closed-form world-frame
// quadrotor over 2 s of random piecewise-constant inputs.
Outcome degenerate_dynamics() {
  Rng rng(1001);
  const NonInertialQuantities n = NonInertialQuantities::world();
  if (!is_degenerate(n)) return {false, "world frame not reported as degenerate"};
  const double dt = 0.001;
  double worst = 0.0;
  for (int seq = 0; seq < 100; ++seq) {
    RelativeState x;
    x.p = rng.vec(-2.0, 2.0);
    x.v = rng.vec(-1.0, 1.0);
    x.q = axis_angle(rng.unit(), rng.uniform(0.0, 0.8));
    oracle::WorldQuadrotor w;
    w.p = x.p;
    w.v = x.v;
    w.rot = x.q.toRotationMatrix();
    ControlInput u;
    for (int k = 0; k < 2000; ++k) {
      if (k % 10 == 0) {
        u.thrust = rng.uniform(4.0, 16.0);
        u.omega = rng.vec(-2.0, 2.0);
      }
      x = integrate_rk4(x, u, n, dt);
      w.advance(u.thrust, u.omega, dt);
      worst = std::max(worst, (x.p - w.p).norm());
    }
  }
  return {worst < 1e-6, fmt("max position error %.3g m over 100 sequences of 2 s", worst)};
}

// 2. Modulation eigenstructure against independent formulas.
Outcome modulation_eigenstructure() {
  Rng rng(1002);
  const ModulationParams params;
  double worst = 0.0;
  int checked = 0, far = 0, far_bad = 0;
  for (int k = 0; k < 1000; ++k) {
    const Vec3 xi = rng.vec(-2.0, 2.0);
    const bool far_field = k % 5 == 0;
    std::vector<Vec3> pts;
    const int count = rng.integer(1, 50);
    for (int i = 0; i < count; ++i) {
      const double d = far_field ? rng.uniform(8.0, 20.0) : rng.uniform(0.35, 4.0);
      pts.push_back(xi + d * rng.unit());
    }
    SampleCloud cloud;
    cloud.points = pts;
    const Vec3 v = rng.vec(-1.5, 1.5);
    const ModulationResult m = modulation_matrix(xi, v, cloud, params);
    const Vec3 r = oracle::reference_direction(xi, pts, params.robot_radius, params.dist_scale,
                                               params.dist_power, params.max_weight);
    const Mat3& mat = m.matrix;
    double err = (m.r - r).norm();
    if (r.norm() > 0.0) {
      const oracle::Lambdas l = oracle::eigenvalues(r, v, params.align_power);
      const Vec3 rh = r.normalized();
      const Vec3 t1 = rh.unitOrthogonal();
      const Vec3 t2 = rh.cross(t1);
      err = std::max(err, (mat - mat.transpose()).cwiseAbs().maxCoeff());
      err = std::max(err, (mat * rh - l.radial * rh).norm());
      err = std::max(err, (mat * t1 - l.tangential * t1).norm());
      err = std::max(err, (mat * t2 - l.tangential * t2).norm());
      err = std::max(err, std::abs(mat.determinant() - l.radial * l.tangential * l.tangential));
      ++checked;
    }
    worst = std::max(worst, err);
    if (r.norm() < 0.05) {
      ++far;
      const double dev = (mat - Mat3::Identity()).cwiseAbs().rowwise().sum().maxCoeff();
      if (!(dev < 0.1)) ++far_bad;
    }
  }
  // Deviation from identity shrinks monotonically as a lone sample recedes.
  bool monotone = true;
  double previous = std::numeric_limits<double>::infinity();
  for (double d = 3.0; d <= 60.0; d += 0.25) {
    SampleCloud cloud;
    cloud.points = {Vec3(d, 0.3, -0.2)};
    const double dev = (modulation_matrix(Vec3::Zero(), Vec3(0.4, -0.7, 0.2), cloud, params)
                            .matrix -
                        Mat3::Identity())
                           .norm();
    if (dev > previous + 1e-12) monotone = false;
    previous = dev;
  }
  const bool pass = worst < 1e-9 && far > 0 && far_bad == 0 && monotone;
  return {pass, fmt("max deviation %.3g over %d instances; far field %d/%d within 0.1%s", worst,
                    checked, far - far_bad, far, monotone ? ", monotone" : ", NOT monotone")};
}

// 3. Static spheres on the straight path in a frame at rest.
Outcome impenetrability() {
  Rng rng(1003);
  int ok = 0;
  double worst_clearance = std::numeric_limits<double>::infinity();
  double worst_goal = 0.0;
  std::string first_failure;
  for (int k = 0; k < 50; ++k) {
    sim::ScenarioSpec s;
    s.name = "spheres#" + std::to_string(k);
    s.seed = static_cast<std::uint64_t>(k);
    s.duration = 40.0;
    s.stop_on_failure = false;
    s.uav_start = Vec3(0.0, 0.0, 1.0);
    s.task = sim::Task::leader_follow(Vec3(6.0, 0.0, 1.0));
    s.planner.k_p = 0.5;
    s.modulation.dist_scale = 0.3;
    const int spheres = rng.integer(1, 3);
    for (int i = 0; i < spheres; ++i) {
      s.obstacles.push_back(sim::Obstacle::sphere(
          Vec3(rng.uniform(1.5, 4.5), rng.uniform(-0.3, 0.3), 1.0 + rng.uniform(-0.2, 0.2)),
          rng.uniform(0.2, 0.5)));
    }
    const sim::TrialMetrics m = sim::run_trial(s);
    const bool pass = m.success && m.min_clearance > 0.1 && m.final_goal_error < 0.1;
    ok += pass ? 1 : 0;
    worst_clearance = std::min(worst_clearance, m.min_clearance);
    worst_goal = std::max(worst_goal, m.final_goal_error);
    if (!pass && first_failure.empty()) {
      first_failure = fmt("; first failure %s clearance %.3f goal error %.3f", s.name.c_str(),
                          m.min_clearance, m.final_goal_error);
    }
  }
  return {ok == 50, fmt("%d/50 scenarios, min clearance %.3f m, max goal error %.3f m%s", ok,
                        worst_clearance, worst_goal, first_failure.c_str())};
}

// 4. Trajectory recurrence, attitude norm and thrust cone.
Outcome trajectory_consistency() {
  Rng rng(1004);
  int bad_recurrence = 0, bad_norm = 0, bad_cone = 0, samples = 0;
  for (int k = 0; k < 1000; ++k) {
    SampleCloud cloud;
    const int count = rng.integer(0, 200);
    for (int i = 0; i < count; ++i) cloud.points.push_back(rng.vec(-5.0, 5.0));
    NonInertialQuantities n;
    n.omega_n = rng.vec(-0.8, 0.8);
    n.beta_n = rng.vec(-0.3, 0.3);
    n.a_imu = Vec3(0.0, 0.0, kGravity) + rng.vec(-2.0, 2.0);
    TrajectoryParams tp;
    tp.k_p = rng.uniform(0.1, 3.0);
    tp.dt = rng.uniform(0.02, 0.2);
    tp.horizon = rng.integer(1, 40);
    tp.theta_low = rng.uniform(0.3, 1.3);
    const ReferenceTrajectory t = gen_trajectory(rng.vec(-4.0, 4.0), cloud, n,
                                                 rng.vec(-4.0, 4.0), tp, ModulationParams{});
    const ReferenceSample* prev = &t.start;
    for (const ReferenceSample& s : t.samples) {
      ++samples;
      const Vec3 next = prev->p + prev->v * tp.dt;
      if (std::memcmp(next.data(), s.p.data(), 3 * sizeof(double)) != 0) ++bad_recurrence;
      if (std::abs(s.q.norm() - 1.0) > 1e-12) ++bad_norm;
      const Vec3 z = to_matrix(s.q).col(2);
      if (z.z() < std::sin(tp.theta_low) - 1e-12) ++bad_cone;
      prev = &s;
    }
  }
  const bool pass = bad_recurrence == 0 && bad_norm == 0 && bad_cone == 0;
  return {pass, fmt("%d samples: %d recurrence, %d norm, %d cone violations", samples,
                    bad_recurrence, bad_norm, bad_cone)};
}

// 5. Closed-loop tracking.
Outcome closed_loop_tracking() {
  // Station keeping above a ground vehicle spinning at 0.5 rad/s.
  sim::ScenarioSpec s;
  s.name = "station-keeping";
  s.duration = 20.0;
  s.ugv_program = sim::UgvProgram::rotate(0.5);
  s.task = sim::Task::leader_follow(Vec3(1.0, 0.5, 0.8));
  sim::TrialOptions opt;
  opt.record_trace = true;
  const sim::TrialMetrics m = sim::run_trial(s, opt);
  double steady = 0.0;
  for (const sim::TraceRow& row : m.trace) {
    if (row.time >= 5.0) steady = std::max(steady, (row.relative.p - row.goal).norm());
  }

  // Hover recovery from a 0.5 m offset under MPC alone.
  const MpcConfig cfg;
  const NonInertialQuantities n = NonInertialQuantities::world();
  const Vec3 goal(1.0, 0.0, 0.5);
  std::vector<ReferenceSample> ref(static_cast<std::size_t>(cfg.horizon_steps + 1));
  for (auto& r : ref) r.p = goal;
  oracle::WorldQuadrotor w;
  w.p = goal + 0.5 * Vec3(1.0, -1.0, 1.0).normalized();
  std::optional<std::vector<ControlInput>> warm;
  double settle = std::numeric_limits<double>::infinity();
  for (int tick = 0; tick < 500; ++tick) {
    const double t = tick * 0.01;
    const double err = (w.p - goal).norm();
    if (err < 0.05) {
      if (!std::isfinite(settle)) settle = t;
    } else {
      settle = std::numeric_limits<double>::infinity();
    }
    RelativeState x;
    x.p = w.p;
    x.v = w.v;
    x.q = from_matrix(w.rot);
    const MpcSolution sol = solve(x, ref, n, cfg, warm);
    warm = shift_inputs(sol, 0.01, cfg.dt);
    for (int i = 0; i < 10; ++i) w.advance(sol.inputs.front().thrust, sol.inputs.front().omega,
                                           0.001);
  }
  const bool pass = m.success && steady < 0.1 && settle <= 3.0;
  return {pass, fmt("rotating station keeping max error %.4f m after 5 s; hover offset 0.5 m "
                    "settles below 0.05 m at %.2f s",
                    steady, settle)};
}

// 6. Success-rate orderings of the density x speed x task table.
Outcome table_orderings() {
  const sim::BatchGrid grid = sim::BatchGrid::table_one(50);
  sim::BatchOptions opt;
  opt.workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const sim::BatchTable table = sim::run_batch(sim::ScenarioSpec{}, grid, opt);
  const auto checks = sim::table_orderings(table, grid, 0.9);
  int holds = 0, significant = 0;
  std::string broken;
  for (const auto& c : checks) {
    holds += c.holds ? 1 : 0;
    significant += c.significant ? 1 : 0;
    if (!c.holds) {
      broken += fmt("; %s %d/%d < %s %d/%d", c.higher.c_str(), c.higher_successes,
                    c.higher_trials, c.lower.c_str(), c.lower_successes, c.lower_trials);
    }
  }
  std::string rates;
  for (const auto& c : table.cells) {
    rates += fmt(" %s/%s/%s=%d", c.task.c_str(), c.density.c_str(), c.speed.c_str(), c.successes);
  }
  const bool pass = !checks.empty() && holds == static_cast<int>(checks.size());
  return {pass, fmt("%d/%zu orderings hold at 90%% (%d significant); successes of 50:", holds,
                    checks.size(), significant) +
                    rates + broken};
}

// 7. Timing.
Outcome performance() {
  const TimingStats big = bench_trajectory(4000, 20, 100, 7);
  const TimingStats small = bench_trajectory(400, 20, 400, 7);
  const TimingStats mpc = bench_mpc(20, 200, 7);
  const double ratio = big.mean / small.mean;
  const bool pass = big.mean < 10e-3 && ratio >= 7.0 && ratio <= 13.0 && mpc.mean < 5e-3;
  return {pass, fmt("trajectory n=4000 h=20 mean %.3f ms, n=400 ratio %.2f, MPC N=20 mean "
                    "%.3f ms",
                    big.mean * 1e3, ratio, mpc.mean * 1e3)};
}

// 8. MPC contracts and warm-start effect.
Outcome mpc_contracts() {
  Rng rng(1008);
  const MpcConfig cfg;
  const InputVector lo = cfg.lower(), hi = cfg.upper();
  int box_violations = 0, dominance_violations = 0;
  for (int k = 0; k < 200; ++k) {
    NonInertialQuantities n;
    n.omega_n = Vec3(0.0, 0.0, rng.uniform(-1.0, 1.0));
    n.a_imu = Vec3(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), kGravity);
    RelativeState x0;
    x0.p = rng.vec(-3.0, 3.0);
    x0.v = rng.vec(-2.0, 2.0);
    x0.q = axis_angle(rng.unit(), rng.uniform(0.0, 1.0));
    std::vector<ReferenceSample> ref(static_cast<std::size_t>(cfg.horizon_steps + 1));
    const Vec3 target = rng.vec(-3.0, 3.0);
    for (auto& r : ref) r.p = target;
    const MpcSolution s = solve(x0, ref, n, cfg);
    for (const ControlInput& u : s.inputs) {
      const InputVector v = u.to_vector();
      if ((v.array() < lo.array()).any() || (v.array() > hi.array()).any()) ++box_violations;
    }
    if (s.cost > s.hover_cost) ++dominance_violations;
  }

  // 100-step closed loop along a moving reference, solving every state both
  // cold and warm.
  NonInertialQuantities n;
  n.omega_n = Vec3(0.0, 0.0, 0.5);
  RelativeState x;
  x.p = Vec3(1.5, 0.0, 0.5);
  std::optional<std::vector<ControlInput>> warm;
  long cold_iters = 0, warm_iters = 0;
  for (int step = 0; step < 100; ++step) {
    const double t = step * 0.01;
    std::vector<ReferenceSample> ref(static_cast<std::size_t>(cfg.horizon_steps + 1));
    for (std::size_t i = 0; i < ref.size(); ++i) {
      const double tau = t + cfg.dt * static_cast<double>(i);
      ref[i].p = Vec3(std::cos(0.5 * tau), std::sin(0.5 * tau), 0.5);
      ref[i].v = Vec3(-0.5 * std::sin(0.5 * tau), 0.5 * std::cos(0.5 * tau), 0.0);
    }
    const MpcSolution cold = solve(x, ref, n, cfg);
    const MpcSolution hot = solve(x, ref, n, cfg, warm);
    cold_iters += cold.iterations;
    warm_iters += hot.iterations;
    warm = shift_inputs(hot, 0.01, cfg.dt);
    for (int i = 0; i < 10; ++i) x = integrate_rk4(x, hot.inputs.front(), n, 0.001);
  }
  const double ratio = static_cast<double>(warm_iters) / static_cast<double>(cold_iters);
  const bool pass = box_violations == 0 && dominance_violations == 0 && ratio < 0.8;
  return {pass, fmt("200 problems: %d box, %d dominance violations; warm/cold iterations "
                    "%ld/%ld = %.3f",
                    box_violations, dominance_violations, warm_iters, cold_iters, ratio)};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace
}  // namespace coni

int main(int argc, char** argv) {
  using namespace coni;
  const std::vector<Criterion> criteria = {
      {1, "degenerate-dynamics-oracle", degenerate_dynamics},
      {2, "modulation-eigenstructure", modulation_eigenstructure},
      {3, "impenetrability", impenetrability},
      {4, "trajectory-self-consistency", trajectory_consistency},
      {5, "closed-loop-tracking", closed_loop_tracking},
      {6, "success-rate-orderings", table_orderings},
      {7, "performance", performance},
      {8, "mpc-contracts", mpc_contracts},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  int failures = 0;
  for (const Criterion& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] %d %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
