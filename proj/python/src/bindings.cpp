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

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "coni/bench.hpp"
#include "coni/dynamics.hpp"
#include "coni/modulation.hpp"
#include "coni/mpc.hpp"
#include "coni/sim/batch.hpp"
#include "coni/sim/scenario.hpp"
#include "coni/sim/trial.hpp"
#include "coni/trajectory.hpp"

namespace py = pybind11;
using namespace pybind11::literals;

namespace {

using PointMatrix = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;
using QuatVector = Eigen::Vector4d;

QuatVector quat_to_vec(const coni::Quat& q) { return QuatVector(q.w(), q.x(), q.y(), q.z()); }

coni::SampleCloud make_cloud(const PointMatrix& points, double point_radius) {
  coni::SampleCloud cloud;
  cloud.point_radius = point_radius;
  cloud.points.reserve(static_cast<std::size_t>(points.rows()));
  for (Eigen::Index i = 0; i < points.rows(); ++i) cloud.points.emplace_back(points.row(i).transpose());
  return cloud;
}

py::dict trajectory_dict(const coni::ReferenceTrajectory& traj) {
  const auto n = static_cast<Eigen::Index>(traj.samples.size());
  PointMatrix p(n, 3), v(n, 3);
  Eigen::Matrix<double, Eigen::Dynamic, 4, Eigen::RowMajor> q(n, 4);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& s = traj.samples[static_cast<std::size_t>(i)];
    p.row(i) = s.p.transpose();
    v.row(i) = s.v.transpose();
    q.row(i) = quat_to_vec(s.q).transpose();
  }
  return py::dict("p"_a = p, "v"_a = v, "q"_a = q, "dt"_a = traj.dt,
                  "collided"_a = traj.collided);
}

py::dict timing_dict(const coni::TimingStats& s) {
  return py::dict("mean"_a = s.mean, "p95"_a = s.p95, "min"_a = s.min, "max"_a = s.max,
                  "samples"_a = s.samples);
}

py::dict metrics_dict(const coni::sim::TrialMetrics& m) {
  py::dict d("success"_a = m.success, "min_clearance"_a = m.min_clearance,
             "tracking_rmse"_a = m.tracking_rmse, "final_goal_error"_a = m.final_goal_error,
             "mean_plan_time"_a = m.mean_plan_time, "max_plan_time"_a = m.max_plan_time,
             "mean_solve_time"_a = m.mean_solve_time, "max_solve_time"_a = m.max_solve_time,
             "mean_iterations"_a = m.mean_iterations, "plans"_a = m.plans,
             "solves"_a = m.solves, "simulated_time"_a = m.simulated_time,
             "aborted"_a = m.aborted, "landed"_a = m.landed, "diagnostic"_a = m.diagnostic);
  if (!m.trace.empty()) {
    const auto n = static_cast<Eigen::Index>(m.trace.size());
    Eigen::VectorXd time(n), clearance(n);
    PointMatrix rel(n, 3), goal(n, 3), ref(n, 3), uav(n, 3);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& r = m.trace[static_cast<std::size_t>(i)];
      time(i) = r.time;
      clearance(i) = r.clearance;
      rel.row(i) = r.relative.p.transpose();
      goal.row(i) = r.goal.transpose();
      ref.row(i) = r.reference.p.transpose();
      uav.row(i) = r.uav_world.p.transpose();
    }
    d["trace"] = py::dict("time"_a = time, "relative_p"_a = rel, "goal"_a = goal,
                          "reference_p"_a = ref, "uav_world_p"_a = uav,
                          "clearance"_a = clearance);
  }
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Relative quadrotor dynamics, modulation-based avoidance, MPC and simulation";
  m.attr("GRAVITY") = coni::kGravity;

  py::class_<coni::NonInertialQuantities>(m, "NonInertialQuantities")
      .def(py::init([](const coni::Vec3& a_imu, const coni::Vec3& omega_n,
                       const coni::Vec3& beta_n) {
             return coni::NonInertialQuantities{a_imu, omega_n, beta_n};
           }),
           "a_imu"_a = coni::Vec3(0, 0, coni::kGravity), "omega_n"_a = coni::Vec3::Zero(),
           "beta_n"_a = coni::Vec3::Zero())
      .def_readwrite("a_imu", &coni::NonInertialQuantities::a_imu)
      .def_readwrite("omega_n", &coni::NonInertialQuantities::omega_n)
      .def_readwrite("beta_n", &coni::NonInertialQuantities::beta_n)
      .def("is_degenerate", [](const coni::NonInertialQuantities& n) {
        return coni::is_degenerate(n);
      });

  py::class_<coni::ModulationParams>(m, "ModulationParams")
      .def(py::init<>())
      .def_readwrite("robot_radius", &coni::ModulationParams::robot_radius)
      .def_readwrite("dist_scale", &coni::ModulationParams::dist_scale)
      .def_readwrite("dist_power", &coni::ModulationParams::dist_power)
      .def_readwrite("max_weight", &coni::ModulationParams::max_weight)
      .def_readwrite("align_power", &coni::ModulationParams::align_power);

  py::class_<coni::TrajectoryParams>(m, "TrajectoryParams")
      .def(py::init<>())
      .def_readwrite("k_p", &coni::TrajectoryParams::k_p)
      .def_readwrite("dt", &coni::TrajectoryParams::dt)
      .def_readwrite("horizon", &coni::TrajectoryParams::horizon)
      .def_readwrite("theta_low", &coni::TrajectoryParams::theta_low);

  py::class_<coni::MpcConfig>(m, "MpcConfig")
      .def(py::init<>())
      .def_readwrite("horizon_steps", &coni::MpcConfig::horizon_steps)
      .def_readwrite("dt", &coni::MpcConfig::dt)
      .def_readwrite("q_weights", &coni::MpcConfig::q_weights)
      .def_readwrite("r_weights", &coni::MpcConfig::r_weights)
      .def_readwrite("q_final", &coni::MpcConfig::q_final)
      .def_readwrite("thrust_min", &coni::MpcConfig::thrust_min)
      .def_readwrite("thrust_max", &coni::MpcConfig::thrust_max)
      .def_readwrite("omega_rp", &coni::MpcConfig::omega_rp)
      .def_readwrite("omega_yaw", &coni::MpcConfig::omega_yaw)
      .def_readwrite("max_iterations", &coni::MpcConfig::max_iterations)
      .def_readwrite("convergence_tol", &coni::MpcConfig::convergence_tol);

  m.def("flow",
        [](const coni::StateVector& x, const coni::InputVector& u,
           const coni::NonInertialQuantities& n) { return coni::flow(x, u, n); },
        "Time derivative of the packed state [p, v, qw, qx, qy, qz].", "x"_a, "u"_a,
        "frame"_a = coni::NonInertialQuantities{});

  m.def("step",
        [](const coni::StateVector& x, const coni::InputVector& u, double dt,
           const coni::NonInertialQuantities& n) {
          return coni::integrate_rk4(coni::RelativeState::from_vector(x),
                                     coni::ControlInput::from_vector(u), n, dt)
              .to_vector();
        },
        "One RK4 step of the relative dynamics with renormalized attitude.", "x"_a, "u"_a,
        "dt"_a, "frame"_a = coni::NonInertialQuantities{});

  m.def("reference_direction",
        [](const coni::Vec3& xi, const PointMatrix& points, const coni::ModulationParams& p) {
          const auto r = coni::weighted_reference_direction(xi, make_cloud(points, 0.05), p);
          return py::make_tuple(r.r, r.collided);
        },
        "Weighted reference direction and collision flag.", "xi"_a, "points"_a,
        "params"_a = coni::ModulationParams{});

  m.def("basis_matrix", &coni::gen_basis_matrix, "Householder basis with r as first axis.",
        "r"_a);

  m.def("modulation_matrix",
        [](const coni::Vec3& xi, const coni::Vec3& v_init, const PointMatrix& points,
           const coni::ModulationParams& p) {
          const auto res = coni::modulation_matrix(xi, v_init, make_cloud(points, 0.05), p);
          return py::dict("r"_a = res.r, "basis"_a = res.basis, "diagonal"_a = res.diagonal,
                          "matrix"_a = res.matrix,
                          "eigenvalues"_a = py::make_tuple(res.eigenvalues.radial,
                                                           res.eigenvalues.tangential),
                          "collided"_a = res.collided);
        },
        "xi"_a, "v_init"_a, "points"_a, "params"_a = coni::ModulationParams{});

  m.def("modulate",
        [](const coni::Vec3& xi, const coni::Vec3& v_init, const PointMatrix& points,
           const coni::ModulationParams& p) {
          return coni::modulate(xi, v_init, make_cloud(points, 0.05), p);
        },
        "Modulated velocity M(xi) v_init.", "xi"_a, "v_init"_a, "points"_a,
        "params"_a = coni::ModulationParams{});

  m.def("gen_trajectory",
        [](const coni::Vec3& p_now, const PointMatrix& points, const coni::Vec3& goal,
           const coni::NonInertialQuantities& n, const coni::TrajectoryParams& params,
           const coni::ModulationParams& mod) {
          return trajectory_dict(
              coni::gen_trajectory(p_now, make_cloud(points, 0.05), n, goal, params, mod));
        },
        "Reference positions, velocities and attitudes (w, x, y, z) toward goal.", "p_now"_a,
        "points"_a, "goal"_a, "frame"_a = coni::NonInertialQuantities{},
        "params"_a = coni::TrajectoryParams{}, "mod_params"_a = coni::ModulationParams{});

  m.def("mpc_solve",
        [](const coni::StateVector& x0, const PointMatrix& ref_p,
           const coni::NonInertialQuantities& n, const coni::MpcConfig& cfg) {
          std::vector<coni::ReferenceSample> ref(static_cast<std::size_t>(ref_p.rows()));
          for (Eigen::Index i = 0; i < ref_p.rows(); ++i) {
            ref[static_cast<std::size_t>(i)].p = ref_p.row(i).transpose();
          }
          const auto sol = coni::solve(coni::RelativeState::from_vector(x0), ref, n, cfg);
          Eigen::Matrix<double, Eigen::Dynamic, 4, Eigen::RowMajor> u(
              static_cast<Eigen::Index>(sol.inputs.size()), 4);
          for (std::size_t i = 0; i < sol.inputs.size(); ++i) {
            u.row(static_cast<Eigen::Index>(i)) = sol.inputs[i].to_vector().transpose();
          }
          Eigen::Matrix<double, Eigen::Dynamic, 10, Eigen::RowMajor> xs(
              static_cast<Eigen::Index>(sol.predicted_states.size()), 10);
          for (std::size_t i = 0; i < sol.predicted_states.size(); ++i) {
            xs.row(static_cast<Eigen::Index>(i)) = sol.predicted_states[i].to_vector().transpose();
          }
          return py::dict("inputs"_a = u, "states"_a = xs, "cost"_a = sol.cost,
                          "hover_cost"_a = sol.hover_cost, "iterations"_a = sol.iterations,
                          "converged"_a = sol.converged, "solve_time"_a = sol.solve_time);
        },
        "Box-constrained tracking MPC toward hover references at the given positions.",
        "x0"_a, "reference_p"_a, "frame"_a = coni::NonInertialQuantities{},
        "config"_a = coni::MpcConfig{});

  m.def("validate_scenario",
        [](const std::string& text, const std::vector<std::string>& overrides) {
          return coni::sim::scenario_to_json(coni::sim::parse_scenario(text, overrides));
        },
        "Parses and validates a scenario document; returns it with defaults filled in.",
        "text"_a, "overrides"_a = std::vector<std::string>{});

  m.def("run_trial",
        [](const std::string& text, const std::vector<std::string>& overrides,
           bool record_trace) {
          const auto spec = coni::sim::parse_scenario(text, overrides);
          coni::sim::TrialMetrics metrics;
          {
            py::gil_scoped_release release;
            metrics = coni::sim::run_trial(spec, {.record_trace = record_trace});
          }
          return metrics_dict(metrics);
        },
        "Closed-loop trial of a scenario document.", "text"_a,
        "overrides"_a = std::vector<std::string>{}, "record_trace"_a = false);

  m.def("run_batch",
        [](const std::string& text, int trials, const std::vector<std::string>& densities,
           const std::vector<std::string>& speeds, const std::vector<std::string>& tasks,
           int workers) {
          const auto base = coni::sim::parse_scenario(text);
          auto grid = coni::sim::BatchGrid::table_one(trials).select(densities, speeds, tasks);
          grid.base_seed = base.seed;
          coni::sim::BatchTable table;
          {
            py::gil_scoped_release release;
            coni::sim::BatchOptions options;
            options.workers = workers;
            table = coni::sim::run_batch(base, grid, options);
          }
          py::list cells;
          for (const auto& c : table.cells) {
            cells.append(py::dict("task"_a = c.task, "density"_a = c.density,
                                  "speed"_a = c.speed, "trials"_a = c.trials,
                                  "successes"_a = c.successes, "errors"_a = c.errors,
                                  "success_rate"_a = c.success_rate()));
          }
          return cells;
        },
        "Success-rate cells over density x speed x task.", "text"_a = "{}", "trials"_a = 1,
        "densities"_a = std::vector<std::string>{}, "speeds"_a = std::vector<std::string>{},
        "tasks"_a = std::vector<std::string>{}, "workers"_a = 1);

  m.def("bench_trajectory",
        [](int n, int horizon, int repeats, std::uint64_t seed) {
          return timing_dict(coni::bench_trajectory(n, horizon, repeats, seed));
        },
        "n"_a = 4000, "horizon"_a = 20, "repeats"_a = 20, "seed"_a = 0);

  m.def("bench_mpc",
        [](int horizon, int repeats, std::uint64_t seed) {
          return timing_dict(coni::bench_mpc(horizon, repeats, seed));
        },
        "horizon"_a = 20, "repeats"_a = 20, "seed"_a = 0);

  py::register_exception<coni::sim::ScenarioError>(m, "ScenarioError", PyExc_ValueError);
}
