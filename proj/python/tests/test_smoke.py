# Copyright 2026 The coni Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import json
import math

import numpy as np
import pytest

import coni

HOVER_STATE = np.array([0, 0, 0, 0, 0, 0, 1, 0, 0, 0], dtype=float)
HOVER_INPUT = np.array([coni.GRAVITY, 0, 0, 0], dtype=float)


def test_hover_is_an_equilibrium_of_the_world_frame():
    assert np.allclose(coni.flow(HOVER_STATE, HOVER_INPUT), 0.0)
    assert coni.NonInertialQuantities().is_degenerate()


def test_step_matches_free_fall_without_thrust():
    x = HOVER_STATE.copy()
    for _ in range(100):
        x = coni.step(x, [0, 0, 0, 0], 0.01)
    assert x[2] == pytest.approx(-0.5 * coni.GRAVITY, abs=1e-9)
    assert np.linalg.norm(x[6:]) == pytest.approx(1.0)


def test_rotating_frame_adds_centrifugal_acceleration():
    frame = coni.NonInertialQuantities(omega_n=[0, 0, 0.5])
    x = HOVER_STATE.copy()
    x[0] = 1.0
    xdot = coni.flow(x, HOVER_INPUT, frame)
    assert xdot[3] == pytest.approx(0.25)


def test_reference_direction_single_point():
    params = coni.ModulationParams()
    params.dist_power = 1.0
    r, collided = coni.reference_direction([1, 0, 0], np.zeros((1, 3)), params)
    assert not collided
    assert np.allclose(r, [0.5 / 0.7, 0, 0])


def test_basis_matrix_examples():
    assert np.allclose(coni.basis_matrix([2, 0, 0]), np.diag([1, -1, -1]))
    assert np.allclose(coni.basis_matrix([0, 1, 0]), [[0, 1, 0], [1, 0, 0], [0, 0, 1]])


def test_modulation_matrix_eigenstructure():
    rng = np.random.default_rng(3)
    points = rng.normal(size=(50, 3)) + np.array([2.0, 0.0, 0.0])
    res = coni.modulation_matrix([0, 0, 0], [1, 0.2, 0], points)
    m = res["matrix"]
    lam_r, lam_t = res["eigenvalues"]
    r_hat = res["r"] / np.linalg.norm(res["r"])
    assert np.allclose(m, m.T, atol=1e-12)
    assert np.allclose(m @ r_hat, lam_r * r_hat, atol=1e-9)
    assert np.linalg.det(m) == pytest.approx(lam_r * lam_t**2, abs=1e-9)


def test_empty_cloud_leaves_velocity_unchanged():
    v = coni.modulate([0, 0, 1], [0.3, -0.2, 0.1], np.zeros((0, 3)))
    assert np.allclose(v, [0.3, -0.2, 0.1])


def test_trajectory_recurrence_and_saturation():
    traj = coni.gen_trajectory([0, 0, 0], np.zeros((0, 3)), [10, 0, 0])
    p, v = traj["p"], traj["v"]
    assert p.shape == (20, 3)
    assert p[19, 0] == pytest.approx(2.0, abs=1e-9)
    assert np.all(p[1:] == p[:-1] + v[:-1] * traj["dt"])
    assert np.allclose(np.linalg.norm(traj["q"], axis=1), 1.0)


def test_mpc_respects_bounds_and_beats_hover():
    cfg = coni.MpcConfig()
    x0 = HOVER_STATE.copy()
    x0[0] = 0.5
    sol = coni.mpc_solve(x0, np.zeros((cfg.horizon_steps + 1, 3)), config=cfg)
    u = sol["inputs"]
    assert u.shape == (cfg.horizon_steps, 4)
    assert np.all(u[:, 0] >= cfg.thrust_min) and np.all(u[:, 0] <= cfg.thrust_max)
    assert np.all(np.abs(u[:, 1:3]) <= cfg.omega_rp)
    assert np.all(np.abs(u[:, 3]) <= cfg.omega_yaw)
    assert sol["cost"] <= sol["hover_cost"] + 1e-9


def test_scenario_validation_names_the_field():
    bad = json.dumps({"obstacles": [{"kind": "sphere", "center": [5, 0, 1], "radius": -1}]})
    with pytest.raises(coni.ScenarioError, match=r"obstacles\[0\]\.radius"):
        coni.validate_scenario(bad)
    with pytest.raises(ValueError, match="unknown field"):
        coni.validate_scenario('{"bogus": 1}')
    normalized = json.loads(coni.validate_scenario("{}", ["task.kind=orbit"]))
    assert normalized["task"]["kind"] == "orbit"


def test_static_trial_tracks_the_offset():
    result = coni.run_trial(json.dumps({"duration": 4.0, "uav_start": [0.6, 0.2, 0.8]}),
                            record_trace=True)
    assert result["success"]
    assert math.isinf(result["min_clearance"])
    assert result["final_goal_error"] < 0.05
    trace = result["trace"]
    assert trace["relative_p"].shape[1] == 3
    assert trace["time"][0] == 0.0


def test_trial_is_deterministic():
    doc = json.dumps({"duration": 3.0, "seed": 7, "random_obstacles": {"count": 100},
                      "ugv_program": {"kind": "random_goals", "v_max": 1.0, "omega_max": 1.0}})
    a = coni.run_trial(doc)
    b = coni.run_trial(doc)
    for key in ("success", "min_clearance", "tracking_rmse", "final_goal_error", "simulated_time"):
        assert a[key] == b[key]


def test_smoke_batch_has_six_cells_per_task():
    cells = coni.run_batch('{"duration": 1.0}', trials=1, tasks=["LF"])
    assert len(cells) == 6
    assert all(c["trials"] == 1 for c in cells)


def test_bench_reports_timings():
    stats = coni.bench_trajectory(n=400, horizon=5, repeats=3)
    assert len(stats["samples"]) == 3
    assert 0.0 < stats["mean"] <= stats["max"]
