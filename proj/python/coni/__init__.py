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

"""Obstacle avoidance for a quadrotor controlled in a ground vehicle's frame."""

from ._core import (
    GRAVITY,
    ModulationParams,
    MpcConfig,
    NonInertialQuantities,
    ScenarioError,
    TrajectoryParams,
    basis_matrix,
    bench_mpc,
    bench_trajectory,
    flow,
    gen_trajectory,
    modulate,
    modulation_matrix,
    mpc_solve,
    reference_direction,
    run_batch,
    run_trial,
    step,
    validate_scenario,
)

__all__ = [
    "GRAVITY",
    "ModulationParams",
    "MpcConfig",
    "NonInertialQuantities",
    "ScenarioError",
    "TrajectoryParams",
    "basis_matrix",
    "bench_mpc",
    "bench_trajectory",
    "flow",
    "gen_trajectory",
    "modulate",
    "modulation_matrix",
    "mpc_solve",
    "reference_direction",
    "run_batch",
    "run_trial",
    "step",
    "validate_scenario",
]

__version__ = "0.1.0"
