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

#ifndef CONI_BENCH_HPP_
#define CONI_BENCH_HPP_

#include <cstdint>
#include <vector>

#include "coni/modulation.hpp"

namespace coni {

/// Wall-clock statistics in seconds.
struct TimingStats {
  std::vector<double> samples;
  double mean = 0.0;
  double p95 = 0.0;
  double min = 0.0;
  double max = 0.0;
};

TimingStats summarize(std::vector<double> samples);

/// `n` points on the surfaces of a few spheres 1.5 to 4 m from the origin,
/// none within the default robot radius of the planning start.
SampleCloud synthetic_cloud(int n, std::uint64_t seed);

/// Times gen_trajectory from the origin toward (3, 0.5, 0.2) through a
/// synthetic cloud of `n` points with `horizon` samples.
TimingStats bench_trajectory(int n, int horizon, int repeats, std::uint64_t seed);

/// Times cold-start MPC solves with `horizon_steps` nodes from a state offset
/// from a hover reference.
TimingStats bench_mpc(int horizon_steps, int repeats, std::uint64_t seed);

}  // namespace coni

#endif  // CONI_BENCH_HPP_
