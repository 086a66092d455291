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

#include "coni/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include "coni/mpc.hpp"
#include "coni/trajectory.hpp"

namespace coni {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

TimingStats summarize(std::vector<double> samples) {
  TimingStats s;
  s.samples = samples;
  if (samples.empty()) return s;
  std::sort(samples.begin(), samples.end());
  s.mean = std::accumulate(samples.begin(), samples.end(), 0.0) /
           static_cast<double>(samples.size());
  const auto idx = static_cast<std::size_t>(
      std::ceil(0.95 * static_cast<double>(samples.size())) - 1.0);
  s.p95 = samples[std::min(idx, samples.size() - 1)];
  s.min = samples.front();
  s.max = samples.back();
  return s;
}

SampleCloud synthetic_cloud(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  constexpr int kSpheres = 4;
  std::vector<Vec3> centers;
  std::vector<double> radii;
  for (int i = 0; i < kSpheres; ++i) {
    const double az = -0.8 + 1.6 * uniform(rng);
    const double dist = 2.5 + 1.5 * uniform(rng);
    centers.emplace_back(dist * std::cos(az), dist * std::sin(az), 0.3 * gauss(rng));
    radii.push_back(0.3 + 0.4 * uniform(rng));
  }
  SampleCloud cloud;
  cloud.points.reserve(static_cast<std::size_t>(std::max(n, 0)));
  for (int i = 0; i < n; ++i) {
    const int k = i % kSpheres;
    Vec3 dir(gauss(rng), gauss(rng), gauss(rng));
    dir.normalize();
    cloud.points.push_back(centers[static_cast<std::size_t>(k)] +
                           radii[static_cast<std::size_t>(k)] * dir);
  }
  return cloud;
}

TimingStats bench_trajectory(int n, int horizon, int repeats, std::uint64_t seed) {
  const SampleCloud cloud = synthetic_cloud(n, seed);
  TrajectoryParams params;
  params.horizon = horizon;
  const ModulationParams mod;
  const NonInertialQuantities frame;
  const Vec3 goal(3.0, 0.5, 0.2);
  std::vector<double> samples;
  samples.reserve(static_cast<std::size_t>(repeats));
  double sink = 0.0;
  for (int i = 0; i < repeats; ++i) {
    const auto t0 = Clock::now();
    const ReferenceTrajectory traj =
        gen_trajectory(Vec3::Zero(), cloud, frame, goal, params, mod);
    samples.push_back(seconds_since(t0));
    sink += traj.samples.back().p.x();
  }
  volatile double keep = sink;
  (void)keep;
  return summarize(std::move(samples));
}

TimingStats bench_mpc(int horizon_steps, int repeats, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> offset(-0.5, 0.5);
  MpcConfig cfg;
  cfg.horizon_steps = horizon_steps;
  const NonInertialQuantities frame;
  std::vector<ReferenceSample> reference(static_cast<std::size_t>(horizon_steps + 1));
  for (auto& r : reference) r.p = Vec3(1.0, 0.0, 0.5);
  std::vector<double> samples;
  samples.reserve(static_cast<std::size_t>(repeats));
  for (int i = 0; i < repeats; ++i) {
    RelativeState x0;
    x0.p = Vec3(1.0 + offset(rng), offset(rng), 0.5 + offset(rng));
    x0.v = Vec3(offset(rng), offset(rng), offset(rng));
    const MpcSolution sol = solve(x0, reference, frame, cfg);
    samples.push_back(sol.solve_time);
  }
  return summarize(std::move(samples));
}

}  // namespace coni
