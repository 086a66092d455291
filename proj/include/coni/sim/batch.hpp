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

#ifndef CONI_SIM_BATCH_HPP_
#define CONI_SIM_BATCH_HPP_

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "coni/sim/scenario.hpp"

namespace coni::sim {

inline constexpr int kBatchSchemaVersion = 1;

struct DensityLevel {
  std::string name;
  int obstacle_count = 0;
};

struct SpeedLevel {
  std::string name;
  double v_max = 0.5;
  double omega_max = 0.5;
};

struct TaskLevel {
  std::string name;
  Task task;
};

/// Cartesian grid of density x speed x task. Trial i of every cell uses the
/// same seed, so cells differ only in the swept factor.
struct BatchGrid {
  std::vector<DensityLevel> densities;
  std::vector<SpeedLevel> speeds;
  std::vector<TaskLevel> tasks;
  int trials = 50;
  std::uint64_t base_seed = 0;

  /// sparse/medium/dense = 100/150/200 cylinders, slow/fast = 0.5/1.5 m/s
  /// and rad/s, LF offset (1, 0, 0.5), OF circle of radius 1 at 0.5 rad/s
  /// about (1, 0, 0.5).
  static BatchGrid table_one(int trials);

  /// Only the levels whose names appear in the lists (empty keeps all).
  BatchGrid select(const std::vector<std::string>& densities,
                   const std::vector<std::string>& speeds,
                   const std::vector<std::string>& tasks) const;

  std::size_t cell_count() const {
    return densities.size() * speeds.size() * tasks.size();
  }
};

struct TrialRecord {
  std::uint64_t seed = 0;
  bool success = false;
  bool error = false;  // exception or aborted run
  double min_clearance = 0.0;
  double tracking_rmse = 0.0;
  std::string diagnostic;
};

struct BatchCell {
  std::string task;
  std::string density;
  std::string speed;
  int obstacle_count = 0;
  int trials = 0;
  int successes = 0;
  int errors = 0;
  std::vector<TrialRecord> records;  // in trial order

  double success_rate() const {
    return trials > 0 ? static_cast<double>(successes) / trials : 0.0;
  }
};

/// Cells ordered task-major, then density, then speed.
struct BatchTable {
  int schema_version = kBatchSchemaVersion;
  std::vector<BatchCell> cells;

  const BatchCell* find(const std::string& task, const std::string& density,
                        const std::string& speed) const;
};

struct BatchOptions {
  int workers = 1;
  /// Called after every finished trial with (done, total). May be invoked
  /// from worker threads, but never concurrently.
  std::function<void(std::size_t, std::size_t)> progress;
};

/// Scenario for one trial: the template with the cell's obstacle count,
/// UGV random-goal program limits, task and seed applied.
ScenarioSpec batch_trial_spec(const ScenarioSpec& base, const DensityLevel& density,
                              const SpeedLevel& speed, const TaskLevel& task,
                              std::uint64_t seed);

/// Runs every trial of every cell. Results are independent of `workers`.
BatchTable run_batch(const ScenarioSpec& base, const BatchGrid& grid,
                     const BatchOptions& options = {});

/// Claim that cell `higher` succeeds at least as often as cell `lower`.
struct OrderingCheck {
  std::string factor;  // "density", "speed" or "task"
  std::string higher;  // cell labels "task/density/speed"
  std::string lower;
  int higher_successes = 0;
  int higher_trials = 0;
  int lower_successes = 0;
  int lower_trials = 0;
  double z = 0.0;        // pooled two-proportion statistic, higher minus lower
  bool holds = false;        // the reverse ordering is not significant
  bool significant = false;  // the ordering itself is significant
};

/// The adjacent-level orderings of the table: each density step, slow over
/// fast, and the first task over the second, each judged by a one-sided
/// pooled two-proportion z-test at `confidence`.
std::vector<OrderingCheck> table_orderings(const BatchTable& table,
                                           const BatchGrid& grid,
                                           double confidence = 0.9);

void write_table_csv(std::ostream& out, const BatchTable& table);
std::string table_to_json(const BatchTable& table, int indent = 2);

}  // namespace coni::sim

#endif  // CONI_SIM_BATCH_HPP_
