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

#include "coni/sim/batch.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "coni/sim/trial.hpp"
#include <nlohmann/json.hpp>

namespace coni::sim {
namespace {

struct Job {
  std::size_t cell = 0;
  std::size_t trial = 0;
};

template <typename Level>
std::vector<Level> keep(const std::vector<Level>& levels,
                        const std::vector<std::string>& names) {
  if (names.empty()) return levels;
  std::vector<Level> out;
  for (const auto& level : levels) {
    if (std::find(names.begin(), names.end(), level.name) != names.end()) {
      out.push_back(level);
    }
  }
  return out;
}

std::string label(const BatchCell& c) {
  return c.task + "/" + c.density + "/" + c.speed;
}

// Upper-tail standard normal quantile by bisection on erfc.
double normal_quantile(double confidence) {
  double lo = 0.0, hi = 10.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (0.5 * std::erfc(mid / std::sqrt(2.0)) > 1.0 - confidence) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

OrderingCheck compare(const std::string& factor, const BatchCell& hi,
                      const BatchCell& lo, double z_crit) {
  OrderingCheck c;
  c.factor = factor;
  c.higher = label(hi);
  c.lower = label(lo);
  c.higher_successes = hi.successes;
  c.higher_trials = hi.trials;
  c.lower_successes = lo.successes;
  c.lower_trials = lo.trials;
  const double n1 = hi.trials, n2 = lo.trials;
  const double p1 = hi.success_rate(), p2 = lo.success_rate();
  const double pooled = (hi.successes + lo.successes) / (n1 + n2);
  const double se = std::sqrt(pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2));
  if (se > 0.0) {
    c.z = (p1 - p2) / se;
  } else {
    c.z = 0.0;
  }
  c.holds = c.z > -z_crit;
  c.significant = c.z >= z_crit;
  return c;
}

}  // namespace

BatchGrid BatchGrid::table_one(int trials) {
  BatchGrid g;
  g.densities = {{"sparse", 100}, {"medium", 150}, {"dense", 200}};
  g.speeds = {{"slow", 0.5, 0.5}, {"fast", 1.5, 1.5}};
  g.tasks = {{"LF", Task::leader_follow(Vec3(1.0, 0.0, 0.5))},
             {"OF", Task::orbit(1.0, 0.5, Vec3(1.0, 0.0, 0.5))}};
  g.trials = trials;
  return g;
}

BatchGrid BatchGrid::select(const std::vector<std::string>& density_names,
                            const std::vector<std::string>& speed_names,
                            const std::vector<std::string>& task_names) const {
  BatchGrid g = *this;
  g.densities = keep(densities, density_names);
  g.speeds = keep(speeds, speed_names);
  g.tasks = keep(tasks, task_names);
  return g;
}

const BatchCell* BatchTable::find(const std::string& task, const std::string& density,
                                  const std::string& speed) const {
  for (const BatchCell& c : cells) {
    if (c.task == task && c.density == density && c.speed == speed) return &c;
  }
  return nullptr;
}

ScenarioSpec batch_trial_spec(const ScenarioSpec& base, const DensityLevel& density,
                              const SpeedLevel& speed, const TaskLevel& task,
                              std::uint64_t seed) {
  ScenarioSpec s = base;
  s.name = task.name + "/" + density.name + "/" + speed.name + "#" + std::to_string(seed);
  s.seed = seed;
  s.random_obstacles.count = density.obstacle_count;
  s.ugv_program.kind = UgvProgramKind::kRandomGoals;
  s.ugv_program.v_max = speed.v_max;
  s.ugv_program.omega_max = speed.omega_max;
  s.task = task.task;
  return s;
}

BatchTable run_batch(const ScenarioSpec& base, const BatchGrid& grid,
                     const BatchOptions& options) {
  BatchTable table;
  std::vector<ScenarioSpec> cell_specs;
  for (const TaskLevel& task : grid.tasks) {
    for (const DensityLevel& density : grid.densities) {
      for (const SpeedLevel& speed : grid.speeds) {
        BatchCell cell;
        cell.task = task.name;
        cell.density = density.name;
        cell.speed = speed.name;
        cell.obstacle_count = density.obstacle_count;
        cell.trials = std::max(grid.trials, 0);
        cell.records.resize(static_cast<std::size_t>(cell.trials));
        table.cells.push_back(std::move(cell));
        cell_specs.push_back(batch_trial_spec(base, density, speed, task, 0));
      }
    }
  }

  std::vector<Job> jobs;
  for (std::size_t c = 0; c < table.cells.size(); ++c) {
    for (std::size_t t = 0; t < table.cells[c].records.size(); ++t) jobs.push_back({c, t});
  }

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;
  const auto worker = [&] {
    for (;;) {
      const std::size_t j = next.fetch_add(1);
      if (j >= jobs.size()) return;
      const Job& job = jobs[j];
      TrialRecord& rec = table.cells[job.cell].records[job.trial];
      rec.seed = grid.base_seed + job.trial;
      try {
        ScenarioSpec spec = cell_specs[job.cell];
        spec.seed = rec.seed;
        spec.name = label(table.cells[job.cell]) + "#" + std::to_string(rec.seed);
        const TrialMetrics m = run_trial(spec);
        rec.success = m.success;
        rec.error = m.aborted;
        rec.min_clearance = m.min_clearance;
        rec.tracking_rmse = m.tracking_rmse;
        rec.diagnostic = m.diagnostic;
      } catch (const std::exception& e) {
        rec.success = false;
        rec.error = true;
        rec.diagnostic = e.what();
      }
      const std::size_t finished = done.fetch_add(1) + 1;
      if (options.progress) {
        std::lock_guard<std::mutex> lock(progress_mutex);
        options.progress(finished, jobs.size());
      }
    }
  };

  const int workers = std::clamp(options.workers, 1, 256);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (BatchCell& cell : table.cells) {
    for (const TrialRecord& r : cell.records) {
      cell.successes += r.success ? 1 : 0;
      cell.errors += r.error ? 1 : 0;
    }
  }
  return table;
}

std::vector<OrderingCheck> table_orderings(const BatchTable& table,
                                           const BatchGrid& grid, double confidence) {
  const double z_crit = normal_quantile(confidence);
  std::vector<OrderingCheck> out;
  const auto cell = [&](const std::string& t, const std::string& d, const std::string& s) {
    return table.find(t, d, s);
  };
  for (const TaskLevel& t : grid.tasks) {
    for (const SpeedLevel& s : grid.speeds) {
      for (std::size_t i = 0; i + 1 < grid.densities.size(); ++i) {
        const BatchCell* hi = cell(t.name, grid.densities[i].name, s.name);
        const BatchCell* lo = cell(t.name, grid.densities[i + 1].name, s.name);
        if (hi && lo) out.push_back(compare("density", *hi, *lo, z_crit));
      }
    }
  }
  for (const TaskLevel& t : grid.tasks) {
    for (const DensityLevel& d : grid.densities) {
      for (std::size_t i = 0; i + 1 < grid.speeds.size(); ++i) {
        const BatchCell* hi = cell(t.name, d.name, grid.speeds[i].name);
        const BatchCell* lo = cell(t.name, d.name, grid.speeds[i + 1].name);
        if (hi && lo) out.push_back(compare("speed", *hi, *lo, z_crit));
      }
    }
  }
  for (const DensityLevel& d : grid.densities) {
    for (const SpeedLevel& s : grid.speeds) {
      for (std::size_t i = 0; i + 1 < grid.tasks.size(); ++i) {
        const BatchCell* hi = cell(grid.tasks[i].name, d.name, s.name);
        const BatchCell* lo = cell(grid.tasks[i + 1].name, d.name, s.name);
        if (hi && lo) out.push_back(compare("task", *hi, *lo, z_crit));
      }
    }
  }
  return out;
}

void write_table_csv(std::ostream& out, const BatchTable& table) {
  out << "# coni batch schema_version=" << table.schema_version << "\n";
  out << "task,density,obstacles,speed,trials,successes,errors,success_rate\n";
  for (const BatchCell& c : table.cells) {
    out << c.task << ',' << c.density << ',' << c.obstacle_count << ',' << c.speed << ','
        << c.trials << ',' << c.successes << ',' << c.errors << ',' << c.success_rate()
        << '\n';
  }
}

std::string table_to_json(const BatchTable& table, int indent) {
  using Json = nlohmann::ordered_json;
  Json j;
  j["schema_version"] = table.schema_version;
  Json cells = Json::array();
  for (const BatchCell& c : table.cells) {
    Json cj;
    cj["task"] = c.task;
    cj["density"] = c.density;
    cj["obstacles"] = c.obstacle_count;
    cj["speed"] = c.speed;
    cj["trials"] = c.trials;
    cj["successes"] = c.successes;
    cj["errors"] = c.errors;
    cj["success_rate"] = c.success_rate();
    Json records = Json::array();
    for (const TrialRecord& r : c.records) {
      records.push_back({{"seed", r.seed},
                         {"success", r.success},
                         {"error", r.error},
                         {"min_clearance", r.min_clearance},
                         {"tracking_rmse", r.tracking_rmse},
                         {"diagnostic", r.diagnostic}});
    }
    cj["trials_detail"] = records;
    cells.push_back(cj);
  }
  j["cells"] = cells;
  return j.dump(indent);
}

}  // namespace coni::sim
