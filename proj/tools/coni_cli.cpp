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

// coni: run single trials, success-rate batches, kernel benchmarks and
// scenario validation.
//
// Exit codes: 0 success, 2 the trial ran but failed, 1 any error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "coni/bench.hpp"
#include "coni/sim/batch.hpp"
#include "coni/sim/scenario.hpp"
#include "coni/sim/trial.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitTrialFailed = 2;
constexpr int kSummarySchemaVersion = 1;
constexpr int kBenchSchemaVersion = 1;

struct CommonOptions {
  std::string scenario;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool force = false;
  int verbosity = 0;
  bool quiet = false;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Creates `dir` if needed; refuses to replace any of `files` unless forced.
void prepare_output(const std::string& dir, const std::vector<std::string>& files,
                    bool force) {
  if (dir.empty()) throw UsageError("--out is required");
  fs::create_directories(dir);
  if (force) return;
  for (const auto& f : files) {
    if (fs::exists(fs::path(dir) / f)) {
      throw UsageError("refusing to overwrite " + (fs::path(dir) / f).string() +
                       " (pass --force)");
    }
  }
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

coni::sim::ScenarioSpec load(const CommonOptions& o) {
  coni::sim::ScenarioSpec spec = o.scenario.empty()
                                     ? coni::sim::parse_scenario("{}", o.overrides)
                                     : coni::sim::load_scenario(o.scenario, o.overrides);
  if (o.seed) spec.seed = *o.seed;
  return spec;
}

Json metrics_json(const coni::sim::TrialMetrics& m) {
  const auto finite_or_null = [](double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); };
  Json j;
  j["success"] = m.success;
  j["min_clearance"] = finite_or_null(m.min_clearance);
  j["tracking_rmse"] = m.tracking_rmse;
  j["final_goal_error"] = m.final_goal_error;
  j["mean_plan_time"] = m.mean_plan_time;
  j["max_plan_time"] = m.max_plan_time;
  j["mean_solve_time"] = m.mean_solve_time;
  j["max_solve_time"] = m.max_solve_time;
  j["mean_iterations"] = m.mean_iterations;
  j["plans"] = m.plans;
  j["solves"] = m.solves;
  j["simulated_time"] = m.simulated_time;
  j["aborted"] = m.aborted;
  j["landed"] = m.landed;
  j["diagnostic"] = m.diagnostic;
  return j;
}

Json timing_json(const coni::TimingStats& s) {
  return Json{{"mean_s", s.mean}, {"p95_s", s.p95}, {"min_s", s.min},
              {"max_s", s.max}, {"repeats", s.samples.size()}};
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  for (char ch : text) {
    if (ch == ',') {
      if (!item.empty()) out.push_back(item);
      item.clear();
    } else {
      item.push_back(ch);
    }
  }
  if (!item.empty()) out.push_back(item);
  return out;
}

int cmd_run(const CommonOptions& o, bool no_trace) {
  const auto spec = load(o);
  std::vector<std::string> files = {"summary.json"};
  if (!no_trace) files.push_back("trace.csv");
  prepare_output(o.out, files, o.force);

  const auto metrics = coni::sim::run_trial(spec, {.record_trace = !no_trace});

  Json summary;
  summary["schema_version"] = kSummarySchemaVersion;
  summary["verb"] = "run";
  summary["metrics"] = metrics_json(metrics);
  summary["scenario"] = Json::parse(coni::sim::scenario_to_json(spec));
  write_file(fs::path(o.out) / "summary.json", summary.dump(2) + "\n");
  if (!no_trace) {
    std::ofstream trace(fs::path(o.out) / "trace.csv");
    coni::sim::write_trace_csv(trace, metrics.trace);
  }
  if (!o.quiet) {
    std::printf("%s: %s  min_clearance=%.3f m  tracking_rmse=%.3f m  solve=%.3f ms\n",
                spec.name.c_str(), metrics.success ? "success" : "FAILURE",
                metrics.min_clearance, metrics.tracking_rmse,
                metrics.mean_solve_time * 1e3);
    if (!metrics.diagnostic.empty()) std::printf("  %s\n", metrics.diagnostic.c_str());
  }
  return metrics.success ? kExitOk : kExitTrialFailed;
}

struct BatchFlags {
  int trials = 50;
  int parallel = 0;
  bool single_thread = false;
  std::string densities;
  std::string speeds;
  std::string tasks;
  double confidence = 0.9;
};

int cmd_batch(const CommonOptions& o, const BatchFlags& b) {
  if (b.trials < 1) throw UsageError("--trials must be at least 1");
  const auto base = load(o);
  prepare_output(o.out, {"table.csv", "table.json", "orderings.json"}, o.force);

  auto grid = coni::sim::BatchGrid::table_one(b.trials)
                  .select(split_list(b.densities), split_list(b.speeds),
                          split_list(b.tasks));
  if (grid.cell_count() == 0) throw UsageError("the grid selection is empty");
  grid.base_seed = base.seed;

  coni::sim::BatchOptions options;
  const int hw = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  options.workers = b.single_thread ? 1 : (b.parallel > 0 ? b.parallel : hw);
  if (o.verbosity > 0 && !o.quiet) {
    options.progress = [](std::size_t done, std::size_t total) {
      std::fprintf(stderr, "\r%zu/%zu trials", done, total);
      if (done == total) std::fprintf(stderr, "\n");
    };
  }
  const auto table = coni::sim::run_batch(base, grid, options);
  const auto orderings = coni::sim::table_orderings(table, grid, b.confidence);

  {
    std::ofstream csv(fs::path(o.out) / "table.csv");
    coni::sim::write_table_csv(csv, table);
  }
  write_file(fs::path(o.out) / "table.json", coni::sim::table_to_json(table) + "\n");
  Json oj;
  oj["schema_version"] = coni::sim::kBatchSchemaVersion;
  oj["confidence"] = b.confidence;
  Json checks = Json::array();
  for (const auto& c : orderings) {
    checks.push_back({{"factor", c.factor},
                      {"higher", c.higher},
                      {"lower", c.lower},
                      {"higher_successes", c.higher_successes},
                      {"higher_trials", c.higher_trials},
                      {"lower_successes", c.lower_successes},
                      {"lower_trials", c.lower_trials},
                      {"z", c.z},
                      {"holds", c.holds},
                      {"significant", c.significant}});
  }
  oj["checks"] = checks;
  write_file(fs::path(o.out) / "orderings.json", oj.dump(2) + "\n");

  if (!o.quiet) {
    std::printf("%-4s %-7s %-5s %8s\n", "task", "density", "speed", "success");
    for (const auto& c : table.cells) {
      std::printf("%-4s %-7s %-5s %7.1f%%  (%d/%d, %d errors)\n", c.task.c_str(),
                  c.density.c_str(), c.speed.c_str(), 100.0 * c.success_rate(),
                  c.successes, c.trials, c.errors);
    }
    int held = 0;
    for (const auto& c : orderings) held += c.holds ? 1 : 0;
    std::printf("orderings consistent: %d/%zu\n", held, orderings.size());
  }
  return kExitOk;
}

struct BenchFlags {
  int points = 4000;
  int horizon = 20;
  int mpc_horizon = 20;
  int repeats = 100;
};

int cmd_bench(const CommonOptions& o, const BenchFlags& b) {
  if (b.points < 0 || b.horizon < 1 || b.mpc_horizon < 1 || b.repeats < 1) {
    throw UsageError("--points must be >= 0; --horizon, --mpc-horizon and --repeats >= 1");
  }
  if (!o.out.empty()) prepare_output(o.out, {"bench.json"}, o.force);
  const std::uint64_t seed = o.seed.value_or(0);
  const auto traj = coni::bench_trajectory(b.points, b.horizon, b.repeats, seed);
  const auto mpc = coni::bench_mpc(b.mpc_horizon, b.repeats, seed);

  Json j;
  j["schema_version"] = kBenchSchemaVersion;
  j["seed"] = seed;
  j["gen_trajectory"] = timing_json(traj);
  j["gen_trajectory"]["points"] = b.points;
  j["gen_trajectory"]["horizon"] = b.horizon;
  j["mpc_solve"] = timing_json(mpc);
  j["mpc_solve"]["horizon_steps"] = b.mpc_horizon;
  if (!o.out.empty()) write_file(fs::path(o.out) / "bench.json", j.dump(2) + "\n");
  if (!o.quiet) {
    std::printf("gen_trajectory n=%d h=%d: mean %.3f ms  p95 %.3f ms\n", b.points,
                b.horizon, traj.mean * 1e3, traj.p95 * 1e3);
    std::printf("mpc solve      N=%d:       mean %.3f ms  p95 %.3f ms\n", b.mpc_horizon,
                mpc.mean * 1e3, mpc.p95 * 1e3);
  }
  return kExitOk;
}

int cmd_validate(const CommonOptions& o, bool print) {
  if (o.scenario.empty()) throw UsageError("--scenario is required");
  const auto spec = load(o);
  if (print) {
    std::cout << coni::sim::scenario_to_json(spec) << "\n";
  } else if (!o.quiet) {
    std::printf("ok: %s (schema %d)\n", spec.name.c_str(), spec.schema_version);
  }
  return kExitOk;
}

void add_scenario_flags(CLI::App* cmd, CommonOptions* o, bool required) {
  auto* opt = cmd->add_option("--scenario", o->scenario, "Scenario JSON file");
  if (required) opt->required();
  cmd->add_option("--override", o->overrides, "Dotted key=value applied to the scenario")
      ->allow_extra_args(false);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Non-inertial-frame obstacle avoidance: simulation and benchmarks"};
  app.require_subcommand(1);
  CommonOptions common;
  app.add_flag("-v,--verbose", common.verbosity, "More output (repeatable)");
  app.add_flag("-q,--quiet", common.quiet, "Only errors");

  bool no_trace = false;
  auto* run = app.add_subcommand("run", "Run one closed-loop trial");
  add_scenario_flags(run, &common, true);
  run->add_option("--seed", common.seed, "Override the scenario seed");
  run->add_option("--out", common.out, "Output directory")->required();
  run->add_flag("--force", common.force, "Overwrite existing outputs");
  run->add_flag("--no-trace", no_trace, "Skip trace.csv");

  BatchFlags batch_flags;
  auto* batch = app.add_subcommand("batch", "Success-rate table over density x speed x task");
  add_scenario_flags(batch, &common, false);
  batch->add_option("--seed", common.seed, "Base seed; trial i uses seed + i");
  batch->add_option("--out", common.out, "Output directory")->required();
  batch->add_flag("--force", common.force, "Overwrite existing outputs");
  batch->add_option("--trials", batch_flags.trials, "Trials per cell");
  batch->add_option("--parallel", batch_flags.parallel, "Worker threads (default: all cores)");
  batch->add_flag("--single-thread", batch_flags.single_thread, "Run on one thread");
  batch->add_option("--density", batch_flags.densities, "Subset of sparse,medium,dense");
  batch->add_option("--speed", batch_flags.speeds, "Subset of slow,fast");
  batch->add_option("--task", batch_flags.tasks, "Subset of LF,OF");
  batch->add_option("--confidence", batch_flags.confidence, "Ordering test confidence")
      ->check(CLI::Range(0.5, 0.9999));

  BenchFlags bench_flags;
  bool bench_single = false;
  auto* bench = app.add_subcommand("bench", "Time the planner and the MPC in isolation");
  bench->add_option("--points", bench_flags.points, "Cloud size");
  bench->add_option("--horizon", bench_flags.horizon, "Planner samples");
  bench->add_option("--mpc-horizon", bench_flags.mpc_horizon, "MPC nodes");
  bench->add_option("--repeats", bench_flags.repeats, "Timed repetitions");
  bench->add_option("--seed", common.seed, "Synthetic input seed");
  bench->add_option("--out", common.out, "Directory for bench.json");
  bench->add_flag("--force", common.force, "Overwrite existing outputs");
  bench->add_flag("--single-thread", bench_single, "Accepted for symmetry; always single-threaded");

  bool print = false;
  auto* validate = app.add_subcommand("validate", "Check a scenario against the schema");
  add_scenario_flags(validate, &common, true);
  validate->add_flag("--print", print, "Print the normalized scenario");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (*run) return cmd_run(common, no_trace);
    if (*batch) return cmd_batch(common, batch_flags);
    if (*bench) return cmd_bench(common, bench_flags);
    if (*validate) return cmd_validate(common, print);
  } catch (const coni::sim::ScenarioError& e) {
    std::fprintf(stderr, "error: invalid scenario: %s\n", e.what());
    return kExitError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitError;
  }
  return kExitError;
}
