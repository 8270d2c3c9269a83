// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Experiment runner: scenario x solver x repetition sweeps, per-run
// metrics, per-cell aggregates, dominance checks and CSV/JSON reports.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "crowdsel/core.hpp"
#include "crowdsel/evolve.hpp"
#include "crowdsel/io.hpp"
#include "crowdsel/oracle.hpp"
#include "crowdsel/scenario.hpp"

namespace crowdsel {

inline constexpr int kReportSchemaVersion = 1;

// Algorithm names accepted by solve_* and the CLI.
const std::vector<std::string>& wsts_algorithms();
const std::vector<std::string>& wsdt_algorithms();

enum class SolveStatus { kOk, kInfeasible, kBudgetExceeded };
std::string to_string(SolveStatus status);

template <typename Solution>
struct SolveResult {
  std::string algo;
  SolveStatus status = SolveStatus::kOk;
  Solution solution;
  double objective = 0.0;
  FeasibilityReport report;
  std::optional<EvolveStats> stats;
  double runtime_seconds = 0.0;

  bool feasible() const { return status == SolveStatus::kOk && report.feasible; }
};

// Runs one algorithm. Infeasibility and oracle budget exhaustion come back
// as a status, with the greedy partial solution and its shortfall where one
// exists; an unknown algorithm throws ContractViolation.
SolveResult<AssignmentMatrix> solve_wsts(const WstsInstance& instance,
                                         const std::string& algo,
                                         const EvolveParams& params,
                                         const OracleBudget& budget = {});
SolveResult<SelectionVector> solve_wsdt(const WsdtInstance& instance,
                                        const std::string& algo,
                                        const EvolveParams& params,
                                        const OracleBudget& budget = {});

struct SolverSpec {
  std::string algo;
  EvolveParams params;
};

struct ScenarioSpec {
  std::string label;
  std::string problem = "wsts";  // "wsts" or "wsdt"
  ScenarioConfig config;
  // Delay-tolerant only: seeds the worker population separately so several
  // task sets can share one population.
  std::optional<std::uint64_t> population_seed;
};

struct PivotSpec {
  std::string metric = "objective";
  // "solver_rows": one row per solver, one column per scenario.
  // "scenario_rows": one row per scenario, one column per solver.
  std::string orient = "scenario_rows";
};

// Means of `metrics` for `solver` must be non-increasing along `scenarios`.
struct TrendSpec {
  std::string solver;
  std::vector<std::string> scenarios;
  std::vector<std::string> metrics{"objective"};
};

struct ExperimentConfig {
  std::vector<ScenarioSpec> scenarios;
  std::vector<SolverSpec> solvers;
  int repetitions = 20;
  std::string name = "report";
  std::vector<std::string> formats{"csv", "json"};
  std::optional<PivotSpec> pivot;
  std::vector<TrendSpec> trends;
  OracleBudget budget;

  void validate() const;
};

ExperimentConfig experiment_from_json(const Json& doc);

struct ResultRow {
  std::string scenario;
  std::string problem;
  std::string solver;
  int repetition = 0;
  std::uint64_t seed = 0;
  bool feasible = false;
  std::string status;
  std::optional<double> objective;
  double runtime_total = 0.0;
  std::optional<double> runtime_per_generation;
  std::optional<int> generations;
  std::optional<double> mean_completion_time;
  int workers_selected = 0;
  std::optional<double> tasks_per_worker;
  int shortfall = 0;
};

struct Aggregate {
  std::string scenario;
  std::string solver;
  int runs = 0;
  int feasible_runs = 0;
  std::optional<double> mean_objective;
  std::optional<double> stddev_objective;
  std::optional<double> mean_runtime_per_generation;
  double mean_runtime_total = 0.0;
  std::optional<double> mean_completion_time;
  double mean_workers_selected = 0.0;
  std::optional<double> mean_tasks_per_worker;
};

struct DominanceCheck {
  std::string kind;  // "hard", "statistical" or "trend"
  std::string scenario;
  std::optional<int> repetition;
  std::string claim;  // e.g. "gga-i <= nearest-first"
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = true;
};

struct ExperimentReport {
  std::vector<ResultRow> rows;
  std::vector<Aggregate> aggregates;
  std::vector<DominanceCheck> checks;

  bool hard_invariants_hold() const;
};

// Runs every scenario x repetition x solver, sequentially. Repetition r of
// a scenario draws its instance from derive_seed(config.seed, r), and every
// solver on that instance is seeded with the same value.
ExperimentReport run_experiment(const ExperimentConfig& config);

// Means and standard deviations per (scenario, solver), in first-seen order.
std::vector<Aggregate> aggregate(const std::vector<ResultRow>& rows);
// Hard checks compare solvers per (scenario, repetition) when both runs are
// feasible; statistical checks compare feasible-run means, allowing the
// larger of the two standard deviations as slack.
std::vector<DominanceCheck> dominance_checks(const std::vector<ResultRow>& rows,
                                             const std::vector<Aggregate>& aggs);
std::vector<DominanceCheck> trend_checks(const std::vector<Aggregate>& aggs,
                                         const std::vector<TrendSpec>& trends);

// Mean of a named aggregate metric ("objective", "runtime_per_generation",
// "runtime_total", "mean_completion_time", "workers_selected",
// "tasks_per_worker"); empty when no run supplied it.
std::optional<double> aggregate_metric(const Aggregate& agg,
                                       const std::string& metric);

// Column order of the row CSV.
const std::vector<std::string>& row_columns();
const std::vector<std::string>& aggregate_columns();

Json to_json(const ExperimentReport& report);
ExperimentReport report_from_json(const Json& doc);

// Writes <dir>/<name>_rows.csv, <name>_summary.csv and (if a pivot is set)
// <name>_table.csv for "csv"; <dir>/<name>.json for "json". Returns the
// written paths. Throws ContractViolation on empty rows and
// std::runtime_error naming the path when a file cannot be written.
std::vector<std::string> emit_report(const ExperimentReport& report,
                                     const std::string& dir,
                                     const std::string& name,
                                     const std::vector<std::string>& formats,
                                     const std::optional<PivotSpec>& pivot = {});

}  // namespace crowdsel
