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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "crowdsel/bench.hpp"

using namespace crowdsel;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_config() {
  return experiment_from_json(Json::parse(R"({
    "name": "small",
    "repetitions": 2,
    "defaults": {"params": {"population_size": 10, "generations": 20}},
    "scenarios": [
      {"label": "4t8w", "problem": "wsts", "config": {"n": 4, "m": 8, "seed": 3}},
      {"label": "4t16w", "problem": "wsts", "config": {"n": 4, "m": 16, "seed": 3}},
      {"label": "dt", "problem": "wsdt",
       "config": {"n": 5, "m": 40, "days": 5, "grid": 6, "p_range": [1, 2], "seed": 4}}
    ],
    "solvers": [
      {"algo": "nearest-first"}, {"algo": "gga-i"}, {"algo": "gypso"}, {"algo": "ga"},
      {"algo": "most-first"}, {"algo": "gga-u"}
    ],
    "pivot": {"metric": "objective", "orient": "scenario_rows"},
    "trends": [{"solver": "gga-i", "scenarios": ["4t8w", "4t16w"],
                "metrics": ["objective", "tasks_per_worker"]}]
  })"));
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("crowdsel_bench_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string first_line(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line;
}

std::string join(const std::vector<std::string>& cols) {
  std::string s;
  for (std::size_t k = 0; k < cols.size(); ++k) s += (k ? "," : "") + cols[k];
  return s;
}

}  // namespace

TEST_CASE("solve dispatch") {
  ScenarioConfig c;
  c.n = 4;
  c.m = 8;
  const auto inst = build_wsts_scenario(c);
  EvolveParams p;
  p.generations = 10;
  p.population_size = 8;
  for (const auto& algo : wsts_algorithms()) {
    const auto r = solve_wsts(inst, algo, p);
    CHECK(r.algo == algo);
    CHECK(r.feasible());
    CHECK(r.objective == doctest::Approx(total_distance(inst, r.solution)));
    CHECK(r.stats.has_value() == (algo != "nearest-first" && algo != "exact"));
  }
  CHECK_THROWS_AS(solve_wsts(inst, "gga-u", p), ContractViolation);
  CHECK_THROWS_AS(solve_wsts(inst, "simulated-annealing", p), ContractViolation);
}

TEST_CASE("solve reports infeasibility and budget exhaustion as statuses") {
  WstsInstance short_({Task{"t", {0, 0}, 3, std::nullopt, std::nullopt}},
                      {Worker{"w", Location{1, 1}, std::nullopt}}, 3);
  EvolveParams p;
  p.generations = 5;
  for (const auto& algo : wsts_algorithms()) {
    const auto r = solve_wsts(short_, algo, p);
    CHECK(r.status == SolveStatus::kInfeasible);
    REQUIRE(r.report.violated_tasks.size() == 1);
    CHECK(r.report.violated_tasks[0].missing == 2);
  }
  ScenarioConfig c;
  c.n = 8;
  c.m = 16;
  const auto big = build_wsts_scenario(c);
  const auto r = solve_wsts(big, "exact", p, OracleBudget{5});
  CHECK(r.status == SolveStatus::kBudgetExceeded);
  CHECK_FALSE(r.feasible());
}

TEST_CASE("experiment rows, aggregates and checks") {
  const auto config = small_config();
  const auto report = run_experiment(config);
  // wsts scenarios: 4 solvers x 2 reps each; wsdt: 3 solvers x 2 reps.
  CHECK(report.rows.size() == 2 * 4 * 2 + 3 * 2);
  for (const auto& r : report.rows) {
    CHECK(r.objective.has_value() == r.feasible);
    if (r.solver == "ga" || r.solver.rfind("gga", 0) == 0 || r.solver == "gypso") {
      CHECK(r.runtime_per_generation.has_value());
    }
  }
  CHECK(report.aggregates.size() == 2 * 4 + 3);
  CHECK(report.hard_invariants_hold());
  int hard = 0, trend = 0;
  for (const auto& c : report.checks) {
    hard += c.kind == "hard";
    trend += c.kind == "trend";
  }
  CHECK(hard > 0);
  CHECK(trend == 2);
}

TEST_CASE("reruns are identical apart from wall-clock fields") {
  auto config = small_config();
  config.repetitions = 1;
  auto strip = [](ExperimentReport r) {
    for (auto& row : r.rows) {
      row.runtime_total = 0;
      row.runtime_per_generation.reset();
    }
    return to_json(r)["rows"];
  };
  CHECK(strip(run_experiment(config)) == strip(run_experiment(config)));
}

TEST_CASE("aggregate means and standard deviations") {
  std::vector<ResultRow> rows(3);
  const double objectives[] = {1.0, 2.0, 6.0};
  for (int k = 0; k < 3; ++k) {
    rows[k].scenario = "s";
    rows[k].solver = "x";
    rows[k].repetition = k;
    rows[k].feasible = true;
    rows[k].objective = objectives[k];
    rows[k].workers_selected = 2 * k;
  }
  rows.push_back(rows[0]);
  rows.back().feasible = false;
  rows.back().objective.reset();
  const auto aggs = aggregate(rows);
  REQUIRE(aggs.size() == 1);
  CHECK(aggs[0].runs == 4);
  CHECK(aggs[0].feasible_runs == 3);
  CHECK(*aggs[0].mean_objective == doctest::Approx(3.0));
  CHECK(*aggs[0].stddev_objective == doctest::Approx(std::sqrt(7.0)));
  CHECK(aggs[0].mean_workers_selected == doctest::Approx(1.5));
}

TEST_CASE("hard checks flag a breach") {
  std::vector<ResultRow> rows(2);
  rows[0].scenario = rows[1].scenario = "s";
  rows[0].solver = "gga-i";
  rows[1].solver = "nearest-first";
  rows[0].feasible = rows[1].feasible = true;
  rows[0].objective = 10.0;
  rows[1].objective = 9.0;
  ExperimentReport report;
  report.rows = rows;
  report.aggregates = aggregate(rows);
  report.checks = dominance_checks(report.rows, report.aggregates);
  CHECK_FALSE(report.hard_invariants_hold());
}

TEST_CASE("reports: csv header, json round trip, pivot, errors") {
  auto config = small_config();
  config.repetitions = 1;
  const auto report = run_experiment(config);
  const auto dir = scratch("emit");
  const auto paths = emit_report(report, dir.string(), "r", {"csv", "json"}, config.pivot);
  CHECK(paths.size() == 4);
  CHECK(first_line(dir / "r_rows.csv") == join(row_columns()));
  CHECK(first_line(dir / "r_summary.csv") == join(aggregate_columns()));
  CHECK(first_line(dir / "r_table.csv") ==
        "scenario,nearest-first,gga-i,gypso,ga,most-first,gga-u");

  const auto back = report_from_json(read_json_file((dir / "r.json").string()));
  CHECK(to_json(back) == to_json(report));

  CHECK_THROWS_AS(emit_report(ExperimentReport{}, dir.string(), "r", {"csv"}),
                  ContractViolation);
  CHECK_THROWS_WITH_AS(emit_report(report, "/proc/forbidden/x", "r", {"csv"}),
                       doctest::Contains("/proc/forbidden/x"), std::runtime_error);
  fs::remove_all(dir);
}

TEST_CASE("solver-row pivot mirrors a runtime table") {
  auto config = small_config();
  config.repetitions = 1;
  const auto report = run_experiment(config);
  const auto dir = scratch("pivot");
  emit_report(report, dir.string(), "t", {"csv"},
              PivotSpec{"runtime_per_generation", "solver_rows"});
  std::ifstream in(dir / "t_table.csv");
  std::string header, row;
  std::getline(in, header);
  CHECK(header == "runtime_per_generation,4t8w,4t16w,dt");
  std::getline(in, row);
  CHECK(row.rfind("nearest-first,,,", 0) == 0);
  fs::remove_all(dir);
}

TEST_CASE("experiment config validation") {
  CHECK_THROWS_AS(experiment_from_json(Json::parse(R"({"scenarios": [], "solvers": []})")),
                  SchemaError);
  CHECK_THROWS_AS(experiment_from_json(Json::parse(R"({
      "repetitions": 0,
      "scenarios": [{"label": "a"}], "solvers": [{"algo": "gga-i"}]})")),
                  SchemaError);
  CHECK_THROWS_AS(experiment_from_json(Json::parse(R"({
      "scenarios": [{"label": "a"}], "solvers": [{"algo": "tabu"}]})")),
                  SchemaError);
  CHECK_THROWS_AS(experiment_from_json(Json::parse(R"({
      "scenarios": [{"label": "a"}], "solvers": [{"algo": "gga-i"}], "colour": 1})")),
                  SchemaError);
  const auto ok = experiment_from_json(Json::parse(R"({
      "scenarios": [{"label": "a"}], "solvers": [{"algo": "gga-i"}]})"));
  CHECK(ok.repetitions == 20);
}

TEST_CASE("shipped configs parse") {
  for (const char* name : {"runtime_ladder.json", "delay_tolerant_counts.json", "solver_ordering.json", "pool_size_trend.json"}) {
    const fs::path p = fs::path(CROWDSEL_SOURCE_DIR) / "configs" / name;
    CAPTURE(p.string());
    CHECK_NOTHROW(experiment_from_json(read_json_file(p.string())));
  }
}
