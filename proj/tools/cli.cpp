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

#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>

#include "CLI11.hpp"

#include "crowdsel/bench.hpp"
#include "crowdsel/core.hpp"
#include "crowdsel/io.hpp"
#include "crowdsel/mobility.hpp"
#include "crowdsel/scenario.hpp"

namespace crowdsel::cli {
namespace {

namespace fs = std::filesystem;

// Falls back to $CROWDSEL_OUT, then the current directory.
std::string default_out_dir() {
  const char* env = std::getenv("CROWDSEL_OUT");
  return env && *env ? std::string(env) : std::string(".");
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir + ": " + ec.message());
}

void print_shortfall(std::ostream& out, const FeasibilityReport& report) {
  for (const auto& s : report.violated_tasks) {
    out << "shortfall task=" << s.task_id << " missing=" << s.missing << '\n';
  }
  for (const auto& e : report.violated_workers) {
    out << "overload worker=" << e.worker_id << " excess=" << e.excess << '\n';
  }
}

Json report_json(const FeasibilityReport& report) {
  Json shortfall = Json::array();
  for (const auto& s : report.violated_tasks) {
    shortfall.push_back({{"task", s.task_id}, {"missing", s.missing}});
  }
  Json excess = Json::array();
  for (const auto& e : report.violated_workers) {
    excess.push_back({{"worker", e.worker_id}, {"excess", e.excess}});
  }
  return Json{{"shortfall", shortfall}, {"excess", excess}};
}

// --- generate ----------------------------------------------------------------

struct GenerateArgs {
  std::string problem = "wsts";
  std::string kind = "scattered";
  int tasks = 10;
  int workers = 20;
  std::uint64_t seed = 1;
  std::string out;
  std::optional<std::string> scenario;
  std::optional<int> q;
  std::optional<int> p_min;
  std::optional<int> p_max;
  std::optional<double> r_thld;
  std::optional<int> days;
  std::optional<int> grid;
  bool traces = false;
};

int cmd_generate(const GenerateArgs& a, std::ostream& out) {
  ScenarioConfig config =
      a.scenario ? scenario_from_json(read_json_file(*a.scenario)) : ScenarioConfig{};
  config.kind = distribution_from_string(a.kind);
  config.n = a.tasks;
  config.m = a.workers;
  config.seed = a.seed;
  if (a.q) config.q = *a.q;
  if (a.p_min) config.p_range.first = *a.p_min;
  if (a.p_max) config.p_range.second = *a.p_max;
  if (a.r_thld) config.r_thld = *a.r_thld;
  if (a.days) config.days = *a.days;
  if (a.grid) config.grid = *a.grid;
  config.validate();

  const std::string dir = a.out.empty() ? default_out_dir() : a.out;
  ensure_dir(dir);
  const fs::path base(dir);
  const std::string instance_path = (base / "instance.json").string();
  if (a.problem == "wsts") {
    write_json_file(instance_path, to_json(build_wsts_scenario(config)));
    out << "wrote " << instance_path << '\n';
    return kExitOk;
  }
  WsdtScenario s = build_wsdt_scenario(config);
  write_json_file(instance_path, to_json(s.instance, s.profiles));
  out << "wrote " << instance_path << '\n';
  const std::string tasks_path = (base / "tasks.json").string();
  Json tasks_doc = tasks_document(s.instance.tasks());
  tasks_doc["workers"] = Json::array();
  for (const Worker& w : s.instance.workers()) tasks_doc["workers"].push_back({{"id", w.id}});
  write_json_file(tasks_path, tasks_doc);
  out << "wrote " << tasks_path << '\n';
  if (a.traces) {
    const std::string traces_path = (base / "traces.csv").string();
    const std::string antennas_path = (base / "antennas.csv").string();
    std::ofstream traces(traces_path);
    if (!traces) throw std::runtime_error("cannot write " + traces_path);
    std::vector<LocationRecord> all = s.history;
    all.insert(all.end(), s.holdout.begin(), s.holdout.end());
    write_traces_csv(traces, all);
    std::ofstream antennas(antennas_path);
    if (!antennas) throw std::runtime_error("cannot write " + antennas_path);
    write_antennas_csv(antennas, s.registry);
    out << "wrote " << traces_path << '\n' << "wrote " << antennas_path << '\n';
    out << "history days " << config.first_day << ".." << config.first_day + config.days
        << " holdout day " << config.first_day + config.days << '\n';
  }
  return kExitOk;
}

// --- solve -------------------------------------------------------------------

struct SolveArgs {
  std::optional<std::string> problem;
  std::string algo;
  std::string in;
  std::uint64_t seed = 0;
  std::optional<std::string> params;
  std::optional<std::string> out;
  std::uint64_t max_states = OracleBudget{}.max_states;
};

Json stats_json(const std::optional<EvolveStats>& stats) {
  return stats ? to_json(*stats) : Json(nullptr);
}

int cmd_solve(const SolveArgs& a, std::ostream& out) {
  const Json doc = read_json_file(a.in);
  const std::string problem = a.problem ? *a.problem : problem_of(doc);
  if (a.problem && doc.contains("problem") && doc.at("problem") != *a.problem) {
    throw SchemaError("instance is a " + doc.at("problem").get<std::string>() +
                      " document, not " + *a.problem);
  }
  EvolveParams params;
  if (a.params) params = params_from_json(read_json_file(*a.params));
  params.seed = a.seed;
  const OracleBudget budget{a.max_states};

  Json solution;
  bool feasible = false;
  std::string summary;
  FeasibilityReport report;
  if (problem == "wsts") {
    const WstsInstance instance = wsts_from_json(doc);
    auto r = solve_wsts(instance, a.algo, params, budget);
    feasible = r.feasible();
    report = r.report;
    Json routes = Json::array();
    for (std::size_t j = 0; j < instance.num_workers(); ++j) {
      const auto tasks = r.solution.tasks_of(j);
      if (tasks.empty()) continue;
      std::vector<Location> venues;
      for (std::size_t i : tasks) venues.push_back(instance.venue(i));
      const Route route = optimal_route(instance.position(j), venues);
      Json order = Json::array();
      for (std::size_t k : route.order) order.push_back(instance.tasks()[tasks[k]].id);
      routes.push_back({{"worker", instance.workers()[j].id},
                        {"tasks", order},
                        {"distance", route.distance}});
    }
    solution = Json{{"problem", "wsts"},
                    {"algo", a.algo},
                    {"seed", a.seed},
                    {"status", to_string(r.status)},
                    {"feasible", feasible},
                    {"objective", r.objective},
                    {"assignment", r.solution.to_rows()},
                    {"routes", routes},
                    {"runtime_seconds", r.runtime_seconds},
                    {"stats", stats_json(r.stats)}};
    solution.update(report_json(report));
    summary = "wsts " + a.algo + " status=" + to_string(r.status) +
              " feasible=" + (feasible ? "true" : "false") +
              " objective=" + Json(r.objective).dump();
  } else if (problem == "wsdt") {
    const LoadedWsdt loaded = wsdt_from_json(doc);
    const WsdtInstance& instance = loaded.instance;
    auto r = solve_wsdt(instance, a.algo, params, budget);
    feasible = r.feasible();
    report = r.report;
    Json selected = Json::array();
    for (std::size_t j : r.solution.selected()) selected.push_back(instance.workers()[j].id);
    solution = Json{{"problem", "wsdt"},
                    {"algo", a.algo},
                    {"seed", a.seed},
                    {"status", to_string(r.status)},
                    {"feasible", feasible},
                    {"objective", r.objective},
                    {"selection", r.solution.bits()},
                    {"selected", selected},
                    {"assignment", exact_assignment(instance, r.solution).to_rows()},
                    {"runtime_seconds", r.runtime_seconds},
                    {"stats", stats_json(r.stats)}};
    solution.update(report_json(report));
    summary = "wsdt " + a.algo + " status=" + to_string(r.status) +
              " feasible=" + (feasible ? "true" : "false") +
              " objective=" + Json(r.objective).dump();
  } else {
    throw SchemaError("unknown problem '" + problem + "'");
  }

  std::string path;
  if (a.out) {
    path = *a.out;
  } else {
    fs::path p(a.in);
    path = (p.parent_path() / (p.stem().string() + ".solution.json")).string();
  }
  write_json_file(path, solution);
  out << summary << '\n';
  print_shortfall(out, report);
  out << "wrote " << path << '\n';
  return feasible ? kExitOk : kExitInfeasible;
}

// --- profile -----------------------------------------------------------------

struct ProfileArgs {
  std::string traces;
  std::string antennas;
  int window = 10;
  std::string tasks;
  double r_thld = 0.8;
  std::string out;
  std::optional<std::int64_t> end_day;
  std::string mode = "days";
};

int cmd_profile(const ProfileArgs& a, std::ostream& out, std::ostream& err) {
  const TraceStore store = ingest_trace_files(a.traces, a.antennas);
  const Json tasks_doc = read_json_file(a.tasks);
  std::vector<Task> tasks = read_tasks(tasks_doc);

  for (const auto& r : store.rejects) {
    err << "warning: rejected " << r.file << " line " << r.line << ": "
        << r.reason << '\n';
  }
  if (store.records.empty()) err << "warning: no trace records\n";

  for (Task& t : tasks) {
    if (t.cell_id && store.registry.contains(*t.cell_id)) continue;
    if (t.cell_id) {
      throw SchemaError("task " + t.id + " names unknown cell " + *t.cell_id);
    }
    if (store.registry.empty()) {
      throw SchemaError("task " + t.id + " has no cell and there are no antennas");
    }
    t.cell_id = store.registry.nearest(t.venue);
  }

  std::vector<std::string> worker_ids;
  if (tasks_doc.contains("workers")) {
    for (const Json& w : tasks_doc.at("workers")) {
      worker_ids.push_back(w.at("id").get<std::string>());
    }
  } else {
    for (const auto& [id, idx] : store.by_worker) worker_ids.push_back(id);
  }

  std::int64_t end = 0;
  if (a.end_day) {
    end = *a.end_day;
  } else if (!store.by_day.empty()) {
    end = store.by_day.rbegin()->first + 1;
  }
  const DayWindow window{end - a.window, end};
  const ProbabilityMode mode =
      a.mode == "records" ? ProbabilityMode::kRecordCounts : ProbabilityMode::kDistinctDays;

  const std::vector<MobilityProfile> profiles =
      build_profiles(store.records, worker_ids, window);
  const WsdtInstance instance = make_wsdt_instance(tasks, profiles, a.r_thld, mode);
  std::vector<Worker> workers;
  for (std::size_t j = 0; j < worker_ids.size(); ++j) {
    workers.push_back(Worker{worker_ids[j], std::nullopt, j});
  }
  const WsdtInstance named(instance.tasks(), std::move(workers), a.r_thld,
                           instance.eligibility());
  Json doc = to_json(named, profiles);
  doc["window"] = {window.first_day, window.end_day};
  doc["probability_mode"] = a.mode;
  write_json_file(a.out, doc);

  std::size_t eligible = 0;
  for (std::size_t j = 0; j < named.num_workers(); ++j) eligible += named.tasks_of(j).size();
  out << "profiles=" << profiles.size() << " tasks=" << tasks.size()
      << " eligible_pairs=" << eligible << " window=" << window.first_day << ".."
      << window.end_day << " rejected=" << store.rejects.size() << '\n';
  out << "wrote " << a.out << '\n';
  return kExitOk;
}

// --- bench -------------------------------------------------------------------

struct BenchArgs {
  std::optional<std::string> config;
  std::optional<std::string> check;
  std::string out;
  std::optional<int> repetitions;
};

int report_checks(const ExperimentReport& report, std::ostream& out,
                  std::ostream& err) {
  int failed = 0;
  for (const auto& c : report.checks) {
    if (c.holds) continue;
    std::ostream& s = c.kind == "hard" ? err : out;
    s << (c.kind == "hard" ? "error" : "note") << ": " << c.kind << " check failed: "
      << c.scenario;
    if (c.repetition) s << " rep " << *c.repetition;
    s << ' ' << c.claim << " (" << c.lhs << " vs " << c.rhs << ")\n";
    if (c.kind == "hard") ++failed;
  }
  out << "checks=" << report.checks.size() << " hard_failures=" << failed << '\n';
  return failed == 0 ? kExitOk : kExitInvariantBreach;
}

int cmd_bench(const BenchArgs& a, std::ostream& out, std::ostream& err) {
  if (a.check) {
    ExperimentReport report = report_from_json(read_json_file(*a.check));
    report.checks = dominance_checks(report.rows, aggregate(report.rows));
    return report_checks(report, out, err);
  }
  ExperimentConfig config = experiment_from_json(read_json_file(*a.config));
  if (a.repetitions) {
    config.repetitions = *a.repetitions;
    config.validate();
  }
  const ExperimentReport report = run_experiment(config);
  const std::string dir = a.out.empty() ? default_out_dir() : a.out;
  for (const auto& path :
       emit_report(report, dir, config.name, config.formats, config.pivot)) {
    out << "wrote " << path << '\n';
  }
  return report_checks(report, out, err);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Worker selection for mobile crowdsensing tasks", "crowdsel"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Write a synthetic instance");
  generate->add_option("--problem", gen.problem)
      ->check(CLI::IsMember({"wsts", "wsdt"}));
  generate->add_option("--kind", gen.kind)
      ->check(CLI::IsMember({"compact", "scattered", "hybrid"}));
  generate->add_option("--tasks", gen.tasks, "Number of tasks")->required();
  generate->add_option("--workers", gen.workers, "Number of workers")->required();
  generate->add_option("--seed", gen.seed);
  generate->add_option("--out", gen.out, "Output directory");
  generate->add_option("--scenario", gen.scenario, "Base scenario JSON");
  generate->add_option("--q", gen.q);
  generate->add_option("--p-min", gen.p_min);
  generate->add_option("--p-max", gen.p_max);
  generate->add_option("--rthld", gen.r_thld);
  generate->add_option("--days", gen.days);
  generate->add_option("--grid", gen.grid);
  generate->add_flag("--traces", gen.traces, "Also write trace and antenna CSVs");

  SolveArgs sol;
  auto* solve = app.add_subcommand("solve", "Solve an instance file");
  solve->add_option("--problem", sol.problem)->check(CLI::IsMember({"wsts", "wsdt"}));
  solve->add_option("--algo", sol.algo)
      ->required()
      ->check(CLI::IsMember({"nearest-first", "most-first", "gga-i", "gga-u", "ga",
                             "gypso", "exact"}));
  solve->add_option("--in", sol.in)->required();
  solve->add_option("--seed", sol.seed);
  solve->add_option("--params", sol.params, "Evolutionary parameters JSON");
  solve->add_option("--out", sol.out, "Solution file");
  solve->add_option("--max-states", sol.max_states, "Exact search node budget");

  ProfileArgs prof;
  auto* profile = app.add_subcommand("profile", "Build mobility profiles and eligibility");
  profile->add_option("--traces", prof.traces)->required();
  profile->add_option("--antennas", prof.antennas)->required();
  profile->add_option("--window", prof.window, "History length in days")
      ->check(CLI::PositiveNumber);
  profile->add_option("--tasks", prof.tasks)->required();
  profile->add_option("--rthld", prof.r_thld)->check(CLI::Range(0.0, 1.0));
  profile->add_option("--out", prof.out)->required();
  profile->add_option("--end-day", prof.end_day,
                      "Exclusive last day of the window (epoch days)");
  profile->add_option("--mode", prof.mode)->check(CLI::IsMember({"days", "records"}));

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Run an experiment matrix");
  auto* config_opt = bench_cmd->add_option("--config", bench.config);
  auto* check_opt =
      bench_cmd->add_option("--check", bench.check, "Re-check an existing JSON report");
  config_opt->excludes(check_opt);
  bench_cmd->add_option("--out", bench.out, "Report directory");
  bench_cmd->add_option("--repetitions", bench.repetitions)->check(CLI::PositiveNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(std::move(reversed));
    if (*bench_cmd && !bench.config && !bench.check) {
      throw CLI::RequiredError("--config or --check");
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (*generate) return cmd_generate(gen, out);
    if (*solve) return cmd_solve(sol, out);
    if (*profile) return cmd_profile(prof, out, err);
    return cmd_bench(bench, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
}

}  // namespace crowdsel::cli
