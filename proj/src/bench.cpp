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

#include "crowdsel/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>
#include <utility>

#include "crowdsel/greedy.hpp"

namespace crowdsel {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

template <typename F>
auto wrap_schema(const char* what, F&& body) {
  try {
    return body();
  } catch (const SchemaError&) {
    throw;
  } catch (const ContractViolation& e) {
    throw SchemaError(std::string(what) + ": " + e.what());
  } catch (const Json::exception& e) {
    throw SchemaError(std::string(what) + ": " + e.what());
  }
}

bool contains(const std::vector<std::string>& names, const std::string& name) {
  return std::find(names.begin(), names.end(), name) != names.end();
}

int total_missing(const FeasibilityReport& report) {
  int missing = 0;
  for (const auto& s : report.violated_tasks) missing += std::max(0, s.missing);
  return missing;
}

SolveResult<AssignmentMatrix> wsts_fallback(const WstsInstance& instance,
                                            std::string algo,
                                            Clock::time_point start) {
  SolveResult<AssignmentMatrix> out;
  out.algo = std::move(algo);
  out.status = SolveStatus::kInfeasible;
  out.solution = nearest_first(instance).solution;
  out.report = validate_assignment(instance, out.solution);
  out.objective = total_distance(instance, out.solution);
  out.runtime_seconds = seconds_since(start);
  return out;
}

SolveResult<SelectionVector> wsdt_fallback(const WsdtInstance& instance,
                                           std::string algo,
                                           Clock::time_point start) {
  SolveResult<SelectionVector> out;
  out.algo = std::move(algo);
  out.status = SolveStatus::kInfeasible;
  out.solution = most_first(instance).solution;
  out.report = validate_selection(instance, out.solution);
  out.objective = out.solution.count();
  out.runtime_seconds = seconds_since(start);
  return out;
}

double mean(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double stddev(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double mu = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - mu) * (x - mu);
  return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

std::optional<double> mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return std::nullopt;
  return mean(xs);
}

ResultRow wsts_row(const WstsInstance& instance,
                   const SolveResult<AssignmentMatrix>& r) {
  ResultRow row;
  row.problem = "wsts";
  row.solver = r.algo;
  row.status = to_string(r.status);
  row.feasible = r.feasible();
  row.runtime_total = r.runtime_seconds;
  row.shortfall = total_missing(r.report);
  if (r.stats) {
    row.runtime_per_generation = r.stats->mean_runtime_per_generation();
    row.generations = r.stats->generations_run;
  }
  int used = 0;
  for (std::size_t j = 0; j < r.solution.num_workers(); ++j) {
    if (r.solution.row_sum(j) > 0) ++used;
  }
  row.workers_selected = used;
  if (used > 0) {
    row.tasks_per_worker = static_cast<double>(r.solution.ones()) / used;
  }
  if (row.feasible) {
    row.objective = r.objective;
    if (instance.unit_mode() == UnitMode::kMeters) {
      row.mean_completion_time = completion_times(instance, r.solution).mean;
    }
  }
  return row;
}

ResultRow wsdt_row(const WsdtInstance& instance,
                   const SolveResult<SelectionVector>& r) {
  ResultRow row;
  row.problem = "wsdt";
  row.solver = r.algo;
  row.status = to_string(r.status);
  row.feasible = r.feasible();
  row.runtime_total = r.runtime_seconds;
  row.shortfall = total_missing(r.report);
  if (r.stats) {
    row.runtime_per_generation = r.stats->mean_runtime_per_generation();
    row.generations = r.stats->generations_run;
  }
  row.workers_selected = r.solution.count();
  if (row.feasible) {
    row.objective = r.objective;
    if (row.workers_selected > 0) {
      row.tasks_per_worker =
          static_cast<double>(exact_assignment(instance, r.solution).ones()) /
          row.workers_selected;
    }
  }
  return row;
}

Json opt(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }
Json opt(const std::optional<int>& v) { return v ? Json(*v) : Json(nullptr); }

std::string csv_cell(const std::optional<double>& v) {
  if (!v) return "";
  std::ostringstream os;
  os.precision(12);
  os << *v;
  return os.str();
}

std::string csv_cell(double v) { return csv_cell(std::optional<double>(v)); }

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_lines(const std::string& path, const std::vector<std::string>& lines) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (const auto& line : lines) out << line << '\n';
  if (!out) throw std::runtime_error("cannot write " + path);
}

std::string join(const std::vector<std::string>& cells) {
  std::string s;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (k > 0) s += ',';
    s += csv_escape(cells[k]);
  }
  return s;
}

std::vector<std::string> row_cells(const ResultRow& r) {
  return {r.scenario,
          r.problem,
          r.solver,
          std::to_string(r.repetition),
          std::to_string(r.seed),
          r.feasible ? "true" : "false",
          r.status,
          csv_cell(r.objective),
          csv_cell(r.runtime_total),
          csv_cell(r.runtime_per_generation),
          r.generations ? std::to_string(*r.generations) : "",
          csv_cell(r.mean_completion_time),
          std::to_string(r.workers_selected),
          csv_cell(r.tasks_per_worker),
          std::to_string(r.shortfall)};
}

std::vector<std::string> aggregate_cells(const Aggregate& a) {
  return {a.scenario,
          a.solver,
          std::to_string(a.runs),
          std::to_string(a.feasible_runs),
          csv_cell(a.mean_objective),
          csv_cell(a.stddev_objective),
          csv_cell(a.mean_runtime_per_generation),
          csv_cell(a.mean_runtime_total),
          csv_cell(a.mean_completion_time),
          csv_cell(a.mean_workers_selected),
          csv_cell(a.mean_tasks_per_worker)};
}

Json aggregate_json(const Aggregate& a) {
  return Json{{"scenario", a.scenario},
              {"solver", a.solver},
              {"runs", a.runs},
              {"feasible_runs", a.feasible_runs},
              {"mean_objective", opt(a.mean_objective)},
              {"stddev_objective", opt(a.stddev_objective)},
              {"mean_runtime_per_generation", opt(a.mean_runtime_per_generation)},
              {"mean_runtime_total", a.mean_runtime_total},
              {"mean_completion_time", opt(a.mean_completion_time)},
              {"mean_workers_selected", a.mean_workers_selected},
              {"mean_tasks_per_worker", opt(a.mean_tasks_per_worker)}};
}

std::optional<double> opt_double(const Json& doc, const char* key) {
  if (!doc.contains(key) || doc.at(key).is_null()) return std::nullopt;
  return doc.at(key).get<double>();
}

std::vector<std::string> pivot_lines(const ExperimentReport& report,
                                     const PivotSpec& pivot) {
  std::vector<std::string> scenarios;
  std::vector<std::string> solvers;
  std::map<std::pair<std::string, std::string>, const Aggregate*> cell;
  for (const auto& a : report.aggregates) {
    if (!contains(scenarios, a.scenario)) scenarios.push_back(a.scenario);
    if (!contains(solvers, a.solver)) solvers.push_back(a.solver);
    cell[{a.scenario, a.solver}] = &a;
  }
  auto value = [&](const std::string& scenario, const std::string& solver) {
    auto it = cell.find({scenario, solver});
    if (it == cell.end()) return std::string();
    return csv_cell(aggregate_metric(*it->second, pivot.metric));
  };
  std::vector<std::string> lines;
  if (pivot.orient == "solver_rows") {
    std::vector<std::string> header{pivot.metric};
    header.insert(header.end(), scenarios.begin(), scenarios.end());
    lines.push_back(join(header));
    for (const auto& solver : solvers) {
      std::vector<std::string> cells{solver};
      for (const auto& scenario : scenarios) cells.push_back(value(scenario, solver));
      lines.push_back(join(cells));
    }
  } else {
    std::vector<std::string> header{"scenario"};
    header.insert(header.end(), solvers.begin(), solvers.end());
    lines.push_back(join(header));
    for (const auto& scenario : scenarios) {
      std::vector<std::string> cells{scenario};
      for (const auto& solver : solvers) cells.push_back(value(scenario, solver));
      lines.push_back(join(cells));
    }
  }
  return lines;
}

}  // namespace

const std::vector<std::string>& wsts_algorithms() {
  static const std::vector<std::string> names{"nearest-first", "gga-i", "ga",
                                              "gypso", "exact"};
  return names;
}

const std::vector<std::string>& wsdt_algorithms() {
  static const std::vector<std::string> names{"most-first", "gga-u", "ga",
                                              "exact"};
  return names;
}

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOk:
      return "ok";
    case SolveStatus::kInfeasible:
      return "infeasible";
    case SolveStatus::kBudgetExceeded:
      return "budget_exceeded";
  }
  return "ok";
}

SolveResult<AssignmentMatrix> solve_wsts(const WstsInstance& instance,
                                         const std::string& algo,
                                         const EvolveParams& params,
                                         const OracleBudget& budget) {
  if (!contains(wsts_algorithms(), algo)) {
    throw ContractViolation("unknown wsts algorithm '" + algo + "'");
  }
  params.validate();
  const auto start = Clock::now();
  SolveResult<AssignmentMatrix> out;
  out.algo = algo;
  try {
    if (algo == "nearest-first") {
      auto g = nearest_first(instance);
      out.solution = std::move(g.solution);
      if (!g.complete()) out.status = SolveStatus::kInfeasible;
    } else if (algo == "exact") {
      out.solution = enumerate_wsts(instance, budget).solution;
    } else {
      EvolveResult<AssignmentMatrix> r;
      if (algo == "gga-i") {
        r = gga_i(instance, params);
      } else if (algo == "gypso") {
        r = gypso(instance, params);
      } else {
        r = plain_ga_wsts(instance, params);
      }
      out.solution = std::move(r.best);
      out.stats = std::move(r.stats);
    }
  } catch (const InfeasibleError&) {
    return wsts_fallback(instance, algo, start);
  } catch (const BudgetExceeded&) {
    out.status = SolveStatus::kBudgetExceeded;
    out.solution = AssignmentMatrix(instance.num_workers(), instance.num_tasks());
  }
  out.report = validate_assignment(instance, out.solution);
  out.objective = total_distance(instance, out.solution);
  if (!out.report.feasible && out.status == SolveStatus::kOk) {
    out.status = SolveStatus::kInfeasible;
  }
  out.runtime_seconds = seconds_since(start);
  return out;
}

SolveResult<SelectionVector> solve_wsdt(const WsdtInstance& instance,
                                        const std::string& algo,
                                        const EvolveParams& params,
                                        const OracleBudget& budget) {
  if (!contains(wsdt_algorithms(), algo)) {
    throw ContractViolation("unknown wsdt algorithm '" + algo + "'");
  }
  params.validate();
  const auto start = Clock::now();
  SolveResult<SelectionVector> out;
  out.algo = algo;
  try {
    if (algo == "most-first") {
      auto g = most_first(instance);
      out.solution = std::move(g.solution);
      if (!g.complete()) out.status = SolveStatus::kInfeasible;
    } else if (algo == "exact") {
      out.solution = enumerate_wsdt(instance, budget).solution;
    } else {
      auto r = algo == "gga-u" ? gga_u(instance, params)
                               : plain_ga_wsdt(instance, params);
      out.solution = std::move(r.best);
      out.stats = std::move(r.stats);
    }
  } catch (const InfeasibleError&) {
    return wsdt_fallback(instance, algo, start);
  } catch (const BudgetExceeded&) {
    out.status = SolveStatus::kBudgetExceeded;
    out.solution = SelectionVector(instance.num_workers());
  }
  out.report = validate_selection(instance, out.solution);
  out.objective = out.solution.count();
  if (!out.report.feasible && out.status == SolveStatus::kOk) {
    out.status = SolveStatus::kInfeasible;
  }
  out.runtime_seconds = seconds_since(start);
  return out;
}

void ExperimentConfig::validate() const {
  if (repetitions < 1) throw ContractViolation("repetitions must be >= 1");
  if (scenarios.empty()) throw ContractViolation("no scenarios");
  if (solvers.empty()) throw ContractViolation("no solvers");
  if (name.empty()) throw ContractViolation("report name is empty");
  std::vector<std::string> labels;
  for (const auto& s : scenarios) {
    if (s.label.empty()) throw ContractViolation("scenario label is empty");
    if (contains(labels, s.label)) {
      throw ContractViolation("duplicate scenario label '" + s.label + "'");
    }
    labels.push_back(s.label);
    if (s.problem != "wsts" && s.problem != "wsdt") {
      throw ContractViolation("scenario '" + s.label + "': unknown problem '" +
                              s.problem + "'");
    }
    s.config.validate();
  }
  for (const auto& v : solvers) {
    if (!contains(wsts_algorithms(), v.algo) &&
        !contains(wsdt_algorithms(), v.algo)) {
      throw ContractViolation("unknown solver '" + v.algo + "'");
    }
    v.params.validate();
  }
  for (const auto& f : formats) {
    if (f != "csv" && f != "json") {
      throw ContractViolation("unknown report format '" + f + "'");
    }
  }
  if (pivot && pivot->orient != "solver_rows" && pivot->orient != "scenario_rows") {
    throw ContractViolation("unknown pivot orientation '" + pivot->orient + "'");
  }
  for (const auto& t : trends) {
    for (const auto& label : t.scenarios) {
      if (!contains(labels, label)) {
        throw ContractViolation("trend names unknown scenario '" + label + "'");
      }
    }
  }
}

ExperimentConfig experiment_from_json(const Json& doc) {
  return wrap_schema("experiment", [&] {
    if (!doc.is_object()) throw SchemaError("experiment must be an object");
    static const std::vector<std::string> known{
        "name", "repetitions", "formats", "pivot", "oracle_max_states",
        "defaults", "scenarios", "solvers", "trends", "license"};
    for (const auto& [key, value] : doc.items()) {
      if (!contains(known, key)) {
        throw SchemaError("experiment: unknown field '" + key + "'");
      }
    }
    ExperimentConfig c;
    c.name = doc.value("name", c.name);
    c.repetitions = doc.value("repetitions", c.repetitions);
    if (doc.contains("formats")) {
      c.formats = doc.at("formats").get<std::vector<std::string>>();
    }
    if (doc.contains("oracle_max_states")) {
      c.budget.max_states = doc.at("oracle_max_states").get<std::uint64_t>();
    }
    if (doc.contains("pivot")) {
      PivotSpec p;
      p.metric = doc.at("pivot").value("metric", p.metric);
      p.orient = doc.at("pivot").value("orient", p.orient);
      c.pivot = p;
    }
    Json scenario_defaults = Json::object();
    EvolveParams param_defaults;
    if (doc.contains("defaults")) {
      const Json& d = doc.at("defaults");
      if (d.contains("scenario")) scenario_defaults = d.at("scenario");
      if (d.contains("params")) param_defaults = params_from_json(d.at("params"));
    }
    for (const Json& s : doc.at("scenarios")) {
      ScenarioSpec spec;
      spec.label = s.at("label").get<std::string>();
      spec.problem = s.value("problem", spec.problem);
      Json merged = scenario_defaults;
      if (s.contains("config")) merged.merge_patch(s.at("config"));
      spec.config = scenario_from_json(merged);
      if (s.contains("population_seed")) {
        spec.population_seed = s.at("population_seed").get<std::uint64_t>();
      }
      c.scenarios.push_back(std::move(spec));
    }
    for (const Json& v : doc.at("solvers")) {
      SolverSpec spec;
      spec.algo = v.at("algo").get<std::string>();
      spec.params = v.contains("params")
                        ? params_from_json(v.at("params"), param_defaults)
                        : param_defaults;
      c.solvers.push_back(std::move(spec));
    }
    if (doc.contains("trends")) {
      for (const Json& t : doc.at("trends")) {
        TrendSpec spec;
        spec.solver = t.at("solver").get<std::string>();
        spec.scenarios = t.at("scenarios").get<std::vector<std::string>>();
        if (t.contains("metrics")) {
          spec.metrics = t.at("metrics").get<std::vector<std::string>>();
        }
        c.trends.push_back(std::move(spec));
      }
    }
    c.validate();
    return c;
  });
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  ExperimentReport report;
  for (const auto& scenario : config.scenarios) {
    const auto& algos =
        scenario.problem == "wsts" ? wsts_algorithms() : wsdt_algorithms();
    for (int rep = 0; rep < config.repetitions; ++rep) {
      const std::uint64_t seed =
          derive_seed(scenario.config.seed, static_cast<std::uint64_t>(rep));
      ScenarioConfig sc = scenario.config;
      sc.seed = seed;
      std::optional<WstsInstance> wsts;
      std::optional<WsdtScenario> wsdt;
      if (scenario.problem == "wsts") {
        wsts.emplace(build_wsts_scenario(sc));
      } else if (scenario.population_seed) {
        wsdt.emplace(build_wsdt_scenario(
            sc, derive_seed(*scenario.population_seed,
                            static_cast<std::uint64_t>(rep))));
      } else {
        wsdt.emplace(build_wsdt_scenario(sc));
      }
      for (const auto& solver : config.solvers) {
        if (!contains(algos, solver.algo)) continue;
        EvolveParams params = solver.params;
        params.seed = seed;
        ResultRow row =
            wsts ? wsts_row(*wsts, solve_wsts(*wsts, solver.algo, params,
                                              config.budget))
                 : wsdt_row(wsdt->instance,
                            solve_wsdt(wsdt->instance, solver.algo, params,
                                       config.budget));
        row.scenario = scenario.label;
        row.repetition = rep;
        row.seed = seed;
        report.rows.push_back(std::move(row));
      }
    }
  }
  report.aggregates = aggregate(report.rows);
  report.checks = dominance_checks(report.rows, report.aggregates);
  auto trends = trend_checks(report.aggregates, config.trends);
  report.checks.insert(report.checks.end(), trends.begin(), trends.end());
  return report;
}

std::vector<Aggregate> aggregate(const std::vector<ResultRow>& rows) {
  std::vector<std::pair<std::string, std::string>> order;
  std::map<std::pair<std::string, std::string>, std::vector<const ResultRow*>> groups;
  for (const auto& r : rows) {
    auto key = std::make_pair(r.scenario, r.solver);
    if (!groups.count(key)) order.push_back(key);
    groups[key].push_back(&r);
  }
  std::vector<Aggregate> out;
  for (const auto& key : order) {
    std::vector<const ResultRow*> members = groups[key];
    std::stable_sort(members.begin(), members.end(),
                     [](const ResultRow* a, const ResultRow* b) {
                       return a->repetition < b->repetition;
                     });
    Aggregate a;
    a.scenario = key.first;
    a.solver = key.second;
    std::vector<double> obj, rpg, total, ct, sel, tpw;
    for (const ResultRow* r : members) {
      ++a.runs;
      total.push_back(r->runtime_total);
      sel.push_back(r->workers_selected);
      if (r->runtime_per_generation) rpg.push_back(*r->runtime_per_generation);
      if (!r->feasible) continue;
      ++a.feasible_runs;
      if (r->objective) obj.push_back(*r->objective);
      if (r->mean_completion_time) ct.push_back(*r->mean_completion_time);
      if (r->tasks_per_worker) tpw.push_back(*r->tasks_per_worker);
    }
    a.mean_objective = mean_of(obj);
    if (!obj.empty()) a.stddev_objective = stddev(obj);
    a.mean_runtime_per_generation = mean_of(rpg);
    a.mean_runtime_total = mean(total);
    a.mean_completion_time = mean_of(ct);
    a.mean_workers_selected = mean(sel);
    a.mean_tasks_per_worker = mean_of(tpw);
    out.push_back(std::move(a));
  }
  return out;
}

std::optional<double> aggregate_metric(const Aggregate& agg,
                                       const std::string& metric) {
  if (metric == "objective") return agg.mean_objective;
  if (metric == "runtime_per_generation") return agg.mean_runtime_per_generation;
  if (metric == "runtime_total") return agg.mean_runtime_total;
  if (metric == "mean_completion_time") return agg.mean_completion_time;
  if (metric == "workers_selected") return agg.mean_workers_selected;
  if (metric == "tasks_per_worker") return agg.mean_tasks_per_worker;
  throw ContractViolation("unknown metric '" + metric + "'");
}

std::vector<DominanceCheck> dominance_checks(const std::vector<ResultRow>& rows,
                                             const std::vector<Aggregate>& aggs) {
  std::vector<DominanceCheck> out;
  static const std::vector<std::pair<std::string, std::string>> hard{
      {"gga-i", "nearest-first"}, {"gga-u", "most-first"}, {"gypso", "nearest-first"}};
  std::map<std::tuple<std::string, int, std::string>, const ResultRow*> index;
  std::vector<std::pair<std::string, int>> runs;
  for (const auto& r : rows) {
    index[{r.scenario, r.repetition, r.solver}] = &r;
    auto run = std::make_pair(r.scenario, r.repetition);
    if (std::find(runs.begin(), runs.end(), run) == runs.end()) runs.push_back(run);
  }
  for (const auto& [scenario, rep] : runs) {
    for (const auto& [lhs, rhs] : hard) {
      auto a = index.find({scenario, rep, lhs});
      auto b = index.find({scenario, rep, rhs});
      if (a == index.end() || b == index.end()) continue;
      if (!a->second->objective || !b->second->objective) continue;
      DominanceCheck c;
      c.kind = "hard";
      c.scenario = scenario;
      c.repetition = rep;
      c.claim = lhs + " <= " + rhs;
      c.lhs = *a->second->objective;
      c.rhs = *b->second->objective;
      c.holds = c.lhs <= c.rhs;
      out.push_back(std::move(c));
    }
  }
  static const std::vector<std::pair<std::string, std::string>> soft{
      {"gga-i", "gypso"}, {"gypso", "nearest-first"}, {"gga-i", "ga"}};
  std::map<std::pair<std::string, std::string>, const Aggregate*> by_cell;
  std::vector<std::string> scenarios;
  for (const auto& a : aggs) {
    by_cell[{a.scenario, a.solver}] = &a;
    if (!contains(scenarios, a.scenario)) scenarios.push_back(a.scenario);
  }
  for (const auto& scenario : scenarios) {
    for (const auto& [lhs, rhs] : soft) {
      auto a = by_cell.find({scenario, lhs});
      auto b = by_cell.find({scenario, rhs});
      if (a == by_cell.end() || b == by_cell.end()) continue;
      if (!a->second->mean_objective || !b->second->mean_objective) continue;
      DominanceCheck c;
      c.kind = "statistical";
      c.scenario = scenario;
      c.claim = lhs + " <= " + rhs;
      c.lhs = *a->second->mean_objective;
      c.rhs = *b->second->mean_objective;
      const double slack = std::max(a->second->stddev_objective.value_or(0.0),
                                    b->second->stddev_objective.value_or(0.0));
      c.holds = c.lhs <= c.rhs + slack;
      out.push_back(std::move(c));
    }
  }
  return out;
}

std::vector<DominanceCheck> trend_checks(const std::vector<Aggregate>& aggs,
                                         const std::vector<TrendSpec>& trends) {
  std::vector<DominanceCheck> out;
  for (const auto& t : trends) {
    for (const auto& metric : t.metrics) {
      for (std::size_t k = 1; k < t.scenarios.size(); ++k) {
        const Aggregate* prev = nullptr;
        const Aggregate* next = nullptr;
        for (const auto& a : aggs) {
          if (a.solver != t.solver) continue;
          if (a.scenario == t.scenarios[k - 1]) prev = &a;
          if (a.scenario == t.scenarios[k]) next = &a;
        }
        if (!prev || !next) continue;
        auto lhs = aggregate_metric(*next, metric);
        auto rhs = aggregate_metric(*prev, metric);
        if (!lhs || !rhs) continue;
        DominanceCheck c;
        c.kind = "trend";
        c.scenario = t.scenarios[k];
        c.claim = t.solver + " " + metric + ": " + t.scenarios[k] + " <= " +
                  t.scenarios[k - 1];
        c.lhs = *lhs;
        c.rhs = *rhs;
        c.holds = c.lhs <= c.rhs;
        out.push_back(std::move(c));
      }
    }
  }
  return out;
}

bool ExperimentReport::hard_invariants_hold() const {
  return std::all_of(checks.begin(), checks.end(), [](const DominanceCheck& c) {
    return c.kind != "hard" || c.holds;
  });
}

const std::vector<std::string>& row_columns() {
  static const std::vector<std::string> cols{
      "scenario",       "problem",
      "solver",         "repetition",
      "seed",           "feasible",
      "status",         "objective",
      "runtime_total",  "runtime_per_generation",
      "generations",    "mean_completion_time",
      "workers_selected", "tasks_per_worker",
      "shortfall"};
  return cols;
}

const std::vector<std::string>& aggregate_columns() {
  static const std::vector<std::string> cols{
      "scenario",         "solver",
      "runs",             "feasible_runs",
      "mean_objective",   "stddev_objective",
      "mean_runtime_per_generation", "mean_runtime_total",
      "mean_completion_time", "mean_workers_selected",
      "mean_tasks_per_worker"};
  return cols;
}

Json to_json(const ExperimentReport& report) {
  Json rows = Json::array();
  for (const auto& r : report.rows) {
    rows.push_back(Json{{"scenario", r.scenario},
                        {"problem", r.problem},
                        {"solver", r.solver},
                        {"repetition", r.repetition},
                        {"seed", r.seed},
                        {"feasible", r.feasible},
                        {"status", r.status},
                        {"objective", opt(r.objective)},
                        {"runtime_total", r.runtime_total},
                        {"runtime_per_generation", opt(r.runtime_per_generation)},
                        {"generations", opt(r.generations)},
                        {"mean_completion_time", opt(r.mean_completion_time)},
                        {"workers_selected", r.workers_selected},
                        {"tasks_per_worker", opt(r.tasks_per_worker)},
                        {"shortfall", r.shortfall}});
  }
  Json aggs = Json::array();
  for (const auto& a : report.aggregates) aggs.push_back(aggregate_json(a));
  Json checks = Json::array();
  for (const auto& c : report.checks) {
    checks.push_back(Json{{"kind", c.kind},
                          {"scenario", c.scenario},
                          {"repetition", opt(c.repetition)},
                          {"claim", c.claim},
                          {"lhs", c.lhs},
                          {"rhs", c.rhs},
                          {"holds", c.holds}});
  }
  return Json{{"schema_version", kReportSchemaVersion},
              {"rows", rows},
              {"aggregates", aggs},
              {"checks", checks},
              {"hard_invariants_hold", report.hard_invariants_hold()}};
}

ExperimentReport report_from_json(const Json& doc) {
  return wrap_schema("report", [&] {
    if (doc.value("schema_version", 0) != kReportSchemaVersion) {
      throw SchemaError("report: unsupported schema_version");
    }
    ExperimentReport report;
    for (const Json& j : doc.at("rows")) {
      ResultRow r;
      r.scenario = j.at("scenario").get<std::string>();
      r.problem = j.at("problem").get<std::string>();
      r.solver = j.at("solver").get<std::string>();
      r.repetition = j.at("repetition").get<int>();
      r.seed = j.at("seed").get<std::uint64_t>();
      r.feasible = j.at("feasible").get<bool>();
      r.status = j.at("status").get<std::string>();
      r.objective = opt_double(j, "objective");
      r.runtime_total = j.at("runtime_total").get<double>();
      r.runtime_per_generation = opt_double(j, "runtime_per_generation");
      if (!j.at("generations").is_null()) r.generations = j.at("generations").get<int>();
      r.mean_completion_time = opt_double(j, "mean_completion_time");
      r.workers_selected = j.at("workers_selected").get<int>();
      r.tasks_per_worker = opt_double(j, "tasks_per_worker");
      r.shortfall = j.at("shortfall").get<int>();
      if (r.objective.has_value() != r.feasible) {
        throw SchemaError("report: objective must be present iff feasible");
      }
      report.rows.push_back(std::move(r));
    }
    for (const Json& j : doc.at("aggregates")) {
      Aggregate a;
      a.scenario = j.at("scenario").get<std::string>();
      a.solver = j.at("solver").get<std::string>();
      a.runs = j.at("runs").get<int>();
      a.feasible_runs = j.at("feasible_runs").get<int>();
      a.mean_objective = opt_double(j, "mean_objective");
      a.stddev_objective = opt_double(j, "stddev_objective");
      a.mean_runtime_per_generation = opt_double(j, "mean_runtime_per_generation");
      a.mean_runtime_total = j.at("mean_runtime_total").get<double>();
      a.mean_completion_time = opt_double(j, "mean_completion_time");
      a.mean_workers_selected = j.at("mean_workers_selected").get<double>();
      a.mean_tasks_per_worker = opt_double(j, "mean_tasks_per_worker");
      report.aggregates.push_back(std::move(a));
    }
    for (const Json& j : doc.at("checks")) {
      DominanceCheck c;
      c.kind = j.at("kind").get<std::string>();
      c.scenario = j.at("scenario").get<std::string>();
      if (!j.at("repetition").is_null()) c.repetition = j.at("repetition").get<int>();
      c.claim = j.at("claim").get<std::string>();
      c.lhs = j.at("lhs").get<double>();
      c.rhs = j.at("rhs").get<double>();
      c.holds = j.at("holds").get<bool>();
      report.checks.push_back(std::move(c));
    }
    return report;
  });
}

std::vector<std::string> emit_report(const ExperimentReport& report,
                                     const std::string& dir,
                                     const std::string& name,
                                     const std::vector<std::string>& formats,
                                     const std::optional<PivotSpec>& pivot) {
  if (report.rows.empty()) throw ContractViolation("report has no rows");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir + ": " + ec.message());
  const std::filesystem::path base(dir);
  std::vector<std::string> written;
  for (const auto& format : formats) {
    if (format == "csv") {
      std::vector<std::string> lines{join(row_columns())};
      for (const auto& r : report.rows) lines.push_back(join(row_cells(r)));
      const std::string rows_path = (base / (name + "_rows.csv")).string();
      write_lines(rows_path, lines);
      written.push_back(rows_path);

      lines = {join(aggregate_columns())};
      for (const auto& a : report.aggregates) lines.push_back(join(aggregate_cells(a)));
      const std::string summary_path = (base / (name + "_summary.csv")).string();
      write_lines(summary_path, lines);
      written.push_back(summary_path);

      if (pivot) {
        const std::string table_path = (base / (name + "_table.csv")).string();
        write_lines(table_path, pivot_lines(report, *pivot));
        written.push_back(table_path);
      }
    } else if (format == "json") {
      const std::string path = (base / (name + ".json")).string();
      write_json_file(path, to_json(report));
      written.push_back(path);
    } else {
      throw ContractViolation("unknown report format '" + format + "'");
    }
  }
  return written;
}

}  // namespace crowdsel
