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

// Documents cross the boundary as JSON text; the Python package turns them
// into dicts.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <utility>
#include <vector>

#include "crowdsel/bench.hpp"
#include "crowdsel/io.hpp"

namespace py = pybind11;
using namespace crowdsel;

namespace {

Json report_json(const FeasibilityReport& report) {
  Json shortfall = Json::array();
  for (const auto& s : report.violated_tasks) {
    shortfall.push_back({{"task", s.task_id}, {"missing", s.missing}});
  }
  Json excess = Json::array();
  for (const auto& e : report.violated_workers) {
    excess.push_back({{"worker", e.worker_id}, {"excess", e.excess}});
  }
  return {{"feasible", report.feasible}, {"shortfall", shortfall}, {"excess", excess}};
}

template <typename S>
Json result_json(const SolveResult<S>& r) {
  Json doc{{"algo", r.algo},
           {"status", to_string(r.status)},
           {"feasible", r.feasible()},
           {"objective", r.feasible() ? Json(r.objective) : Json(nullptr)},
           {"runtime_seconds", r.runtime_seconds},
           {"report", report_json(r.report)}};
  if (r.stats) doc["stats"] = to_json(*r.stats);
  return doc;
}

EvolveParams params_of(const std::string& params) {
  return params.empty() ? EvolveParams{} : params_from_json(Json::parse(params));
}

std::string generate(const std::string& problem, const std::string& config) {
  const ScenarioConfig c = scenario_from_json(Json::parse(config));
  if (problem == "wsts") return to_json(build_wsts_scenario(c)).dump();
  if (problem == "wsdt") {
    const WsdtScenario s = build_wsdt_scenario(c);
    return to_json(s.instance, s.profiles).dump();
  }
  throw ContractViolation("problem must be wsts or wsdt, got " + problem);
}

std::string solve(const std::string& instance, const std::string& algo,
                  const std::string& params, std::uint64_t max_states) {
  const Json doc = Json::parse(instance);
  const OracleBudget budget{max_states};
  if (problem_of(doc) == "wsts") {
    const auto r = solve_wsts(wsts_from_json(doc), algo, params_of(params), budget);
    Json out = result_json(r);
    out["problem"] = "wsts";
    out["assignment"] = r.solution.to_rows();
    return out.dump();
  }
  const auto r = solve_wsdt(wsdt_from_json(doc).instance, algo, params_of(params), budget);
  Json out = result_json(r);
  out["problem"] = "wsdt";
  out["selection"] = r.solution.bits();
  return out.dump();
}

std::string validate(const std::string& instance, const std::string& solution) {
  const Json doc = Json::parse(instance);
  const Json sol = Json::parse(solution);
  if (problem_of(doc) == "wsts") {
    const WstsInstance inst = wsts_from_json(doc);
    const auto a = AssignmentMatrix::from_rows(
        sol.at("assignment").get<std::vector<std::vector<int>>>());
    Json out = report_json(validate_assignment(inst, a));
    out["objective"] = total_distance(inst, a);
    return out.dump();
  }
  const WsdtInstance inst = wsdt_from_json(doc).instance;
  const SelectionVector s(sol.at("selection").get<std::vector<std::uint8_t>>());
  Json out = report_json(validate_selection(inst, s));
  out["objective"] = s.count();
  return out.dump();
}

std::string experiment(const std::string& config) {
  return to_json(run_experiment(experiment_from_json(Json::parse(config)))).dump();
}

double route(std::pair<double, double> start,
             const std::vector<std::pair<double, double>>& venues) {
  std::vector<Location> v;
  for (const auto& [x, y] : venues) v.push_back({x, y});
  return route_distance({start.first, start.second}, v);
}

}  // namespace

PYBIND11_MODULE(_crowdsel, m) {
  m.doc() = "Worker selection solvers for mobile crowd sensing";

  static py::exception<SchemaError> schema_error(m, "SchemaError", PyExc_ValueError);
  static py::exception<InfeasibleError> infeasible_error(m, "InfeasibleError",
                                                         PyExc_RuntimeError);
  static py::exception<BudgetExceeded> budget_error(m, "BudgetExceeded",
                                                    PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const SchemaError& e) {
      py::set_error(schema_error, e.what());
    } catch (const InfeasibleError& e) {
      py::set_error(infeasible_error, e.what());
    } catch (const BudgetExceeded& e) {
      py::set_error(budget_error, e.what());
    } catch (const Json::exception& e) {
      py::set_error(schema_error, e.what());
    }
  });

  m.def("manhattan_distance",
        [](std::pair<double, double> a, std::pair<double, double> b) {
          return manhattan_distance({a.first, a.second}, {b.first, b.second});
        },
        py::arg("a"), py::arg("b"));
  m.def("route_distance", &route, py::arg("start"), py::arg("venues"),
        "Length of the shortest open route from start through every venue.");
  m.def("generate", &generate, py::arg("problem"), py::arg("config"));
  m.def("solve", &solve, py::arg("instance"), py::arg("algo"), py::arg("params") = "",
        py::arg("max_states") = OracleBudget{}.max_states);
  m.def("validate", &validate, py::arg("instance"), py::arg("solution"));
  m.def("run_experiment", &experiment, py::arg("config"));
  m.attr("WSTS_ALGORITHMS") = wsts_algorithms();
  m.attr("WSDT_ALGORITHMS") = wsdt_algorithms();
}
