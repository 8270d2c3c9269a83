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

#include "crowdsel/io.hpp"

#include <fstream>
#include <set>

namespace crowdsel {
namespace {

const Json& field(const Json& doc, const char* key, const std::string& where) {
  if (!doc.is_object() || !doc.contains(key)) {
    throw SchemaError(where + ": missing field '" + key + "'");
  }
  return doc.at(key);
}

double number(const Json& doc, const char* key, const std::string& where) {
  const Json& v = field(doc, key, where);
  if (!v.is_number()) throw SchemaError(where + ": '" + key + "' must be a number");
  return v.get<double>();
}

long long integer(const Json& doc, const char* key, const std::string& where) {
  const Json& v = field(doc, key, where);
  if (!v.is_number_integer()) {
    throw SchemaError(where + ": '" + key + "' must be an integer");
  }
  return v.get<long long>();
}

std::string text(const Json& doc, const char* key, const std::string& where) {
  const Json& v = field(doc, key, where);
  if (!v.is_string()) throw SchemaError(where + ": '" + key + "' must be a string");
  return v.get<std::string>();
}

const Json& array(const Json& doc, const char* key, const std::string& where) {
  const Json& v = field(doc, key, where);
  if (!v.is_array()) throw SchemaError(where + ": '" + key + "' must be an array");
  return v;
}

std::string id_of(const Json& doc, const std::string& where) {
  const Json& v = field(doc, "id", where);
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw SchemaError(where + ": 'id' must be a string or integer");
}

Task task_from_json(const Json& doc, const std::string& where) {
  Task t;
  t.id = id_of(doc, where);
  t.venue = {number(doc, "x", where), number(doc, "y", where)};
  t.required_workers = static_cast<int>(integer(doc, "p", where));
  if (doc.contains("published_at") && !doc.at("published_at").is_null()) {
    const Json& when = doc.at("published_at");
    if (when.is_number_integer()) {
      t.published_at = when.get<std::int64_t>();
    } else if (when.is_string()) {
      t.published_at = parse_timestamp(when.get<std::string>());
      if (!t.published_at) throw SchemaError(where + ": bad 'published_at'");
    } else {
      throw SchemaError(where + ": bad 'published_at'");
    }
  }
  if (doc.contains("cell") && !doc.at("cell").is_null()) {
    t.cell_id = text(doc, "cell", where);
  }
  return t;
}

Json task_to_json(const Task& t) {
  Json doc{{"id", t.id}, {"x", t.venue.x}, {"y", t.venue.y},
           {"p", t.required_workers}};
  if (t.published_at) doc["published_at"] = format_timestamp(*t.published_at);
  if (t.cell_id) doc["cell"] = *t.cell_id;
  return doc;
}

std::vector<Task> tasks_from_json(const Json& doc) {
  std::vector<Task> tasks;
  std::set<std::string> seen;
  const Json& list = array(doc, "tasks", "instance");
  for (std::size_t i = 0; i < list.size(); ++i) {
    tasks.push_back(task_from_json(list[i], "tasks[" + std::to_string(i) + "]"));
    if (!seen.insert(tasks.back().id).second) {
      throw SchemaError("duplicate task id '" + tasks.back().id + "'");
    }
  }
  return tasks;
}

template <typename F>
auto wrap(const char* what, F&& body) {
  try {
    return body();
  } catch (const ContractViolation& e) {
    throw SchemaError(std::string(what) + ": " + e.what());
  } catch (const Json::exception& e) {
    throw SchemaError(std::string(what) + ": " + e.what());
  }
}

}  // namespace

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw SchemaError(path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const Json& doc) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << doc.dump(2) << '\n';
  if (!out) throw std::runtime_error("cannot write " + path);
}

std::vector<Task> read_tasks(const Json& doc) {
  return wrap("tasks", [&] { return tasks_from_json(doc); });
}

Json tasks_document(std::span<const Task> tasks) {
  Json list = Json::array();
  for (const Task& t : tasks) list.push_back(task_to_json(t));
  return Json{{"tasks", std::move(list)}};
}

Json to_json(const WstsInstance& instance) {
  Json tasks = Json::array();
  for (const Task& t : instance.tasks()) tasks.push_back(task_to_json(t));
  Json workers = Json::array();
  for (const Worker& w : instance.workers()) {
    workers.push_back({{"id", w.id}, {"x", w.position->x}, {"y", w.position->y}});
  }
  return Json{{"problem", "wsts"},
              {"unit_mode", to_string(instance.unit_mode())},
              {"speed", instance.speed()},
              {"q", instance.q()},
              {"tasks", std::move(tasks)},
              {"workers", std::move(workers)}};
}

WstsInstance wsts_from_json(const Json& doc) {
  return wrap("wsts instance", [&] {
    const UnitMode mode = doc.contains("unit_mode")
                              ? unit_mode_from_string(text(doc, "unit_mode", "instance"))
                              : UnitMode::kMeters;
    const double speed = doc.contains("speed") ? number(doc, "speed", "instance")
                                               : kDefaultSpeedMetersPerMinute;
    const int q = static_cast<int>(integer(doc, "q", "instance"));
    std::vector<Worker> workers;
    std::set<std::string> seen;
    const Json& list = array(doc, "workers", "instance");
    for (std::size_t j = 0; j < list.size(); ++j) {
      const std::string where = "workers[" + std::to_string(j) + "]";
      Worker w{id_of(list[j], where),
               Location{number(list[j], "x", where), number(list[j], "y", where)},
               std::nullopt};
      if (!seen.insert(w.id).second) {
        throw SchemaError("duplicate worker id '" + w.id + "'");
      }
      workers.push_back(std::move(w));
    }
    return WstsInstance(tasks_from_json(doc), std::move(workers), q, mode, speed);
  });
}

Json to_json(const MobilityProfile& profile) {
  return Json{{"worker_id", profile.worker_id},
              {"window", {profile.window.first_day, profile.window.end_day}},
              {"days_observed", profile.days_observed},
              {"visit_days", profile.visit_days},
              {"records_observed", profile.records_observed},
              {"visit_records", profile.visit_records}};
}

MobilityProfile profile_from_json(const Json& doc) {
  return wrap("profile", [&] {
    MobilityProfile p;
    if (doc.contains("worker_id")) p.worker_id = text(doc, "worker_id", "profile");
    if (doc.contains("window")) {
      const Json& w = doc.at("window");
      p.window = {w.at(0).get<std::int64_t>(), w.at(1).get<std::int64_t>()};
    }
    p.days_observed = static_cast<int>(integer(doc, "days_observed", "profile"));
    p.visit_days = field(doc, "visit_days", "profile").get<std::map<std::string, int>>();
    if (doc.contains("records_observed")) {
      p.records_observed =
          static_cast<int>(integer(doc, "records_observed", "profile"));
      p.visit_records = doc.at("visit_records").get<std::map<std::string, int>>();
    }
    for (const auto& [cell, days] : p.visit_days) {
      if (days < 0 || days > p.days_observed) {
        throw SchemaError("profile: visit days for " + cell +
                          " exceed days observed");
      }
    }
    return p;
  });
}

Json to_json(const WsdtInstance& instance,
             std::span<const MobilityProfile> profiles) {
  if (!profiles.empty() && profiles.size() != instance.num_workers()) {
    throw ContractViolation("one profile per worker required");
  }
  Json tasks = Json::array();
  for (const Task& t : instance.tasks()) tasks.push_back(task_to_json(t));
  Json workers = Json::array();
  for (std::size_t j = 0; j < instance.num_workers(); ++j) {
    Json w{{"id", instance.workers()[j].id}};
    if (!profiles.empty()) w["profile"] = to_json(profiles[j]);
    workers.push_back(std::move(w));
  }
  Json rows = Json::array();
  for (std::size_t j = 0; j < instance.num_workers(); ++j) {
    Json row = Json::array();
    for (std::size_t i = 0; i < instance.num_tasks(); ++i) {
      row.push_back(instance.eligible(j, i) ? 1 : 0);
    }
    rows.push_back(std::move(row));
  }
  return Json{{"problem", "wsdt"},
              {"r_thld", instance.r_thld()},
              {"tasks", std::move(tasks)},
              {"workers", std::move(workers)},
              {"eligibility", std::move(rows)}};
}

LoadedWsdt wsdt_from_json(const Json& doc) {
  return wrap("wsdt instance", [&] {
    const double r_thld = number(doc, "r_thld", "instance");
    std::vector<Task> tasks = tasks_from_json(doc);
    const Json& list = array(doc, "workers", "instance");
    std::vector<MobilityProfile> profiles;
    std::vector<Worker> workers;
    for (std::size_t j = 0; j < list.size(); ++j) {
      const std::string where = "workers[" + std::to_string(j) + "]";
      Worker w{id_of(list[j], where), std::nullopt, std::nullopt};
      if (list[j].contains("profile")) {
        profiles.push_back(profile_from_json(list[j].at("profile")));
        if (profiles.back().worker_id.empty()) profiles.back().worker_id = w.id;
        w.profile_ref = j;
      }
      workers.push_back(std::move(w));
    }
    if (!profiles.empty() && profiles.size() != workers.size()) {
      throw SchemaError("either every worker or no worker carries a profile");
    }

    std::optional<Eligibility> stored;
    if (doc.contains("eligibility")) {
      const Json& rows = array(doc, "eligibility", "instance");
      if (rows.size() != workers.size()) {
        throw SchemaError("eligibility needs one row per worker");
      }
      Eligibility e(workers.size(), tasks.size());
      for (std::size_t j = 0; j < rows.size(); ++j) {
        if (!rows[j].is_array() || rows[j].size() != tasks.size()) {
          throw SchemaError("eligibility row " + std::to_string(j) +
                            " needs one entry per task");
        }
        for (std::size_t i = 0; i < tasks.size(); ++i) {
          const int v = rows[j][i].get<int>();
          if (v != 0 && v != 1) throw SchemaError("eligibility entries are 0 or 1");
          e.set(j, i, v == 1);
        }
      }
      stored = std::move(e);
    }

    if (!profiles.empty()) {
      WsdtInstance built = make_wsdt_instance(tasks, profiles, r_thld);
      if (stored && !(*stored == built.eligibility())) {
        throw SchemaError("stored eligibility disagrees with the profiles");
      }
      // Keep the document's worker ids.
      WsdtInstance instance(std::move(tasks), std::move(workers), r_thld,
                            built.eligibility());
      return LoadedWsdt{std::move(instance), std::move(profiles)};
    }
    if (!stored) {
      throw SchemaError("instance needs worker profiles or an eligibility matrix");
    }
    return LoadedWsdt{WsdtInstance(std::move(tasks), std::move(workers), r_thld,
                                   std::move(*stored)),
                      {}};
  });
}

std::string problem_of(const Json& doc) {
  if (doc.contains("problem")) {
    const std::string p = doc.at("problem").get<std::string>();
    if (p != "wsts" && p != "wsdt") throw SchemaError("unknown problem '" + p + "'");
    return p;
  }
  return doc.contains("r_thld") ? "wsdt" : "wsts";
}

Json to_json(const EvolveParams& p) {
  return Json{{"population_size", p.population_size},
              {"generations", p.generations},
              {"crossover_rate", p.crossover_rate},
              {"mutation_rate", p.mutation_rate},
              {"crossover_retry_limit", p.crossover_retry_limit},
              {"init_perturbations", p.init_perturbations},
              {"seed", p.seed},
              {"pso_personal_rate", p.pso_personal_rate},
              {"pso_global_rate", p.pso_global_rate}};
}

EvolveParams params_from_json(const Json& doc, EvolveParams base) {
  return wrap("params", [&] {
    if (!doc.is_object()) throw SchemaError("params must be an object");
    for (const auto& [key, value] : doc.items()) {
      if (key == "population_size") {
        base.population_size = value.get<int>();
      } else if (key == "generations") {
        base.generations = value.get<int>();
      } else if (key == "crossover_rate") {
        base.crossover_rate = value.get<double>();
      } else if (key == "mutation_rate") {
        base.mutation_rate = value.get<double>();
      } else if (key == "crossover_retry_limit") {
        base.crossover_retry_limit = value.get<int>();
      } else if (key == "init_perturbations") {
        base.init_perturbations = value.get<int>();
      } else if (key == "seed") {
        base.seed = value.get<std::uint64_t>();
      } else if (key == "pso_personal_rate") {
        base.pso_personal_rate = value.get<double>();
      } else if (key == "pso_global_rate") {
        base.pso_global_rate = value.get<double>();
      } else {
        throw SchemaError("params: unknown field '" + key + "'");
      }
    }
    base.validate();
    return base;
  });
}

Json to_json(const ScenarioConfig& c) {
  Json doc{{"kind", to_string(c.kind)},
           {"n", c.n},
           {"m", c.m},
           {"area",
            {{"min_x", c.area.min_x},
             {"max_x", c.area.max_x},
             {"min_y", c.area.min_y},
             {"max_y", c.area.max_y}}},
           {"p_range", {c.p_range.first, c.p_range.second}},
           {"q", c.q},
           {"r_thld", c.r_thld},
           {"days", c.days},
           {"seed", c.seed},
           {"unit_mode", to_string(c.unit_mode)},
           {"speed", c.speed},
           {"grid", c.grid},
           {"first_day", c.first_day},
           {"mixture_weight", c.mixture_weight},
           {"routine",
            {{"commute_span", c.routine.commute_span},
             {"routine_min", c.routine.routine_min},
             {"routine_max", c.routine.routine_max},
             {"errands", c.routine.errands},
             {"errand_min", c.routine.errand_min},
             {"errand_max", c.routine.errand_max}}}};
  if (c.compact_radius) doc["compact_radius"] = *c.compact_radius;
  return doc;
}

ScenarioConfig scenario_from_json(const Json& doc) {
  return wrap("scenario", [&] {
    if (!doc.is_object()) throw SchemaError("scenario must be an object");
    ScenarioConfig c;
    if (doc.contains("kind")) c.kind = distribution_from_string(doc.at("kind").get<std::string>());
    if (doc.contains("n")) c.n = doc.at("n").get<int>();
    if (doc.contains("m")) c.m = doc.at("m").get<int>();
    if (doc.contains("area")) {
      const Json& a = doc.at("area");
      c.area.min_x = a.value("min_x", c.area.min_x);
      c.area.max_x = a.value("max_x", c.area.max_x);
      c.area.min_y = a.value("min_y", c.area.min_y);
      c.area.max_y = a.value("max_y", c.area.max_y);
    }
    if (doc.contains("p_range")) {
      const Json& p = doc.at("p_range");
      c.p_range = {p.at(0).get<int>(), p.at(1).get<int>()};
    }
    c.q = doc.value("q", c.q);
    c.r_thld = doc.value("r_thld", c.r_thld);
    c.days = doc.value("days", c.days);
    c.seed = doc.value("seed", c.seed);
    if (doc.contains("unit_mode")) {
      c.unit_mode = unit_mode_from_string(doc.at("unit_mode").get<std::string>());
    }
    c.speed = doc.value("speed", c.speed);
    c.grid = doc.value("grid", c.grid);
    c.first_day = doc.value("first_day", c.first_day);
    c.mixture_weight = doc.value("mixture_weight", c.mixture_weight);
    if (doc.contains("compact_radius")) {
      c.compact_radius = doc.at("compact_radius").get<double>();
    }
    if (doc.contains("routine")) {
      const Json& r = doc.at("routine");
      c.routine.commute_span = r.value("commute_span", c.routine.commute_span);
      c.routine.routine_min = r.value("routine_min", c.routine.routine_min);
      c.routine.routine_max = r.value("routine_max", c.routine.routine_max);
      c.routine.errands = r.value("errands", c.routine.errands);
      c.routine.errand_min = r.value("errand_min", c.routine.errand_min);
      c.routine.errand_max = r.value("errand_max", c.routine.errand_max);
    }
    c.validate();
    return c;
  });
}

Json to_json(const EvolveStats& stats) {
  return Json{{"generations_run", stats.generations_run},
              {"mean_runtime_per_generation", stats.mean_runtime_per_generation()},
              {"best_objective_per_generation", stats.best_objective_per_generation}};
}

}  // namespace crowdsel
