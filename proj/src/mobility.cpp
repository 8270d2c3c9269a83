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

#include "crowdsel/mobility.hpp"

#include <chrono>
#include <cstdio>
#include <limits>
#include <set>
#include <utility>

namespace crowdsel {

std::optional<std::int64_t> parse_timestamp(const std::string& text) {
  int year = 0;
  unsigned month = 0, day = 0, hour = 0, minute = 0, second = 0;
  char sep = 0;
  int consumed = 0;
  if (std::sscanf(text.c_str(), "%4d-%2u-%2u%c%2u:%2u:%2u%n", &year, &month,
                  &day, &sep, &hour, &minute, &second, &consumed) != 7) {
    return std::nullopt;
  }
  if (sep != 'T' && sep != ' ') return std::nullopt;
  const std::string rest = text.substr(static_cast<std::size_t>(consumed));
  if (!rest.empty() && rest != "Z") return std::nullopt;
  if (hour > 23 || minute > 59 || second > 59) return std::nullopt;
  const std::chrono::year_month_day date{std::chrono::year{year},
                                         std::chrono::month{month},
                                         std::chrono::day{day}};
  if (!date.ok()) return std::nullopt;
  const std::int64_t days =
      std::chrono::sys_days{date}.time_since_epoch().count();
  return days * kSecondsPerDay + hour * 3600 + minute * 60 + second;
}

std::string format_timestamp(std::int64_t seconds) {
  const std::int64_t days = day_of(seconds);
  const std::int64_t rem = seconds - days * kSecondsPerDay;
  const std::chrono::year_month_day date{
      std::chrono::sys_days{std::chrono::days{days}}};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ",
                static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()),
                static_cast<unsigned>(date.day()), static_cast<int>(rem / 3600),
                static_cast<int>(rem % 3600 / 60), static_cast<int>(rem % 60));
  return buf;
}

void CellRegistry::add(const std::string& id, const Location& where) {
  if (!cells_.emplace(id, where).second) {
    throw ContractViolation("duplicate cell id '" + id + "'");
  }
  order_.push_back(id);
}

const Location& CellRegistry::at(const std::string& id) const {
  auto it = cells_.find(id);
  if (it == cells_.end()) {
    throw ContractViolation("unknown cell id '" + id + "'");
  }
  return it->second;
}

const std::string& CellRegistry::nearest(const Location& where) const {
  if (order_.empty()) throw ContractViolation("cell registry is empty");
  const std::string* best = &order_.front();
  double best_distance = std::numeric_limits<double>::infinity();
  for (const std::string& id : order_) {
    const double d = manhattan_distance(cells_.at(id), where);
    if (d < best_distance) {
      best_distance = d;
      best = &id;
    }
  }
  return *best;
}

MobilityProfile build_profile(std::span<const LocationRecord> records,
                              DayWindow window) {
  if (window.length() <= 0) throw ContractViolation("empty profiling window");
  MobilityProfile profile;
  profile.window = window;
  if (!records.empty()) profile.worker_id = records.front().worker_id;

  std::set<std::int64_t> days;
  std::set<std::pair<std::string, std::int64_t>> cell_days;
  for (const LocationRecord& r : records) {
    if (r.worker_id != profile.worker_id) {
      throw ContractViolation("records of several workers passed to one profile");
    }
    const std::int64_t day = day_of(r.timestamp);
    if (!window.contains(day)) continue;
    days.insert(day);
    if (cell_days.emplace(r.cell_id, day).second) ++profile.visit_days[r.cell_id];
    ++profile.records_observed;
    ++profile.visit_records[r.cell_id];
  }
  profile.days_observed = static_cast<int>(days.size());
  return profile;
}

double pass_probability(const MobilityProfile& profile,
                        const std::string& cell_id, ProbabilityMode mode) {
  const bool by_day = mode == ProbabilityMode::kDistinctDays;
  const int denominator = by_day ? profile.days_observed : profile.records_observed;
  if (denominator == 0) return 0.0;
  const auto& visits = by_day ? profile.visit_days : profile.visit_records;
  auto it = visits.find(cell_id);
  if (it == visits.end()) return 0.0;
  return static_cast<double>(it->second) / static_cast<double>(denominator);
}

Eligibility build_eligibility(std::span<const MobilityProfile> profiles,
                              std::span<const std::string> task_cells,
                              double r_thld, ProbabilityMode mode) {
  Eligibility e(profiles.size(), task_cells.size());
  for (std::size_t j = 0; j < profiles.size(); ++j) {
    for (std::size_t i = 0; i < task_cells.size(); ++i) {
      // Visit shares are ratios of small integers; the slack keeps 8/10
      // eligible at a threshold written as 0.8.
      e.set(j, i, pass_probability(profiles[j], task_cells[i], mode) + 1e-12 >=
                      r_thld);
    }
  }
  return e;
}

WsdtInstance make_wsdt_instance(std::vector<Task> tasks,
                                std::span<const MobilityProfile> profiles,
                                double r_thld, ProbabilityMode mode) {
  std::vector<std::string> cells;
  cells.reserve(tasks.size());
  for (const Task& t : tasks) {
    if (!t.cell_id) {
      throw ContractViolation("task " + t.id + " has no cell id");
    }
    cells.push_back(*t.cell_id);
  }
  std::vector<Worker> workers;
  workers.reserve(profiles.size());
  for (std::size_t j = 0; j < profiles.size(); ++j) {
    workers.push_back(Worker{profiles[j].worker_id, std::nullopt, j});
  }
  Eligibility eligibility = build_eligibility(profiles, cells, r_thld, mode);
  return WsdtInstance(std::move(tasks), std::move(workers), r_thld,
                      std::move(eligibility));
}

std::map<std::string, std::vector<LocationRecord>> records_by_worker(
    std::span<const LocationRecord> records) {
  std::map<std::string, std::vector<LocationRecord>> out;
  for (const LocationRecord& r : records) out[r.worker_id].push_back(r);
  return out;
}

std::vector<MobilityProfile> build_profiles(
    std::span<const LocationRecord> records,
    std::span<const std::string> worker_ids, DayWindow window) {
  const auto grouped = records_by_worker(records);
  std::vector<MobilityProfile> out;
  out.reserve(worker_ids.size());
  for (const std::string& id : worker_ids) {
    auto it = grouped.find(id);
    if (it == grouped.end()) {
      MobilityProfile empty = build_profile({}, window);
      empty.worker_id = id;
      out.push_back(std::move(empty));
    } else {
      out.push_back(build_profile(it->second, window));
    }
  }
  return out;
}

std::vector<AssignedPair> assigned_pairs(const WsdtInstance& instance,
                                         const SelectionVector& selection) {
  std::vector<AssignedPair> pairs;
  for (std::size_t j : selection.selected()) {
    const std::size_t profile =
        instance.workers()[j].profile_ref.value_or(j);
    for (std::size_t i : instance.tasks_of(j)) {
      const Task& task = instance.tasks()[i];
      if (!task.cell_id) {
        throw ContractViolation("task " + task.id + " has no cell id");
      }
      pairs.push_back({profile, *task.cell_id});
    }
  }
  return pairs;
}

std::optional<PredictionEvaluation> evaluate_prediction(
    std::span<const MobilityProfile> profiles,
    std::span<const LocationRecord> holdout,
    std::span<const AssignedPair> assignments, ProbabilityMode mode) {
  if (assignments.empty()) return std::nullopt;
  std::set<std::pair<std::string, std::string>> seen;
  for (const LocationRecord& r : holdout) seen.emplace(r.worker_id, r.cell_id);

  PredictionEvaluation out;
  double predicted = 0.0;
  std::size_t completed = 0;
  for (const AssignedPair& pair : assignments) {
    if (pair.worker >= profiles.size()) {
      throw ContractViolation("assignment references a missing profile");
    }
    const MobilityProfile& profile = profiles[pair.worker];
    predicted += pass_probability(profile, pair.cell_id, mode);
    completed += seen.count({profile.worker_id, pair.cell_id});
  }
  out.pairs = assignments.size();
  out.predicted = predicted / static_cast<double>(out.pairs);
  out.practical = static_cast<double>(completed) / static_cast<double>(out.pairs);
  return out;
}

}  // namespace crowdsel
