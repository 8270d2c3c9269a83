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

#include "crowdsel/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace crowdsel {

std::string to_string(UnitMode mode) {
  return mode == UnitMode::kDegrees ? "degrees" : "meters";
}

UnitMode unit_mode_from_string(const std::string& text) {
  if (text == "degrees") return UnitMode::kDegrees;
  if (text == "meters") return UnitMode::kMeters;
  throw ContractViolation("unknown unit mode '" + text + "'");
}

WstsInstance::WstsInstance(std::vector<Task> tasks, std::vector<Worker> workers,
                           int q, UnitMode unit_mode, double speed)
    : tasks_(std::move(tasks)),
      workers_(std::move(workers)),
      q_(q),
      unit_mode_(unit_mode),
      speed_(speed) {
  if (tasks_.empty()) throw ContractViolation("instance has no tasks");
  if (workers_.empty()) throw ContractViolation("instance has no workers");
  if (q_ < 1) throw ContractViolation("q must be at least 1");
  if (!(speed_ > 0.0) || !std::isfinite(speed_)) {
    throw ContractViolation("speed must be positive");
  }
  for (const Task& t : tasks_) {
    if (t.required_workers < 1) {
      throw ContractViolation("task " + t.id + " requires fewer than 1 worker");
    }
    if (!std::isfinite(t.venue.x) || !std::isfinite(t.venue.y)) {
      throw ContractViolation("task " + t.id + " has a non-finite venue");
    }
  }
  for (const Worker& w : workers_) {
    if (!w.position) {
      throw ContractViolation("worker " + w.id + " has no position");
    }
    if (!std::isfinite(w.position->x) || !std::isfinite(w.position->y)) {
      throw ContractViolation("worker " + w.id + " has a non-finite position");
    }
  }
}

int WstsInstance::total_required() const {
  int total = 0;
  for (const Task& t : tasks_) total += t.required_workers;
  return total;
}

Eligibility::Eligibility(std::size_t workers, std::size_t tasks)
    : workers_(workers), tasks_(tasks), cells_(workers * tasks, 0) {}

std::vector<std::size_t> Eligibility::tasks_of(std::size_t worker) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < tasks_; ++i) {
    if (at(worker, i)) out.push_back(i);
  }
  return out;
}

WsdtInstance::WsdtInstance(std::vector<Task> tasks, std::vector<Worker> workers,
                           double r_thld, Eligibility eligibility)
    : tasks_(std::move(tasks)),
      workers_(std::move(workers)),
      r_thld_(r_thld),
      eligibility_(std::move(eligibility)) {
  if (tasks_.empty()) throw ContractViolation("instance has no tasks");
  if (!(r_thld_ > 0.0 && r_thld_ <= 1.0)) {
    throw ContractViolation("r_thld must lie in (0, 1]");
  }
  if (eligibility_.num_workers() != workers_.size() ||
      eligibility_.num_tasks() != tasks_.size()) {
    throw ContractViolation("eligibility matrix dimensions do not match");
  }
  for (const Task& t : tasks_) {
    if (t.required_workers < 1) {
      throw ContractViolation("task " + t.id + " requires fewer than 1 worker");
    }
  }
  tasks_of_.reserve(workers_.size());
  for (std::size_t j = 0; j < workers_.size(); ++j) {
    tasks_of_.push_back(eligibility_.tasks_of(j));
  }
}

AssignmentMatrix::AssignmentMatrix(std::size_t workers, std::size_t tasks)
    : workers_(workers),
      tasks_(tasks),
      cells_(workers * tasks, 0),
      row_sums_(workers, 0),
      col_sums_(tasks, 0) {}

void AssignmentMatrix::set(std::size_t worker, std::size_t task, bool value) {
  std::uint8_t& cell = cells_[worker * tasks_ + task];
  const std::uint8_t next = value ? 1 : 0;
  if (cell == next) return;
  const int delta = value ? 1 : -1;
  row_sums_[worker] += delta;
  col_sums_[task] += delta;
  cell = next;
}

int AssignmentMatrix::ones() const {
  return std::accumulate(col_sums_.begin(), col_sums_.end(), 0);
}

std::vector<std::size_t> AssignmentMatrix::tasks_of(std::size_t worker) const {
  std::vector<std::size_t> out;
  out.reserve(static_cast<std::size_t>(row_sums_[worker]));
  const std::uint8_t* row = cells_.data() + worker * tasks_;
  for (std::size_t i = 0; i < tasks_; ++i) {
    if (row[i]) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> AssignmentMatrix::workers_of(std::size_t task) const {
  std::vector<std::size_t> out;
  out.reserve(static_cast<std::size_t>(col_sums_[task]));
  for (std::size_t j = 0; j < workers_; ++j) {
    if (at(j, task)) out.push_back(j);
  }
  return out;
}

std::vector<std::vector<int>> AssignmentMatrix::to_rows() const {
  std::vector<std::vector<int>> rows(workers_, std::vector<int>(tasks_, 0));
  for (std::size_t j = 0; j < workers_; ++j) {
    for (std::size_t i = 0; i < tasks_; ++i) rows[j][i] = at(j, i) ? 1 : 0;
  }
  return rows;
}

AssignmentMatrix AssignmentMatrix::from_rows(
    const std::vector<std::vector<int>>& rows) {
  const std::size_t tasks = rows.empty() ? 0 : rows.front().size();
  AssignmentMatrix a(rows.size(), tasks);
  for (std::size_t j = 0; j < rows.size(); ++j) {
    if (rows[j].size() != tasks) {
      throw ContractViolation("ragged assignment matrix");
    }
    for (std::size_t i = 0; i < tasks; ++i) {
      if (rows[j][i] != 0 && rows[j][i] != 1) {
        throw ContractViolation("assignment matrix entries must be 0 or 1");
      }
      a.set(j, i, rows[j][i] == 1);
    }
  }
  return a;
}

bool column_major_less(const AssignmentMatrix& a, const AssignmentMatrix& b) {
  for (std::size_t i = 0; i < a.tasks_; ++i) {
    for (std::size_t j = 0; j < a.workers_; ++j) {
      const bool x = a.at(j, i);
      const bool y = b.at(j, i);
      if (x != y) return !x;
    }
  }
  return false;
}

int SelectionVector::count() const {
  return static_cast<int>(std::count(bits_.begin(), bits_.end(), 1));
}

std::vector<std::size_t> SelectionVector::selected() const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < bits_.size(); ++j) {
    if (bits_[j]) out.push_back(j);
  }
  return out;
}

double manhattan_distance(const Location& a, const Location& b) {
  return std::abs(a.x - b.x) + std::abs(a.y - b.y);
}

namespace {

constexpr std::size_t kPermutationLimit = 8;
constexpr std::size_t kHeldKarpLimit = 16;

Route permutation_route(const Location& start,
                        std::span<const Location> venues) {
  std::vector<std::size_t> order(venues.size());
  std::iota(order.begin(), order.end(), 0);
  Route best{std::numeric_limits<double>::infinity(), order};
  do {
    double length = 0.0;
    Location at = start;
    for (std::size_t k : order) {
      length += manhattan_distance(at, venues[k]);
      at = venues[k];
    }
    if (length < best.distance) best = Route{length, order};
  } while (std::next_permutation(order.begin(), order.end()));
  return best;
}

Route held_karp_route(const Location& start, std::span<const Location> venues) {
  const std::size_t k = venues.size();
  const std::size_t full = std::size_t{1} << k;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  // cost[mask * k + last]: shortest path from start visiting `mask`, ending
  // at `last`.
  std::vector<double> cost(full * k, kInf);
  std::vector<std::uint8_t> parent(full * k, 0xff);
  for (std::size_t v = 0; v < k; ++v) {
    cost[(std::size_t{1} << v) * k + v] = manhattan_distance(start, venues[v]);
  }
  for (std::size_t mask = 1; mask < full; ++mask) {
    for (std::size_t last = 0; last < k; ++last) {
      const double here = cost[mask * k + last];
      if (!(mask >> last & 1) || here == kInf) continue;
      for (std::size_t next = 0; next < k; ++next) {
        if (mask >> next & 1) continue;
        const std::size_t grown = mask | (std::size_t{1} << next);
        const double c = here + manhattan_distance(venues[last], venues[next]);
        if (c < cost[grown * k + next]) {
          cost[grown * k + next] = c;
          parent[grown * k + next] = static_cast<std::uint8_t>(last);
        }
      }
    }
  }
  std::size_t mask = full - 1;
  std::size_t last = 0;
  for (std::size_t v = 1; v < k; ++v) {
    if (cost[mask * k + v] < cost[mask * k + last]) last = v;
  }
  Route route{cost[mask * k + last], {}};
  while (mask != 0) {
    route.order.push_back(last);
    const std::uint8_t prev = parent[mask * k + last];
    mask &= ~(std::size_t{1} << last);
    last = prev;
  }
  std::reverse(route.order.begin(), route.order.end());
  return route;
}

}  // namespace

Route optimal_route(const Location& start, std::span<const Location> venues) {
  if (venues.empty()) return Route{};
  if (venues.size() <= kPermutationLimit) {
    return permutation_route(start, venues);
  }
  if (venues.size() > kHeldKarpLimit) {
    throw ContractViolation("route has more than 16 venues");
  }
  return held_karp_route(start, venues);
}

double route_distance(const Location& start, std::span<const Location> venues) {
  if (venues.empty()) return 0.0;
  if (venues.size() == 1) return manhattan_distance(start, venues.front());
  return optimal_route(start, venues).distance;
}

namespace {

void check_dimensions(const WstsInstance& instance, const AssignmentMatrix& a) {
  if (a.num_workers() != instance.num_workers() ||
      a.num_tasks() != instance.num_tasks()) {
    throw ContractViolation("assignment matrix is " +
                            std::to_string(a.num_workers()) + "x" +
                            std::to_string(a.num_tasks()) +
                            ", instance needs " +
                            std::to_string(instance.num_workers()) + "x" +
                            std::to_string(instance.num_tasks()));
  }
}

void check_dimensions(const WsdtInstance& instance, const SelectionVector& s) {
  if (s.size() != instance.num_workers()) {
    throw ContractViolation("selection vector has " + std::to_string(s.size()) +
                            " bits, instance has " +
                            std::to_string(instance.num_workers()) +
                            " workers");
  }
}

std::vector<Location> venues_of(const WstsInstance& instance,
                                const std::vector<std::size_t>& tasks) {
  std::vector<Location> venues;
  venues.reserve(tasks.size());
  for (std::size_t i : tasks) venues.push_back(instance.venue(i));
  return venues;
}

}  // namespace

double worker_route_distance(const WstsInstance& instance,
                             const AssignmentMatrix& a, std::size_t worker) {
  if (a.row_sum(worker) == 0) return 0.0;
  const auto venues = venues_of(instance, a.tasks_of(worker));
  return route_distance(instance.position(worker), venues);
}

double total_distance(const WstsInstance& instance, const AssignmentMatrix& a) {
  check_dimensions(instance, a);
  double total = 0.0;
  for (std::size_t j = 0; j < a.num_workers(); ++j) {
    total += worker_route_distance(instance, a, j);
  }
  return total;
}

FeasibilityReport validate_assignment(const WstsInstance& instance,
                                      const AssignmentMatrix& a) {
  check_dimensions(instance, a);
  FeasibilityReport report;
  for (std::size_t i = 0; i < a.num_tasks(); ++i) {
    const int gap = instance.required(i) - a.col_sum(i);
    // A negative gap (overstaffed column) is reported as a negative shortfall.
    if (gap != 0) report.violated_tasks.push_back({instance.tasks()[i].id, gap});
  }
  for (std::size_t j = 0; j < a.num_workers(); ++j) {
    const int excess = a.row_sum(j) - instance.q();
    if (excess > 0) {
      report.violated_workers.push_back({instance.workers()[j].id, excess});
    }
  }
  report.feasible =
      report.violated_tasks.empty() && report.violated_workers.empty();
  return report;
}

std::vector<std::size_t> coverage_utility(const WsdtInstance& instance,
                                          const SelectionVector& s) {
  const auto counts = coverage_counts(instance, s);
  std::vector<std::size_t> covered;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] > 0) covered.push_back(i);
  }
  return covered;
}

std::vector<int> coverage_counts(const WsdtInstance& instance,
                                 const SelectionVector& s) {
  check_dimensions(instance, s);
  std::vector<int> counts(instance.num_tasks(), 0);
  for (std::size_t j = 0; j < s.size(); ++j) {
    if (!s.test(j)) continue;
    for (std::size_t i : instance.tasks_of(j)) ++counts[i];
  }
  return counts;
}

FeasibilityReport validate_selection(const WsdtInstance& instance,
                                     const SelectionVector& s) {
  const auto counts = coverage_counts(instance, s);
  FeasibilityReport report;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const int gap = instance.required(i) - counts[i];
    if (gap > 0) report.violated_tasks.push_back({instance.tasks()[i].id, gap});
  }
  report.feasible = report.violated_tasks.empty();
  return report;
}

AssignmentMatrix exact_assignment(const WsdtInstance& instance,
                                  const SelectionVector& s) {
  check_dimensions(instance, s);
  AssignmentMatrix a(instance.num_workers(), instance.num_tasks());
  for (std::size_t j = 0; j < s.size(); ++j) {
    if (!s.test(j)) continue;
    for (std::size_t i : instance.tasks_of(j)) {
      if (a.col_sum(i) < instance.required(i)) a.set(j, i, true);
    }
  }
  return a;
}

CompletionTimes completion_times(const WstsInstance& instance,
                                 const AssignmentMatrix& a) {
  if (instance.unit_mode() != UnitMode::kMeters) {
    throw ContractViolation(
        "completion times need a meters-mode instance; convert with to_meters");
  }
  const FeasibilityReport report = validate_assignment(instance, a);
  if (!report.feasible) {
    throw InfeasibleError("completion times need a feasible assignment");
  }
  CompletionTimes out;
  out.per_task.assign(instance.num_tasks(), 0.0);
  for (std::size_t j = 0; j < instance.num_workers(); ++j) {
    if (a.row_sum(j) == 0) continue;
    const auto tasks = a.tasks_of(j);
    const auto venues = venues_of(instance, tasks);
    const Route route = optimal_route(instance.position(j), venues);
    double walked = 0.0;
    Location at = instance.position(j);
    for (std::size_t k : route.order) {
      walked += manhattan_distance(at, venues[k]);
      at = venues[k];
      double& done = out.per_task[tasks[k]];
      done = std::max(done, walked / instance.speed());
    }
  }
  out.mean = std::accumulate(out.per_task.begin(), out.per_task.end(), 0.0) /
             static_cast<double>(out.per_task.size());
  return out;
}

WstsInstance to_meters(const WstsInstance& instance) {
  if (instance.unit_mode() == UnitMode::kMeters) return instance;
  double lat_sum = 0.0;
  for (const Task& t : instance.tasks()) lat_sum += t.venue.y;
  for (const Worker& w : instance.workers()) lat_sum += w.position->y;
  const double mean_lat =
      lat_sum / static_cast<double>(instance.num_tasks() + instance.num_workers());
  const double kx = kMetersPerDegree * std::cos(mean_lat * std::acos(-1.0) / 180.0);
  auto project = [&](const Location& l) {
    return Location{l.x * kx, l.y * kMetersPerDegree};
  };
  std::vector<Task> tasks = instance.tasks();
  for (Task& t : tasks) t.venue = project(t.venue);
  std::vector<Worker> workers = instance.workers();
  for (Worker& w : workers) w.position = project(*w.position);
  return WstsInstance(std::move(tasks), std::move(workers), instance.q(),
                      UnitMode::kMeters, instance.speed());
}

}  // namespace crowdsel
