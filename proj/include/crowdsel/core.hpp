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

// Domain types shared by every solver: locations, tasks, workers, the two
// problem instances (time-sensitive and delay-tolerant), their solution
// encodings, objectives and feasibility checks.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace crowdsel {

// Raised when a caller breaks an operation's precondition (dimension
// mismatch, invalid parameter).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised when an instance cannot be solved to full feasibility.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class UnitMode { kDegrees, kMeters };

std::string to_string(UnitMode mode);
UnitMode unit_mode_from_string(const std::string& text);

// In degrees mode x is longitude and y is latitude.
struct Location {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Location&, const Location&) = default;
};

struct Task {
  std::string id;
  Location venue;
  int required_workers = 1;
  // Seconds since the Unix epoch (UTC).
  std::optional<std::int64_t> published_at;
  // Cell tower the venue snaps to; only used by delay-tolerant instances.
  std::optional<std::string> cell_id;
};

struct Worker {
  std::string id;
  std::optional<Location> position;
  // Index into the profile list a delay-tolerant instance was built from.
  std::optional<std::size_t> profile_ref;
};

struct Shortfall {
  std::string task_id;
  int missing = 0;

  friend bool operator==(const Shortfall&, const Shortfall&) = default;
};

struct Excess {
  std::string worker_id;
  int excess = 0;

  friend bool operator==(const Excess&, const Excess&) = default;
};

struct FeasibilityReport {
  bool feasible = true;
  std::vector<Shortfall> violated_tasks;
  std::vector<Excess> violated_workers;
};

inline constexpr double kDefaultSpeedMetersPerMinute = 70.0;
inline constexpr double kMetersPerDegree = 111320.0;

// Time-sensitive allocation problem: staff every task with exactly
// `required_workers` distinct workers, at most `q` tasks per worker,
// minimizing total travel distance.
class WstsInstance {
 public:
  WstsInstance(std::vector<Task> tasks, std::vector<Worker> workers, int q,
               UnitMode unit_mode = UnitMode::kMeters,
               double speed = kDefaultSpeedMetersPerMinute);

  const std::vector<Task>& tasks() const { return tasks_; }
  const std::vector<Worker>& workers() const { return workers_; }
  std::size_t num_tasks() const { return tasks_.size(); }
  std::size_t num_workers() const { return workers_.size(); }
  int q() const { return q_; }
  UnitMode unit_mode() const { return unit_mode_; }
  double speed() const { return speed_; }

  const Location& venue(std::size_t task) const { return tasks_[task].venue; }
  const Location& position(std::size_t worker) const {
    return *workers_[worker].position;
  }
  int required(std::size_t task) const {
    return tasks_[task].required_workers;
  }
  int total_required() const;

 private:
  std::vector<Task> tasks_;
  std::vector<Worker> workers_;
  int q_;
  UnitMode unit_mode_;
  double speed_;
};

// Row-major m x n boolean matrix. Row sums and column sums are kept in sync
// with every write.
class Eligibility {
 public:
  Eligibility() = default;
  Eligibility(std::size_t workers, std::size_t tasks);

  std::size_t num_workers() const { return workers_; }
  std::size_t num_tasks() const { return tasks_; }
  bool at(std::size_t worker, std::size_t task) const {
    return cells_[worker * tasks_ + task] != 0;
  }
  void set(std::size_t worker, std::size_t task, bool value) {
    cells_[worker * tasks_ + task] = value ? 1 : 0;
  }
  // Tasks worker `worker` may take.
  std::vector<std::size_t> tasks_of(std::size_t worker) const;

  friend bool operator==(const Eligibility&, const Eligibility&) = default;

 private:
  std::size_t workers_ = 0;
  std::size_t tasks_ = 0;
  std::vector<std::uint8_t> cells_;
};

// Delay-tolerant allocation problem: select the fewest workers such that
// every task has at least `required_workers` selected eligible workers.
class WsdtInstance {
 public:
  WsdtInstance(std::vector<Task> tasks, std::vector<Worker> workers,
               double r_thld, Eligibility eligibility);

  const std::vector<Task>& tasks() const { return tasks_; }
  const std::vector<Worker>& workers() const { return workers_; }
  std::size_t num_tasks() const { return tasks_.size(); }
  std::size_t num_workers() const { return workers_.size(); }
  double r_thld() const { return r_thld_; }
  const Eligibility& eligibility() const { return eligibility_; }
  bool eligible(std::size_t worker, std::size_t task) const {
    return eligibility_.at(worker, task);
  }
  int required(std::size_t task) const {
    return tasks_[task].required_workers;
  }
  // Per-worker eligible task lists, precomputed.
  const std::vector<std::size_t>& tasks_of(std::size_t worker) const {
    return tasks_of_[worker];
  }

 private:
  std::vector<Task> tasks_;
  std::vector<Worker> workers_;
  double r_thld_;
  Eligibility eligibility_;
  std::vector<std::vector<std::size_t>> tasks_of_;
};

// m x n binary matrix; row j column i is set iff task i is assigned to
// worker j. Infeasible matrices are representable.
class AssignmentMatrix {
 public:
  AssignmentMatrix() = default;
  AssignmentMatrix(std::size_t workers, std::size_t tasks);

  std::size_t num_workers() const { return workers_; }
  std::size_t num_tasks() const { return tasks_; }

  bool at(std::size_t worker, std::size_t task) const {
    return cells_[worker * tasks_ + task] != 0;
  }
  void set(std::size_t worker, std::size_t task, bool value);

  int row_sum(std::size_t worker) const { return row_sums_[worker]; }
  int col_sum(std::size_t task) const { return col_sums_[task]; }
  int ones() const;

  // Tasks assigned to `worker`, ascending.
  std::vector<std::size_t> tasks_of(std::size_t worker) const;
  // Workers assigned to `task`, ascending.
  std::vector<std::size_t> workers_of(std::size_t task) const;

  std::vector<std::vector<int>> to_rows() const;
  static AssignmentMatrix from_rows(const std::vector<std::vector<int>>& rows);

  friend bool operator==(const AssignmentMatrix& a, const AssignmentMatrix& b) {
    return a.workers_ == b.workers_ && a.tasks_ == b.tasks_ &&
           a.cells_ == b.cells_;
  }

  // Column-major lexicographic order with 0 < 1.
  friend bool column_major_less(const AssignmentMatrix& a,
                                const AssignmentMatrix& b);

 private:
  std::size_t workers_ = 0;
  std::size_t tasks_ = 0;
  std::vector<std::uint8_t> cells_;
  std::vector<int> row_sums_;
  std::vector<int> col_sums_;
};

// Bit j set iff worker j is selected.
class SelectionVector {
 public:
  SelectionVector() = default;
  explicit SelectionVector(std::size_t workers) : bits_(workers, 0) {}
  explicit SelectionVector(std::vector<std::uint8_t> bits)
      : bits_(std::move(bits)) {}

  std::size_t size() const { return bits_.size(); }
  bool test(std::size_t j) const { return bits_[j] != 0; }
  void set(std::size_t j, bool value) { bits_[j] = value ? 1 : 0; }
  void flip(std::size_t j) { bits_[j] ^= 1; }
  int count() const;
  std::vector<std::size_t> selected() const;
  const std::vector<std::uint8_t>& bits() const { return bits_; }

  friend bool operator==(const SelectionVector&,
                         const SelectionVector&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

double manhattan_distance(const Location& a, const Location& b);

struct Route {
  double distance = 0.0;
  // Visiting order as indices into the venue list.
  std::vector<std::size_t> order;
};

// Shortest open Manhattan path from `start` through every venue. Exact:
// permutation search for up to eight venues, Held-Karp above that.
Route optimal_route(const Location& start, std::span<const Location> venues);
double route_distance(const Location& start, std::span<const Location> venues);

// Route distance of a single worker under matrix `a`.
double worker_route_distance(const WstsInstance& instance,
                             const AssignmentMatrix& a, std::size_t worker);
double total_distance(const WstsInstance& instance, const AssignmentMatrix& a);

FeasibilityReport validate_assignment(const WstsInstance& instance,
                                      const AssignmentMatrix& a);

// Ascending task indices covered by at least one selected worker.
std::vector<std::size_t> coverage_utility(const WsdtInstance& instance,
                                          const SelectionVector& s);
// Selected eligible workers per task.
std::vector<int> coverage_counts(const WsdtInstance& instance,
                                 const SelectionVector& s);
FeasibilityReport validate_selection(const WsdtInstance& instance,
                                     const SelectionVector& s);

// Realizes the exact-p_i accounting: each task takes its lowest-id
// selected eligible workers, up to p_i of them.
AssignmentMatrix exact_assignment(const WsdtInstance& instance,
                                  const SelectionVector& s);

struct CompletionTimes {
  // Minutes, per task.
  std::vector<double> per_task;
  double mean = 0.0;
};

// A task completes when its last assigned worker arrives, each worker
// walking its optimal route at the instance speed. Requires meters mode and
// a feasible matrix.
CompletionTimes completion_times(const WstsInstance& instance,
                                 const AssignmentMatrix& a);

// Equirectangular projection of a degrees-mode instance to meters, about
// the mean latitude of all its locations.
WstsInstance to_meters(const WstsInstance& instance);

}  // namespace crowdsel
