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

// Worker mobility profiling from cell-tower location records.
//
// A worker's chance of passing a cell within the next day is estimated as
// the share of observed history days on which she was seen at that cell.
// Workers whose estimate reaches the passing threshold become eligible for
// tasks at that cell.

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "crowdsel/core.hpp"

namespace crowdsel {

inline constexpr std::int64_t kSecondsPerDay = 86400;

// "YYYY-MM-DDTHH:MM:SS" with optional trailing "Z"; a space may replace the
// "T". Returns seconds since the Unix epoch, UTC.
std::optional<std::int64_t> parse_timestamp(const std::string& text);
std::string format_timestamp(std::int64_t seconds);

inline std::int64_t day_of(std::int64_t seconds) {
  return seconds >= 0 ? seconds / kSecondsPerDay
                      : -((-seconds + kSecondsPerDay - 1) / kSecondsPerDay);
}

struct LocationRecord {
  std::string worker_id;
  std::int64_t timestamp = 0;
  std::string cell_id;

  friend bool operator==(const LocationRecord&, const LocationRecord&) = default;
};

// Cell tower id -> position (x = longitude, y = latitude).
class CellRegistry {
 public:
  // Throws ContractViolation on a duplicate id.
  void add(const std::string& id, const Location& where);
  bool contains(const std::string& id) const { return cells_.count(id) > 0; }
  const Location& at(const std::string& id) const;
  std::size_t size() const { return order_.size(); }
  bool empty() const { return order_.empty(); }
  // Ids in insertion order.
  const std::vector<std::string>& ids() const { return order_; }
  // Manhattan-nearest cell; ties go to the earliest inserted.
  const std::string& nearest(const Location& where) const;

 private:
  std::map<std::string, Location> cells_;
  std::vector<std::string> order_;
};

// Days [first_day, end_day), counted from the Unix epoch.
struct DayWindow {
  std::int64_t first_day = 0;
  std::int64_t end_day = 0;

  std::int64_t length() const { return end_day - first_day; }
  bool contains(std::int64_t day) const {
    return day >= first_day && day < end_day;
  }
};

struct MobilityProfile {
  std::string worker_id;
  DayWindow window;
  // Distinct days with at least one record.
  int days_observed = 0;
  // Cell -> distinct days with at least one record there.
  std::map<std::string, int> visit_days;
  // Raw record counts, for the record-count estimator.
  int records_observed = 0;
  std::map<std::string, int> visit_records;
};

enum class ProbabilityMode {
  // Distinct days at the cell / distinct days observed.
  kDistinctDays,
  // Records at the cell / records observed.
  kRecordCounts,
};

// Records outside the window are ignored. Records must all belong to one
// worker (ContractViolation otherwise); an empty span yields an empty
// profile with `worker_id` left blank.
MobilityProfile build_profile(std::span<const LocationRecord> records,
                              DayWindow window);

// Zero when nothing was observed or the cell was never visited.
double pass_probability(const MobilityProfile& profile,
                        const std::string& cell_id,
                        ProbabilityMode mode = ProbabilityMode::kDistinctDays);

// Entry (j, i) is set iff pass_probability(profiles[j], task_cells[i]) >=
// r_thld.
Eligibility build_eligibility(std::span<const MobilityProfile> profiles,
                              std::span<const std::string> task_cells,
                              double r_thld,
                              ProbabilityMode mode = ProbabilityMode::kDistinctDays);

// One worker per profile, in profile order; every task must carry a cell id.
WsdtInstance make_wsdt_instance(std::vector<Task> tasks,
                                std::span<const MobilityProfile> profiles,
                                double r_thld,
                                ProbabilityMode mode = ProbabilityMode::kDistinctDays);

// Records grouped by worker id, each group in input order.
std::map<std::string, std::vector<LocationRecord>> records_by_worker(
    std::span<const LocationRecord> records);

// Profiles for `worker_ids` in that order; workers without records get an
// empty profile carrying their id.
std::vector<MobilityProfile> build_profiles(
    std::span<const LocationRecord> records,
    std::span<const std::string> worker_ids, DayWindow window);

struct AssignedPair {
  std::size_t worker = 0;  // index into the profile list
  std::string cell_id;
};

// Selected worker takes every task she is eligible for.
std::vector<AssignedPair> assigned_pairs(const WsdtInstance& instance,
                                         const SelectionVector& selection);

struct PredictionEvaluation {
  // Mean pass probability over the assigned pairs.
  double predicted = 0.0;
  // Share of assigned pairs whose worker has a holdout record at the cell.
  double practical = 0.0;
  std::size_t pairs = 0;
};

// Empty when there are no assignments: both quantities are undefined.
std::optional<PredictionEvaluation> evaluate_prediction(
    std::span<const MobilityProfile> profiles,
    std::span<const LocationRecord> holdout,
    std::span<const AssignedPair> assignments,
    ProbabilityMode mode = ProbabilityMode::kDistinctDays);

}  // namespace crowdsel
