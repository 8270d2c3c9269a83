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

// Synthetic scenarios: task layouts, worker pools, call-record style traces
// with known visit probabilities, trace ingestion and task clustering.
// Every generator is a pure function of its arguments and seed.

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "crowdsel/core.hpp"
#include "crowdsel/mobility.hpp"

namespace crowdsel {

// 64-bit mixer used to derive independent sub-seeds.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

struct AreaSpec {
  double min_x = 0.0;
  double max_x = 5000.0;
  double min_y = 0.0;
  double max_y = 5000.0;
  // Cells per side for grid registries; 0 means no grid.
  int grid = 0;

  void validate() const;
  double width() const { return max_x - min_x; }
  double height() const { return max_y - min_y; }
  double diagonal() const;
  Location center() const;
  bool contains(const Location& l) const;
};

enum class DistributionKind { kCompact, kScattered, kHybrid };

std::string to_string(DistributionKind kind);
DistributionKind distribution_from_string(const std::string& text);

struct TaskDistribution {
  DistributionKind kind = DistributionKind::kScattered;
  // Compact disk; defaults to the area center and 10% of its diagonal.
  std::optional<Location> center;
  std::optional<double> radius;
  // Hybrid: probability that a task is drawn from the compact disk.
  double mixture_weight = 0.5;

  Location resolved_center(const AreaSpec& area) const;
  double resolved_radius(const AreaSpec& area) const;
};

// Compact: uniform in the disk (clipped to the area). Scattered: uniform in
// the area. Hybrid: compact with probability mixture_weight, else scattered.
// Required workers are uniform in [p_min, p_max]. Ids are "t0", "t1", ...
std::vector<Task> generate_tasks(const TaskDistribution& distribution, int n,
                                 const AreaSpec& area,
                                 std::pair<int, int> p_range,
                                 std::uint64_t seed);

// Uniform over the area, or over registry cell sites when one is given.
// Ids are "w0", "w1", ...
std::vector<Worker> generate_wsts_workers(int m, const AreaSpec& area,
                                          std::uint64_t seed,
                                          const CellRegistry* registry = nullptr);

// area.grid x area.grid cells at the grid square centers, ids "c<row>_<col>".
CellRegistry make_grid_registry(const AreaSpec& area);

// Daily routine model for synthetic traces. Every worker has a home and a
// work cell, commutes along an L-shaped path between them, and sometimes
// wanders to random cells.
struct RoutineModel {
  // Home-to-work offset per axis, in cells: uniform in
  // [-commute_span, commute_span].
  int commute_span = 6;
  double routine_min = 0.9;   // home, work and commute cells
  double routine_max = 1.0;
  int errands = 6;            // occasional cells per worker
  double errand_min = 0.05;
  double errand_max = 0.5;
};

// rho[j][c]: probability worker j is seen at registry cell c on a day.
std::vector<std::vector<double>> generate_visit_probabilities(
    int m, const CellRegistry& registry, const RoutineModel& model,
    std::uint64_t seed);

// For every worker, day and cell, one record at a random second of the day
// when Bernoulli(rho[j][c]) fires. Output is ordered by worker, day, cell.
std::vector<LocationRecord> generate_traces(
    std::span<const std::string> worker_ids, std::span<const std::string> cells,
    std::int64_t first_day, int days,
    const std::vector<std::vector<double>>& rho, std::uint64_t seed);

struct ClusterResult {
  // Task indices per group, each ascending; groups ordered by first member.
  std::vector<std::vector<std::size_t>> groups;
  std::optional<std::string> warning;
};

// Buckets tasks by floor(published_at / time_window) and joins tasks of a
// bucket whose venues are within `link_radius` (Manhattan) of each other,
// transitively. Tasks lacking a timestamp collapse everything into a single
// group with a warning.
ClusterResult cluster_tasks(std::span<const Task> tasks,
                            std::int64_t time_window_seconds,
                            double link_radius);

struct RejectedRow {
  std::string file;  // "traces" or "antennas"
  std::size_t line = 0;
  std::string reason;
};

struct TraceStore {
  std::vector<LocationRecord> records;
  CellRegistry registry;
  std::map<std::string, std::vector<std::size_t>> by_worker;
  std::map<std::int64_t, std::vector<std::size_t>> by_day;
  std::vector<RejectedRow> rejects;
};

// Trace CSV rows are `worker_id,timestamp,cell_id`, antenna CSV rows are
// `cell_id,lat,lon`; a header line is optional. Bad rows are skipped and
// listed in `rejects` with their 1-based line numbers.
TraceStore ingest_traces(std::istream& traces, std::istream& antennas);
// Throws std::runtime_error when either file cannot be opened.
TraceStore ingest_trace_files(const std::string& trace_path,
                              const std::string& antenna_path);

void write_traces_csv(std::ostream& out,
                      std::span<const LocationRecord> records);
void write_antennas_csv(std::ostream& out, const CellRegistry& registry);

// --- Whole scenarios ---------------------------------------------------------

struct ScenarioConfig {
  DistributionKind kind = DistributionKind::kScattered;
  int n = 10;
  int m = 20;
  AreaSpec area;
  std::pair<int, int> p_range{2, 4};
  int q = 3;
  double r_thld = 0.8;
  int days = 10;
  std::uint64_t seed = 1;
  UnitMode unit_mode = UnitMode::kMeters;
  double speed = kDefaultSpeedMetersPerMinute;
  // Delay-tolerant scenarios only: grid cells per side, routine model and
  // first history day.
  int grid = 20;
  RoutineModel routine;
  std::int64_t first_day = 19000;
  std::optional<double> compact_radius;
  double mixture_weight = 0.5;

  void validate() const;
};

WstsInstance build_wsts_scenario(const ScenarioConfig& config);

struct WsdtScenario {
  WsdtInstance instance;
  CellRegistry registry;
  std::vector<MobilityProfile> profiles;
  // Profiling window and the day after it.
  std::vector<LocationRecord> history;
  std::vector<LocationRecord> holdout;
  std::vector<std::vector<double>> rho;
};

// Generates `m` workers' traces over `days + 1` days on a grid registry,
// profiles the first `days`, snaps tasks to their nearest cell and builds
// eligibility at `r_thld`. The worker population depends on `seed` only
// through derive_seed(seed, stream) for the population stream, so two
// configs differing in kind or r_thld share workers when `seed` matches.
WsdtScenario build_wsdt_scenario(const ScenarioConfig& config);

// Same, but with the population seeded separately from the task layout.
WsdtScenario build_wsdt_scenario(const ScenarioConfig& config,
                                 std::uint64_t population_seed);

}  // namespace crowdsel
