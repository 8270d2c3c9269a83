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

#include "crowdsel/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace crowdsel {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x5851f42d4c957f2dULL));
}

void AreaSpec::validate() const {
  if (!(max_x > min_x) || !(max_y > min_y)) {
    throw ContractViolation("area bounding box is degenerate");
  }
  if (grid < 0) throw ContractViolation("grid resolution must be nonnegative");
}

double AreaSpec::diagonal() const { return std::hypot(width(), height()); }

Location AreaSpec::center() const {
  return {(min_x + max_x) / 2.0, (min_y + max_y) / 2.0};
}

bool AreaSpec::contains(const Location& l) const {
  return l.x >= min_x && l.x <= max_x && l.y >= min_y && l.y <= max_y;
}

std::string to_string(DistributionKind kind) {
  switch (kind) {
    case DistributionKind::kCompact:
      return "compact";
    case DistributionKind::kScattered:
      return "scattered";
    case DistributionKind::kHybrid:
      return "hybrid";
  }
  return "scattered";
}

DistributionKind distribution_from_string(const std::string& text) {
  if (text == "compact") return DistributionKind::kCompact;
  if (text == "scattered") return DistributionKind::kScattered;
  if (text == "hybrid") return DistributionKind::kHybrid;
  throw ContractViolation("unknown distribution kind '" + text + "'");
}

Location TaskDistribution::resolved_center(const AreaSpec& area) const {
  return center.value_or(area.center());
}

double TaskDistribution::resolved_radius(const AreaSpec& area) const {
  const double r = radius.value_or(0.1 * area.diagonal());
  if (!(r > 0.0)) throw ContractViolation("compact radius must be positive");
  return r;
}

namespace {

Location uniform_in_area(const AreaSpec& area, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> x(area.min_x, area.max_x);
  std::uniform_real_distribution<double> y(area.min_y, area.max_y);
  const double px = x(rng);
  return {px, y(rng)};
}

Location uniform_in_disk(const Location& center, double radius,
                         const AreaSpec& area, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  // Rejection from the bounding square; also rejects points off the area.
  for (int attempt = 0; attempt < 10000; ++attempt) {
    const double dx = unit(rng);
    const double dy = unit(rng);
    if (dx * dx + dy * dy > 1.0) continue;
    const Location l{center.x + dx * radius, center.y + dy * radius};
    if (area.contains(l)) return l;
  }
  throw ContractViolation("compact disk does not intersect the area");
}

}  // namespace

std::vector<Task> generate_tasks(const TaskDistribution& distribution, int n,
                                 const AreaSpec& area,
                                 std::pair<int, int> p_range,
                                 std::uint64_t seed) {
  area.validate();
  if (n < 1) throw ContractViolation("need at least one task");
  if (p_range.first < 1 || p_range.second < p_range.first) {
    throw ContractViolation("invalid required-worker range");
  }
  if (distribution.kind == DistributionKind::kHybrid &&
      !(distribution.mixture_weight > 0.0 && distribution.mixture_weight < 1.0)) {
    throw ContractViolation("mixture weight must lie in (0, 1)");
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> workers(p_range.first, p_range.second);
  std::bernoulli_distribution from_disk(distribution.mixture_weight);
  const Location center = distribution.resolved_center(area);
  const double radius = distribution.kind == DistributionKind::kScattered
                            ? 0.0
                            : distribution.resolved_radius(area);

  std::vector<Task> tasks;
  tasks.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    bool compact = distribution.kind == DistributionKind::kCompact;
    if (distribution.kind == DistributionKind::kHybrid) compact = from_disk(rng);
    Task t;
    t.id = "t" + std::to_string(i);
    t.venue = compact ? uniform_in_disk(center, radius, area, rng)
                      : uniform_in_area(area, rng);
    t.required_workers = workers(rng);
    tasks.push_back(std::move(t));
  }
  return tasks;
}

std::vector<Worker> generate_wsts_workers(int m, const AreaSpec& area,
                                          std::uint64_t seed,
                                          const CellRegistry* registry) {
  area.validate();
  if (m < 0) throw ContractViolation("worker count must be nonnegative");
  std::mt19937_64 rng(seed);
  std::vector<Worker> workers;
  workers.reserve(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    Location where;
    if (registry && !registry->empty()) {
      const auto& ids = registry->ids();
      where = registry->at(ids[std::uniform_int_distribution<std::size_t>(
          0, ids.size() - 1)(rng)]);
    } else {
      where = uniform_in_area(area, rng);
    }
    workers.push_back(Worker{"w" + std::to_string(j), where, std::nullopt});
  }
  return workers;
}

CellRegistry make_grid_registry(const AreaSpec& area) {
  area.validate();
  if (area.grid < 1) throw ContractViolation("grid resolution must be positive");
  CellRegistry registry;
  const double cw = area.width() / area.grid;
  const double ch = area.height() / area.grid;
  for (int r = 0; r < area.grid; ++r) {
    for (int c = 0; c < area.grid; ++c) {
      registry.add("c" + std::to_string(r) + "_" + std::to_string(c),
                   {area.min_x + (c + 0.5) * cw, area.min_y + (r + 0.5) * ch});
    }
  }
  return registry;
}

std::vector<std::vector<double>> generate_visit_probabilities(
    int m, const CellRegistry& registry, const RoutineModel& model,
    std::uint64_t seed) {
  const auto cells = static_cast<int>(registry.size());
  const int side = static_cast<int>(std::lround(std::sqrt(cells)));
  if (side * side != cells || cells == 0) {
    throw ContractViolation("routine model needs a square grid registry");
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> any_cell(0, side - 1);
  std::uniform_int_distribution<int> offset(-model.commute_span,
                                            model.commute_span);
  std::uniform_real_distribution<double> routine(model.routine_min,
                                                 model.routine_max);
  std::uniform_real_distribution<double> errand(model.errand_min,
                                                model.errand_max);
  std::bernoulli_distribution rows_first(0.5);
  std::uniform_int_distribution<int> cell_index(0, cells - 1);

  std::vector<std::vector<double>> rho(static_cast<std::size_t>(m),
                                       std::vector<double>(static_cast<std::size_t>(cells), 0.0));
  for (auto& row : rho) {
    const int home_r = any_cell(rng);
    const int home_c = any_cell(rng);
    const int work_r = std::clamp(home_r + offset(rng), 0, side - 1);
    const int work_c = std::clamp(home_c + offset(rng), 0, side - 1);
    const bool vertical_first = rows_first(rng);
    auto mark = [&](int r, int c) {
      row[static_cast<std::size_t>(r * side + c)] = routine(rng);
    };
    const int corner_r = vertical_first ? work_r : home_r;
    const int corner_c = vertical_first ? home_c : work_c;
    for (int r = std::min(home_r, corner_r); r <= std::max(home_r, corner_r); ++r) {
      if (vertical_first) mark(r, home_c);
    }
    for (int c = std::min(home_c, corner_c); c <= std::max(home_c, corner_c); ++c) {
      if (!vertical_first) mark(home_r, c);
    }
    for (int r = std::min(corner_r, work_r); r <= std::max(corner_r, work_r); ++r) {
      mark(r, corner_c);
    }
    for (int c = std::min(corner_c, work_c); c <= std::max(corner_c, work_c); ++c) {
      mark(corner_r, c);
    }
    for (int e = 0; e < model.errands; ++e) {
      double& p = row[static_cast<std::size_t>(cell_index(rng))];
      if (p == 0.0) p = errand(rng);
    }
  }
  return rho;
}

std::vector<LocationRecord> generate_traces(
    std::span<const std::string> worker_ids, std::span<const std::string> cells,
    std::int64_t first_day, int days,
    const std::vector<std::vector<double>>& rho, std::uint64_t seed) {
  if (rho.size() != worker_ids.size()) {
    throw ContractViolation("one probability row per worker required");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::int64_t> second(0, kSecondsPerDay - 1);
  std::vector<LocationRecord> records;
  for (std::size_t j = 0; j < worker_ids.size(); ++j) {
    if (rho[j].size() != cells.size()) {
      throw ContractViolation("one probability per cell required");
    }
    for (double p : rho[j]) {
      if (!(p >= 0.0 && p <= 1.0)) {
        throw ContractViolation("visit probabilities must lie in [0, 1]");
      }
    }
    for (int d = 0; d < days; ++d) {
      for (std::size_t c = 0; c < cells.size(); ++c) {
        // Draw even for zero probabilities so streams stay aligned.
        const double u = unit(rng);
        const std::int64_t at = second(rng);
        if (u < rho[j][c]) {
          records.push_back({worker_ids[j],
                             (first_day + d) * kSecondsPerDay + at, cells[c]});
        }
      }
    }
  }
  return records;
}

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void join(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

ClusterResult cluster_tasks(std::span<const Task> tasks,
                            std::int64_t time_window_seconds,
                            double link_radius) {
  if (time_window_seconds <= 0) {
    throw ContractViolation("time window must be positive");
  }
  ClusterResult out;
  if (tasks.empty()) return out;
  const bool stamped = std::all_of(tasks.begin(), tasks.end(), [](const Task& t) {
    return t.published_at.has_value();
  });
  if (!stamped) {
    out.warning = "tasks without publishing time; returning a single group";
    std::vector<std::size_t> all(tasks.size());
    std::iota(all.begin(), all.end(), 0);
    out.groups.push_back(std::move(all));
    return out;
  }

  auto bucket = [&](const Task& t) {
    const std::int64_t s = *t.published_at;
    return s >= 0 ? s / time_window_seconds
                  : -((-s + time_window_seconds - 1) / time_window_seconds);
  };
  DisjointSets sets(tasks.size());
  for (std::size_t a = 0; a < tasks.size(); ++a) {
    for (std::size_t b = a + 1; b < tasks.size(); ++b) {
      if (bucket(tasks[a]) != bucket(tasks[b])) continue;
      if (manhattan_distance(tasks[a].venue, tasks[b].venue) <= link_radius) {
        sets.join(a, b);
      }
    }
  }
  std::map<std::size_t, std::size_t> group_of_root;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const std::size_t root = sets.find(i);
    auto [it, fresh] = group_of_root.emplace(root, out.groups.size());
    if (fresh) out.groups.emplace_back();
    out.groups[it->second].push_back(i);
  }
  return out;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::optional<double> parse_number(const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size() || !std::isfinite(v)) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace

TraceStore ingest_traces(std::istream& traces, std::istream& antennas) {
  TraceStore store;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(antennas, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty()) continue;
    auto fields = split_csv(line);
    for (auto& f : fields) f = trim(f);
    if (lineno == 1 && !fields.empty() && fields[0] == "cell_id") continue;
    if (fields.size() != 3) {
      store.rejects.push_back({"antennas", lineno, "expected 3 fields"});
      continue;
    }
    const auto lat = parse_number(fields[1]);
    const auto lon = parse_number(fields[2]);
    if (!lat || !lon) {
      store.rejects.push_back({"antennas", lineno, "unparseable coordinate"});
      continue;
    }
    if (store.registry.contains(fields[0])) {
      store.rejects.push_back({"antennas", lineno, "duplicate cell id"});
      continue;
    }
    store.registry.add(fields[0], Location{*lon, *lat});
  }

  lineno = 0;
  while (std::getline(traces, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty()) continue;
    auto fields = split_csv(line);
    for (auto& f : fields) f = trim(f);
    if (lineno == 1 && !fields.empty() && fields[0] == "worker_id") continue;
    if (fields.size() != 3) {
      store.rejects.push_back({"traces", lineno, "expected 3 fields"});
      continue;
    }
    if (fields[0].empty()) {
      store.rejects.push_back({"traces", lineno, "empty worker id"});
      continue;
    }
    const auto when = parse_timestamp(fields[1]);
    if (!when) {
      store.rejects.push_back({"traces", lineno, "unparseable timestamp"});
      continue;
    }
    if (!store.registry.contains(fields[2])) {
      store.rejects.push_back({"traces", lineno, "unknown cell id " + fields[2]});
      continue;
    }
    const std::size_t index = store.records.size();
    store.records.push_back({fields[0], *when, fields[2]});
    store.by_worker[fields[0]].push_back(index);
    store.by_day[day_of(*when)].push_back(index);
  }
  return store;
}

TraceStore ingest_trace_files(const std::string& trace_path,
                              const std::string& antenna_path) {
  std::ifstream traces(trace_path);
  if (!traces) throw std::runtime_error("cannot open trace file " + trace_path);
  std::ifstream antennas(antenna_path);
  if (!antennas) {
    throw std::runtime_error("cannot open antenna file " + antenna_path);
  }
  return ingest_traces(traces, antennas);
}

void write_traces_csv(std::ostream& out,
                      std::span<const LocationRecord> records) {
  out << "worker_id,timestamp,cell_id\n";
  for (const LocationRecord& r : records) {
    out << r.worker_id << ',' << format_timestamp(r.timestamp) << ','
        << r.cell_id << '\n';
  }
}

void write_antennas_csv(std::ostream& out, const CellRegistry& registry) {
  out << "cell_id,lat,lon\n";
  std::ostringstream row;
  row.precision(17);
  for (const std::string& id : registry.ids()) {
    const Location& l = registry.at(id);
    row.str({});
    row << id << ',' << l.y << ',' << l.x << '\n';
    out << row.str();
  }
}

void ScenarioConfig::validate() const {
  area.validate();
  if (n < 1) throw ContractViolation("scenario needs at least one task");
  if (m < 0) throw ContractViolation("worker count must be nonnegative");
  if (q < 1) throw ContractViolation("q must be at least 1");
  if (p_range.first < 1 || p_range.second < p_range.first) {
    throw ContractViolation("invalid required-worker range");
  }
  if (!(r_thld > 0.0 && r_thld <= 1.0)) {
    throw ContractViolation("r_thld must lie in (0, 1]");
  }
  if (days < 1) throw ContractViolation("history needs at least one day");
  if (grid < 1) throw ContractViolation("grid resolution must be positive");
}

namespace {

TaskDistribution distribution_of(const ScenarioConfig& config) {
  TaskDistribution d;
  d.kind = config.kind;
  d.radius = config.compact_radius;
  d.mixture_weight = config.mixture_weight;
  return d;
}

// Independent random streams per scenario component.
enum Stream : std::uint64_t {
  kTaskStream = 1,
  kWorkerStream = 2,
  kRoutineStream = 3,
  kTraceStream = 4,
};

}  // namespace

WstsInstance build_wsts_scenario(const ScenarioConfig& config) {
  config.validate();
  auto tasks = generate_tasks(distribution_of(config), config.n, config.area,
                              config.p_range, derive_seed(config.seed, kTaskStream));
  auto workers = generate_wsts_workers(config.m, config.area,
                                       derive_seed(config.seed, kWorkerStream));
  return WstsInstance(std::move(tasks), std::move(workers), config.q,
                      config.unit_mode, config.speed);
}

WsdtScenario build_wsdt_scenario(const ScenarioConfig& config) {
  return build_wsdt_scenario(config, config.seed);
}

WsdtScenario build_wsdt_scenario(const ScenarioConfig& config,
                                 std::uint64_t population_seed) {
  config.validate();
  AreaSpec area = config.area;
  area.grid = config.grid;
  CellRegistry registry = make_grid_registry(area);

  std::vector<std::string> worker_ids;
  for (int j = 0; j < config.m; ++j) worker_ids.push_back("w" + std::to_string(j));
  auto rho = generate_visit_probabilities(
      config.m, registry, config.routine,
      derive_seed(population_seed, kRoutineStream));
  auto records = generate_traces(worker_ids, registry.ids(), config.first_day,
                                 config.days + 1, rho,
                                 derive_seed(population_seed, kTraceStream));
  const DayWindow window{config.first_day, config.first_day + config.days};
  std::vector<LocationRecord> history;
  std::vector<LocationRecord> holdout;
  for (LocationRecord& r : records) {
    (window.contains(day_of(r.timestamp)) ? history : holdout).push_back(std::move(r));
  }
  auto profiles = build_profiles(history, worker_ids, window);

  auto tasks = generate_tasks(distribution_of(config), config.n, area,
                              config.p_range, derive_seed(config.seed, kTaskStream));
  for (Task& t : tasks) t.cell_id = registry.nearest(t.venue);
  WsdtInstance instance =
      make_wsdt_instance(std::move(tasks), profiles, config.r_thld);
  return WsdtScenario{std::move(instance), std::move(registry),
                      std::move(profiles), std::move(history),
                      std::move(holdout), std::move(rho)};
}

}  // namespace crowdsel
