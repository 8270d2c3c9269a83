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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "crowdsel/scenario.hpp"

using namespace crowdsel;

namespace {

bool same_tasks(const std::vector<Task>& a, const std::vector<Task>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].id != b[i].id || !(a[i].venue == b[i].venue) ||
        a[i].required_workers != b[i].required_workers) {
      return false;
    }
  }
  return true;
}

Task timed(const std::string& id, double x, double y, std::int64_t at) {
  return Task{id, {x, y}, 1, at, std::nullopt};
}

}  // namespace

TEST_CASE("seed derivation is stable and spreads") {
  CHECK(derive_seed(1, 2) == derive_seed(1, 2));
  CHECK(derive_seed(1, 2) != derive_seed(1, 3));
  CHECK(derive_seed(1, 2) != derive_seed(2, 2));
  CHECK(splitmix64(0) != 0);
}

TEST_CASE("compact tasks stay inside the disk") {
  const AreaSpec area;
  TaskDistribution d;
  d.kind = DistributionKind::kCompact;
  const double radius = d.resolved_radius(area);
  CHECK(radius == doctest::Approx(0.1 * area.diagonal()));
  const Location c = d.resolved_center(area);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto tasks = generate_tasks(d, 50, area, {2, 4}, seed);
    for (const auto& t : tasks) {
      CHECK(std::hypot(t.venue.x - c.x, t.venue.y - c.y) <= radius + 1e-9);
      CHECK(area.contains(t.venue));
    }
    for (const auto& a : tasks) {
      for (const auto& b : tasks) {
        CHECK(manhattan_distance(a.venue, b.venue) <= 2 * (2 * radius) + 1e-9);
      }
    }
  }
}

TEST_CASE("scattered and hybrid tasks stay inside the box") {
  AreaSpec area{100, 300, -50, 50, 0};
  for (auto kind : {DistributionKind::kScattered, DistributionKind::kHybrid}) {
    TaskDistribution d;
    d.kind = kind;
    for (const auto& t : generate_tasks(d, 200, area, {1, 1}, 3)) {
      CHECK(area.contains(t.venue));
    }
  }
}

TEST_CASE("required workers follow the range") {
  TaskDistribution d;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto tasks = generate_tasks(d, 20, AreaSpec{}, {2, 4}, seed);
    int sum = 0;
    for (const auto& t : tasks) {
      CHECK(t.required_workers >= 2);
      CHECK(t.required_workers <= 4);
      sum += t.required_workers;
    }
    CHECK(sum >= 40);
    CHECK(sum <= 80);
  }
}

TEST_CASE("generators are pure functions of their seed") {
  TaskDistribution d;
  d.kind = DistributionKind::kHybrid;
  CHECK(same_tasks(generate_tasks(d, 30, AreaSpec{}, {2, 4}, 9),
                   generate_tasks(d, 30, AreaSpec{}, {2, 4}, 9)));
  CHECK_FALSE(same_tasks(generate_tasks(d, 30, AreaSpec{}, {2, 4}, 9),
                         generate_tasks(d, 30, AreaSpec{}, {2, 4}, 10)));
  const auto w1 = generate_wsts_workers(10, AreaSpec{}, 4);
  const auto w2 = generate_wsts_workers(10, AreaSpec{}, 4);
  for (std::size_t j = 0; j < w1.size(); ++j) CHECK(*w1[j].position == *w2[j].position);
  CHECK(generate_wsts_workers(0, AreaSpec{}, 4).empty());
}

TEST_CASE("workers on a registry sit on cell sites") {
  AreaSpec area;
  area.grid = 5;
  const auto reg = make_grid_registry(area);
  CHECK(reg.size() == 25);
  CHECK(reg.contains("c0_0"));
  for (const auto& w : generate_wsts_workers(30, area, 1, &reg)) {
    bool on_site = false;
    for (const auto& id : reg.ids()) on_site |= reg.at(id) == *w.position;
    CHECK(on_site);
  }
}

TEST_CASE("trace generator extremes") {
  const std::vector<std::string> workers{"w0", "w1"};
  const std::vector<std::string> cells{"a", "b"};
  const std::vector<std::vector<double>> rho{{1.0, 0.0}, {0.0, 0.0}};
  const auto records = generate_traces(workers, cells, 100, 7, rho, 1);
  CHECK(records.size() == 7);
  std::set<std::int64_t> days;
  for (const auto& r : records) {
    CHECK(r.worker_id == "w0");
    CHECK(r.cell_id == "a");
    days.insert(day_of(r.timestamp));
  }
  CHECK(days.size() == 7);
  const std::vector<std::vector<double>> zero{{0.0, 0.0}, {0.0, 0.0}};
  CHECK(generate_traces(workers, cells, 100, 7, zero, 1).empty());
}

TEST_CASE("empirical pass probabilities sit within three sigma of the truth") {
  AreaSpec area;
  area.grid = 10;
  const auto reg = make_grid_registry(area);
  const int m = 1000, days = 10;
  const auto rho = generate_visit_probabilities(m, reg, RoutineModel{}, 5);
  std::vector<std::string> ids;
  for (int j = 0; j < m; ++j) ids.push_back("w" + std::to_string(j));
  const auto records = generate_traces(ids, reg.ids(), 0, days, rho, 6);
  const auto profiles = build_profiles(records, ids, {0, days});
  int checked = 0, outside = 0;
  for (int j = 0; j < m; ++j) {
    if (profiles[j].days_observed != days) continue;
    for (std::size_t c = 0; c < reg.size(); ++c) {
      const double r = rho[j][c];
      if (r == 0.0) continue;
      const double sigma = std::sqrt(r * (1 - r) / days);
      const double p = pass_probability(profiles[j], reg.ids()[c]);
      ++checked;
      if (std::abs(p - r) > 3 * sigma + 1e-12) ++outside;
    }
  }
  REQUIRE(checked > 1000);
  // A 3-sigma band misses a small share of draws; binomials with small
  // n are lumpy, so allow 1%.
  CHECK(static_cast<double>(outside) / checked <= 0.01);
}

TEST_CASE("clustering examples") {
  const std::int64_t hour = 3600;
  std::vector<Task> far{timed("a", 0, 0, 0), timed("b", 20, 0, 10)};
  auto r = cluster_tasks(far, hour, 10);
  CHECK(r.groups.size() == 2);

  std::vector<Task> chain{timed("a", 0, 0, 0), timed("b", 10, 0, 5), timed("c", 20, 0, 9)};
  r = cluster_tasks(chain, hour, 10);
  REQUIRE(r.groups.size() == 1);
  CHECK(r.groups[0] == std::vector<std::size_t>{0, 1, 2});

  std::vector<Task> hours{timed("a", 0, 0, 0), timed("b", 0, 0, hour + 1)};
  CHECK(cluster_tasks(hours, hour, 10).groups.size() == 2);

  std::vector<Task> untimed{timed("a", 0, 0, 0), Task{"b", {99, 99}, 1, std::nullopt, std::nullopt}};
  r = cluster_tasks(untimed, hour, 10);
  CHECK(r.groups.size() == 1);
  CHECK(r.warning.has_value());
}

TEST_CASE("clustering partitions the input") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Task> tasks;
    for (int i = 0; i < 30; ++i) {
      tasks.push_back(timed("t" + std::to_string(i), rng() % 100, rng() % 100,
                            static_cast<std::int64_t>(rng() % 10000)));
    }
    const auto r = cluster_tasks(tasks, 3600, 15);
    std::vector<int> seen(tasks.size(), 0);
    for (const auto& g : r.groups) {
      CHECK(std::is_sorted(g.begin(), g.end()));
      for (std::size_t i : g) ++seen[i];
    }
    for (int s : seen) CHECK(s == 1);
  }
}

TEST_CASE("trace ingestion") {
  std::istringstream antennas("cell_id,lat,lon\nA,5.3,-4.0\nB,5.4,-4.1\n");
  std::istringstream traces(
      "worker_id,timestamp,cell_id\n"
      "w1,2013-01-01T08:00:00,A\n"
      "w1,2013-01-02T09:00:00,B\n"
      "w2,2013-01-01T10:00:00,Z\n"
      "w2,not-a-time,A\n"
      "w2,2013-01-01T10:00:00,A\n"
      "w2,2013-01-01T10:00:00,A\n");
  const auto store = ingest_traces(traces, antennas);
  CHECK(store.registry.size() == 2);
  CHECK(store.registry.at("A") == Location{-4.0, 5.3});
  CHECK(store.records.size() == 4);
  REQUIRE(store.rejects.size() == 2);
  CHECK(store.rejects[0].line == 4);
  CHECK(store.rejects[1].line == 5);
  CHECK(store.by_worker.at("w2").size() == 2);
  CHECK(store.by_day.size() == 2);
}

TEST_CASE("trace ingestion of a clean file without header") {
  std::istringstream antennas("A,1,2\n");
  std::istringstream traces("w,2013-01-01T00:00:00,A\nw,2013-01-02T00:00:00,A\nw,2013-01-03T00:00:00,A\n");
  const auto store = ingest_traces(traces, antennas);
  CHECK(store.records.size() == 3);
  CHECK(store.rejects.empty());
}

TEST_CASE("trace csv round trip") {
  CellRegistry reg;
  reg.add("x", {1.5, 2.5});
  const std::vector<LocationRecord> records{{"w", 1000, "x"}, {"v", 90000, "x"}};
  std::ostringstream t, a;
  write_traces_csv(t, records);
  write_antennas_csv(a, reg);
  std::istringstream ti(t.str()), ai(a.str());
  const auto store = ingest_traces(ti, ai);
  CHECK(store.records == records);
  CHECK(store.registry.at("x") == Location{1.5, 2.5});
}

TEST_CASE("missing trace files are reported") {
  CHECK_THROWS_AS(ingest_trace_files("/nonexistent/t.csv", "/nonexistent/a.csv"),
                  std::runtime_error);
}

TEST_CASE("whole scenarios are reproducible") {
  ScenarioConfig c;
  c.n = 8;
  c.m = 15;
  c.seed = 77;
  const auto a = build_wsts_scenario(c);
  const auto b = build_wsts_scenario(c);
  CHECK(same_tasks(a.tasks(), b.tasks()));
  CHECK(a.num_workers() == 15);

  c.m = 30;
  c.days = 5;
  c.grid = 8;
  const auto s = build_wsdt_scenario(c);
  const auto t = build_wsdt_scenario(c);
  CHECK(s.instance.eligibility() == t.instance.eligibility());
  CHECK(s.profiles.size() == 30);
  for (const auto& r : s.holdout) CHECK(day_of(r.timestamp) == c.first_day + c.days);
  for (const auto& task : s.instance.tasks()) CHECK(task.cell_id.has_value());

  // A separate population seed decouples workers from the task layout.
  const auto u = build_wsdt_scenario(c, 5);
  ScenarioConfig other = c;
  other.seed = 123;
  const auto v = build_wsdt_scenario(other, 5);
  CHECK(u.history == v.history);
  CHECK_FALSE(same_tasks(u.instance.tasks(), v.instance.tasks()));
}

TEST_CASE("scenario validation") {
  ScenarioConfig c;
  c.n = 0;
  CHECK_THROWS_AS(c.validate(), ContractViolation);
  c = {};
  c.p_range = {3, 2};
  CHECK_THROWS_AS(c.validate(), ContractViolation);
  AreaSpec flat{0, 0, 0, 10, 0};
  CHECK_THROWS_AS(flat.validate(), ContractViolation);
  CHECK(distribution_from_string("compact") == DistributionKind::kCompact);
  CHECK_THROWS_AS(distribution_from_string("clumpy"), ContractViolation);
}
