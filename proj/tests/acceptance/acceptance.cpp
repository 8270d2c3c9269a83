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

// Acceptance runner. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "crowdsel/bench.hpp"
#include "crowdsel/evolve.hpp"
#include "crowdsel/greedy.hpp"
#include "crowdsel/io.hpp"
#include "crowdsel/mobility.hpp"
#include "crowdsel/oracle.hpp"
#include "crowdsel/scenario.hpp"

using namespace crowdsel;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

// Hard dominance observations gathered by every other criterion.
struct DominanceLedger {
  long comparisons = 0;
  std::vector<std::string> breaches;

  void record(const std::string& claim, double lhs, double rhs) {
    ++comparisons;
    if (!(lhs <= rhs)) {
      std::ostringstream s;
      s << claim << " (" << lhs << " > " << rhs << ")";
      breaches.push_back(s.str());
    }
  }

  void absorb(const ExperimentReport& report) {
    for (const auto& c : report.checks) {
      if (c.kind != "hard") continue;
      record(c.claim + " @" + c.scenario, c.lhs, c.rhs);
    }
  }
};

DominanceLedger dominance;

std::string fmt(const char* pattern, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, value);
  return buf;
}

bool same(double a, double b) {
  return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b));
}

ExperimentConfig load_config(const std::string& name) {
  const auto path = std::filesystem::path(CROWDSEL_SOURCE_DIR) / "configs" / name;
  return experiment_from_json(read_json_file(path.string()));
}

const Aggregate* find(const std::vector<Aggregate>& aggs, const std::string& scenario,
                      const std::string& solver) {
  for (const auto& a : aggs) {
    if (a.scenario == scenario && a.solver == solver) return &a;
  }
  return nullptr;
}

// --- 1 ----------------------------------------------------------------------

Verdict oracle_wsts() {
  Rng rng(20260101);
  int valid = 0, optimal = 0, within = 0;
  double worst_gap = 0.0;
  std::vector<std::string> nf_below;
  for (std::uint64_t k = 0; valid < 100; ++k) {
    ScenarioConfig c;
    c.n = 1 + static_cast<int>(rng() % 4);
    c.m = 2 + static_cast<int>(rng() % 7);
    c.p_range = {1, 2};
    c.q = 3;
    c.seed = derive_seed(77, k);
    const WstsInstance inst = build_wsts_scenario(c);
    const auto nf = nearest_first(inst);
    if (!nf.complete()) continue;
    ++valid;
    const double opt = enumerate_wsts(inst).objective;
    EvolveParams p;
    p.generations = 500;
    p.seed = derive_seed(78, k);
    const double gga = gga_i(inst, p).objective;
    const double pso = gypso(inst, p).objective;
    dominance.record("gga-i <= nearest-first", gga, nf.objective);
    dominance.record("gypso <= nearest-first", pso, nf.objective);
    if (nf.objective < opt - 1e-9 * std::max(1.0, opt)) {
      nf_below.push_back(std::to_string(k));
    }
    if (same(gga, opt)) {
      ++optimal;
    } else {
      const double gap = (gga - opt) / opt;
      worst_gap = std::max(worst_gap, gap);
      if (gap <= 0.05) ++within;
    }
  }
  Verdict v;
  v.pass = optimal >= 90 && optimal + within == valid && nf_below.empty();
  v.detail = std::to_string(optimal) + "/" + std::to_string(valid) +
             " optimal, worst gap " + fmt("%.2f%%", 100 * worst_gap) +
             ", nearest-first below optimum on " + std::to_string(nf_below.size());
  return v;
}

// --- 2 ----------------------------------------------------------------------

WsdtInstance random_wsdt(Rng& rng, int m, int n) {
  std::vector<Task> tasks;
  std::uniform_int_distribution<int> p(1, 2);
  for (int i = 0; i < n; ++i) {
    tasks.push_back(Task{"t" + std::to_string(i), {0, 0}, p(rng), std::nullopt, std::nullopt});
  }
  std::vector<Worker> workers;
  std::bernoulli_distribution b(0.35);
  Eligibility e(m, n);
  for (int j = 0; j < m; ++j) {
    workers.push_back(Worker{"w" + std::to_string(j), std::nullopt, std::nullopt});
    for (int i = 0; i < n; ++i) e.set(j, i, b(rng));
  }
  return WsdtInstance(tasks, workers, 0.8, e);
}

Verdict oracle_wsdt() {
  Rng rng(20260102);
  int valid = 0, optimal = 0, mf_below = 0, mf_over_bound = 0;
  for (std::uint64_t k = 0; valid < 100; ++k) {
    const int m = 4 + static_cast<int>(rng() % 9);
    const int n = 1 + static_cast<int>(rng() % 8);
    const WsdtInstance inst = random_wsdt(rng, m, n);
    const auto mf = most_first(inst);
    if (!mf.complete()) continue;
    ++valid;
    const double opt = enumerate_wsdt(inst).objective;
    EvolveParams p;
    p.seed = derive_seed(79, k);
    const double gga = gga_u(inst, p).objective;
    dominance.record("gga-u <= most-first", gga, mf.objective);
    if (gga == opt) ++optimal;
    if (mf.objective < opt) ++mf_below;
    if (mf.objective > opt * (1.0 + std::log(static_cast<double>(n))) + 1e-9) {
      ++mf_over_bound;
    }
  }
  Verdict v;
  v.pass = optimal >= 90 && mf_below == 0 && mf_over_bound == 0;
  v.detail = std::to_string(optimal) + "/" + std::to_string(valid) +
             " optimal, most-first below optimum " + std::to_string(mf_below) +
             ", above (1+ln n) bound " + std::to_string(mf_over_bound);
  return v;
}

// --- 4 ----------------------------------------------------------------------

Verdict solver_ordering() {
  const auto config = load_config("solver_ordering.json");
  const auto report = run_experiment(config);
  dominance.absorb(report);
  Verdict v;
  std::ostringstream d;
  for (const auto& s : config.scenarios) {
    const auto* gga = find(report.aggregates, s.label, "gga-i");
    const auto* pso = find(report.aggregates, s.label, "gypso");
    const auto* nf = find(report.aggregates, s.label, "nearest-first");
    const auto* ga = find(report.aggregates, s.label, "ga");
    if (!gga || !pso || !nf || !ga || !gga->mean_objective || !pso->mean_objective ||
        !nf->mean_objective || !ga->mean_objective) {
      v.pass = false;
      d << s.label << ": missing means; ";
      continue;
    }
    const double a = *gga->mean_objective, b = *pso->mean_objective;
    const double c = *nf->mean_objective, g = *ga->mean_objective;
    const bool ok = a <= b && b <= c && a <= g;
    v.pass = v.pass && ok;
    d << s.label << " gga-i " << fmt("%.0f", a) << " gypso " << fmt("%.0f", b)
      << " nf " << fmt("%.0f", c) << " ga " << fmt("%.0f", g) << (ok ? "; " : " (violated); ");
  }
  v.detail = d.str();
  return v;
}

// --- 5 ----------------------------------------------------------------------

Verdict delay_tolerant_counts() {
  const auto config = load_config("delay_tolerant_counts.json");
  const auto report = run_experiment(config);
  dominance.absorb(report);
  std::map<std::string, std::pair<std::string, double>> cell_of;
  for (const auto& s : config.scenarios) {
    cell_of[s.label] = {to_string(s.config.kind), s.config.r_thld};
  }
  // (kind, r_thld, solver) -> counts
  std::map<std::tuple<std::string, double, std::string>, std::vector<double>> counts;
  int infeasible = 0;
  for (const auto& row : report.rows) {
    if (!row.feasible) ++infeasible;
    const auto& [kind, r] = cell_of.at(row.scenario);
    counts[{kind, r, row.solver}].push_back(row.workers_selected);
  }
  auto mean = [&](const std::string& kind, double r, const std::string& solver) {
    const auto& xs = counts[{kind, r, solver}];
    double s = 0.0;
    for (double x : xs) s += x;
    return xs.empty() ? NAN : s / xs.size();
  };
  Verdict v;
  v.pass = infeasible == 0;
  std::ostringstream d;
  if (infeasible) d << infeasible << " infeasible rows; ";
  for (const char* kind : {"compact", "scattered", "hybrid"}) {
    for (double r : {0.8, 0.9}) {
      const double g = mean(kind, r, "gga-u"), mf = mean(kind, r, "most-first");
      const bool ok = g < mf;
      v.pass = v.pass && ok;
      d << kind << "/" << fmt("%.1f", r) << " gga-u " << fmt("%.2f", g) << " mf "
        << fmt("%.2f", mf) << (ok ? "" : " (not below)") << "; ";
    }
    for (const char* solver : {"gga-u", "most-first"}) {
      const bool ok = mean(kind, 0.8, solver) <= mean(kind, 0.9, solver);
      if (!ok) d << kind << " " << solver << " count at 0.8 exceeds 0.9; ";
      v.pass = v.pass && ok;
    }
  }
  v.detail = d.str();
  return v;
}

// --- 6 ----------------------------------------------------------------------

Verdict runtime_scaling() {
  const auto config = load_config("runtime_ladder.json");
  const auto report = run_experiment(config);
  dominance.absorb(report);
  const auto* lo = find(report.aggregates, "10t20w", "gga-i");
  const auto* hi = find(report.aggregates, "50t100w", "gga-i");
  Verdict v;
  if (!lo || !hi || !lo->mean_runtime_per_generation || !hi->mean_runtime_per_generation) {
    v.pass = false;
    v.detail = "missing runtime aggregates";
    return v;
  }
  const double ratio = *hi->mean_runtime_per_generation / *lo->mean_runtime_per_generation;
  v.pass = ratio <= 5.0;
  v.detail = "per-generation " + fmt("%.3g s", *lo->mean_runtime_per_generation) +
             " at 10t20w, " + fmt("%.3g s", *hi->mean_runtime_per_generation) +
             " at 50t100w, ratio " + fmt("%.2f", ratio) + " (limit 5)";
  return v;
}

// --- 7 ----------------------------------------------------------------------

Verdict mobility_calibration() {
  Verdict v;
  std::ostringstream d;
  const DistributionKind kinds[] = {DistributionKind::kCompact, DistributionKind::kScattered,
                                    DistributionKind::kHybrid};
  for (double r : {0.8, 0.9}) {
    double predicted = 0.0, practical = 0.0, truth = 0.0;
    std::size_t pairs = 0;
    for (int draw = 0; draw < 6; ++draw) {
      ScenarioConfig c;
      c.kind = kinds[draw % 3];
      c.n = 20;
      c.m = 1000;
      c.days = 10;
      c.p_range = {2, 4};
      c.r_thld = r;
      c.seed = derive_seed(700, draw);
      const WsdtScenario s = build_wsdt_scenario(c);
      EvolveParams p;
      p.seed = derive_seed(701, draw);
      p.mutation_rate = 1.0;
      const auto best = gga_u(s.instance, p).best;
      const auto assigned = assigned_pairs(s.instance, best);
      const auto ev = evaluate_prediction(s.profiles, s.holdout, assigned);
      if (!ev) continue;
      predicted += ev->predicted * ev->pairs;
      practical += ev->practical * ev->pairs;
      pairs += ev->pairs;
      const auto ids = s.registry.ids();
      for (const auto& a : assigned) {
        const auto cell = std::find(ids.begin(), ids.end(), a.cell_id) - ids.begin();
        truth += s.rho[a.worker][cell];
      }
    }
    if (pairs == 0) {
      v.pass = false;
      d << "R=" << r << ": no assigned pairs; ";
      continue;
    }
    predicted /= pairs;
    practical /= pairs;
    truth /= pairs;
    const bool ok = std::abs(predicted - practical) <= 0.05 && predicted >= r && practical >= r;
    v.pass = v.pass && ok;
    d << "R=" << fmt("%.1f", r) << " predicted " << fmt("%.3f", predicted) << " practical "
      << fmt("%.3f", practical) << " true " << fmt("%.3f", truth) << " over " << pairs
      << " pairs" << (ok ? "; " : " (violated); ");
  }
  v.detail = d.str();
  return v;
}

// --- 8 ----------------------------------------------------------------------

double brute_route(const Location& start, std::vector<Location> venues) {
  std::sort(venues.begin(), venues.end(),
            [](const Location& a, const Location& b) { return std::tie(a.x, a.y) < std::tie(b.x, b.y); });
  double best = INFINITY;
  do {
    double d = 0.0;
    Location at = start;
    for (const auto& v : venues) {
      d += manhattan_distance(at, v);
      at = v;
    }
    best = std::min(best, d);
  } while (std::next_permutation(venues.begin(), venues.end(), [](const Location& a, const Location& b) {
    return std::tie(a.x, a.y) < std::tie(b.x, b.y);
  }));
  return venues.empty() ? 0.0 : best;
}

Verdict property_suites() {
  Rng rng(20260108);
  std::uniform_real_distribution<double> coord(-1000.0, 1000.0);
  auto point = [&] { return Location{coord(rng), coord(rng)}; };
  std::map<std::string, int> failures;

  for (int k = 0; k < 10000; ++k) {
    const Location a = point(), b = point(), c = point();
    const double ab = manhattan_distance(a, b);
    if (manhattan_distance(a, a) != 0.0 || ab < 0.0 || ab != manhattan_distance(b, a) ||
        manhattan_distance(a, c) > ab + manhattan_distance(b, c) + 1e-9) {
      ++failures["metric axioms"];
    }
    std::vector<Location> venues(1 + k % 4);
    for (auto& v : venues) v = point();
    if (std::abs(route_distance(a, venues) - brute_route(a, venues)) > 1e-9) {
      ++failures["route vs brute force"];
    }
  }

  // Operator closure: 10^4 applications per operator.
  int wsts_apps = 0, wsdt_apps = 0;
  for (std::uint64_t k = 0; wsts_apps < 10000; ++k) {
    ScenarioConfig c;
    c.n = 2 + static_cast<int>(k % 6);
    c.m = 4 + static_cast<int>(k % 9);
    c.p_range = {1, 3};
    c.seed = derive_seed(80, k);
    const WstsInstance inst = build_wsts_scenario(c);
    const auto a = random_feasible_assignment(inst, rng);
    const auto b = random_feasible_assignment(inst, rng);
    if (!a || !b) continue;
    for (int t = 0; t < 50; ++t, ++wsts_apps) {
      const auto kids = crossover_wsts(*a, *b, inst.q(), rng, 20);
      if (!validate_assignment(inst, kids.first).feasible ||
          !validate_assignment(inst, kids.second).feasible) {
        ++failures["wsts crossover closure"];
      }
      if (!validate_assignment(inst, mutate_wsts(*a, inst.q(), rng)).feasible) {
        ++failures["wsts mutation closure"];
      }
    }
  }
  while (wsdt_apps < 10000) {
    const WsdtInstance inst = random_wsdt(rng, 4 + rng() % 9, 1 + rng() % 8);
    SelectionVector all(inst.num_workers());
    for (std::size_t j = 0; j < inst.num_workers(); ++j) all.set(j, true);
    if (!validate_selection(inst, all).feasible) continue;
    std::bernoulli_distribution coin(0.5);
    for (int t = 0; t < 50; ++t, ++wsdt_apps) {
      SelectionVector a(inst.num_workers()), b(inst.num_workers());
      for (std::size_t j = 0; j < inst.num_workers(); ++j) {
        a.set(j, coin(rng));
        b.set(j, coin(rng));
      }
      const auto [x, y] = crossover_wsdt(a, b, inst, rng);
      if (!validate_selection(inst, x).feasible || !validate_selection(inst, y).feasible) {
        ++failures["wsdt crossover closure"];
      }
      if (!validate_selection(inst, mutate_wsdt(a, inst, rng, 0.2)).feasible) {
        ++failures["wsdt mutation closure"];
      }
    }
  }

  // Unfitness normalization.
  for (int k = 0; k < 1000; ++k) {
    std::vector<double> objectives(2 + k % 30);
    for (auto& o : objectives) o = std::abs(coord(rng));
    const auto u = unfitness(objectives);
    double sum = 0.0, total = 0.0;
    for (double o : objectives) total += o;
    for (std::size_t i = 0; i < u.size(); ++i) {
      sum += u[i];
      if (u[i] < 0.0 || std::abs(u[i] - objectives[i] / total) > 1e-12) {
        ++failures["unfitness normalization"];
      }
    }
    if (std::abs(sum - 1.0) > 1e-9) ++failures["unfitness normalization"];
  }

  // Monotonicity and submodularity over 10^4 triples.
  int triples = 0;
  for (std::uint64_t k = 0; triples < 10000; ++k) {
    const WsdtInstance inst = random_wsdt(rng, 5 + k % 8, 2 + k % 7);
    const auto report = check_submodularity(inst, 500, derive_seed(81, k));
    triples += report.trials - report.skipped;
    if (!report.holds()) failures["submodularity"] += report.counterexamples.size();
  }

  // Determinism.
  ScenarioConfig c;
  c.n = 10;
  c.m = 20;
  const WstsInstance wsts = build_wsts_scenario(c);
  ScenarioConfig dc;
  dc.n = 10;
  dc.m = 1000;
  dc.p_range = {1, 2};
  const WsdtInstance wsdt = build_wsdt_scenario(dc).instance;
  EvolveParams p;
  p.seed = 99;
  p.generations = 100;
  if (!(gga_i(wsts, p).best == gga_i(wsts, p).best)) ++failures["determinism"];
  if (!(gypso(wsts, p).best == gypso(wsts, p).best)) ++failures["determinism"];
  if (!(plain_ga_wsts(wsts, p).best == plain_ga_wsts(wsts, p).best)) ++failures["determinism"];
  if (!(gga_u(wsdt, p).best == gga_u(wsdt, p).best)) ++failures["determinism"];
  if (!(plain_ga_wsdt(wsdt, p).best == plain_ga_wsdt(wsdt, p).best)) ++failures["determinism"];
  if (!(to_json(build_wsts_scenario(c)) == to_json(wsts))) ++failures["determinism"];

  Verdict v;
  v.pass = failures.empty();
  std::ostringstream d;
  d << "10000 metric and route samples, " << wsts_apps << " wsts and " << wsdt_apps
    << " wsdt operator applications, " << triples << " submodularity triples";
  for (const auto& [name, count] : failures) d << "; " << name << " failed " << count;
  v.detail = d.str();
  return v;
}

// --- 9 ----------------------------------------------------------------------

Verdict pool_size_trend() {
  const auto config = load_config("pool_size_trend.json");
  const auto report = run_experiment(config);
  dominance.absorb(report);
  Verdict v;
  std::ostringstream d;
  for (const auto& solver : config.solvers) {
    std::optional<double> prev_obj, prev_tpw;
    d << solver.algo << ":";
    for (const auto& s : config.scenarios) {
      const auto* a = find(report.aggregates, s.label, solver.algo);
      if (!a || !a->mean_objective || !a->mean_tasks_per_worker) {
        v.pass = false;
        d << " " << s.label << " missing";
        continue;
      }
      const double obj = *a->mean_objective, tpw = *a->mean_tasks_per_worker;
      if ((prev_obj && obj > *prev_obj) || (prev_tpw && tpw > *prev_tpw)) v.pass = false;
      d << " " << s.label << " " << fmt("%.0f", obj) << "/" << fmt("%.2f", tpw);
      prev_obj = obj;
      prev_tpw = tpw;
    }
    d << "; ";
  }
  v.detail = d.str() + "(distance/tasks per worker)";
  return v;
}

}  // namespace

int main() {
  using Clock = std::chrono::steady_clock;
  struct Criterion {
    int id;
    const char* name;
    std::function<Verdict()> run;
  };
  // Hard dominance is evaluated last because every other criterion feeds it.
  const std::vector<Criterion> criteria{
      {1, "oracle equivalence (wsts)", oracle_wsts},
      {2, "oracle equivalence (wsdt)", oracle_wsdt},
      {4, "comparative ordering 10t20w/20t40w/30t60w", solver_ordering},
      {5, "delay-tolerant selection counts", delay_tolerant_counts},
      {6, "runtime-per-generation scaling", runtime_scaling},
      {7, "mobility calibration", mobility_calibration},
      {8, "property suites", property_suites},
      {9, "pool-size trend", pool_size_trend},
  };
  std::map<int, std::pair<std::string, Verdict>> results;
  std::map<int, double> seconds;
  for (const auto& c : criteria) {
    const auto start = Clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    seconds[c.id] = std::chrono::duration<double>(Clock::now() - start).count();
    results[c.id] = {c.name, v};
  }
  Verdict hard;
  hard.pass = dominance.breaches.empty() && dominance.comparisons > 0;
  hard.detail = std::to_string(dominance.comparisons) + " comparisons, " +
                std::to_string(dominance.breaches.size()) + " breaches";
  for (std::size_t k = 0; k < std::min<std::size_t>(3, dominance.breaches.size()); ++k) {
    hard.detail += "; " + dominance.breaches[k];
  }
  results[3] = {"hard dominance", hard};
  seconds[3] = 0.0;

  int failed = 0;
  for (const auto& [id, entry] : results) {
    const auto& [name, v] = entry;
    failed += v.pass ? 0 : 1;
    std::cout << (v.pass ? "PASS" : "FAIL") << " [" << id << "] " << name << ": " << v.detail
              << " (" << fmt("%.1f", seconds[id]) << " s)\n";
  }
  std::cout << (failed ? "acceptance: " + std::to_string(failed) + " criteria failed"
                       : std::string("acceptance: all criteria passed"))
            << '\n';
  return failed ? 1 : 0;
}
