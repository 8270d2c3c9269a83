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

#include "crowdsel/evolve.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <string>

#include "crowdsel/greedy.hpp"

namespace crowdsel {

void EvolveParams::validate() const {
  if (population_size < 2) {
    throw ContractViolation("population_size must be at least 2");
  }
  if (generations < 1) throw ContractViolation("generations must be positive");
  auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!unit(crossover_rate) || !unit(mutation_rate)) {
    throw ContractViolation("crossover_rate and mutation_rate must be in [0,1]");
  }
  if (crossover_retry_limit < 1) {
    throw ContractViolation("crossover_retry_limit must be positive");
  }
  if (init_perturbations < 0) {
    throw ContractViolation("init_perturbations must be nonnegative");
  }
  if (!unit(pso_personal_rate) || !unit(pso_global_rate) ||
      pso_personal_rate + pso_global_rate > 1.0) {
    throw ContractViolation(
        "pso rates must be in [0,1] and sum to at most 1");
  }
}

double EvolveStats::mean_runtime_per_generation() const {
  if (runtime_per_generation.empty()) return 0.0;
  return std::accumulate(runtime_per_generation.begin(),
                         runtime_per_generation.end(), 0.0) /
         static_cast<double>(runtime_per_generation.size());
}

// --- Selection ---------------------------------------------------------------

std::vector<double> unfitness(std::span<const double> objectives) {
  if (objectives.empty()) throw ContractViolation("empty population");
  const double total =
      std::accumulate(objectives.begin(), objectives.end(), 0.0);
  std::vector<double> out(objectives.size());
  if (total <= 0.0) {
    std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(out.size()));
    return out;
  }
  for (std::size_t k = 0; k < objectives.size(); ++k) {
    out[k] = objectives[k] / total;
  }
  return out;
}

std::vector<double> unfitness_wsts(std::span<const AssignmentMatrix> population,
                                   const WstsInstance& instance) {
  std::vector<double> distances;
  distances.reserve(population.size());
  for (const AssignmentMatrix& a : population) {
    distances.push_back(total_distance(instance, a));
  }
  return unfitness(distances);
}

std::vector<double> unfitness_wsdt(std::span<const SelectionVector> population) {
  std::vector<double> counts;
  counts.reserve(population.size());
  for (const SelectionVector& s : population) counts.push_back(s.count());
  return unfitness(counts);
}

std::vector<std::size_t> roulette_eliminate(std::span<const double> unfitness,
                                            Rng& rng) {
  const std::size_t size = unfitness.size();
  if (size == 0) throw ContractViolation("empty population");
  const std::size_t target = std::max<std::size_t>(1, size / 2);
  const std::size_t elite = static_cast<std::size_t>(
      std::min_element(unfitness.begin(), unfitness.end()) - unfitness.begin());

  std::vector<bool> present(size, true);
  std::size_t remaining = size;
  while (remaining > target) {
    double mass = 0.0;
    for (std::size_t k = 0; k < size; ++k) {
      if (present[k] && k != elite) mass += unfitness[k];
    }
    if (!(mass > 0.0)) break;
    const double r = std::uniform_real_distribution<double>(0.0, mass)(rng);
    double acc = 0.0;
    std::size_t chosen = size;
    for (std::size_t k = 0; k < size; ++k) {
      if (!present[k] || k == elite || !(unfitness[k] > 0.0)) continue;
      chosen = k;
      acc += unfitness[k];
      if (r < acc) break;
    }
    present[chosen] = false;
    --remaining;
  }

  std::vector<std::size_t> survivors;
  survivors.reserve(remaining);
  for (std::size_t k = 0; k < size; ++k) {
    if (present[k]) survivors.push_back(k);
  }
  return survivors;
}

// --- Time-sensitive operators ------------------------------------------------

std::optional<WstsOffspring> exchange_column(const AssignmentMatrix& parent_a,
                                             const AssignmentMatrix& parent_b,
                                             std::size_t column, int q) {
  for (std::size_t j = 0; j < parent_a.num_workers(); ++j) {
    const int x = parent_a.at(j, column) ? 1 : 0;
    const int y = parent_b.at(j, column) ? 1 : 0;
    if (x == y) continue;
    if (parent_a.row_sum(j) - x + y > q) return std::nullopt;
    if (parent_b.row_sum(j) - y + x > q) return std::nullopt;
  }
  WstsOffspring out{parent_a, parent_b, column};
  for (std::size_t j = 0; j < parent_a.num_workers(); ++j) {
    out.first.set(j, column, parent_b.at(j, column));
    out.second.set(j, column, parent_a.at(j, column));
  }
  return out;
}

WstsOffspring crossover_wsts(const AssignmentMatrix& parent_a,
                             const AssignmentMatrix& parent_b, int q, Rng& rng,
                             int retry_limit) {
  if (parent_a.num_workers() != parent_b.num_workers() ||
      parent_a.num_tasks() != parent_b.num_tasks()) {
    throw ContractViolation("crossover parents differ in shape");
  }
  std::uniform_int_distribution<std::size_t> pick(0, parent_a.num_tasks() - 1);
  for (int attempt = 0; attempt < retry_limit; ++attempt) {
    if (auto children = exchange_column(parent_a, parent_b, pick(rng), q)) {
      return std::move(*children);
    }
  }
  return WstsOffspring{parent_a, parent_b, std::nullopt};
}

std::optional<MutationMove> mutate_wsts_in_place(AssignmentMatrix& individual,
                                                 int q, Rng& rng) {
  const int ones = individual.ones();
  if (ones == 0) return std::nullopt;
  int k = std::uniform_int_distribution<int>(0, ones - 1)(rng);
  std::size_t column = 0;
  while (k >= individual.col_sum(column)) {
    k -= individual.col_sum(column);
    ++column;
  }
  std::size_t from = 0;
  for (std::size_t j = 0; j < individual.num_workers(); ++j) {
    if (individual.at(j, column) && k-- == 0) {
      from = j;
      break;
    }
  }
  std::vector<std::size_t> receivers;
  for (std::size_t j = 0; j < individual.num_workers(); ++j) {
    if (!individual.at(j, column) && individual.row_sum(j) < q) {
      receivers.push_back(j);
    }
  }
  if (receivers.empty()) return std::nullopt;
  const std::size_t to = receivers[std::uniform_int_distribution<std::size_t>(
      0, receivers.size() - 1)(rng)];
  individual.set(from, column, false);
  individual.set(to, column, true);
  return MutationMove{column, from, to};
}

AssignmentMatrix mutate_wsts(const AssignmentMatrix& individual, int q,
                             Rng& rng) {
  AssignmentMatrix out = individual;
  mutate_wsts_in_place(out, q, rng);
  return out;
}

std::optional<AssignmentMatrix> random_feasible_assignment(
    const WstsInstance& instance, Rng& rng, int attempts) {
  const std::size_t m = instance.num_workers();
  std::vector<std::size_t> rows;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    AssignmentMatrix a(m, instance.num_tasks());
    bool ok = true;
    for (std::size_t i = 0; i < instance.num_tasks() && ok; ++i) {
      rows.clear();
      for (std::size_t j = 0; j < m; ++j) {
        if (a.row_sum(j) < instance.q()) rows.push_back(j);
      }
      const auto need = static_cast<std::size_t>(instance.required(i));
      if (rows.size() < need) {
        ok = false;
        break;
      }
      // Partial Fisher-Yates: the first `need` entries become the sample.
      for (std::size_t k = 0; k < need; ++k) {
        const std::size_t pick =
            std::uniform_int_distribution<std::size_t>(k, rows.size() - 1)(rng);
        std::swap(rows[k], rows[pick]);
        a.set(rows[k], i, true);
      }
    }
    if (ok) return a;
  }
  return std::nullopt;
}

// --- Delay-tolerant operators ------------------------------------------------

std::pair<SelectionVector, SelectionVector> one_point_crossover(
    const SelectionVector& parent_a, const SelectionVector& parent_b,
    std::size_t cut) {
  if (parent_a.size() != parent_b.size()) {
    throw ContractViolation("crossover parents differ in length");
  }
  if (cut > parent_a.size()) throw ContractViolation("cut beyond vector end");
  SelectionVector first = parent_a;
  SelectionVector second = parent_b;
  for (std::size_t j = cut; j < parent_a.size(); ++j) {
    first.set(j, parent_b.test(j));
    second.set(j, parent_a.test(j));
  }
  return {std::move(first), std::move(second)};
}

std::pair<SelectionVector, SelectionVector> crossover_wsdt(
    const SelectionVector& parent_a, const SelectionVector& parent_b,
    const WsdtInstance& instance, Rng& rng) {
  const std::size_t cut =
      std::uniform_int_distribution<std::size_t>(0, parent_a.size())(rng);
  auto [first, second] = one_point_crossover(parent_a, parent_b, cut);
  return {repair_wsdt(first, instance), repair_wsdt(second, instance)};
}

SelectionVector flip_bits(const SelectionVector& individual, double rate,
                          Rng& rng) {
  SelectionVector out = individual;
  if (rate <= 0.0) return out;
  std::bernoulli_distribution flip(std::min(rate, 1.0));
  for (std::size_t j = 0; j < out.size(); ++j) {
    if (flip(rng)) out.flip(j);
  }
  return out;
}

SelectionVector mutate_wsdt(const SelectionVector& individual,
                            const WsdtInstance& instance, Rng& rng,
                            double rate) {
  return repair_wsdt(flip_bits(individual, rate, rng), instance);
}

SelectionVector repair_wsdt(const SelectionVector& individual,
                            const WsdtInstance& instance) {
  SelectionVector s = individual;
  std::vector<int> count = coverage_counts(instance, s);
  const std::size_t m = instance.num_workers();

  while (true) {
    int best_gain = 0;
    std::size_t best = m;
    for (std::size_t j = 0; j < m; ++j) {
      if (s.test(j)) continue;
      int gain = 0;
      for (std::size_t i : instance.tasks_of(j)) {
        gain += count[i] < instance.required(i) ? 1 : 0;
      }
      if (gain > best_gain) {
        best_gain = gain;
        best = j;
      }
    }
    if (best == m) break;
    s.set(best, true);
    for (std::size_t i : instance.tasks_of(best)) ++count[i];
  }

  for (std::size_t j = m; j-- > 0;) {
    if (!s.test(j)) continue;
    bool redundant = true;
    for (std::size_t i : instance.tasks_of(j)) {
      // Dropping j must not open a shortfall that was not already there.
      if (count[i] <= instance.required(i)) {
        redundant = false;
        break;
      }
    }
    if (!redundant) continue;
    s.set(j, false);
    for (std::size_t i : instance.tasks_of(j)) --count[i];
  }
  return s;
}

// --- Generational engine -----------------------------------------------------

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Assignment matrix with cached per-worker route lengths so that operators
// only re-route the rows they touch.
struct WstsIndividual {
  AssignmentMatrix matrix;
  std::vector<double> row_cost;
  double total = 0.0;
};

class WstsOps {
 public:
  using Solution = AssignmentMatrix;
  using Individual = WstsIndividual;

  WstsOps(const WstsInstance& instance, const EvolveParams& params)
      : instance_(instance), params_(params) {}

  Individual make(AssignmentMatrix matrix) const {
    Individual ind{std::move(matrix), {}, 0.0};
    ind.row_cost.resize(instance_.num_workers());
    for (std::size_t j = 0; j < instance_.num_workers(); ++j) {
      ind.row_cost[j] = worker_route_distance(instance_, ind.matrix, j);
      ind.total += ind.row_cost[j];
    }
    return ind;
  }

  double objective(const Individual& ind) const { return ind.total; }
  const Solution& solution(const Individual& ind) const { return ind.matrix; }

  std::pair<Individual, Individual> crossover(const Individual& a,
                                              const Individual& b,
                                              Rng& rng) const {
    WstsOffspring kids = crossover_wsts(a.matrix, b.matrix, instance_.q(), rng,
                                        params_.crossover_retry_limit);
    Individual first{std::move(kids.first), a.row_cost, 0.0};
    Individual second{std::move(kids.second), b.row_cost, 0.0};
    if (kids.column) {
      const std::size_t c = *kids.column;
      for (std::size_t j = 0; j < instance_.num_workers(); ++j) {
        if (a.matrix.at(j, c) == b.matrix.at(j, c)) continue;
        first.row_cost[j] = worker_route_distance(instance_, first.matrix, j);
        second.row_cost[j] = worker_route_distance(instance_, second.matrix, j);
      }
    }
    retotal(first);
    retotal(second);
    return {std::move(first), std::move(second)};
  }

  void mutate(Individual& ind, Rng& rng) const {
    if (auto move = mutate_wsts_in_place(ind.matrix, instance_.q(), rng)) {
      ind.row_cost[move->from] =
          worker_route_distance(instance_, ind.matrix, move->from);
      ind.row_cost[move->to] =
          worker_route_distance(instance_, ind.matrix, move->to);
      retotal(ind);
    }
  }

  static void retotal(Individual& ind) {
    // Summed in row order so the total never depends on update history.
    ind.total = std::accumulate(ind.row_cost.begin(), ind.row_cost.end(), 0.0);
  }

 private:
  const WstsInstance& instance_;
  const EvolveParams& params_;
};

struct WsdtIndividual {
  SelectionVector bits;
  int count = 0;
};

class WsdtOps {
 public:
  using Solution = SelectionVector;
  using Individual = WsdtIndividual;

  WsdtOps(const WsdtInstance& instance, const EvolveParams& params)
      : instance_(instance), params_(params) {
    for (std::size_t j = 0; j < instance.num_workers(); ++j) {
      if (!instance.tasks_of(j).empty()) useful_.push_back(j);
    }
  }

  Individual make(SelectionVector bits) const {
    const int count = bits.count();
    return Individual{std::move(bits), count};
  }

  double objective(const Individual& ind) const { return ind.count; }
  const Solution& solution(const Individual& ind) const { return ind.bits; }

  std::pair<Individual, Individual> crossover(const Individual& a,
                                              const Individual& b,
                                              Rng& rng) const {
    auto [first, second] = crossover_wsdt(a.bits, b.bits, instance_, rng);
    return {make(std::move(first)), make(std::move(second))};
  }

  // Flips only bits that repair cannot immediately undo: on average two
  // selected workers are cleared (at least one) and one worker eligible for
  // some task is added, then repair refills and prunes.
  void mutate(Individual& ind, Rng& rng) const {
    SelectionVector bits = ind.bits;
    const std::vector<std::size_t> selected = bits.selected();
    if (!selected.empty()) {
      std::bernoulli_distribution clear(
          std::min(1.0, 2.0 / static_cast<double>(selected.size())));
      bool cleared = false;
      for (std::size_t j : selected) {
        if (clear(rng)) {
          bits.set(j, false);
          cleared = true;
        }
      }
      if (!cleared) {
        bits.set(selected[std::uniform_int_distribution<std::size_t>(
                     0, selected.size() - 1)(rng)],
                 false);
      }
    }
    if (!useful_.empty()) {
      std::bernoulli_distribution add(
          std::min(1.0, 1.0 / static_cast<double>(useful_.size())));
      for (std::size_t j : useful_) {
        if (!ind.bits.test(j) && add(rng)) bits.set(j, true);
      }
    }
    ind = make(repair_wsdt(bits, instance_));
  }

 private:
  const WsdtInstance& instance_;
  const EvolveParams& params_;
  std::vector<std::size_t> useful_;
};

template <typename Ops>
std::size_t best_index(const Ops& ops,
                       const std::vector<typename Ops::Individual>& pop) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < pop.size(); ++k) {
    if (ops.objective(pop[k]) < ops.objective(pop[best])) best = k;
  }
  return best;
}

template <typename Ops>
void notify(const Ops& ops, const GenerationObserver<typename Ops::Solution>& observer,
            int generation,
            const std::vector<typename Ops::Individual>& pop) {
  if (!observer) return;
  std::vector<typename Ops::Solution> view;
  view.reserve(pop.size());
  for (const auto& ind : pop) view.push_back(ops.solution(ind));
  observer(generation, view);
}

template <typename Ops>
EvolveResult<typename Ops::Solution> evolve(
    const Ops& ops, std::vector<typename Ops::Individual> pop,
    const EvolveParams& params, Rng& rng,
    const GenerationObserver<typename Ops::Solution>& observer) {
  using Individual = typename Ops::Individual;
  const auto size = static_cast<std::size_t>(params.population_size);

  notify(ops, observer, -1, pop);
  Individual incumbent = pop[best_index(ops, pop)];
  EvolveStats stats;
  std::bernoulli_distribution do_cross(params.crossover_rate);
  std::bernoulli_distribution do_mutate(params.mutation_rate);

  std::vector<double> objectives(size);
  for (int gen = 0; gen < params.generations; ++gen) {
    const auto start = Clock::now();
    for (std::size_t k = 0; k < size; ++k) objectives[k] = ops.objective(pop[k]);
    const std::vector<double> uf = unfitness(objectives);
    const std::size_t elite = best_index(ops, pop);
    if (ops.objective(pop[elite]) < ops.objective(incumbent)) {
      incumbent = pop[elite];
    }

    // roulette_eliminate exempts the lowest-unfitness individual, which is
    // the lowest-objective one, i.e. `elite`.
    std::vector<std::size_t> survivors = roulette_eliminate(uf, rng);
    std::vector<Individual> next;
    next.reserve(size);
    next.push_back(std::move(pop[elite]));
    for (std::size_t k : survivors) {
      if (k != elite) next.push_back(std::move(pop[k]));
    }
    const std::size_t parents = next.size();
    std::uniform_int_distribution<std::size_t> pick(0, parents - 1);
    while (next.size() < size) {
      const std::size_t i = pick(rng);
      std::size_t k = pick(rng);
      if (parents > 1) {
        while (k == i) k = pick(rng);
      }
      if (do_cross(rng)) {
        auto [first, second] = ops.crossover(next[i], next[k], rng);
        next.push_back(std::move(first));
        if (next.size() < size) next.push_back(std::move(second));
      } else {
        next.push_back(next[i]);
        if (next.size() < size) next.push_back(next[k]);
      }
    }
    for (std::size_t k = 1; k < size; ++k) {
      if (do_mutate(rng)) ops.mutate(next[k], rng);
    }
    pop = std::move(next);

    const std::size_t best = best_index(ops, pop);
    if (ops.objective(pop[best]) < ops.objective(incumbent)) {
      incumbent = pop[best];
    }
    stats.best_objective_per_generation.push_back(ops.objective(incumbent));
    stats.runtime_per_generation.push_back(seconds_since(start));
    ++stats.generations_run;
    notify(ops, observer, gen, pop);
  }

  return EvolveResult<typename Ops::Solution>{ops.solution(incumbent),
                                              ops.objective(incumbent),
                                              std::move(stats)};
}

std::string shortfall_text(const std::vector<Shortfall>& shortfall) {
  std::string text;
  for (const Shortfall& s : shortfall) {
    if (!text.empty()) text += ", ";
    text += s.task_id + " short " + std::to_string(s.missing);
  }
  return text;
}

AssignmentMatrix greedy_seed(const WstsInstance& instance) {
  WstsGreedyOutcome seed = nearest_first(instance);
  if (!seed.complete()) {
    throw InfeasibleError("nearest-first seed leaves tasks short: " +
                          shortfall_text(seed.unassigned));
  }
  return std::move(seed.solution);
}

std::vector<WstsIndividual> seeded_population(const WstsOps& ops,
                                              const AssignmentMatrix& seed,
                                              const WstsInstance& instance,
                                              const EvolveParams& params,
                                              Rng& rng) {
  std::vector<WstsIndividual> pop;
  pop.reserve(static_cast<std::size_t>(params.population_size));
  pop.push_back(ops.make(seed));
  for (int k = 1; k < params.population_size; ++k) {
    AssignmentMatrix a = seed;
    for (int p = 0; p < params.init_perturbations; ++p) {
      mutate_wsts_in_place(a, instance.q(), rng);
    }
    pop.push_back(ops.make(std::move(a)));
  }
  return pop;
}

void require_coverable(const WsdtInstance& instance) {
  SelectionVector all(instance.num_workers());
  for (std::size_t j = 0; j < all.size(); ++j) all.set(j, true);
  const FeasibilityReport report = validate_selection(instance, all);
  if (!report.feasible) {
    throw InfeasibleError("tasks cannot be covered even by every worker: " +
                          shortfall_text(report.violated_tasks));
  }
}

}  // namespace

EvolveResult<AssignmentMatrix> gga_i(
    const WstsInstance& instance, const EvolveParams& params,
    const GenerationObserver<AssignmentMatrix>& observer) {
  params.validate();
  const AssignmentMatrix seed = greedy_seed(instance);
  Rng rng(params.seed);
  WstsOps ops(instance, params);
  return evolve(ops, seeded_population(ops, seed, instance, params, rng),
                params, rng, observer);
}

EvolveResult<SelectionVector> gga_u(
    const WsdtInstance& instance, const EvolveParams& params,
    const GenerationObserver<SelectionVector>& observer) {
  params.validate();
  WsdtGreedyOutcome seed = most_first(instance);
  if (!seed.complete()) {
    throw InfeasibleError("most-first cannot cover every task: " +
                          shortfall_text(seed.unassigned));
  }
  Rng rng(params.seed);
  WsdtOps ops(instance, params);
  std::vector<WsdtIndividual> pop;
  pop.push_back(ops.make(seed.solution));
  std::uniform_int_distribution<std::size_t> pick(0,
                                                  instance.num_workers() - 1);
  for (int k = 1; k < params.population_size; ++k) {
    SelectionVector s = seed.solution;
    for (int p = 0; p < params.init_perturbations; ++p) s.flip(pick(rng));
    pop.push_back(ops.make(repair_wsdt(s, instance)));
  }
  return evolve(ops, std::move(pop), params, rng, observer);
}

EvolveResult<AssignmentMatrix> plain_ga_wsts(
    const WstsInstance& instance, const EvolveParams& params,
    const GenerationObserver<AssignmentMatrix>& observer) {
  params.validate();
  Rng rng(params.seed);
  WstsOps ops(instance, params);
  std::vector<WstsIndividual> pop;
  for (int k = 0; k < params.population_size; ++k) {
    auto a = random_feasible_assignment(instance, rng);
    if (!a) {
      throw InfeasibleError("no random feasible assignment could be built");
    }
    pop.push_back(ops.make(std::move(*a)));
  }
  return evolve(ops, std::move(pop), params, rng, observer);
}

EvolveResult<SelectionVector> plain_ga_wsdt(
    const WsdtInstance& instance, const EvolveParams& params,
    const GenerationObserver<SelectionVector>& observer) {
  params.validate();
  require_coverable(instance);
  Rng rng(params.seed);
  WsdtOps ops(instance, params);
  std::vector<WsdtIndividual> pop;
  std::bernoulli_distribution coin(0.5);
  for (int k = 0; k < params.population_size; ++k) {
    SelectionVector s(instance.num_workers());
    for (std::size_t j = 0; j < s.size(); ++j) s.set(j, coin(rng));
    pop.push_back(ops.make(repair_wsdt(s, instance)));
  }
  return evolve(ops, std::move(pop), params, rng, observer);
}

EvolveResult<AssignmentMatrix> gypso(
    const WstsInstance& instance, const EvolveParams& params,
    const GenerationObserver<AssignmentMatrix>& observer) {
  params.validate();
  const AssignmentMatrix seed = greedy_seed(instance);
  Rng rng(params.seed);
  WstsOps ops(instance, params);
  std::vector<WstsIndividual> particles =
      seeded_population(ops, seed, instance, params, rng);
  std::vector<WstsIndividual> personal = particles;
  std::size_t global = best_index(ops, personal);
  WstsIndividual global_best = personal[global];

  const std::size_t n = instance.num_tasks();
  const std::size_t m = instance.num_workers();
  const double personal_rate = params.pso_personal_rate;
  const double global_rate = params.pso_global_rate;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  EvolveStats stats;
  notify(ops, observer, -1, particles);

  std::vector<std::size_t> adopted;
  for (int gen = 0; gen < params.generations; ++gen) {
    const auto start = Clock::now();
    for (std::size_t k = 0; k < particles.size(); ++k) {
      const AssignmentMatrix original = particles[k].matrix;
      AssignmentMatrix moved = original;
      adopted.clear();
      for (std::size_t c = 0; c < n; ++c) {
        const double u = unit(rng);
        const AssignmentMatrix* source = nullptr;
        if (u < personal_rate) {
          source = &personal[k].matrix;
        } else if (u < personal_rate + global_rate) {
          source = &global_best.matrix;
        }
        if (!source) continue;
        bool differs = false;
        for (std::size_t j = 0; j < m; ++j) {
          if (moved.at(j, c) != source->at(j, c)) {
            moved.set(j, c, source->at(j, c));
            differs = true;
          }
        }
        if (differs) adopted.push_back(c);
      }

      auto overloaded = [&](std::size_t j) {
        return moved.row_sum(j) > instance.q();
      };
      bool feasible = true;
      for (std::size_t j = 0; j < m && feasible; ++j) feasible = !overloaded(j);
      while (!feasible) {
        std::shuffle(adopted.begin(), adopted.end(), rng);
        std::vector<std::size_t> kept;
        for (std::size_t c : adopted) {
          bool revert = false;
          for (std::size_t j = 0; j < m && !revert; ++j) {
            revert = overloaded(j) && moved.at(j, c) && !original.at(j, c);
          }
          if (!revert) {
            kept.push_back(c);
            continue;
          }
          for (std::size_t j = 0; j < m; ++j) moved.set(j, c, original.at(j, c));
        }
        adopted = std::move(kept);
        feasible = true;
        for (std::size_t j = 0; j < m && feasible; ++j) {
          feasible = !overloaded(j);
        }
      }

      if (!(moved == original)) particles[k] = ops.make(std::move(moved));
      if (particles[k].total < personal[k].total) personal[k] = particles[k];
    }
    global = best_index(ops, personal);
    if (personal[global].total < global_best.total) {
      global_best = personal[global];
    }
    stats.best_objective_per_generation.push_back(global_best.total);
    stats.runtime_per_generation.push_back(seconds_since(start));
    ++stats.generations_run;
    notify(ops, observer, gen, particles);
  }

  return EvolveResult<AssignmentMatrix>{global_best.matrix, global_best.total,
                                        std::move(stats)};
}

}  // namespace crowdsel
