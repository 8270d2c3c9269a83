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

// Evolutionary solvers.
//
//   gga_i      greedy-seeded GA over assignment matrices (time-sensitive)
//   gga_u      greedy-seeded GA over selection vectors (delay-tolerant)
//   plain_ga_* the same loops started from random feasible individuals
//   gypso      greedy-seeded discrete particle swarm, no genetic operators
//
// Every generation evaluates unfitness (objective share of the population
// total), removes half the population by roulette over unfitness with the
// best individual exempt, refills by crossover of random surviving pairs and
// mutates non-elite individuals. All randomness flows from EvolveParams::seed
// through a single std::mt19937_64, so runs are reproducible bit for bit.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "crowdsel/core.hpp"

namespace crowdsel {

using Rng = std::mt19937_64;

struct EvolveParams {
  int population_size = 50;
  int generations = 500;
  double crossover_rate = 0.8;
  double mutation_rate = 0.1;
  int crossover_retry_limit = 20;
  int init_perturbations = 3;
  std::uint64_t seed = 0;
  // Column adoption probabilities for gypso.
  double pso_personal_rate = 0.3;
  double pso_global_rate = 0.3;

  void validate() const;
};

struct EvolveStats {
  // Incumbent objective after each generation; non-increasing.
  std::vector<double> best_objective_per_generation;
  // Wall-clock seconds per generation.
  std::vector<double> runtime_per_generation;
  int generations_run = 0;

  double mean_runtime_per_generation() const;
};

template <typename Solution>
struct EvolveResult {
  Solution best;
  double objective = 0.0;
  EvolveStats stats;
};

// Called once with the initial population (generation -1) and after every
// generation with the population that enters the next one.
template <typename Solution>
using GenerationObserver =
    std::function<void(int generation, std::span<const Solution> population)>;

// --- Selection -------------------------------------------------------------

// objective / sum(objectives); uniform when every objective is zero.
std::vector<double> unfitness(std::span<const double> objectives);
std::vector<double> unfitness_wsts(std::span<const AssignmentMatrix> population,
                                   const WstsInstance& instance);
std::vector<double> unfitness_wsdt(std::span<const SelectionVector> population);

// Removes individuals, each draw proportional to unfitness among those still
// present, until floor(size / 2) (at least one) remain. The individual with
// the lowest unfitness (lowest index on ties) is never removed, nor is any
// individual with zero unfitness. Returns surviving indices, ascending.
std::vector<std::size_t> roulette_eliminate(std::span<const double> unfitness,
                                            Rng& rng);

template <typename T>
std::vector<T> roulette_eliminate(const std::vector<T>& population,
                                  std::span<const double> unfitness, Rng& rng) {
  std::vector<T> survivors;
  for (std::size_t k : roulette_eliminate(unfitness, rng)) {
    survivors.push_back(population[k]);
  }
  return survivors;
}

// --- Time-sensitive operators ----------------------------------------------

struct WstsOffspring {
  AssignmentMatrix first;
  AssignmentMatrix second;
  // Column that was exchanged; empty when every attempt broke a row cap and
  // the parents were copied.
  std::optional<std::size_t> column;
};

// Exchanges one uniformly drawn column between the parents. Column sums are
// untouched, so children stay task feasible; a draw that pushes any row of
// either child above q is redrawn, up to `retry_limit` draws in total.
WstsOffspring crossover_wsts(const AssignmentMatrix& parent_a,
                             const AssignmentMatrix& parent_b, int q, Rng& rng,
                             int retry_limit);

// Exchange of a specific column, if it keeps both children within q.
std::optional<WstsOffspring> exchange_column(const AssignmentMatrix& parent_a,
                                             const AssignmentMatrix& parent_b,
                                             std::size_t column, int q);

struct MutationMove {
  std::size_t task = 0;
  std::size_t from = 0;
  std::size_t to = 0;
};

// Moves a uniformly drawn '1' to a uniformly drawn '0' row of the same
// column whose row is below q. Leaves the matrix untouched and returns
// nothing when the drawn column has no admissible receiving row.
std::optional<MutationMove> mutate_wsts_in_place(AssignmentMatrix& individual,
                                                 int q, Rng& rng);
AssignmentMatrix mutate_wsts(const AssignmentMatrix& individual, int q,
                             Rng& rng);

// Random feasible matrix: each column, in order, samples p_i distinct rows
// with spare capacity. Empty if `attempts` constructions all dead-end.
std::optional<AssignmentMatrix> random_feasible_assignment(
    const WstsInstance& instance, Rng& rng, int attempts = 100);

// --- Delay-tolerant operators ----------------------------------------------

// Children swap suffixes starting at `cut` (0..size). No repair.
std::pair<SelectionVector, SelectionVector> one_point_crossover(
    const SelectionVector& parent_a, const SelectionVector& parent_b,
    std::size_t cut);

// Uniform cut in [0, size], then repair of both children.
std::pair<SelectionVector, SelectionVector> crossover_wsdt(
    const SelectionVector& parent_a, const SelectionVector& parent_b,
    const WsdtInstance& instance, Rng& rng);

// Flips each bit independently with probability `rate`. No repair.
SelectionVector flip_bits(const SelectionVector& individual, double rate,
                          Rng& rng);

// flip_bits followed by repair_wsdt.
SelectionVector mutate_wsdt(const SelectionVector& individual,
                            const WsdtInstance& instance, Rng& rng,
                            double rate);

// Greedy add while any task is short (worker covering the most short tasks,
// lowest index on ties), then drop selected workers in descending index
// order whenever coverage survives without them. The result is coverage
// feasible whenever selecting every worker is; otherwise it is the best
// effort and validate_selection reports what is missing.
SelectionVector repair_wsdt(const SelectionVector& individual,
                            const WsdtInstance& instance);

// --- Solvers ----------------------------------------------------------------

// Throws InfeasibleError if nearest_first leaves any task short.
EvolveResult<AssignmentMatrix> gga_i(
    const WstsInstance& instance, const EvolveParams& params,
    const GenerationObserver<AssignmentMatrix>& observer = {});

// Throws InfeasibleError if most_first cannot cover every task.
EvolveResult<SelectionVector> gga_u(
    const WsdtInstance& instance, const EvolveParams& params,
    const GenerationObserver<SelectionVector>& observer = {});

EvolveResult<AssignmentMatrix> plain_ga_wsts(
    const WstsInstance& instance, const EvolveParams& params,
    const GenerationObserver<AssignmentMatrix>& observer = {});

EvolveResult<SelectionVector> plain_ga_wsdt(
    const WsdtInstance& instance, const EvolveParams& params,
    const GenerationObserver<SelectionVector>& observer = {});

// Particles start like gga_i's population. Each update a particle takes
// every column from its personal best with probability pso_personal_rate,
// from the global best with probability pso_global_rate, and otherwise keeps
// it; adoptions that overload a row are reverted in random column order.
EvolveResult<AssignmentMatrix> gypso(
    const WstsInstance& instance, const EvolveParams& params,
    const GenerationObserver<AssignmentMatrix>& observer = {});

}  // namespace crowdsel
