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

#include "crowdsel/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace crowdsel {
namespace {

double tolerance(double value) { return 1e-9 * (1.0 + std::abs(value)); }

// Next integer with the same popcount (Gosper's hack).
std::uint64_t next_same_popcount(std::uint64_t x) {
  const std::uint64_t c = x & (~x + 1);
  const std::uint64_t r = x + c;
  return (((r ^ x) >> 2) / c) | r;
}

class WstsSearch {
 public:
  WstsSearch(const WstsInstance& instance, const OracleBudget& budget)
      : instance_(instance),
        budget_(budget),
        n_(instance.num_tasks()),
        m_(instance.num_workers()),
        current_(m_, n_),
        best_(m_, n_),
        row_cost_(m_, 0.0),
        leg_(n_ * m_) {
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < m_; ++j) {
        leg_[i * m_ + j] =
            manhattan_distance(instance.venue(i), instance.position(j));
      }
    }
  }

  OracleResult<AssignmentMatrix> run() {
    descend(0, 0.0);
    if (!found_) {
      throw InfeasibleError("no feasible assignment exists");
    }
    return {best_, best_cost_, states_};
  }

 private:
  // Row j of the matrix is bit (m - 1 - j), so numeric order on masks is
  // column-major lexicographic order on the column.
  std::size_t row_of_bit(int bit) const {
    return m_ - 1 - static_cast<std::size_t>(bit);
  }

  // Any completion pays at least, for a single remaining task r, the sum of
  // its p_r cheapest (leg - current route)^+ over workers with spare room:
  // a worker's final route is at least every one of its legs.
  double lower_bound(std::size_t from_task, double cost) const {
    double extra = 0.0;
    std::vector<double> gains;
    int need_total = 0;
    int spare_total = 0;
    for (std::size_t j = 0; j < m_; ++j) {
      spare_total += std::max(0, instance_.q() - current_.row_sum(j));
    }
    for (std::size_t r = from_task; r < n_; ++r) {
      gains.clear();
      for (std::size_t j = 0; j < m_; ++j) {
        if (current_.row_sum(j) >= instance_.q()) continue;
        gains.push_back(std::max(0.0, leg_[r * m_ + j] - row_cost_[j]));
      }
      const auto need = static_cast<std::size_t>(instance_.required(r));
      need_total += instance_.required(r);
      if (gains.size() < need) return std::numeric_limits<double>::infinity();
      std::partial_sort(gains.begin(), gains.begin() + static_cast<long>(need),
                        gains.end());
      double sum = 0.0;
      for (std::size_t k = 0; k < need; ++k) sum += gains[k];
      extra = std::max(extra, sum);
    }
    if (need_total > spare_total) return std::numeric_limits<double>::infinity();
    return cost + extra;
  }

  void descend(std::size_t task, double cost) {
    if (++states_ > budget_.max_states) {
      throw BudgetExceeded("exact search exceeded " +
                           std::to_string(budget_.max_states) + " states");
    }
    if (task == n_) {
      if (!found_ || cost < best_cost_ - tolerance(best_cost_)) {
        found_ = true;
        best_cost_ = cost;
        best_ = current_;
      }
      return;
    }
    const double bound = lower_bound(task, cost);
    if (bound == std::numeric_limits<double>::infinity()) return;
    if (found_ && bound >= best_cost_ - tolerance(best_cost_)) return;

    std::uint64_t admissible = 0;
    for (std::size_t j = 0; j < m_; ++j) {
      if (current_.row_sum(j) < instance_.q()) {
        admissible |= std::uint64_t{1} << (m_ - 1 - j);
      }
    }
    const int need = instance_.required(task);
    if (std::popcount(admissible) < need) return;

    const std::uint64_t limit =
        m_ == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << m_) - 1;
    std::uint64_t mask = (std::uint64_t{1} << need) - 1;
    std::vector<std::size_t> rows;
    std::vector<double> saved;
    while (true) {
      if ((mask & ~admissible) == 0) {
        rows.clear();
        for (std::uint64_t bits = mask; bits != 0; bits &= bits - 1) {
          rows.push_back(row_of_bit(std::countr_zero(bits)));
        }
        saved.clear();
        double next_cost = cost;
        for (std::size_t j : rows) {
          current_.set(j, task, true);
          saved.push_back(row_cost_[j]);
          const double updated = worker_route_distance(instance_, current_, j);
          next_cost += updated - row_cost_[j];
          row_cost_[j] = updated;
        }
        descend(task + 1, next_cost);
        for (std::size_t k = 0; k < rows.size(); ++k) {
          current_.set(rows[k], task, false);
          row_cost_[rows[k]] = saved[k];
        }
      }
      if (mask == limit || (mask >> (m_ - static_cast<std::size_t>(need))) ==
                               (std::uint64_t{1} << need) - 1) {
        break;
      }
      const std::uint64_t next = next_same_popcount(mask);
      if (next > limit) break;
      mask = next;
    }
  }

  const WstsInstance& instance_;
  const OracleBudget& budget_;
  std::size_t n_;
  std::size_t m_;
  AssignmentMatrix current_;
  AssignmentMatrix best_;
  std::vector<double> row_cost_;
  std::vector<double> leg_;
  double best_cost_ = 0.0;
  bool found_ = false;
  std::uint64_t states_ = 0;
};

}  // namespace

OracleResult<AssignmentMatrix> enumerate_wsts(const WstsInstance& instance,
                                              const OracleBudget& budget) {
  if (instance.num_workers() > 64) {
    throw ContractViolation("exact search supports at most 64 workers");
  }
  const auto m = static_cast<int>(instance.num_workers());
  if (instance.total_required() > m * instance.q()) {
    throw InfeasibleError("total demand exceeds worker capacity");
  }
  for (std::size_t i = 0; i < instance.num_tasks(); ++i) {
    if (instance.required(i) > m) {
      throw InfeasibleError("task " + instance.tasks()[i].id +
                            " needs more workers than exist");
    }
  }
  return WstsSearch(instance, budget).run();
}

OracleResult<SelectionVector> enumerate_wsdt(const WsdtInstance& instance,
                                             const OracleBudget& budget) {
  const std::size_t m = instance.num_workers();
  const std::size_t n = instance.num_tasks();
  SelectionVector everyone(m);
  for (std::size_t j = 0; j < m; ++j) everyone.set(j, true);
  if (!validate_selection(instance, everyone).feasible) {
    throw InfeasibleError("tasks cannot be covered even by every worker");
  }

  int floor_size = 0;
  for (std::size_t i = 0; i < n; ++i) {
    floor_size = std::max(floor_size, instance.required(i));
  }

  std::uint64_t states = 0;
  std::vector<std::size_t> combo;
  std::vector<int> counts(n);
  for (std::size_t k = static_cast<std::size_t>(floor_size); k <= m; ++k) {
    combo.resize(k);
    for (std::size_t t = 0; t < k; ++t) combo[t] = t;
    while (true) {
      if (++states > budget.max_states) {
        throw BudgetExceeded("exact search exceeded " +
                             std::to_string(budget.max_states) + " states");
      }
      std::fill(counts.begin(), counts.end(), 0);
      for (std::size_t j : combo) {
        for (std::size_t i : instance.tasks_of(j)) ++counts[i];
      }
      bool covered = true;
      for (std::size_t i = 0; i < n && covered; ++i) {
        covered = counts[i] >= instance.required(i);
      }
      if (covered) {
        SelectionVector s(m);
        for (std::size_t j : combo) s.set(j, true);
        return {s, static_cast<double>(k), states};
      }
      // Advance to the next k-combination in lexicographic order.
      std::size_t t = k;
      while (t > 0 && combo[t - 1] == m - k + t - 1) --t;
      if (t == 0) break;
      ++combo[t - 1];
      for (std::size_t u = t; u < k; ++u) combo[u] = combo[u - 1] + 1;
    }
  }
  throw InfeasibleError("no covering selection found");
}

SubmodularityReport check_submodularity(const WsdtInstance& instance,
                                        int trials, std::uint64_t seed) {
  const std::size_t m = instance.num_workers();
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.5);
  SubmodularityReport report;
  report.trials = trials;

  auto size_of = [&](const SelectionVector& s) {
    return static_cast<long>(coverage_utility(instance, s).size());
  };

  for (int t = 0; t < trials; ++t) {
    SelectionVector larger(m);
    SelectionVector smaller(m);
    std::vector<std::size_t> outside;
    for (std::size_t j = 0; j < m; ++j) {
      if (coin(rng)) {
        larger.set(j, true);
        if (coin(rng)) smaller.set(j, true);
      } else {
        outside.push_back(j);
      }
    }
    if (outside.empty()) {
      ++report.skipped;
      continue;
    }
    const std::size_t w = outside[std::uniform_int_distribution<std::size_t>(
        0, outside.size() - 1)(rng)];

    const auto f_small = coverage_utility(instance, smaller);
    const auto f_large = coverage_utility(instance, larger);
    const bool monotone =
        std::includes(f_large.begin(), f_large.end(), f_small.begin(), f_small.end());

    SelectionVector small_plus = smaller;
    small_plus.set(w, true);
    SelectionVector large_plus = larger;
    large_plus.set(w, true);
    const long gain_small = size_of(small_plus) - static_cast<long>(f_small.size());
    const long gain_large = size_of(large_plus) - static_cast<long>(f_large.size());

    if (!monotone || gain_large > gain_small) {
      report.counterexamples.push_back({smaller.selected(), larger.selected(), w,
                                        monotone ? "diminishing-returns"
                                                 : "monotone"});
    }
  }
  return report;
}

}  // namespace crowdsel
