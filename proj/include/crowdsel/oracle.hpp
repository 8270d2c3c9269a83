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

// Exact solvers for small instances, used as the enumeration baseline and
// as ground truth in tests. Deterministic, no RNG.

#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "crowdsel/core.hpp"

namespace crowdsel {

struct OracleBudget {
  std::uint64_t max_states = 100'000'000;
};

// The search gave up before proving optimality. Never a partial answer.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <typename Solution>
struct OracleResult {
  Solution solution;
  double objective = 0.0;
  std::uint64_t states = 0;
};

// Branch and bound over one worker subset per task, tasks in index order,
// subsets in increasing column-major order, so the first optimum found is
// the column-major lexicographically smallest optimal matrix. Throws
// InfeasibleError when no feasible matrix exists and BudgetExceeded when
// more than `budget.max_states` nodes are expanded. At most 64 workers.
OracleResult<AssignmentMatrix> enumerate_wsts(const WstsInstance& instance,
                                              const OracleBudget& budget = {});

// Iterative deepening over selection sizes; the first coverage-feasible
// subset (lexicographic within a size) is a minimum one.
OracleResult<SelectionVector> enumerate_wsdt(const WsdtInstance& instance,
                                             const OracleBudget& budget = {});

struct SubmodularityCounterexample {
  std::vector<std::size_t> smaller;
  std::vector<std::size_t> larger;
  std::size_t added = 0;
  std::string violated;  // "monotone" or "diminishing-returns"
};

struct SubmodularityReport {
  int trials = 0;
  // Trials where the larger set already held every worker and no w could be
  // drawn.
  int skipped = 0;
  std::vector<SubmodularityCounterexample> counterexamples;

  bool holds() const { return counterexamples.empty(); }
};

// Draws random S1 within S2 and w outside S2, then checks that the coverage
// utility is monotone (f(S1) within f(S2)) and has diminishing returns
// (gain of w on S2 at most its gain on S1).
SubmodularityReport check_submodularity(const WsdtInstance& instance,
                                        int trials, std::uint64_t seed);

}  // namespace crowdsel
