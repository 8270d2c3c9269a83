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

// Greedy baselines. Both are deterministic and report shortfall instead of
// throwing, so they can also act as feasibility probes for the evolutionary
// solvers they seed.

#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "crowdsel/core.hpp"

namespace crowdsel {

template <typename Solution>
struct GreedyOutcome {
  Solution solution;
  std::vector<Shortfall> unassigned;
  // Total distance (time-sensitive) or selected worker count (delay-tolerant).
  double objective = 0.0;

  bool complete() const { return unassigned.empty(); }
};

using WstsGreedyOutcome = GreedyOutcome<AssignmentMatrix>;
using WsdtGreedyOutcome = GreedyOutcome<SelectionVector>;

struct NearestFirstStep {
  std::size_t task = 0;
  std::size_t worker = 0;
  double distance = 0.0;
};

// Repeatedly assigns the admissible (task, worker) pair with the smallest
// Manhattan distance between the task venue and the worker's position. A
// pair is admissible while the task still needs workers, the worker holds
// fewer than q tasks and does not already hold this task. Ties go to the
// lowest task index, then the lowest worker index.
//
// Admissibility only ever shrinks, so one pass over the pairs sorted by
// (distance, task, worker) reproduces the step-by-step global minimum.
WstsGreedyOutcome nearest_first(const WstsInstance& instance,
                                std::vector<NearestFirstStep>* trace = nullptr);

// Repeatedly selects the unselected worker eligible for the most tasks that
// still have residual need (ties: lowest index) and decrements the need of
// each of them.
WsdtGreedyOutcome most_first(const WsdtInstance& instance);

}  // namespace crowdsel
