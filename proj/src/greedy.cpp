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

#include "crowdsel/greedy.hpp"

#include <algorithm>
#include <tuple>

namespace crowdsel {

WstsGreedyOutcome nearest_first(const WstsInstance& instance,
                                std::vector<NearestFirstStep>* trace) {
  const std::size_t n = instance.num_tasks();
  const std::size_t m = instance.num_workers();

  std::vector<NearestFirstStep> pairs;
  pairs.reserve(n * m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      pairs.push_back(
          {i, j, manhattan_distance(instance.venue(i), instance.position(j))});
    }
  }
  std::sort(pairs.begin(), pairs.end(),
            [](const NearestFirstStep& a, const NearestFirstStep& b) {
              return std::tie(a.distance, a.task, a.worker) <
                     std::tie(b.distance, b.task, b.worker);
            });

  WstsGreedyOutcome out{AssignmentMatrix(m, n), {}, 0.0};
  AssignmentMatrix& a = out.solution;
  int outstanding = instance.total_required();
  for (const NearestFirstStep& pair : pairs) {
    if (outstanding == 0) break;
    if (a.col_sum(pair.task) >= instance.required(pair.task)) continue;
    if (a.row_sum(pair.worker) >= instance.q()) continue;
    if (a.at(pair.worker, pair.task)) continue;
    a.set(pair.worker, pair.task, true);
    --outstanding;
    if (trace) trace->push_back(pair);
  }

  for (std::size_t i = 0; i < n; ++i) {
    const int missing = instance.required(i) - a.col_sum(i);
    if (missing > 0) out.unassigned.push_back({instance.tasks()[i].id, missing});
  }
  out.objective = total_distance(instance, a);
  return out;
}

WsdtGreedyOutcome most_first(const WsdtInstance& instance) {
  const std::size_t n = instance.num_tasks();
  const std::size_t m = instance.num_workers();
  std::vector<int> need(n);
  for (std::size_t i = 0; i < n; ++i) need[i] = instance.required(i);

  WsdtGreedyOutcome out{SelectionVector(m), {}, 0.0};
  SelectionVector& s = out.solution;
  while (true) {
    int best_count = 0;
    std::size_t best = m;
    for (std::size_t j = 0; j < m; ++j) {
      if (s.test(j)) continue;
      int count = 0;
      for (std::size_t i : instance.tasks_of(j)) count += need[i] > 0 ? 1 : 0;
      if (count > best_count) {
        best_count = count;
        best = j;
      }
    }
    if (best == m) break;
    s.set(best, true);
    for (std::size_t i : instance.tasks_of(best)) {
      if (need[i] > 0) --need[i];
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (need[i] > 0) out.unassigned.push_back({instance.tasks()[i].id, need[i]});
  }
  out.objective = s.count();
  return out;
}

}  // namespace crowdsel
