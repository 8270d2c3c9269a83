# Copyright 2026 The Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Python front end for the crowdsel solvers.

Instances, solutions and reports are plain dicts with the same layout as the
command-line tool's JSON files.
"""

from __future__ import annotations

import json
from typing import Any, Iterable, Mapping

from . import _crowdsel
from ._crowdsel import (
    WSDT_ALGORITHMS,
    WSTS_ALGORITHMS,
    BudgetExceeded,
    InfeasibleError,
    SchemaError,
    manhattan_distance,
    route_distance,
)

__all__ = [
    "WSDT_ALGORITHMS",
    "WSTS_ALGORITHMS",
    "BudgetExceeded",
    "InfeasibleError",
    "SchemaError",
    "generate",
    "manhattan_distance",
    "route_distance",
    "run_experiment",
    "solve",
    "validate",
]


def generate(problem: str = "wsts", **config: Any) -> dict:
    """Builds a synthetic instance; keyword arguments are scenario fields."""
    return json.loads(_crowdsel.generate(problem, json.dumps(config)))


def solve(
    instance: Mapping[str, Any],
    algo: str,
    params: Mapping[str, Any] | None = None,
    max_states: int | None = None,
) -> dict:
    args = [json.dumps(instance), algo, json.dumps(params) if params else ""]
    if max_states is not None:
        args.append(max_states)
    return json.loads(_crowdsel.solve(*args))


def validate(instance: Mapping[str, Any], solution: Mapping[str, Any]) -> dict:
    return json.loads(_crowdsel.validate(json.dumps(instance), json.dumps(solution)))


def run_experiment(config: Mapping[str, Any]) -> dict:
    return json.loads(_crowdsel.run_experiment(json.dumps(config)))


def algorithms(problem: str) -> Iterable[str]:
    return list(WSTS_ALGORITHMS if problem == "wsts" else WSDT_ALGORITHMS)
