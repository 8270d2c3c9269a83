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

// JSON documents: problem instances, solver parameters, scenario configs and
// solutions. Field names follow docs/schemas.md.

#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "crowdsel/core.hpp"
#include "crowdsel/evolve.hpp"
#include "crowdsel/mobility.hpp"
#include "crowdsel/scenario.hpp"

namespace crowdsel {

using Json = nlohmann::json;

// A document does not match its schema.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Json read_json_file(const std::string& path);
// Pretty-printed, trailing newline. Throws std::runtime_error naming the
// path when it cannot be written.
void write_json_file(const std::string& path, const Json& doc);

// The "tasks" array of any instance document, or of {"tasks": [...]}.
std::vector<Task> read_tasks(const Json& doc);
Json tasks_document(std::span<const Task> tasks);

Json to_json(const WstsInstance& instance);
WstsInstance wsts_from_json(const Json& doc);

Json to_json(const MobilityProfile& profile);
MobilityProfile profile_from_json(const Json& doc);

struct LoadedWsdt {
  WsdtInstance instance;
  // Empty when the document carried only an eligibility matrix.
  std::vector<MobilityProfile> profiles;
};

// Writes profiles when given (one per worker, in order) and always the
// eligibility matrix.
Json to_json(const WsdtInstance& instance,
             std::span<const MobilityProfile> profiles = {});
// Eligibility is rebuilt from profiles when present; a stored matrix must
// then agree with it.
LoadedWsdt wsdt_from_json(const Json& doc);

// "wsts" or "wsdt", from the "problem" field or the document's shape.
std::string problem_of(const Json& doc);

Json to_json(const EvolveParams& params);
// Missing fields keep their defaults; unknown fields are rejected.
EvolveParams params_from_json(const Json& doc, EvolveParams base = {});

Json to_json(const ScenarioConfig& config);
ScenarioConfig scenario_from_json(const Json& doc);

Json to_json(const EvolveStats& stats);

}  // namespace crowdsel
