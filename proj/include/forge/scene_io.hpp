// Copyright 2026 The Forge Authors
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

#ifndef FORGE__SCENE_IO_HPP_
#define FORGE__SCENE_IO_HPP_

#include "forge/scene.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace forge
{

nlohmann::json scenario_to_json(const Scenario & scenario);
/// Parses and validates one record. Throws ScenarioError.
Scenario scenario_from_json(const nlohmann::json & j);

/// One JSON object per line. Parse errors carry the 1-based line number.
std::vector<Scenario> load_scenarios(const std::filesystem::path & path);
void save_scenarios(const std::vector<Scenario> & scenarios, const std::filesystem::path & path);

/// Compact single-line serialization used for the JSONL files.
std::string dump_line(const nlohmann::json & j);

}  // namespace forge

#endif  // FORGE__SCENE_IO_HPP_
