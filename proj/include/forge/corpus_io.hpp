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

#ifndef FORGE__CORPUS_IO_HPP_
#define FORGE__CORPUS_IO_HPP_

#include "forge/pipeline.hpp"

#include <json.hpp>

#include <filesystem>
#include <vector>

namespace forge
{

nlohmann::json box_to_json(const OrientedBox & box);
OrientedBox box_from_json(const nlohmann::json & j);

/// Generation metadata for one corpus entry (scenario id, request, pattern, frames).
nlohmann::json pattern_to_json(const GeneratedScenario & g);
nlohmann::json manifest_to_json(const std::vector<CellManifest> & cells);

/// Writes scenarios.jsonl, patterns.jsonl (same order) and manifest.json into dir.
void save_corpus(const Corpus & corpus, const std::filesystem::path & dir);
void save_generated(
  const std::vector<GeneratedScenario> & items, const std::filesystem::path & dir);

/// Reads scenarios.jsonl and patterns.jsonl back. Throws ScenarioError on mismatches.
std::vector<GeneratedScenario> load_corpus(const std::filesystem::path & dir);

}  // namespace forge

#endif  // FORGE__CORPUS_IO_HPP_
