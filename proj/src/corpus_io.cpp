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

#include "forge/corpus_io.hpp"

#include "forge/scene_io.hpp"

#include <fstream>
#include <stdexcept>

namespace forge
{

using nlohmann::json;

json box_to_json(const OrientedBox & box)
{
  return {{"x", box.center.x}, {"y", box.center.y}, {"theta", box.center.theta},
          {"length", box.length}, {"width", box.width}};
}

OrientedBox box_from_json(const json & j)
{
  return OrientedBox(
    Pose2D(j.at("x").get<double>(), j.at("y").get<double>(), j.at("theta").get<double>()),
    j.at("length").get<double>(), j.at("width").get<double>());
}

json pattern_to_json(const GeneratedScenario & g)
{
  return {{"scenario_id", g.scenario.id},
          {"ctype", to_string(g.pattern.ctype)},
          {"tta_s", g.pattern.tta_s},
          {"seed", g.request.seed},
          {"t_hist", g.t_hist},
          {"collision_frame", g.collision_frame},
          {"attacker_id", g.pattern.attacker_id},
          {"ego_box", box_to_json(g.pattern.ego_box)},
          {"attacker_box", box_to_json(g.pattern.attacker_box)}};
}

json manifest_to_json(const std::vector<CellManifest> & cells)
{
  json arr = json::array();
  for (const auto & c : cells) {
    json failures = json::object();
    for (const auto & [reason, count] : c.failures) {
      failures[reason] = count;
    }
    arr.push_back({{"ctype", to_string(c.ctype)},
                   {"tta_bucket", tta_bucket_label(c.bucket)},
                   {"requested", c.requested},
                   {"attempts", c.attempts},
                   {"succeeded", c.succeeded},
                   {"failures", failures}});
  }
  return {{"cells", arr}};
}

void save_generated(const std::vector<GeneratedScenario> & items, const std::filesystem::path & dir)
{
  std::filesystem::create_directories(dir);
  std::ofstream scen(dir / "scenarios.jsonl");
  std::ofstream pat(dir / "patterns.jsonl");
  if (!scen || !pat) {
    throw std::runtime_error("cannot write corpus into " + dir.string());
  }
  for (const auto & g : items) {
    scen << dump_line(scenario_to_json(g.scenario)) << '\n';
    pat << dump_line(pattern_to_json(g)) << '\n';
  }
}

void save_corpus(const Corpus & corpus, const std::filesystem::path & dir)
{
  save_generated(corpus.items, dir);
  std::ofstream man(dir / "manifest.json");
  if (!man) {
    throw std::runtime_error("cannot write manifest into " + dir.string());
  }
  man << manifest_to_json(corpus.cells).dump(2) << '\n';
}

std::vector<GeneratedScenario> load_corpus(const std::filesystem::path & dir)
{
  auto scenes = load_scenarios(dir / "scenarios.jsonl");
  std::ifstream in(dir / "patterns.jsonl");
  if (!in) {
    throw std::runtime_error("cannot open " + (dir / "patterns.jsonl").string());
  }
  std::vector<GeneratedScenario> out;
  std::string line;
  std::size_t i = 0;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    if (i >= scenes.size()) {
      throw ScenarioError("patterns.jsonl has more entries than scenarios.jsonl");
    }
    GeneratedScenario g;
    try {
      const json j = json::parse(line);
      g.scenario = std::move(scenes[i]);
      if (j.at("scenario_id").get<std::string>() != g.scenario.id) {
        throw ScenarioError("pattern line " + std::to_string(line_no) + " refers to " +
                            j.at("scenario_id").get<std::string>() + " but scenario is " +
                            g.scenario.id);
      }
      const auto ctype = parse_collision_type(j.at("ctype").get<std::string>());
      if (!ctype) {
        throw ScenarioError("unknown ctype on pattern line " + std::to_string(line_no));
      }
      g.pattern.ctype = *ctype;
      g.pattern.tta_s = j.at("tta_s").get<double>();
      g.pattern.attacker_id = j.at("attacker_id").get<std::string>();
      g.pattern.ego_box = box_from_json(j.at("ego_box"));
      g.pattern.attacker_box = box_from_json(j.at("attacker_box"));
      g.request = {*ctype, g.pattern.tta_s, j.at("seed").get<std::uint64_t>()};
      g.t_hist = j.at("t_hist").get<int>();
      g.collision_frame = j.at("collision_frame").get<int>();
      if (!g.scenario.find_agent(g.pattern.attacker_id)) {
        throw ScenarioError("attacker " + g.pattern.attacker_id + " missing from " + g.scenario.id);
      }
    } catch (const json::exception & e) {
      throw ScenarioError(
        (dir / "patterns.jsonl").string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    out.push_back(std::move(g));
    ++i;
  }
  if (i != scenes.size()) {
    throw ScenarioError("scenarios.jsonl and patterns.jsonl differ in length");
  }
  return out;
}

}  // namespace forge
