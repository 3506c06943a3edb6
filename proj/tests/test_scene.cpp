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

#include "forge/scene.hpp"
#include "forge/scene_io.hpp"
#include "forge/synth.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace forge;

namespace
{

Scenario tiny()
{
  Scenario s;
  s.id = "tiny";
  LanePolyline lane;
  lane.id = "L0";
  for (int i = 0; i <= 20; ++i) lane.points.push_back({2.0 * i, 0.0});
  s.map.lanes.push_back(lane);
  AgentTrack ego;
  ego.id = "ego";
  for (int f = 0; f < 10; ++f) {
    ego.states.emplace_back(2.5 * f, 0.0, 0.0);
    ego.valid.push_back(true);
  }
  s.agents.push_back(ego);
  s.ego_id = "ego";
  s.update_duration();
  return s;
}

}  // namespace

TEST(Scene, TinyScenarioValidates)
{
  const Scenario s = tiny();
  EXPECT_NO_THROW(validate(s));
  EXPECT_EQ(s.num_frames(), 10);
  EXPECT_DOUBLE_EQ(s.duration_s, 4.5);
}

TEST(Scene, ValidationNamesTheProblem)
{
  Scenario s = tiny();
  s.map.lanes[0].points[3] = s.map.lanes[0].points[2];
  try {
    validate(s);
    FAIL() << "expected ScenarioError";
  } catch (const ScenarioError & e) {
    EXPECT_NE(std::string(e.what()).find("repeated"), std::string::npos);
  }
  Scenario t = tiny();
  t.ego_id = "nobody";
  EXPECT_THROW(validate(t), ScenarioError);
  Scenario u = tiny();
  u.agents[0].valid[4] = false;
  EXPECT_THROW(validate(u), ScenarioError);
}

TEST(Scene, VelocityIsBackwardDifference)
{
  const Scenario s = tiny();
  const Vec2 v = s.ego().velocity_at(3, s.rate_hz);
  EXPECT_NEAR(v.x, 5.0, 1e-12);
  EXPECT_NEAR(v.y, 0.0, 1e-12);
  EXPECT_THROW(ego_pose_at(s, 42), std::out_of_range);
}

TEST(SceneIo, JsonRoundTripIsLossless)
{
  const Scenario s = synth_scene(SceneKind::FourWay, 5);
  const Scenario back = scenario_from_json(scenario_to_json(s));
  EXPECT_EQ(dump_line(scenario_to_json(back)), dump_line(scenario_to_json(s)));
  EXPECT_EQ(back.agents.size(), s.agents.size());
}

TEST(SceneIo, LoadReportsLineNumber)
{
  const auto path = std::filesystem::temp_directory_path() / "forge_bad_scenes.jsonl";
  {
    std::ofstream out(path);
    out << dump_line(scenario_to_json(tiny())) << "\n";
    out << "{\"id\": 3}\n";
  }
  try {
    load_scenarios(path);
    FAIL() << "expected ScenarioError";
  } catch (const ScenarioError & e) {
    EXPECT_NE(std::string(e.what()).find("2"), std::string::npos) << e.what();
  }
  std::filesystem::remove(path);
}

TEST(Synth, DeterministicAndCollisionFree)
{
  for (auto kind : {SceneKind::Straight, SceneKind::TwoLane, SceneKind::FourWay}) {
    const auto a = synth_batch(kind, 8, 21);
    const auto b = synth_batch(kind, 8, 21);
    ASSERT_EQ(a.size(), 8u);
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_EQ(dump_line(scenario_to_json(a[i])), dump_line(scenario_to_json(b[i])));
      EXPECT_NO_THROW(validate(a[i]));
      EXPECT_FALSE(has_any_collision(a[i])) << a[i].id;
      EXPECT_NEAR(a[i].duration_s, 20.0, 1e-9);
    }
  }
}

TEST(Synth, KindNamesRoundTrip)
{
  for (auto kind : {SceneKind::Straight, SceneKind::TwoLane, SceneKind::FourWay}) {
    EXPECT_EQ(parse_scene_kind(to_string(kind)), kind);
  }
  EXPECT_FALSE(parse_scene_kind("roundabout").has_value());
}
