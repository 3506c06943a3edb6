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
#include "forge/pipeline.hpp"
#include "forge/scene_io.hpp"
#include "forge/synth.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <stdexcept>

using namespace forge;

TEST(Tta, GridAndBuckets)
{
  EXPECT_EQ(tta_frames(4.5), 9);
  EXPECT_EQ(tta_frames(9.0), 18);
  EXPECT_THROW(tta_frames(4.0), std::invalid_argument);
  EXPECT_THROW(tta_frames(5.25), std::invalid_argument);
  EXPECT_EQ(tta_bucket(4.5), 0);
  EXPECT_EQ(tta_bucket(6.0), 1);
  EXPECT_EQ(tta_bucket(9.0), 2);
  EXPECT_EQ(bucket_ttas(0).front(), 4.5);
  EXPECT_EQ(bucket_ttas(2).back(), 9.0);
}

TEST(Tta, GeneratedIdFormat)
{
  GenerationRequest r;
  r.ctype = CollisionType::LTAP;
  r.tta_s = 7.5;
  EXPECT_EQ(generated_id("scene-1", r), "scene-1:ltap:7.5");
}

TEST(Build, ReplayHitsTheRequest)
{
  const auto scenes = synth_batch(SceneKind::FourWay, 12, 3);
  int built = 0;
  for (const auto & s : scenes) {
    for (auto t : {CollisionType::JunctionCrossing, CollisionType::RearEnd}) {
      GenerationRequest req;
      req.ctype = t;
      req.tta_s = 6.0;
      const BuildResult r = build(s, req);
      if (const auto * g = std::get_if<GeneratedScenario>(&r)) {
        ++built;
        const ReplayImpact imp = replay_impact(g->scenario, g->pattern.attacker_id, g->t_hist);
        ASSERT_TRUE(imp.first_contact_frame.has_value());
        EXPECT_LE(std::abs(*imp.first_contact_frame - g->collision_frame), 1);
        EXPECT_EQ(imp.realized, t);
        EXPECT_FALSE(imp.third_party_overlap);
        // History is untouched.
        const AgentTrack & before = *s.find_agent(g->pattern.attacker_id);
        const AgentTrack & after = *g->scenario.find_agent(g->pattern.attacker_id);
        for (int f = 0; f <= g->t_hist; ++f) {
          EXPECT_EQ(before.states[f].x, after.states[f].x);
        }
      }
    }
  }
  EXPECT_GT(built, 6);
}

TEST(Build, Deterministic)
{
  const Scenario s = synth_scene(SceneKind::TwoLane, 44);
  GenerationRequest req;
  req.ctype = CollisionType::OppositeDirection;
  req.tta_s = 5.0;
  const BuildResult a = build(s, req);
  const BuildResult b = build(s, req);
  ASSERT_EQ(a.index(), b.index());
  if (a.index() == 0) {
    EXPECT_EQ(dump_line(scenario_to_json(std::get<0>(a).scenario)),
              dump_line(scenario_to_json(std::get<0>(b).scenario)));
  }
}

TEST(Build, StraightRoadCannotHostCrossings)
{
  const Scenario s = synth_scene(SceneKind::Straight, 2);
  GenerationRequest req;
  req.ctype = CollisionType::JunctionCrossing;
  req.tta_s = 6.0;
  EXPECT_TRUE(std::holds_alternative<Infeasible>(build(s, req)));
}

TEST(Corpus, SerialEqualsParallelAndRoundTrips)
{
  auto scenes = synth_batch(SceneKind::FourWay, 10, 8);
  const auto extra = synth_batch(SceneKind::TwoLane, 10, 8);
  scenes.insert(scenes.end(), extra.begin(), extra.end());
  const Corpus a = build_corpus(scenes, 2, 5, {}, Execution::Serial);
  const Corpus b = build_corpus(scenes, 2, 5, {}, Execution::Parallel);
  ASSERT_EQ(a.items.size(), b.items.size());
  ASSERT_FALSE(a.items.empty());
  for (std::size_t i = 0; i < a.items.size(); ++i) {
    EXPECT_EQ(dump_line(scenario_to_json(a.items[i].scenario)),
              dump_line(scenario_to_json(b.items[i].scenario)));
  }
  EXPECT_EQ(a.cells.size(), 15u);

  const auto dir = std::filesystem::temp_directory_path() / "forge_corpus_rt";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  save_corpus(a, dir);
  const auto back = load_corpus(dir);
  ASSERT_EQ(back.size(), a.items.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].pattern.attacker_id, a.items[i].pattern.attacker_id);
    EXPECT_EQ(back[i].collision_frame, a.items[i].collision_frame);
    EXPECT_EQ(back[i].request.ctype, a.items[i].request.ctype);
    EXPECT_NEAR(back[i].pattern.ego_box.center.x, a.items[i].pattern.ego_box.center.x, 1e-12);
  }
  std::filesystem::remove_all(dir);
}

TEST(Corpus, RejectsNonPositivePerCell)
{
  EXPECT_THROW(build_corpus({}, 0, 1), std::invalid_argument);
}
