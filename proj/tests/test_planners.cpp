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

#include "forge/planners.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace forge;

namespace
{

// One straight eastbound lane on a 7 m wide road; the ego logs 10 m/s for 20 s and a
// parked car sits at x = 120.
Scenario parked_car_scene()
{
  Scenario s;
  s.id = "parked";
  LanePolyline lane;
  lane.id = "east";
  for (int i = 0; i <= 200; ++i) lane.points.push_back({2.0 * i, 0.0});
  s.map.lanes.push_back(lane);
  s.map.drivable.push_back({{-10, -3.5}, {410, -3.5}, {410, 3.5}, {-10, 3.5}});
  AgentTrack ego, car;
  ego.id = "ego";
  car.id = "car";
  for (int f = 0; f <= 40; ++f) {
    ego.states.emplace_back(5.0 * f, 0.0, 0.0);
    ego.valid.push_back(true);
    car.states.emplace_back(120.0, 0.0, 0.0);
    car.valid.push_back(true);
  }
  s.agents = {ego, car};
  s.ego_id = "ego";
  s.update_duration();
  return s;
}

}  // namespace

TEST(Idm, FreeRoadAndStandstill)
{
  const IDMParams p;
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_NEAR(idm_accel(0.0, inf, 0.0, p), p.a_max, 1e-12);
  EXPECT_NEAR(idm_accel(p.v0_desired, inf, 0.0, p), 0.0, 1e-12);
  EXPECT_NEAR(idm_accel(10.0, inf, 0.0, p), 1.5 * (1.0 - std::pow(0.5, 4)), 1e-12);
  EXPECT_NEAR(idm_accel(5.0, 0.0, 0.0, p), -2.0 * p.b_comfort, 1e-12);
}

TEST(Idm, InteractionTermByHand)
{
  const IDMParams p;
  // v = 10, gap = 30, closing at 2 m/s: s* = 2 + 15 + 10*2/(2*sqrt(3)).
  const double s_star = 2.0 + 15.0 + 20.0 / (2.0 * std::sqrt(3.0));
  const double expect = 1.5 * (1.0 - std::pow(0.5, 4) - std::pow(s_star / 30.0, 2));
  EXPECT_NEAR(idm_accel(10.0, 30.0, 2.0, p), expect, 1e-12);
  EXPECT_NEAR(idm_accel(20.0, 3.0, 10.0, p), -4.0, 1e-12);  // clamped at -2b
}

TEST(Idm, ConvergesToEquilibriumGap)
{
  // Follower behind a lead at constant 10 m/s; equilibrium s = (s0 + vT) / sqrt(1 - (v/v0)^4).
  const IDMParams p;
  const double v_lead = 10.0;
  double gap = 60.0, v = 5.0;
  const double dt = 0.1;
  for (int i = 0; i < 600; ++i) {
    const double a = idm_accel(v, gap, v - v_lead, p);
    v = std::max(0.0, v + a * dt);
    gap += (v_lead - v) * dt;
  }
  const double s_eq = (p.s0_min_gap + v_lead * p.T_headway) / std::sqrt(1.0 - std::pow(v_lead / p.v0_desired, 4));
  EXPECT_NEAR(gap, s_eq, 0.05 * s_eq);
  EXPECT_NEAR(v, v_lead, 0.05 * v_lead);
}

TEST(Idm, ValidateRejectsNonPositive)
{
  IDMParams p;
  p.s0_min_gap = 0.0;
  EXPECT_THROW(validate(p), std::invalid_argument);
  PDMParams q;
  q.velocity_scales = {0.5};
  EXPECT_THROW(validate(q), std::invalid_argument);
}

TEST(Rule, BrakeHoldAndRecover)
{
  const RuleParams r;
  const IDMParams p;
  EXPECT_NEAR(rule_based_step(10.0, 12.0, 1.0, r, p, 0.1), 10.0 - 0.2, 1e-12);
  EXPECT_NEAR(rule_based_step(10.0, 12.0, 3.0, r, p, 0.1), 10.0, 1e-12);
  EXPECT_NEAR(rule_based_step(10.0, 12.0, 9.0, r, p, 0.1), 10.15, 1e-12);
  EXPECT_NEAR(rule_based_step(11.95, 12.0, 9.0, r, p, 0.1), 12.0, 1e-12);
  EXPECT_NEAR(rule_based_step(0.1, 12.0, 0.5, r, p, 0.1), 0.0, 1e-12);
}

TEST(Path, ProjectInvertsPoseAt)
{
  const ReferencePath path({{0, 0}, {10, 0}, {10, 10}});
  EXPECT_NEAR(path.length(), 20.0, 1e-12);
  const Pose2D p = path.pose_at(15.0, 1.0);
  EXPECT_NEAR(p.x, 9.0, 1e-12);  // left of a northbound segment is west
  EXPECT_NEAR(p.y, 5.0, 1e-12);
  const auto [s, lat] = path.project({9.0, 5.0});
  EXPECT_NEAR(s, 15.0, 1e-12);
  EXPECT_NEAR(lat, 1.0, 1e-12);
  const Pose2D ahead = path.pose_at(25.0);
  EXPECT_NEAR(ahead.y, 15.0, 1e-12);
  EXPECT_THROW(ReferencePath({{1, 1}, {1, 1}}), std::invalid_argument);
}

TEST(Pdm, EmptyRoadKeepsLaneAtFullSpeed)
{
  const Scenario s = parked_car_scene();
  const ReferencePath path = centerline_route(s, 8);
  const PDMChoice c = pdm_plan({40.0, 0.0, 10.0}, path, s.map, {}, 10.0, PDMParams{});
  EXPECT_FALSE(c.failed);
  EXPECT_EQ(c.lateral_offset, 0.0);
  EXPECT_EQ(c.velocity_scale, 1.0);
  EXPECT_EQ(c.poses.size(), 40u);  // 0.1 s .. 4.0 s
}

TEST(Pdm, StoppedLeadChangesTheChoice)
{
  const Scenario s = parked_car_scene();
  const ReferencePath path = centerline_route(s, 8);
  AgentForecast parked;
  parked.id = "car";
  parked.pose = Pose2D(70.0, 0.0, 0.0);
  const PDMChoice c = pdm_plan({40.0, 0.0, 10.0}, path, s.map, {parked}, 10.0, PDMParams{});
  EXPECT_FALSE(c.failed);
  EXPECT_TRUE(c.lateral_offset != 0.0 || c.velocity_scale < 1.0);
}

TEST(Rollout, ReplayHitsParkedCarAndIdmStops)
{
  const Scenario s = parked_car_scene();
  const PlannerParams params;
  const RolloutResult replay = rollout(s, 8, PlannerKind::Replay, params);
  ASSERT_TRUE(replay.collided);
  EXPECT_EQ(replay.collided_with, "car");
  // Ego nose reaches the car's tail (x = 117.75 - 2.25) at t = 11.55 s, frame 24.
  EXPECT_EQ(replay.collision_frame, 24);

  const RolloutResult idm = rollout(s, 8, PlannerKind::IDM, params);
  EXPECT_FALSE(idm.collided);
  EXPECT_GT(idm.min_gap, 0.5);
  EXPECT_LT(idm.ego_trace.speeds.back(), 0.5);

  const RolloutResult pdm = rollout(s, 8, PlannerKind::PDM, params);
  EXPECT_FALSE(pdm.collided);
  EXPECT_FALSE(pdm.off_road);
}

TEST(Rollout, PlannerNamesRoundTrip)
{
  for (auto k : {PlannerKind::Replay, PlannerKind::IDM, PlannerKind::RuleBased, PlannerKind::PDM}) {
    EXPECT_EQ(parse_planner(to_string(k)), k);
  }
  EXPECT_EQ(parse_planner("rule"), PlannerKind::RuleBased);
  EXPECT_FALSE(parse_planner("mpc").has_value());
}
