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

#ifndef FORGE__PLANNERS_HPP_
#define FORGE__PLANNERS_HPP_

#include "forge/pipeline.hpp"
#include "forge/quintic.hpp"
#include "forge/scene.hpp"

#include <optional>
#include <string>
#include <vector>

namespace forge
{

inline constexpr double kPlannerRateHz = 10.0;

struct IDMParams
{
  double v0_desired{20.0};
  double T_headway{1.5};
  double s0_min_gap{2.0};
  double a_max{1.5};
  double b_comfort{2.0};
  double delta_exponent{4.0};
};

/// Throws std::invalid_argument unless every field is positive and finite.
void validate(const IDMParams & p);

struct RuleParams
{
  double t_brake{2.0};
  double t_clear{4.0};
};

struct PDMWeights
{
  double w_progress{1.0};
  double w_timing{1.0};
  double w_comfort{1.0};
};

struct PDMParams
{
  std::vector<double> lateral_offsets{-3.5, -1.75, 0.0, 1.75, 3.5};
  std::vector<double> velocity_scales{0.2, 0.4, 0.6, 0.8, 1.0};
  PDMWeights weights;
  IDMParams idm;
  double horizon_s{4.0};
  double replan_s{0.5};
  /// Distance over which a lateral shift is blended in (m).
  double blend_length{20.0};
};

/// Throws std::invalid_argument when 0 is not an offset, 1.0 is not a scale, a scale lies
/// outside (0, 1], a weight is negative or the IDM block is invalid.
void validate(const PDMParams & p);

enum class PlannerKind { Replay, IDM, RuleBased, PDM };

std::string to_string(PlannerKind kind);
/// Accepts replay, idm, rule (or rule_based) and pdm.
std::optional<PlannerKind> parse_planner(const std::string & name);

struct PlannerParams
{
  IDMParams idm;
  RuleParams rule;
  PDMParams pdm;
  /// Half-width of the corridor around the reference path used for lead association (m).
  double corridor{2.0};
  /// IDM lead association also looks at constant-velocity forecasts this far ahead (s).
  double lead_lookahead_s{3.0};
};

struct RolloutResult
{
  Trajectory ego_trace;  ///< 10 Hz, starting at the rollout start time
  bool collided{false};
  std::optional<int> collision_frame;  ///< 2 Hz scene frame at or after the first contact
  std::optional<double> collision_time_s;
  std::string collided_with;
  Pose2D other_pose_at_collision;  ///< the struck agent; the ego pose is the last trace pose
  bool off_road{false};
  double min_gap{0.0};  ///< smallest box distance seen; +inf when no agent was ever present
};

/// a = a_max [1 - (v/v0)^delta - (s*/gap)^2], s* = s0 + max(0, v T + v dv / (2 sqrt(a_max b))),
/// clamped to [-2b, a_max]. gap = +inf means free road; gap <= 0 gives -2b.
double idm_accel(double v, double gap, double dv, const IDMParams & p);

/// Commanded speed after one step of dt: brake at b_comfort when ttc < t_brake, accelerate
/// at a_max towards replay_speed when ttc > t_clear and below it, otherwise hold.
double rule_based_step(
  double speed, double replay_speed, double ttc, const RuleParams & rule, const IDMParams & idm,
  double dt);

/// Arc-length parametrized polyline, extrapolated linearly past both ends.
class ReferencePath
{
public:
  ReferencePath() = default;
  /// Consecutive points closer than 1e-6 m are merged. Throws std::invalid_argument when
  /// fewer than two distinct points remain.
  explicit ReferencePath(const std::vector<Vec2> & points);

  double length() const { return s_.back(); }
  Pose2D pose_at(double s, double lateral = 0.0) const;
  /// Arc length and signed lateral offset (left positive) of the closest point.
  std::pair<double, double> project(Vec2 p) const;
  const std::vector<Vec2> & points() const { return points_; }

private:
  std::vector<Vec2> points_;
  std::vector<double> s_;
};

/// Logged ego positions up to its last valid frame.
ReferencePath logged_ego_path(const Scenario & scenario);
/// Lane centreline route from the lane best matching the ego at frame, following the
/// successor that passes closest to the ego's last logged position.
ReferencePath centerline_route(const Scenario & scenario, int frame);

/// Agent state forecast used by pdm_plan.
struct AgentForecast
{
  std::string id;
  Pose2D pose;
  Vec2 velocity;
  double length{4.5};
  double width{2.0};
};

struct EgoPlanState
{
  double s{0.0};
  double lateral{0.0};
  double speed{0.0};
};

struct PDMChoice
{
  double lateral_offset{0.0};
  double velocity_scale{1.0};
  double score{0.0};
  bool failed{false};  ///< every candidate hit a predicted collision or left the road
  std::vector<Pose2D> poses;  ///< 10 Hz over the horizon, first sample one step ahead
};

/// Scores |offsets| x |scales| candidates over the horizon against constant-velocity
/// forecasts and returns the best one (ties: smaller |offset|, then higher scale).
PDMChoice pdm_plan(
  const EgoPlanState & state, const ReferencePath & path, const RoadMap & map,
  const std::vector<AgentForecast> & agents, double v_ref, const PDMParams & p,
  double ego_length = 4.5, double ego_width = 2.0, double corridor = 2.0);

/// Closed-loop rollout from start_frame to the last scene frame. Non-ego agents replay.
RolloutResult rollout(
  const Scenario & scenario, int start_frame, PlannerKind kind, const PlannerParams & params);
RolloutResult rollout(
  const GeneratedScenario & generated, PlannerKind kind, const PlannerParams & params);

}  // namespace forge

#endif  // FORGE__PLANNERS_HPP_
