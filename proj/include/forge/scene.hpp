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

#ifndef FORGE__SCENE_HPP_
#define FORGE__SCENE_HPP_

#include "forge/geometry.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace forge
{

inline constexpr double kSceneRateHz = 2.0;
inline constexpr double kLaneWidth = 3.5;
inline constexpr double kMaxLanePointSpacing = 2.0;

/// Raised for schema or invariant violations in scenario data.
class ScenarioError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct LanePolyline
{
  std::string id;
  std::vector<Vec2> points;
  std::vector<std::string> successors;

  double length() const;
};

struct RoadMap
{
  std::vector<LanePolyline> lanes;
  std::vector<Polygon> drivable;

  /// True when p lies inside any drivable polygon.
  bool on_road(Vec2 p) const;
  const LanePolyline * find_lane(const std::string & id) const;
};

struct AgentTrack
{
  std::string id;
  double length{4.5};
  double width{2.0};
  std::vector<Pose2D> states;
  std::vector<bool> valid;

  int num_frames() const { return static_cast<int>(states.size()); }
  bool is_valid(int frame) const;
  std::optional<int> first_valid() const;
  std::optional<int> last_valid() const;
  OrientedBox box_at(int frame) const;
  /// Backward-difference velocity at frame (needs frame-1 valid), m/s.
  Vec2 velocity_at(int frame, double rate_hz) const;
  /// Backward second-difference acceleration at frame (needs frame-2 valid), m/s^2.
  Vec2 acceleration_at(int frame, double rate_hz) const;
};

struct Scenario
{
  std::string id;
  RoadMap map;
  std::vector<AgentTrack> agents;
  std::string ego_id;
  double rate_hz{kSceneRateHz};
  double duration_s{0.0};

  int num_frames() const;
  const AgentTrack & ego() const;
  const AgentTrack * find_agent(const std::string & id) const;
  AgentTrack * find_agent(const std::string & id);
  /// Recomputes duration_s from the longest track.
  void update_duration();
};

/// Checks every documented invariant. Throws ScenarioError naming the scenario and the
/// failed constraint.
void validate(const Scenario & scenario);

/// Ego state at a frame. Throws std::out_of_range when the frame is invalid.
Pose2D ego_pose_at(const Scenario & scenario, int frame);

/// True when any two agents overlap at any frame during open-loop replay.
bool has_any_collision(const Scenario & scenario);

}  // namespace forge

#endif  // FORGE__SCENE_HPP_
