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

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace forge
{

double LanePolyline::length() const
{
  double total = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    total += norm(points[i] - points[i - 1]);
  }
  return total;
}

bool RoadMap::on_road(Vec2 p) const
{
  return std::any_of(drivable.begin(), drivable.end(), [&](const Polygon & poly) {
    return point_in_polygon(p, poly);
  });
}

const LanePolyline * RoadMap::find_lane(const std::string & id) const
{
  for (const auto & lane : lanes) {
    if (lane.id == id) {
      return &lane;
    }
  }
  return nullptr;
}

bool AgentTrack::is_valid(int frame) const
{
  return frame >= 0 && frame < num_frames() && valid[static_cast<std::size_t>(frame)];
}

std::optional<int> AgentTrack::first_valid() const
{
  for (int i = 0; i < num_frames(); ++i) {
    if (valid[i]) {
      return i;
    }
  }
  return std::nullopt;
}

std::optional<int> AgentTrack::last_valid() const
{
  for (int i = num_frames() - 1; i >= 0; --i) {
    if (valid[i]) {
      return i;
    }
  }
  return std::nullopt;
}

OrientedBox AgentTrack::box_at(int frame) const
{
  return OrientedBox(states.at(static_cast<std::size_t>(frame)), length, width);
}

Vec2 AgentTrack::velocity_at(int frame, double rate_hz) const
{
  if (!is_valid(frame) || !is_valid(frame - 1)) {
    if (is_valid(frame) && is_valid(frame + 1)) {
      return rate_hz * (states[frame + 1].position() - states[frame].position());
    }
    return {};
  }
  return rate_hz * (states[frame].position() - states[frame - 1].position());
}

Vec2 AgentTrack::acceleration_at(int frame, double rate_hz) const
{
  if (!is_valid(frame) || !is_valid(frame - 1) || !is_valid(frame - 2)) {
    return {};
  }
  return rate_hz * (velocity_at(frame, rate_hz) - velocity_at(frame - 1, rate_hz));
}

int Scenario::num_frames() const
{
  int n = 0;
  for (const auto & a : agents) {
    n = std::max(n, a.num_frames());
  }
  return n;
}

const AgentTrack & Scenario::ego() const
{
  const AgentTrack * e = find_agent(ego_id);
  if (e == nullptr) {
    throw ScenarioError("scenario " + id + ": ego_id '" + ego_id + "' not found in agents");
  }
  return *e;
}

const AgentTrack * Scenario::find_agent(const std::string & agent_id) const
{
  for (const auto & a : agents) {
    if (a.id == agent_id) {
      return &a;
    }
  }
  return nullptr;
}

AgentTrack * Scenario::find_agent(const std::string & agent_id)
{
  for (auto & a : agents) {
    if (a.id == agent_id) {
      return &a;
    }
  }
  return nullptr;
}

void Scenario::update_duration()
{
  const int n = num_frames();
  duration_s = n > 0 ? (n - 1) / rate_hz : 0.0;
}

namespace
{

[[noreturn]] void fail(const Scenario & s, const std::string & what)
{
  throw ScenarioError("scenario " + s.id + ": " + what);
}

}  // namespace

void validate(const Scenario & s)
{
  if (std::abs(s.rate_hz - kSceneRateHz) > 1e-12) {
    fail(s, "rate_hz must be 2");
  }
  std::set<std::string> lane_ids;
  for (const auto & lane : s.map.lanes) {
    if (!lane_ids.insert(lane.id).second) {
      fail(s, "duplicate lane id " + lane.id);
    }
  }
  for (const auto & lane : s.map.lanes) {
    if (lane.points.size() < 2) {
      fail(s, "lane " + lane.id + " has fewer than 2 points");
    }
    for (std::size_t i = 1; i < lane.points.size(); ++i) {
      const double d = norm(lane.points[i] - lane.points[i - 1]);
      if (d <= 0.0) {
        fail(s, "lane " + lane.id + " has repeated consecutive points");
      }
      if (d > kMaxLanePointSpacing + 1e-9) {
        fail(s, "lane " + lane.id + " point spacing exceeds 2 m");
      }
    }
    for (const auto & succ : lane.successors) {
      if (lane_ids.count(succ) == 0) {
        fail(s, "lane " + lane.id + " successor " + succ + " does not resolve");
      }
    }
    if (!s.map.drivable.empty()) {
      for (const auto & p : lane.points) {
        if (!s.map.on_road(p)) {
          fail(s, "lane " + lane.id + " leaves the drivable area");
        }
      }
    }
  }
  std::set<std::string> agent_ids;
  for (const auto & a : s.agents) {
    if (!agent_ids.insert(a.id).second) {
      fail(s, "duplicate agent id " + a.id);
    }
    if (a.states.size() != a.valid.size()) {
      fail(s, "agent " + a.id + " states/valid length mismatch");
    }
    if (!(a.length > 0.0) || !(a.width > 0.0)) {
      fail(s, "agent " + a.id + " footprint must be positive");
    }
    const auto first = a.first_valid();
    const auto last = a.last_valid();
    if (first) {
      for (int i = *first; i <= *last; ++i) {
        if (!a.valid[i]) {
          fail(s, "agent " + a.id + " present frames are not contiguous");
        }
      }
    }
    for (const auto & st : a.states) {
      if (!std::isfinite(st.x) || !std::isfinite(st.y) || !std::isfinite(st.theta)) {
        fail(s, "agent " + a.id + " has non-finite state");
      }
    }
  }
  if (agent_ids.count(s.ego_id) == 0) {
    fail(s, "ego_id '" + s.ego_id + "' not found in agents");
  }
  const int n = s.num_frames();
  const double expected = n > 0 ? (n - 1) / s.rate_hz : 0.0;
  if (std::abs(expected - s.duration_s) > 1e-9) {
    fail(s, "duration_s inconsistent with the longest track");
  }
}

Pose2D ego_pose_at(const Scenario & scenario, int frame)
{
  const AgentTrack & ego = scenario.ego();
  if (!ego.is_valid(frame)) {
    std::ostringstream os;
    os << "scenario " << scenario.id << ": ego not valid at frame " << frame;
    throw std::out_of_range(os.str());
  }
  return ego.states[frame];
}

bool has_any_collision(const Scenario & s)
{
  const int n = s.num_frames();
  for (int f = 0; f < n; ++f) {
    for (std::size_t i = 0; i < s.agents.size(); ++i) {
      if (!s.agents[i].is_valid(f)) {
        continue;
      }
      const OrientedBox bi = s.agents[i].box_at(f);
      for (std::size_t j = i + 1; j < s.agents.size(); ++j) {
        if (s.agents[j].is_valid(f) && boxes_overlap(bi, s.agents[j].box_at(f))) {
          return true;
        }
      }
    }
  }
  return false;
}

}  // namespace forge
