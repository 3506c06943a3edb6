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

#include "forge/synth.hpp"

#include "forge/random.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace forge
{

std::string to_string(SceneKind kind)
{
  switch (kind) {
    case SceneKind::Straight:
      return "straight";
    case SceneKind::TwoLane:
      return "two_lane";
    case SceneKind::FourWay:
      return "four_way";
  }
  return "unknown";
}

std::optional<SceneKind> parse_scene_kind(const std::string & name)
{
  if (name == "straight") return SceneKind::Straight;
  if (name == "two_lane") return SceneKind::TwoLane;
  if (name == "four_way") return SceneKind::FourWay;
  return std::nullopt;
}

namespace
{

constexpr double kRoadHalfLength = 150.0;
constexpr double kHalfLane = 0.5 * kLaneWidth;
constexpr double kShoulder = 1.0;
constexpr int kFrames = 41;
constexpr double kHistorySeconds = 4.0;
constexpr double kTurnRadius = 8.0 + kHalfLane;

// Dense arc-length parameterized polyline that agents follow.
class Path
{
public:
  explicit Path(std::vector<Vec2> pts) : pts_(std::move(pts))
  {
    s_.assign(pts_.size(), 0.0);
    for (std::size_t i = 1; i < pts_.size(); ++i) {
      s_[i] = s_[i - 1] + norm(pts_[i] - pts_[i - 1]);
    }
  }

  double length() const { return s_.back(); }

  Pose2D at(double s) const
  {
    const auto it = std::upper_bound(s_.begin(), s_.end(), s);
    std::size_t i = static_cast<std::size_t>(std::distance(s_.begin(), it));
    i = std::clamp<std::size_t>(i, 1, pts_.size() - 1);
    const Vec2 a = pts_[i - 1];
    const Vec2 b = pts_[i];
    const double seg = s_[i] - s_[i - 1];
    const double t = seg > 0.0 ? (s - s_[i - 1]) / seg : 0.0;
    const Vec2 p = a + t * (b - a);
    return {p.x, p.y, std::atan2(b.y - a.y, b.x - a.x)};
  }

  // arc length of the point closest to q
  double project(Vec2 q) const
  {
    double best = 1e18;
    double best_s = 0.0;
    for (std::size_t i = 1; i < pts_.size(); ++i) {
      const Vec2 ab = pts_[i] - pts_[i - 1];
      const double len2 = dot(ab, ab);
      const double t = std::clamp(dot(q - pts_[i - 1], ab) / len2, 0.0, 1.0);
      const double d = norm(q - (pts_[i - 1] + t * ab));
      if (d < best) {
        best = d;
        best_s = s_[i - 1] + t * std::sqrt(len2);
      }
    }
    return best_s;
  }

private:
  std::vector<Vec2> pts_;
  std::vector<double> s_;
};

std::vector<Vec2> segment_points(Vec2 a, Vec2 b, double spacing)
{
  const double len = norm(b - a);
  const int n = std::max(1, static_cast<int>(std::ceil(len / spacing - 1e-9)));
  std::vector<Vec2> out;
  out.reserve(n + 1);
  for (int i = 0; i <= n; ++i) {
    out.push_back(a + (static_cast<double>(i) / n) * (b - a));
  }
  return out;
}

std::vector<Vec2> arc_points(Vec2 center, double radius, double a0, double a1, double spacing)
{
  const double len = std::abs(a1 - a0) * radius;
  const int n = std::max(2, static_cast<int>(std::ceil(len / spacing)));
  std::vector<Vec2> out;
  for (int i = 0; i <= n; ++i) {
    const double a = a0 + (a1 - a0) * i / n;
    out.push_back({center.x + radius * std::cos(a), center.y + radius * std::sin(a)});
  }
  return out;
}

void append(std::vector<Vec2> & dst, const std::vector<Vec2> & src)
{
  for (const auto & p : src) {
    if (dst.empty() || norm(p - dst.back()) > 1e-9) {
      dst.push_back(p);
    }
  }
}

Polygon rect(double x0, double y0, double x1, double y1)
{
  return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
}

// A left-turn connector: approach point, arc, exit point.
struct Turn
{
  std::string id;
  std::string from;
  std::string to;
  Vec2 center;
  double a0;
  double a1;
  Vec2 approach_start;
  Vec2 exit_end;
};

std::vector<Turn> four_way_turns()
{
  const double L = kRoadHalfLength;
  const double c = kTurnRadius - kHalfLane;  // 8.0
  const double h = kHalfLane;
  return {
    {"turn_e_n", "e_in", "n_in", {-c, c}, -0.5 * kPi, 0.0, {-L, -h}, {h, L}},
    {"turn_w_s", "w_in", "s_in", {c, -c}, 0.5 * kPi, kPi, {L, h}, {-h, -L}},
    {"turn_n_w", "n_in", "w_in", {-c, -c}, 0.0, 0.5 * kPi, {h, -L}, {-L, h}},
    {"turn_s_e", "s_in", "e_in", {c, c}, kPi, 1.5 * kPi, {-h, L}, {L, -h}},
  };
}

RoadMap build_map(SceneKind kind)
{
  const double L = kRoadHalfLength;
  const double h = kHalfLane;
  RoadMap map;
  auto lane = [&](const std::string & id, Vec2 a, Vec2 b) {
    map.lanes.push_back({id, segment_points(a, b, kMaxLanePointSpacing), {}});
  };
  switch (kind) {
    case SceneKind::Straight:
      lane("r", {-L, -h}, {L, -h});
      lane("l", {-L, h}, {L, h});
      map.drivable.push_back(rect(-L - 10, -kLaneWidth - kShoulder, L + 10, kLaneWidth + kShoulder));
      break;
    case SceneKind::TwoLane:
      lane("e", {-L, -h}, {L, -h});
      lane("w", {L, h}, {-L, h});
      map.drivable.push_back(rect(-L - 10, -kLaneWidth - kShoulder, L + 10, kLaneWidth + kShoulder));
      break;
    case SceneKind::FourWay: {
      const double o = h + kLaneWidth;
      lane("e_in", {-L, -h}, {L, -h});
      lane("e_out", {-L, -o}, {L, -o});
      lane("w_in", {L, h}, {-L, h});
      lane("w_out", {L, o}, {-L, o});
      lane("n_in", {h, -L}, {h, L});
      lane("n_out", {o, -L}, {o, L});
      lane("s_in", {-h, L}, {-h, -L});
      lane("s_out", {-o, L}, {-o, -L});
      for (const auto & t : four_way_turns()) {
        map.lanes.push_back(
          {t.id, arc_points(t.center, kTurnRadius, t.a0, t.a1, kMaxLanePointSpacing), {t.to}});
        for (auto & l : map.lanes) {
          if (l.id == t.from) {
            l.successors.push_back(t.id);
          }
        }
      }
      const double w = 2.0 * kLaneWidth + kShoulder;
      map.drivable.push_back(rect(-L - 10, -w, L + 10, w));
      map.drivable.push_back(rect(-w, -L - 10, w, L + 10));
      break;
    }
  }
  return map;
}

Path lane_path(const RoadMap & map, const std::string & id)
{
  const LanePolyline * lane = map.find_lane(id);
  std::vector<Vec2> pts;
  for (std::size_t i = 1; i < lane->points.size(); ++i) {
    auto seg = segment_points(lane->points[i - 1], lane->points[i], 0.5);
    append(pts, seg);
  }
  return Path(std::move(pts));
}

Path turn_path(const Turn & t)
{
  std::vector<Vec2> pts;
  const Vec2 arc_start{
    t.center.x + kTurnRadius * std::cos(t.a0), t.center.y + kTurnRadius * std::sin(t.a0)};
  const Vec2 arc_end{
    t.center.x + kTurnRadius * std::cos(t.a1), t.center.y + kTurnRadius * std::sin(t.a1)};
  append(pts, segment_points(t.approach_start, arc_start, 0.5));
  append(pts, arc_points(t.center, kTurnRadius, t.a0, t.a1, 0.25));
  append(pts, segment_points(arc_end, t.exit_end, 0.5));
  return Path(std::move(pts));
}

struct Motion
{
  double s0;
  double v;
  double noise_amp;
  double omega;
  double phase;

  double s_at(double t) const
  {
    // v(t) = v * (1 + amp * sin(omega t + phase)), integrated in closed form
    return s0 + v * t - v * noise_amp / omega * (std::cos(omega * t + phase) - std::cos(phase));
  }
};

AgentTrack make_track(
  const std::string & id, const Path & path, const Motion & m, double length, double width)
{
  AgentTrack a;
  a.id = id;
  a.length = length;
  a.width = width;
  for (int f = 0; f < kFrames; ++f) {
    const double s = m.s_at(f / kSceneRateHz);
    const bool on_path = s >= 0.0 && s <= path.length();
    a.states.push_back(path.at(std::clamp(s, 0.0, path.length())));
    a.valid.push_back(on_path);
  }
  return a;
}

Motion make_motion(Rng & rng, double s0, double v)
{
  return {s0, v, rng.uniform(0.01, 0.04), rng.uniform(0.3, 0.8), rng.uniform(0.0, 2.0 * kPi)};
}

// Inflated-footprint check so accepted tracks keep a little clearance.
bool conflicts(const AgentTrack & cand, const std::vector<AgentTrack> & accepted)
{
  if (!cand.first_valid()) {
    return true;
  }
  // also between frames, where closed-loop rollouts interpolate
  auto lerp = [](const Pose2D & p0, const Pose2D & p1, double u) {
    return Pose2D(p0.x + u * (p1.x - p0.x), p0.y + u * (p1.y - p0.y),
                  p0.theta + u * normalize_angle(p1.theta - p0.theta));
  };
  for (const auto & other : accepted) {
    for (int f = 0; f < kFrames; ++f) {
      if (!cand.is_valid(f) || !other.is_valid(f)) {
        continue;
      }
      const bool next = f + 1 < kFrames && cand.is_valid(f + 1) && other.is_valid(f + 1);
      for (int sub = 0; sub < (next ? 5 : 1); ++sub) {
        const double u = sub / 5.0;
        const Pose2D pc = next ? lerp(cand.states[f], cand.states[f + 1], u) : cand.states[f];
        const Pose2D po = next ? lerp(other.states[f], other.states[f + 1], u) : other.states[f];
        const OrientedBox a(pc, cand.length + 1.0, cand.width + 0.4);
        const OrientedBox b(po, other.length, other.width);
        if (boxes_overlap(a, b)) {
          return true;
        }
      }
    }
  }
  return false;
}

enum class Role { Follower, Leader, Adjacent, Oncoming, North, South, Turner };

}  // namespace

Scenario synth_scene(SceneKind kind, std::uint64_t seed)
{
  Rng rng(mix_seed(seed, static_cast<std::uint64_t>(kind) + 101));
  Scenario sc;
  sc.id = to_string(kind) + "-" + std::to_string(seed);
  sc.map = build_map(kind);
  sc.ego_id = "ego";
  sc.rate_hz = kSceneRateHz;

  std::string ego_lane;
  std::string adjacent_lane;
  switch (kind) {
    case SceneKind::Straight:
      ego_lane = rng.coin() ? "r" : "l";
      adjacent_lane = ego_lane == "r" ? "l" : "r";
      break;
    case SceneKind::TwoLane:
      ego_lane = "e";
      break;
    case SceneKind::FourWay:
      ego_lane = rng.coin() ? "e_in" : "e_out";
      adjacent_lane = ego_lane == "e_in" ? "e_out" : "e_in";
      break;
  }
  const Path ego_path = lane_path(sc.map, ego_lane);
  const double v_ego = rng.uniform(4.0, 11.0);
  // time at which the ego reaches the junction centre (four_way) or just a start offset
  const double t_junction = kHistorySeconds + rng.uniform(4.5, 9.0);
  const double s_ego0 = kind == SceneKind::FourWay ? kRoadHalfLength - v_ego * t_junction
                                                    : rng.uniform(20.0, 40.0);
  std::vector<AgentTrack> accepted;
  accepted.push_back(make_track("ego", ego_path, make_motion(rng, s_ego0, v_ego), 4.5, 2.0));

  std::vector<Role> roles;
  int n_others = 0;
  switch (kind) {
    case SceneKind::Straight:
      roles = {Role::Follower, Role::Leader, Role::Adjacent, Role::Adjacent, Role::Adjacent,
               Role::Adjacent};
      n_others = rng.uniform_int(2, 6);
      break;
    case SceneKind::TwoLane:
      roles = {Role::Follower, Role::Leader, Role::Oncoming, Role::Oncoming, Role::Oncoming,
               Role::Oncoming};
      n_others = rng.uniform_int(2, 6);
      break;
    case SceneKind::FourWay:
      roles = {Role::Follower, Role::Adjacent, Role::Oncoming, Role::North, Role::South,
               Role::Oncoming, Role::North, Role::South};
      n_others = rng.uniform_int(4, 6);
      break;
  }
  // deterministic Fisher-Yates
  for (int i = static_cast<int>(roles.size()) - 1; i > 0; --i) {
    std::swap(roles[i], roles[rng.uniform_int(0, i)]);
  }
  if (kind == SceneKind::FourWay) {
    roles.insert(roles.begin(), Role::Turner);
  }

  const auto turns = four_way_turns();
  auto try_role = [&](Role role, const std::string & id) -> bool {
    for (int attempt = 0; attempt < 40; ++attempt) {
      const double length = rng.uniform(4.2, 5.0);
      const double width = rng.uniform(1.8, 2.1);
      const double v = rng.uniform(3.0, 12.0);
      std::optional<AgentTrack> cand;
      switch (role) {
        case Role::Follower: {
          const double vf = v_ego * rng.uniform(0.85, 1.0);
          cand = make_track(
            id, ego_path, make_motion(rng, s_ego0 - rng.uniform(12.0, 35.0), vf), length, width);
          break;
        }
        case Role::Leader: {
          const double vl = std::min(12.0, v_ego * rng.uniform(1.0, 1.15));
          cand = make_track(
            id, ego_path, make_motion(rng, s_ego0 + rng.uniform(15.0, 40.0), vl), length, width);
          break;
        }
        case Role::Adjacent: {
          const std::string lane_id =
            kind == SceneKind::TwoLane ? std::string("e") : adjacent_lane;
          const Path p = lane_path(sc.map, lane_id);
          cand = make_track(
            id, p, make_motion(rng, s_ego0 + rng.uniform(-35.0, 35.0), v), length, width);
          break;
        }
        case Role::Oncoming: {
          std::string lane_id = "w";
          if (kind == SceneKind::FourWay) {
            lane_id = rng.coin() ? "w_in" : "w_out";
          }
          const Path p = lane_path(sc.map, lane_id);
          const double t_arr =
            kind == SceneKind::FourWay ? t_junction + rng.uniform(-3.0, 3.0) : rng.uniform(3.0, 15.0);
          cand = make_track(
            id, p, make_motion(rng, kRoadHalfLength - v * t_arr, v), length, width);
          break;
        }
        case Role::North:
        case Role::South: {
          const bool north = role == Role::North;
          const std::string lane_id =
            north ? (rng.coin() ? "n_in" : "n_out") : (rng.coin() ? "s_in" : "s_out");
          const Path p = lane_path(sc.map, lane_id);
          const double sign = rng.coin() ? 1.0 : -1.0;
          const double t_arr = t_junction + sign * rng.uniform(1.5, 4.5);
          cand = make_track(
            id, p, make_motion(rng, kRoadHalfLength - v * t_arr, v), length, width);
          break;
        }
        case Role::Turner: {
          const Turn & t = turns[1];  // westbound turning left to southbound
          const Path p = turn_path(t);
          const double s_turn = p.project(
            {t.center.x + kTurnRadius * std::cos(t.a0), t.center.y + kTurnRadius * std::sin(t.a0)});
          const double vt = rng.uniform(3.0, 8.0);
          double t_arr = t_junction + (rng.coin() ? 1.0 : -1.0) * rng.uniform(3.0, 8.0);
          if (attempt >= 30) {
            // fall back to turning well after the ego cleared the junction
            t_arr = 17.0 + 0.05 * (attempt - 30);
          }
          cand = make_track(id, p, make_motion(rng, s_turn - vt * t_arr, vt), length, width);
          break;
        }
      }
      if (cand && !conflicts(*cand, accepted)) {
        accepted.push_back(std::move(*cand));
        return true;
      }
    }
    return false;
  };

  int placed = 0;
  for (Role role : roles) {
    if (placed >= n_others) {
      break;
    }
    if (try_role(role, "a" + std::to_string(placed + 1))) {
      ++placed;
    }
  }
  const Role filler = kind == SceneKind::Straight ? Role::Adjacent : Role::Oncoming;
  for (int extra = 0; placed < 2 && extra < 20; ++extra) {
    if (try_role(filler, "a" + std::to_string(placed + 1))) {
      ++placed;
    }
  }
  sc.agents = std::move(accepted);
  sc.update_duration();
  return sc;
}

std::vector<Scenario> synth_batch(SceneKind kind, int n, std::uint64_t base_seed)
{
  std::vector<Scenario> out;
  out.reserve(static_cast<std::size_t>(std::max(0, n)));
  for (int i = 0; i < n; ++i) {
    out.push_back(synth_scene(kind, base_seed * 100003ULL + static_cast<std::uint64_t>(i)));
  }
  return out;
}

}  // namespace forge
