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

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <tuple>

namespace forge
{

namespace
{

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDt = 1.0 / kPlannerRateHz;

bool positive(double x) { return std::isfinite(x) && x > 0.0; }

struct AgentSnapshot
{
  const AgentTrack * track{nullptr};
  Pose2D pose;
  Vec2 velocity;
};

// Linear interpolation between the 2 Hz frames bracketing t.
std::optional<AgentSnapshot> snapshot(const AgentTrack & a, double t, double rate_hz)
{
  const double f = t * rate_hz;
  const int i0 = static_cast<int>(std::floor(f + 1e-9));
  const double frac = std::max(0.0, f - i0);
  if (i0 < 0 || i0 >= a.num_frames() || !a.is_valid(i0)) {
    return std::nullopt;
  }
  AgentSnapshot s;
  s.track = &a;
  const Pose2D & p0 = a.states[static_cast<std::size_t>(i0)];
  if (frac < 1e-9) {
    s.pose = p0;
    if (i0 >= 1 && a.is_valid(i0 - 1)) {
      s.velocity = a.velocity_at(i0, rate_hz);
    } else if (i0 + 1 < a.num_frames() && a.is_valid(i0 + 1)) {
      s.velocity = rate_hz * (a.states[static_cast<std::size_t>(i0 + 1)].position() - p0.position());
    }
    return s;
  }
  if (i0 + 1 >= a.num_frames() || !a.is_valid(i0 + 1)) {
    return std::nullopt;
  }
  const Pose2D & p1 = a.states[static_cast<std::size_t>(i0 + 1)];
  const Vec2 pos = p0.position() + frac * (p1.position() - p0.position());
  s.pose = Pose2D(pos.x, pos.y, p0.theta + frac * normalize_angle(p1.theta - p0.theta));
  s.velocity = rate_hz * (p1.position() - p0.position());
  return s;
}

struct Lead
{
  double gap{kInf};
  double speed{0.0};
};

// Nearest agent ahead whose centre lies within the corridor around the (shifted) path.
template <class LateralFn>
Lead find_lead(
  const ReferencePath & path, double s_ego, double ego_length, LateralFn lateral_at,
  const std::vector<AgentForecast> & agents, double corridor)
{
  Lead lead;
  for (const auto & a : agents) {
    const auto [sa, da] = path.project(a.pose.position());
    if (sa <= s_ego || std::abs(da - lateral_at(sa)) > corridor) {
      continue;
    }
    const double gap = sa - s_ego - 0.5 * (ego_length + a.length);
    if (gap < lead.gap) {
      lead.gap = gap;
      lead.speed = dot(a.velocity, path.pose_at(sa).heading_vector());
    }
  }
  return lead;
}

// Earliest constant-velocity forecast (sampled every 0.5 s up to lookahead) that puts an
// agent inside the corridor ahead of the ego.
Lead find_lead_forecast(
  const ReferencePath & path, double s_ego, double ego_length,
  const std::vector<AgentForecast> & agents, double corridor, double lookahead)
{
  Lead lead;
  for (const auto & a : agents) {
    for (double tau = 0.0; tau <= lookahead + 1e-9; tau += 0.5) {
      const Vec2 p = a.pose.position() + tau * a.velocity;
      const auto [sa, da] = path.project(p);
      if (sa <= s_ego || std::abs(da) > corridor) {
        continue;
      }
      const double gap = sa - s_ego - 0.5 * (ego_length + a.length);
      if (gap < lead.gap) {
        lead.gap = gap;
        lead.speed = dot(a.velocity, path.pose_at(sa).heading_vector());
      }
      break;
    }
  }
  return lead;
}

std::vector<AgentForecast> observe(const Scenario & scenario, double t)
{
  std::vector<AgentForecast> out;
  for (const auto & a : scenario.agents) {
    if (a.id == scenario.ego_id) continue;
    if (auto snap = snapshot(a, t, scenario.rate_hz)) {
      out.push_back({a.id, snap->pose, snap->velocity, a.length, a.width});
    }
  }
  return out;
}

double blended_lateral(double s, double s_anchor, double d_anchor, double target, double blend)
{
  const double w = blend > 0.0 ? std::clamp((s - s_anchor) / blend, 0.0, 1.0) : 1.0;
  return d_anchor + (target - d_anchor) * w;
}

Pose2D shifted_pose(
  const ReferencePath & path, double s, double s_anchor, double d_anchor, double target,
  double blend)
{
  const double d = blended_lateral(s, s_anchor, d_anchor, target, blend);
  Pose2D p = path.pose_at(s, d);
  if (blend > 0.0 && s >= s_anchor && s < s_anchor + blend) {
    p = Pose2D(p.x, p.y, p.theta + std::atan((target - d_anchor) / blend));
  }
  return p;
}

}  // namespace

void validate(const IDMParams & p)
{
  if (!positive(p.v0_desired) || !positive(p.T_headway) || !positive(p.s0_min_gap) ||
      !positive(p.a_max) || !positive(p.b_comfort) || !positive(p.delta_exponent)) {
    throw std::invalid_argument("IDM parameters must be positive and finite");
  }
}

void validate(const PDMParams & p)
{
  validate(p.idm);
  if (std::find(p.lateral_offsets.begin(), p.lateral_offsets.end(), 0.0) ==
      p.lateral_offsets.end()) {
    throw std::invalid_argument("PDM lateral offsets must contain 0");
  }
  if (std::find(p.velocity_scales.begin(), p.velocity_scales.end(), 1.0) ==
      p.velocity_scales.end()) {
    throw std::invalid_argument("PDM velocity scales must contain 1.0");
  }
  for (double c : p.velocity_scales) {
    if (!(c > 0.0 && c <= 1.0)) {
      throw std::invalid_argument("PDM velocity scales must lie in (0, 1]");
    }
  }
  const auto & w = p.weights;
  if (!(w.w_progress >= 0.0 && w.w_timing >= 0.0 && w.w_comfort >= 0.0)) {
    throw std::invalid_argument("PDM weights must be non-negative");
  }
  if (!positive(p.horizon_s) || !positive(p.replan_s) || !(p.blend_length >= 0.0)) {
    throw std::invalid_argument("PDM horizon, replan period and blend length must be positive");
  }
}

std::string to_string(PlannerKind kind)
{
  switch (kind) {
    case PlannerKind::Replay: return "replay";
    case PlannerKind::IDM: return "idm";
    case PlannerKind::RuleBased: return "rule";
    case PlannerKind::PDM: return "pdm";
  }
  return "?";
}

std::optional<PlannerKind> parse_planner(const std::string & name)
{
  if (name == "replay") return PlannerKind::Replay;
  if (name == "idm") return PlannerKind::IDM;
  if (name == "rule" || name == "rule_based") return PlannerKind::RuleBased;
  if (name == "pdm") return PlannerKind::PDM;
  return std::nullopt;
}

double idm_accel(double v, double gap, double dv, const IDMParams & p)
{
  if (!(gap > 0.0)) {
    return -2.0 * p.b_comfort;
  }
  const double free = std::pow(std::max(v, 0.0) / p.v0_desired, p.delta_exponent);
  double interaction = 0.0;
  if (std::isfinite(gap)) {
    const double s_star =
      p.s0_min_gap +
      std::max(0.0, v * p.T_headway + v * dv / (2.0 * std::sqrt(p.a_max * p.b_comfort)));
    interaction = (s_star / gap) * (s_star / gap);
  }
  const double a = p.a_max * (1.0 - free - interaction);
  return std::clamp(a, -2.0 * p.b_comfort, p.a_max);
}

double rule_based_step(
  double speed, double replay_speed, double ttc, const RuleParams & rule, const IDMParams & idm,
  double dt)
{
  double out = speed;
  if (ttc < rule.t_brake) {
    out = speed - idm.b_comfort * dt;
  } else if (ttc > rule.t_clear && speed < replay_speed) {
    out = std::min(replay_speed, speed + idm.a_max * dt);
  }
  return std::max(0.0, out);
}

// ---------------------------------------------------------------------------------------

ReferencePath::ReferencePath(const std::vector<Vec2> & points)
{
  for (const Vec2 & p : points) {
    if (points_.empty() || norm(p - points_.back()) > 1e-6) {
      points_.push_back(p);
    }
  }
  if (points_.size() < 2) {
    throw std::invalid_argument("ReferencePath needs at least two distinct points");
  }
  s_.assign(points_.size(), 0.0);
  for (std::size_t i = 1; i < points_.size(); ++i) {
    s_[i] = s_[i - 1] + norm(points_[i] - points_[i - 1]);
  }
}

Pose2D ReferencePath::pose_at(double s, double lateral) const
{
  std::size_t i = 0;
  if (s >= s_.back()) {
    i = points_.size() - 2;
  } else if (s > 0.0) {
    i = static_cast<std::size_t>(std::upper_bound(s_.begin(), s_.end(), s) - s_.begin()) - 1;
  }
  const Vec2 a = points_[i];
  const Vec2 b = points_[i + 1];
  const double len = s_[i + 1] - s_[i];
  const Vec2 t = (1.0 / len) * (b - a);
  const Vec2 n{-t.y, t.x};
  const Vec2 p = a + (s - s_[i]) * t + lateral * n;
  return Pose2D(p.x, p.y, std::atan2(t.y, t.x));
}

std::pair<double, double> ReferencePath::project(Vec2 p) const
{
  double best_d2 = kInf;
  double best_s = 0.0;
  double best_lat = 0.0;
  const std::size_t n = points_.size() - 1;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = points_[i];
    const Vec2 ab = points_[i + 1] - a;
    const double len = s_[i + 1] - s_[i];
    double u = dot(p - a, ab) / (len * len);
    const double lo = i == 0 ? -kInf : 0.0;
    const double hi = i + 1 == n ? kInf : 1.0;
    u = std::clamp(u, lo, hi);
    const Vec2 q = a + u * ab;
    const Vec2 d = p - q;
    const double d2 = dot(d, d);
    if (d2 < best_d2) {
      best_d2 = d2;
      best_s = s_[i] + u * len;
      best_lat = cross(ab, d) / len;
    }
  }
  return {best_s, best_lat};
}

ReferencePath logged_ego_path(const Scenario & scenario)
{
  const AgentTrack & ego = scenario.ego();
  std::vector<Vec2> pts;
  for (int f = 0; f < ego.num_frames(); ++f) {
    if (ego.is_valid(f)) pts.push_back(ego.states[static_cast<std::size_t>(f)].position());
  }
  if (pts.size() == 1) {
    pts.push_back(to_world(ego.states[static_cast<std::size_t>(*ego.first_valid())], {1.0, 0.0}));
  }
  return ReferencePath(pts);
}

ReferencePath centerline_route(const Scenario & scenario, int frame)
{
  const AgentTrack & ego = scenario.ego();
  const Pose2D pose = ego.states[static_cast<std::size_t>(frame)];
  const Vec2 goal = ego.states[static_cast<std::size_t>(*ego.last_valid())].position();
  const LanePolyline * start = nullptr;
  double best = kInf;
  for (const auto & lane : scenario.map.lanes) {
    if (lane.points.size() < 2) continue;
    const ReferencePath lp(lane.points);
    const auto [s, d] = lp.project(pose.position());
    if (s < -1.0 || s > lp.length() + 1.0) continue;
    if (std::cos(normalize_angle(lp.pose_at(s).theta - pose.theta)) < 0.5) continue;
    if (std::abs(d) < best) {
      best = std::abs(d);
      start = &lane;
    }
  }
  if (!start) {
    return logged_ego_path(scenario);
  }
  std::vector<Vec2> pts = start->points;
  const LanePolyline * cur = start;
  for (int hops = 0; hops < 20 && !cur->successors.empty(); ++hops) {
    const LanePolyline * next = nullptr;
    double next_d = kInf;
    for (const auto & id : cur->successors) {
      const LanePolyline * cand = scenario.map.find_lane(id);
      if (!cand || cand->points.size() < 2) continue;
      double d = kInf;
      for (std::size_t i = 1; i < cand->points.size(); ++i) {
        d = std::min(d, point_segment_distance(goal, cand->points[i - 1], cand->points[i]));
      }
      if (d < next_d) {
        next_d = d;
        next = cand;
      }
    }
    if (!next) break;
    pts.insert(pts.end(), next->points.begin(), next->points.end());
    cur = next;
  }
  return ReferencePath(pts);
}

// ---------------------------------------------------------------------------------------

PDMChoice pdm_plan(
  const EgoPlanState & state, const ReferencePath & path, const RoadMap & map,
  const std::vector<AgentForecast> & agents, double v_ref, const PDMParams & p,
  double ego_length, double ego_width, double corridor)
{
  struct Candidate
  {
    double offset;
    double scale;
  };
  std::vector<Candidate> order;
  for (double o : p.lateral_offsets) {
    for (double c : p.velocity_scales) order.push_back({o, c});
  }
  std::stable_sort(order.begin(), order.end(), [](const Candidate & a, const Candidate & b) {
    if (std::abs(a.offset) != std::abs(b.offset)) return std::abs(a.offset) < std::abs(b.offset);
    return a.scale > b.scale;
  });

  const int steps = static_cast<int>(std::lround(p.horizon_s / kDt));
  const bool check_road = !map.drivable.empty();

  // forecasts are shared by every candidate
  struct Projected
  {
    OrientedBox box;
    double s;
    double d;
    double speed;
    double length;
  };
  std::vector<std::vector<Projected>> forecast(static_cast<std::size_t>(steps) + 1);
  for (int j = 0; j <= steps; ++j) {
    const double tau = j * kDt;
    for (const auto & a : agents) {
      const Vec2 pos = a.pose.position() + tau * a.velocity;
      const auto [sa, da] = path.project(pos);
      forecast[static_cast<std::size_t>(j)].push_back(
        {OrientedBox(Pose2D(pos.x, pos.y, a.pose.theta), a.length, a.width), sa, da,
         dot(a.velocity, path.pose_at(sa).heading_vector()), a.length});
    }
  }
  const double reach = 0.5 * std::hypot(ego_length, ego_width);

  PDMChoice best;
  double best_fail_time = -1.0;
  bool have_ok = false;
  for (const Candidate & cand : order) {
    IDMParams idm = p.idm;
    idm.v0_desired = std::max(0.1, cand.scale * v_ref);
    double s = state.s;
    double v = state.speed;
    double time_above = 0.0;
    double sum_abs_a = 0.0;
    double fail_time = kInf;
    std::vector<Pose2D> poses;
    poses.reserve(static_cast<std::size_t>(steps));
    for (int j = 1; j <= steps; ++j) {
      double gap = kInf;
      double lead_speed = 0.0;
      for (const auto & f : forecast[static_cast<std::size_t>(j - 1)]) {
        if (f.s <= s ||
            std::abs(f.d - blended_lateral(f.s, state.s, state.lateral, cand.offset, p.blend_length)) >
              corridor) {
          continue;
        }
        const double g = f.s - s - 0.5 * (ego_length + f.length);
        if (g < gap) {
          gap = g;
          lead_speed = f.speed;
        }
      }
      const double a = idm_accel(v, gap, v - lead_speed, idm);
      s += v * kDt;
      v = std::max(0.0, v + a * kDt);
      sum_abs_a += std::abs(a);
      if (v >= 0.5 * v_ref) time_above += kDt;
      const Pose2D pose =
        shifted_pose(path, s, state.s, state.lateral, cand.offset, p.blend_length);
      poses.push_back(pose);
      const OrientedBox ego_box(pose, ego_length, ego_width);
      bool fail = check_road && !map.on_road(pose.position());
      for (const auto & f : forecast[static_cast<std::size_t>(j)]) {
        if (fail) break;
        const double r = reach + 0.5 * std::hypot(f.box.length, f.box.width);
        const Vec2 diff = f.box.center.position() - pose.position();
        if (dot(diff, diff) > r * r) continue;
        fail = boxes_overlap(ego_box, f.box);
      }
      if (fail) {
        fail_time = j * kDt;
        break;
      }
    }
    if (std::isfinite(fail_time)) {
      if (!have_ok && fail_time > best_fail_time) {
        best_fail_time = fail_time;
        best = {cand.offset, cand.scale, 0.0, true, poses};
      }
      continue;
    }
    const double score = p.weights.w_progress * (s - state.s) +
                         p.weights.w_timing * time_above -
                         p.weights.w_comfort * sum_abs_a / steps;
    if (!have_ok || score > best.score) {
      have_ok = true;
      best = {cand.offset, cand.scale, score, false, std::move(poses)};
    }
  }
  return best;
}

// ---------------------------------------------------------------------------------------

RolloutResult rollout(
  const Scenario & scenario, int start_frame, PlannerKind kind, const PlannerParams & params)
{
  const AgentTrack & ego = scenario.ego();
  if (start_frame < 1 || start_frame >= scenario.num_frames() || !ego.is_valid(start_frame) ||
      !ego.is_valid(start_frame - 1)) {
    throw std::invalid_argument(
      "rollout: ego of " + scenario.id + " is not valid around frame " +
      std::to_string(start_frame));
  }
  validate(params.idm);
  if (kind == PlannerKind::PDM) validate(params.pdm);

  const double rate = scenario.rate_hz;
  const double t0 = start_frame / rate;
  const double t_end = (scenario.num_frames() - 1) / rate;
  const int steps = static_cast<int>(std::lround((t_end - t0) * kPlannerRateHz));
  const double v_start = norm(ego.velocity_at(start_frame, rate));

  ReferencePath path;
  double s = 0.0;
  double lateral = 0.0;
  if (kind == PlannerKind::IDM || kind == PlannerKind::RuleBased) {
    path = logged_ego_path(scenario);
  } else if (kind == PlannerKind::PDM) {
    path = centerline_route(scenario, start_frame);
  }
  if (kind != PlannerKind::Replay) {
    std::tie(s, lateral) = path.project(ego.states[static_cast<std::size_t>(start_frame)].position());
    if (kind != PlannerKind::PDM) lateral = 0.0;
  }
  double v = v_start;

  // PDM plan being executed
  double pdm_offset = lateral;
  double pdm_scale = 1.0;
  double anchor_s = s;
  double anchor_d = lateral;
  const int replan_every =
    std::max(1, static_cast<int>(std::lround(params.pdm.replan_s * kPlannerRateHz)));
  const double v_ref = std::min(params.idm.v0_desired, std::max(v_start, 1.0));

  RolloutResult result;
  result.ego_trace.rate_hz = kPlannerRateHz;
  result.min_gap = kInf;
  const bool check_road = !scenario.map.drivable.empty();

  for (int i = 0; i <= steps; ++i) {
    const double t = t0 + i * kDt;
    Pose2D pose;
    double speed = v;
    if (kind == PlannerKind::Replay) {
      const auto snap = snapshot(ego, t, rate);
      if (!snap) break;
      pose = snap->pose;
      speed = norm(snap->velocity);
    } else if (kind == PlannerKind::PDM) {
      pose = shifted_pose(path, s, anchor_s, anchor_d, pdm_offset, params.pdm.blend_length);
    } else {
      pose = path.pose_at(s);
    }
    result.ego_trace.poses.push_back(pose);
    result.ego_trace.speeds.push_back(speed);

    const OrientedBox ego_box(pose, ego.length, ego.width);
    if (check_road && !scenario.map.on_road(pose.position())) {
      result.off_road = true;
    }
    const auto agents = observe(scenario, t);
    for (const auto & a : agents) {
      const OrientedBox box(a.pose, a.length, a.width);
      if (boxes_overlap(ego_box, box)) {
        result.collided = true;
        result.collision_time_s = t;
        result.collision_frame = static_cast<int>(std::ceil(t * rate - 1e-6));
        result.collided_with = a.id;
        result.other_pose_at_collision = a.pose;
        result.min_gap = 0.0;
        break;
      }
      result.min_gap = std::min(result.min_gap, box_distance(ego_box, box));
    }
    if (result.collided || i == steps || kind == PlannerKind::Replay) {
      if (result.collided) break;
      continue;
    }

    if (kind == PlannerKind::IDM) {
      const Lead lead = find_lead_forecast(
        path, s, ego.length, agents, params.corridor, params.lead_lookahead_s);
      IDMParams idm = params.idm;
      idm.v0_desired = v_ref;
      const double a = idm_accel(v, lead.gap, v - lead.speed, idm);
      s += v * kDt;
      v = std::max(0.0, v + a * kDt);
    } else if (kind == PlannerKind::RuleBased) {
      const Lead lead =
        find_lead(path, s, ego.length, [](double) { return 0.0; }, agents, params.corridor);
      double ttc = kInf;
      if (lead.gap <= 0.0) {
        ttc = 0.0;
      } else if (v - lead.speed > 0.0) {
        ttc = lead.gap / (v - lead.speed);
      }
      const auto logged = snapshot(ego, t, rate);
      const double replay_speed = logged ? norm(logged->velocity) : v;
      v = rule_based_step(v, replay_speed, ttc, params.rule, params.idm, kDt);
      s += v * kDt;
    } else {
      const double d_now = blended_lateral(s, anchor_s, anchor_d, pdm_offset, params.pdm.blend_length);
      if (i % replan_every == 0) {
        const PDMChoice choice = pdm_plan(
          {s, d_now, v}, path, scenario.map, agents, v_ref, params.pdm, ego.length, ego.width,
          params.corridor);
        pdm_offset = choice.lateral_offset;
        pdm_scale = choice.velocity_scale;
        anchor_s = s;
        anchor_d = d_now;
      }
      const double off = pdm_offset;
      const double as = anchor_s;
      const double ad = anchor_d;
      const double blend = params.pdm.blend_length;
      const Lead lead = find_lead(
        path, s, ego.length,
        [&](double sa) { return blended_lateral(sa, as, ad, off, blend); }, agents,
        params.corridor);
      IDMParams idm = params.pdm.idm;
      idm.v0_desired = std::max(0.1, pdm_scale * v_ref);
      const double a = idm_accel(v, lead.gap, v - lead.speed, idm);
      s += v * kDt;
      v = std::max(0.0, v + a * kDt);
    }
  }
  return result;
}

RolloutResult rollout(
  const GeneratedScenario & generated, PlannerKind kind, const PlannerParams & params)
{
  return rollout(generated.scenario, generated.t_hist, kind, params);
}

}  // namespace forge
