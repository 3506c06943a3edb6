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

#include "forge/pipeline.hpp"

#include "forge/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace forge
{

namespace
{
constexpr double kSameLaneBand = 1.0;
}  // namespace

namespace
{

constexpr int kMotionWindowFrames = 4;  // 2 s at 2 Hz
constexpr int kCorpusChunk = 32;


bool overlap_at(const AgentTrack & a, const AgentTrack & b, int frame)
{
  return a.is_valid(frame) && b.is_valid(frame) && boxes_overlap(a.box_at(frame), b.box_at(frame));
}

}  // namespace

std::string generated_id(const std::string & base_id, const GenerationRequest & request)
{
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", request.tta_s);
  return base_id + ":" + to_string(request.ctype) + ":" + buf;
}

int tta_frames(double tta_s, double rate_hz)
{
  if (!std::isfinite(tta_s) || tta_s < kMinTta - 1e-9 || tta_s > kMaxTta + 1e-9) {
    throw std::invalid_argument("tta " + std::to_string(tta_s) + " outside [4.5, 9.0]");
  }
  const double x = tta_s * 2.0;
  if (std::abs(x - std::round(x)) > 1e-6) {
    throw std::invalid_argument("tta " + std::to_string(tta_s) + " is not on the 0.5 s grid");
  }
  return static_cast<int>(std::lround(tta_s * rate_hz));
}

int tta_bucket(double tta_s)
{
  if (tta_s < 6.0 - 1e-9) return 0;
  if (tta_s < 7.5 - 1e-9) return 1;
  return 2;
}

std::string tta_bucket_label(int bucket)
{
  switch (bucket) {
    case 0:
      return "4.5-6.0";
    case 1:
      return "6.0-7.5";
    default:
      return "7.5-9.0";
  }
}

std::vector<double> bucket_ttas(int bucket)
{
  switch (bucket) {
    case 0:
      return {4.5, 5.0, 5.5};
    case 1:
      return {6.0, 6.5, 7.0};
    default:
      return {7.5, 8.0, 8.5, 9.0};
  }
}

std::string to_string(InfeasibleReason reason)
{
  switch (reason) {
    case InfeasibleReason::NoCandidates:
      return "no_candidates";
    case InfeasibleReason::Kinematics:
      return "kinematics";
    case InfeasibleReason::OffRoad:
      return "off_road";
    case InfeasibleReason::ThirdPartyCollision:
      return "third_party_collision";
    case InfeasibleReason::EarlyCollision:
      return "early_collision";
    case InfeasibleReason::TypeMismatch:
      return "type_mismatch";
    case InfeasibleReason::NoContact:
      return "no_contact";
  }
  return "unknown";
}

std::vector<std::string> candidate_attackers(
  const Scenario & scenario, int t_hist, double min_motion)
{
  if (t_hist < kMotionWindowFrames) {
    throw std::invalid_argument("candidate_attackers: t_hist needs at least 4 frames of history");
  }
  const Pose2D ego = ego_pose_at(scenario, t_hist);
  std::vector<std::pair<double, std::string>> ranked;
  for (const auto & a : scenario.agents) {
    if (a.id == scenario.ego_id || a.num_frames() <= t_hist) {
      continue;
    }
    bool full = true;
    for (int f = 0; f <= t_hist && full; ++f) {
      full = a.is_valid(f);
    }
    if (!full) {
      continue;
    }
    const double moved =
      norm(a.states[t_hist].position() - a.states[t_hist - kMotionWindowFrames].position());
    if (moved <= min_motion) {
      continue;
    }
    ranked.emplace_back(norm(a.states[t_hist].position() - ego.position()), a.id);
  }
  std::sort(ranked.begin(), ranked.end());
  std::vector<std::string> out;
  for (auto & r : ranked) {
    out.push_back(std::move(r.second));
  }
  return out;
}

double entry_heading(const AgentTrack & track, int t_hist)
{
  return track.states.at(static_cast<std::size_t>(t_hist)).theta;
}

AgentTrack plan_attacker_track(
  const Scenario & scenario, const AgentTrack & attacker, int t_hist, int collision_frame,
  const Pose2D & target, double end_speed, Trajectory * plan_out)
{
  if (collision_frame <= t_hist) {
    throw std::invalid_argument("plan_attacker_track: collision frame must follow t_hist");
  }
  const double rate = scenario.rate_hz;
  QuinticSpec spec;
  spec.start.pos = attacker.states.at(static_cast<std::size_t>(t_hist)).position();
  spec.start.vel = attacker.velocity_at(t_hist, rate);
  spec.start.acc = attacker.acceleration_at(t_hist, rate);
  spec.end.pos = target.position();
  spec.end.vel = end_speed * target.heading_vector();
  spec.horizon = (collision_frame - t_hist) / rate;
  Trajectory traj = plan(spec, rate);

  const int n_frames = std::max(scenario.num_frames(), collision_frame + 1);
  AgentTrack out = attacker;
  out.states.resize(static_cast<std::size_t>(n_frames));
  out.valid.resize(static_cast<std::size_t>(n_frames), false);
  for (int f = t_hist + 1; f < n_frames; ++f) {
    Pose2D p;
    if (f <= collision_frame) {
      p = traj.poses[static_cast<std::size_t>(f - t_hist)];
    } else {
      const Vec2 q = target.position() + ((f - collision_frame) / rate) * spec.end.vel;
      p = Pose2D(q.x, q.y, target.theta);
    }
    out.states[static_cast<std::size_t>(f)] = p;
    out.valid[static_cast<std::size_t>(f)] = true;
  }
  // the last planned sample carries the exact target pose
  out.states[static_cast<std::size_t>(collision_frame)] = target;
  if (plan_out) {
    *plan_out = std::move(traj);
  }
  return out;
}

Scenario with_track(const Scenario & scenario, const AgentTrack & replacement)
{
  Scenario out = scenario;
  AgentTrack * slot = out.find_agent(replacement.id);
  if (!slot) {
    throw std::invalid_argument("with_track: unknown agent " + replacement.id);
  }
  *slot = replacement;
  out.update_duration();
  return out;
}

std::optional<Infeasible> check_gate(
  const Scenario & scenario, const AgentTrack & attacker, const Trajectory & plan, int t_hist,
  int collision_frame, CollisionType ctype, const PipelineOptions & options, GateMode mode)
{
  if (mode == GateMode::None) {
    return std::nullopt;
  }
  if (!feasible(plan, options.limits)) {
    return Infeasible{InfeasibleReason::Kinematics, "attacker " + attacker.id};
  }
  if (mode == GateMode::KinematicOnly) {
    return std::nullopt;
  }
  for (const auto & p : plan.poses) {
    if (!scenario.map.on_road(p.position())) {
      return Infeasible{InfeasibleReason::OffRoad, "attacker " + attacker.id};
    }
  }
  const AgentTrack & ego = scenario.ego();
  for (const auto & other : scenario.agents) {
    if (other.id == ego.id || other.id == attacker.id) {
      continue;
    }
    for (int f = t_hist + 1; f < collision_frame; ++f) {
      if (overlap_at(attacker, other, f)) {
        return Infeasible{
          InfeasibleReason::ThirdPartyCollision, "attacker " + attacker.id + " hits " + other.id};
      }
    }
  }
  std::optional<int> first;
  for (int f = t_hist + 1; f <= collision_frame && !first; ++f) {
    if (overlap_at(attacker, ego, f)) {
      first = f;
    }
  }
  if (!first) {
    return Infeasible{InfeasibleReason::NoContact, "attacker " + attacker.id};
  }
  if (*first < collision_frame - 1) {
    return Infeasible{
      InfeasibleReason::EarlyCollision, "contact at frame " + std::to_string(*first)};
  }
  const auto realized = classify(
    ego.states[static_cast<std::size_t>(*first)], attacker.states[static_cast<std::size_t>(*first)],
    entry_heading(ego, t_hist), entry_heading(attacker, t_hist));
  if (realized != ctype) {
    return Infeasible{
      InfeasibleReason::TypeMismatch,
      "realized " + (realized ? to_string(*realized) : std::string("unclassified"))};
  }
  return std::nullopt;
}

BuildResult build(
  const Scenario & scenario, const GenerationRequest & request, const PipelineOptions & options)
{
  const int t_hist = options.t_hist;
  const int k = t_hist + tta_frames(request.tta_s, scenario.rate_hz);
  const AgentTrack & ego = scenario.ego();
  if (!ego.is_valid(t_hist) || !ego.is_valid(k)) {
    throw std::invalid_argument(
      "build: ego of " + scenario.id + " is not valid through frame " + std::to_string(k));
  }
  const auto candidates = candidate_attackers(scenario, t_hist, options.min_history_motion);
  if (candidates.empty()) {
    return Infeasible{InfeasibleReason::NoCandidates, "no moving agent in " + scenario.id};
  }
  const OrientedBox ego_box = ego.box_at(k);
  const Pose2D ego_hist = ego.states[static_cast<std::size_t>(t_hist)];
  const double ego_speed_k = norm(ego.velocity_at(k, scenario.rate_hz));
  const bool two_sided = request.ctype == CollisionType::LaneChange ||
                         request.ctype == CollisionType::JunctionCrossing;
  Rng rng(mix_seed(request.seed, 0xC011153ULL));

  std::map<InfeasibleReason, int> failures;
  std::string last_detail;
  for (const auto & atk_id : candidates) {
    const AgentTrack & atk = *scenario.find_agent(atk_id);
    const double v_atk = norm(atk.velocity_at(t_hist, scenario.rate_hz));
    std::vector<Side> sides{Side::Right};
    if (two_sided) {
      // same-lane attackers default to the left side
      const bool left =
        to_local(ego_hist, atk.states[static_cast<std::size_t>(t_hist)].position()).y > -kSameLaneBand;
      sides = left ? std::vector<Side>{Side::Left, Side::Right}
                   : std::vector<Side>{Side::Right, Side::Left};
    }
    for (Side side : sides) {
      const double nominal = signed_nominal_angle(request.ctype, side);
      const double delta = rng.uniform(-kAngleTolerance, kAngleTolerance);
      const double contact = rng.uniform(-1.0, 1.0);
      std::vector<std::pair<double, double>> angles;  // (angle, contact)
      angles.emplace_back(nominal + delta, contact);
      auto grid = enumerate_candidates(ego_box, request.ctype, options.n_angles, side, atk.length, atk.width);
      std::stable_sort(grid.begin(), grid.end(), [&](const auto & a, const auto & b) {
        return std::abs(rad2deg(normalize_angle(deg2rad(a.angle_deg - nominal)))) <
               std::abs(rad2deg(normalize_angle(deg2rad(b.angle_deg - nominal))));
      });
      for (const auto & g : grid) {
        angles.emplace_back(g.angle_deg, g.contact);
      }
      for (const auto & [angle, c] : angles) {
        const Pose2D target = target_pose(ego_box, request.ctype, angle, c, atk.length, atk.width);
        for (double factor : options.end_speed_factors) {
          double end_speed = std::max(options.min_end_speed, factor * v_atk);
          if (request.ctype == CollisionType::RearEnd) {
            end_speed = std::max(end_speed, ego_speed_k + options.rear_end_closing_floor);
          }
          Trajectory plan_traj;
          const AgentTrack replaced =
            plan_attacker_track(scenario, atk, t_hist, k, target, end_speed, &plan_traj);
          const auto gate = check_gate(
            scenario, replaced, plan_traj, t_hist, k, request.ctype, options, GateMode::Full);
          if (gate) {
            ++failures[gate->reason];
            last_detail = gate->detail;
            continue;
          }
          GeneratedScenario out;
          out.scenario = with_track(scenario, replaced);
          out.scenario.id = generated_id(scenario.id, request);
          out.pattern.ego_box = ego_box;
          out.pattern.attacker_box = OrientedBox(target, atk.length, atk.width);
          out.pattern.attacker_id = atk.id;
          out.pattern.ctype = request.ctype;
          out.pattern.tta_s = request.tta_s;
          out.request = request;
          out.t_hist = t_hist;
          out.collision_frame = k;
          return out;
        }
      }
    }
  }
  // most frequent failure, ties broken by enum order
  auto best = failures.begin();
  for (auto it = failures.begin(); it != failures.end(); ++it) {
    if (it->second > best->second) {
      best = it;
    }
  }
  return Infeasible{best->first, last_detail};
}

ReplayImpact replay_impact(const Scenario & scenario, const std::string & attacker_id, int t_hist)
{
  ReplayImpact out;
  const AgentTrack & ego = scenario.ego();
  const AgentTrack * atk = scenario.find_agent(attacker_id);
  if (!atk) {
    throw std::invalid_argument("replay_impact: unknown attacker " + attacker_id);
  }
  const int n = scenario.num_frames();
  for (int f = t_hist + 1; f < n; ++f) {
    if (overlap_at(*atk, ego, f)) {
      out.first_contact_frame = f;
      const Pose2D & pe = ego.states[static_cast<std::size_t>(f)];
      const Pose2D & pa = atk->states[static_cast<std::size_t>(f)];
      out.impact_angle_deg = relative_heading(pe, pa);
      out.realized = classify(pe, pa, entry_heading(ego, t_hist), entry_heading(*atk, t_hist));
      break;
    }
  }
  const int until = out.first_contact_frame.value_or(n);
  for (const auto & other : scenario.agents) {
    if (other.id == ego.id || other.id == attacker_id) {
      continue;
    }
    for (int f = t_hist + 1; f < until; ++f) {
      if (overlap_at(*atk, other, f)) {
        out.third_party_overlap = true;
      }
    }
  }
  return out;
}

namespace
{

struct SceneOutcome
{
  std::optional<GeneratedScenario> success;
  std::vector<InfeasibleReason> failures;
};

SceneOutcome attempt_scene(
  const Scenario & scene, int cell, int scene_index, int bucket, CollisionType ctype,
  std::uint64_t seed, const PipelineOptions & options)
{
  SceneOutcome out;
  Rng rng(mix_seed(seed, static_cast<std::uint64_t>(cell) * 1000003ULL +
                           static_cast<std::uint64_t>(scene_index)));
  auto ttas = bucket_ttas(bucket);
  for (int i = static_cast<int>(ttas.size()) - 1; i > 0; --i) {
    std::swap(ttas[static_cast<std::size_t>(i)], ttas[static_cast<std::size_t>(rng.uniform_int(0, i))]);
  }
  for (double tta : ttas) {
    GenerationRequest req{ctype, tta, rng.next()};
    const int k = options.t_hist + tta_frames(tta, scene.rate_hz);
    if (!scene.ego().is_valid(k)) {
      out.failures.push_back(InfeasibleReason::NoCandidates);
      continue;
    }
    auto result = build(scene, req, options);
    if (auto * g = std::get_if<GeneratedScenario>(&result)) {
      out.success = std::move(*g);
      break;
    }
    out.failures.push_back(std::get<Infeasible>(result).reason);
  }
  return out;
}

}  // namespace

Corpus build_corpus(
  const std::vector<Scenario> & scenarios, int per_cell, std::uint64_t seed,
  const PipelineOptions & options, Execution exec)
{
  if (per_cell < 1) {
    throw std::invalid_argument("build_corpus: per_cell must be >= 1");
  }
  Corpus corpus;
  const int n = static_cast<int>(scenarios.size());
  for (CollisionType ctype : kAllCollisionTypes) {
    for (int bucket = 0; bucket < kNumTtaBuckets; ++bucket) {
      const int cell = type_index(ctype) * kNumTtaBuckets + bucket;
      CellManifest manifest;
      manifest.ctype = ctype;
      manifest.bucket = bucket;
      manifest.requested = per_cell;
      for (int start = 0; start < n && manifest.succeeded < per_cell; start += kCorpusChunk) {
        const int count = std::min(kCorpusChunk, n - start);
        std::vector<SceneOutcome> outcomes(static_cast<std::size_t>(count));
        parallel_for(count, exec, [&](int j) {
          outcomes[static_cast<std::size_t>(j)] = attempt_scene(
            scenarios[static_cast<std::size_t>(start + j)], cell, start + j, bucket, ctype, seed,
            options);
        });
        for (auto & o : outcomes) {
          if (manifest.succeeded >= per_cell) {
            break;
          }
          for (auto r : o.failures) {
            ++manifest.failures[to_string(r)];
            ++manifest.attempts;
          }
          if (o.success) {
            ++manifest.attempts;
            ++manifest.succeeded;
            corpus.items.push_back(std::move(*o.success));
          }
        }
      }
      corpus.cells.push_back(std::move(manifest));
    }
  }
  return corpus;
}

}  // namespace forge
