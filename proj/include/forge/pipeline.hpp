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

#ifndef FORGE__PIPELINE_HPP_
#define FORGE__PIPELINE_HPP_

#include "forge/collision_patterns.hpp"
#include "forge/parallel.hpp"
#include "forge/quintic.hpp"
#include "forge/scene.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace forge
{

inline constexpr int kDefaultHistoryFrames = 8;
inline constexpr double kMinTta = 4.5;
inline constexpr double kMaxTta = 9.0;
inline constexpr int kNumTtaBuckets = 3;

struct GenerationRequest
{
  CollisionType ctype{CollisionType::RearEnd};
  double tta_s{kMinTta};
  std::uint64_t seed{0};
};

/// "<base>:<ctype>:<tta with one decimal>"
std::string generated_id(const std::string & base_id, const GenerationRequest & request);

/// Throws std::invalid_argument unless tta_s lies in [4.5, 9.0] on the 0.5 s grid.
int tta_frames(double tta_s, double rate_hz = kSceneRateHz);

/// Bucket index 0..2 for [4.5, 6.0), [6.0, 7.5), [7.5, 9.0].
int tta_bucket(double tta_s);
std::string tta_bucket_label(int bucket);
/// The 0.5 s grid values inside a bucket.
std::vector<double> bucket_ttas(int bucket);

enum class InfeasibleReason {
  NoCandidates,
  Kinematics,
  OffRoad,
  ThirdPartyCollision,
  EarlyCollision,
  TypeMismatch,
  NoContact,
};

std::string to_string(InfeasibleReason reason);

struct Infeasible
{
  InfeasibleReason reason{InfeasibleReason::NoCandidates};
  std::string detail;
};

struct GeneratedScenario
{
  Scenario scenario;  ///< attacker track replaced after t_hist
  CollisionPattern pattern;
  GenerationRequest request;
  int t_hist{kDefaultHistoryFrames};
  int collision_frame{0};
};

using BuildResult = std::variant<GeneratedScenario, Infeasible>;

struct PipelineOptions
{
  FeasibilityLimits limits;
  int t_hist{kDefaultHistoryFrames};
  int n_angles{5};
  /// End speed = factor * attacker speed at t_hist, factors tried in order.
  std::vector<double> end_speed_factors{1.0, 0.6};
  /// RearEnd attackers end at least this much faster than the ego.
  double rear_end_closing_floor{1.5};
  double min_end_speed{1.0};
  /// Required displacement over the last 2 s of history for a candidate attacker.
  double min_history_motion{1.0};
};

/// Non-ego agents valid on frames [0, t_hist] that moved more than min_motion metres over
/// the last 2 s, nearest to the ego first (ties by id).
std::vector<std::string> candidate_attackers(
  const Scenario & scenario, int t_hist, double min_motion = 1.0);

/// Entry headings used for the JC / LTAP split: each track's heading at t_hist.
double entry_heading(const AgentTrack & track, int t_hist);

/// Plans the attacker from its t_hist state to target at collision_frame and returns the
/// replacement track: logged frames up to t_hist, the sampled plan up to the collision
/// frame, then constant end velocity. The sampled plan is written to plan_out when given.
AgentTrack plan_attacker_track(
  const Scenario & scenario, const AgentTrack & attacker, int t_hist, int collision_frame,
  const Pose2D & target, double end_speed, Trajectory * plan_out = nullptr);

/// Copy of the scenario with the attacker's track swapped for a replacement.
Scenario with_track(const Scenario & scenario, const AgentTrack & replacement);

enum class GateMode { Full, KinematicOnly, None };

/// Feasibility gate shared by the pipeline and learned generation. The scenario supplies
/// the ego and third agents; attacker is the replacement track.
std::optional<Infeasible> check_gate(
  const Scenario & scenario, const AgentTrack & attacker, const Trajectory & plan, int t_hist,
  int collision_frame, CollisionType ctype, const PipelineOptions & options, GateMode mode);

/// Deterministic: identical inputs give identical output.
BuildResult build(
  const Scenario & scenario, const GenerationRequest & request,
  const PipelineOptions & options = {});

/// Open-loop replay of an ego / attacker pair after t_hist.
struct ReplayImpact
{
  std::optional<int> first_contact_frame;
  std::optional<CollisionType> realized;  ///< classification at the first contact
  double impact_angle_deg{0.0};
  bool third_party_overlap{false};  ///< attacker touched a third agent before contact
};

ReplayImpact replay_impact(
  const Scenario & scenario, const std::string & attacker_id, int t_hist);

struct CellManifest
{
  CollisionType ctype{CollisionType::RearEnd};
  int bucket{0};
  int requested{0};
  int attempts{0};
  int succeeded{0};
  std::map<std::string, int> failures;
};

struct Corpus
{
  std::vector<GeneratedScenario> items;  ///< ordered by cell, then scenario order
  std::vector<CellManifest> cells;
};

/// Fills every (type, bucket) cell with up to per_cell scenarios, each source scene used at
/// most once per cell. Throws std::invalid_argument when per_cell < 1. Serial and parallel
/// execution give identical corpora.
Corpus build_corpus(
  const std::vector<Scenario> & scenarios, int per_cell, std::uint64_t seed,
  const PipelineOptions & options = {}, Execution exec = Execution::Parallel);

}  // namespace forge

#endif  // FORGE__PIPELINE_HPP_
