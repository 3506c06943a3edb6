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

#ifndef FORGE__PREDICTOR_HPP_
#define FORGE__PREDICTOR_HPP_

#include "forge/nn.hpp"
#include "forge/pipeline.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace forge
{

inline constexpr int kSceneDim = 64;
inline constexpr int kCondDim = kSceneDim + 5 + 1;
inline constexpr int kSegmentDim = 11;
inline constexpr int kAnchorLocalDim = 8;
/// Offset of the anchor from the ego's constant-speed position at the requested time.
inline constexpr int kAnchorPriorDim = 5;
inline constexpr int kAnchorInputDim = kAnchorLocalDim + kAnchorPriorDim + kCondDim;
inline constexpr int kCandidateDim = 10;
inline constexpr int kEgoPoseDim = 4;
inline constexpr int kAttackerStateDim = 5;

struct PredictorConfig
{
  double anchor_radius{2.0};
  double anchor_spacing{1.0};
  /// Anchors and lane vectors are kept within this half-size box around the ego (m).
  double window{120.0};
  double local_radius{10.0};
  /// The offset head's box is snapped to the requested pattern with this band fraction;
  /// negative keeps the raw regression.
  double snap_fraction{0.7};
  /// generate() tries this many attackers in order of selector probability.
  int attacker_proposals{3};
};

struct PredictorModel
{
  PredictorConfig config;
  Mlp encoder;  ///< fixed random segment network, not trained
  Mlp anchor_scorer;
  Mlp ego_regressor;
  Mlp attacker_offset;
  Mlp attacker_selector;

  static PredictorModel create(const PredictorConfig & config, std::uint64_t seed);
};

/// Per-polyline max-pool of the segment network, then mean over polylines. Everything is
/// expressed in the frame of the ego pose at t_hist.
std::vector<double> encode_scene(const Scenario & scenario, int t_hist, const Mlp & encoder,
                                 double window = 120.0);

/// scene ++ one-hot type ++ (tta - 4.5) / 4.5
std::vector<double> condition(const std::vector<double> & scene, CollisionType type, double tta_s);

enum class AnchorLabel { Positive, Negative, Ignore };

struct Anchor
{
  Pose2D pose;  ///< world frame, on a lane centreline point
  std::vector<double> local_feature;
  AnchorLabel label{AnchorLabel::Negative};
};

std::vector<Anchor> sample_anchors(
  const Scenario & scenario, int t_hist, const PredictorConfig & config);

/// Positive when within r of the impact point (closed ball). With ignore_outer > r, anchors
/// in (r, ignore_outer] are marked Ignore; otherwise everything else is Negative.
void label_anchors(
  std::vector<Anchor> & anchors, Vec2 ego_impact_point, double r, double ignore_outer = 0.0);

struct EgoPrediction
{
  OrientedBox box;
  double score{0.0};
  int anchor_index{-1};
};

/// Throws std::invalid_argument when the map yields no anchors.
EgoPrediction predict_ego_box(
  const Scenario & scenario, int t_hist, const std::vector<double> & cond,
  const PredictorModel & model);
/// Lower-level entry point over precomputed anchors (argmax, ties to the lowest index).
EgoPrediction predict_ego_box(
  const Scenario & scenario, int t_hist, const std::vector<Anchor> & anchors,
  const std::vector<double> & cond, const PredictorModel & model);

/// Offset head applied in the ego-impact frame. Sees the condition, the ego pose and the
/// selected attacker's t_hist state relative to the predicted ego box.
OrientedBox predict_attacker_box(
  const OrientedBox & ego_box, CollisionType type, const std::vector<double> & cond,
  const Scenario & scenario, int t_hist, const AgentTrack & attacker,
  const PredictorModel & model);

struct AttackerSelection
{
  std::string id;
  std::vector<std::string> candidates;
  std::vector<double> probabilities;
};

/// Throws std::invalid_argument when there are no candidates.
AttackerSelection select_attacker(
  const Scenario & scenario, int t_hist, const std::vector<double> & cond,
  const PredictorModel & model);

struct TrainHyper
{
  double lr{0.01};
  int epochs{60};
  int batch{16};
  std::uint64_t seed{0};
  int negatives{64};
};

struct TrainReport
{
  std::vector<double> epoch_loss;
};

/// Plain minibatch SGD over the four heads. Throws std::invalid_argument on an empty corpus
/// and std::runtime_error on a non-finite loss.
TrainReport train(
  PredictorModel & model, const std::vector<GeneratedScenario> & corpus, const TrainHyper & hyper);

struct GradCheckResult
{
  std::string head;
  double max_rel_error{0.0};
  int checked{0};
  int skipped_kinks{0};
};

/// Central differences against the analytic gradient on one batch. Parameters whose
/// perturbation flips a rectifier or smooth-L1 branch are skipped and counted.
std::vector<GradCheckResult> gradient_check(
  PredictorModel & model, const std::vector<GeneratedScenario> & batch, std::uint64_t seed,
  int params_per_head, double step = 1e-5);

struct PredictedPattern
{
  OrientedBox ego_box;
  OrientedBox attacker_box;
  std::string attacker_id;
  double anchor_score{0.0};
  double attacker_probability{0.0};
};

PredictedPattern predict_pattern(
  const Scenario & scenario, int t_hist, CollisionType type, double tta_s,
  const PredictorModel & model);

/// Learned generation: predicted pattern realized by the quintic planner, then gated. The
/// selector's top proposals are tried in turn until one passes the gate.
BuildResult generate(
  const Scenario & scenario, int t_hist, const GenerationRequest & request,
  const PredictorModel & model, const PipelineOptions & options = {},
  GateMode gate = GateMode::Full);

}  // namespace forge

#endif  // FORGE__PREDICTOR_HPP_
