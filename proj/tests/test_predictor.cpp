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

#include "forge/checkpoint.hpp"
#include "forge/nn.hpp"
#include "forge/pipeline.hpp"
#include "forge/predictor.hpp"
#include "forge/synth.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

using namespace forge;

namespace
{

const Corpus & small_corpus()
{
  static const Corpus c = build_corpus(synth_batch(SceneKind::FourWay, 16, 4), 1, 3);
  return c;
}

}  // namespace

TEST(Nn, SmoothL1BothBranches)
{
  std::vector<double> d;
  const double loss = smooth_l1({0.5, 3.0}, {0.0, 0.0}, &d);
  EXPECT_NEAR(loss, 0.5 * 0.25 + (3.0 - 0.5), 1e-12);
  EXPECT_NEAR(d[0], 0.5, 1e-12);
  EXPECT_NEAR(d[1], 1.0, 1e-12);
}

TEST(Nn, SoftmaxCrossEntropy)
{
  std::vector<double> d;
  const double loss = softmax_cross_entropy({0.0, std::log(3.0)}, 1, &d);
  EXPECT_NEAR(loss, -std::log(0.75), 1e-12);
  EXPECT_NEAR(d[0], 0.25, 1e-12);
  EXPECT_NEAR(d[1], -0.25, 1e-12);
  const auto p = softmax({1000.0, 1000.0});
  EXPECT_NEAR(p[0], 0.5, 1e-12);
}

TEST(Nn, BceWithLogits)
{
  double dz = 0.0;
  EXPECT_NEAR(bce_with_logits(0.0, 1.0, 1.0, &dz), std::log(2.0), 1e-12);
  EXPECT_NEAR(dz, -0.5, 1e-12);
  EXPECT_NEAR(bce_with_logits(0.0, 0.0, 2.0, &dz), 2.0 * std::log(2.0), 1e-12);
  EXPECT_NEAR(dz, 1.0, 1e-12);
}

TEST(Nn, BackwardMatchesCentralDifferences)
{
  Rng rng(17);
  Mlp net({4, 6, 3}, rng);
  const std::vector<double> x = {0.3, -1.2, 0.8, 0.05};
  const std::vector<double> w = {1.0, -2.0, 0.5};
  auto objective = [&](const Mlp & m) {
    const auto y = m.forward(x);
    return std::inner_product(y.begin(), y.end(), w.begin(), 0.0);
  };
  MlpCache cache;
  net.forward(x, &cache);
  MlpGrad grad = net.zero_grad();
  net.backward(cache, w, grad);
  const auto params = net.parameters();
  const auto slots = net.gradient_slots(grad);
  const double h = 1e-6;
  for (std::size_t i = 0; i < params.size(); i += 3) {
    const double keep = *params[i];
    *params[i] = keep + h;
    const double up = objective(net);
    *params[i] = keep - h;
    const double down = objective(net);
    *params[i] = keep;
    EXPECT_NEAR(*slots[i], (up - down) / (2 * h), 1e-6) << i;
  }
}

TEST(Predictor, ConditionLayout)
{
  const std::vector<double> scene(kSceneDim, 0.25);
  const auto c = condition(scene, CollisionType::RearEnd, 9.0);
  ASSERT_EQ(static_cast<int>(c.size()), kCondDim);
  EXPECT_EQ(c[kSceneDim + type_index(CollisionType::RearEnd)], 1.0);
  EXPECT_EQ(c[kSceneDim + type_index(CollisionType::LTAP)], 0.0);
  EXPECT_NEAR(c.back(), 1.0, 1e-12);
}

TEST(Predictor, AnchorLabelsUseClosedBall)
{
  std::vector<Anchor> anchors(4);
  anchors[0].pose = Pose2D(0, 0, 0);
  anchors[1].pose = Pose2D(2, 0, 0);
  anchors[2].pose = Pose2D(3, 0, 0);
  anchors[3].pose = Pose2D(5, 0, 0);
  label_anchors(anchors, {0, 0}, 2.0, 4.0);
  EXPECT_EQ(anchors[0].label, AnchorLabel::Positive);
  EXPECT_EQ(anchors[1].label, AnchorLabel::Positive);
  EXPECT_EQ(anchors[2].label, AnchorLabel::Ignore);
  EXPECT_EQ(anchors[3].label, AnchorLabel::Negative);
  EXPECT_THROW(label_anchors(anchors, {0, 0}, 0.0), std::invalid_argument);
}

TEST(Predictor, AnchorsCoverTheMap)
{
  const Scenario s = synth_scene(SceneKind::FourWay, 9);
  const auto anchors = sample_anchors(s, kDefaultHistoryFrames, {});
  ASSERT_GT(anchors.size(), 50u);
  for (const auto & a : anchors) {
    EXPECT_EQ(static_cast<int>(a.local_feature.size()), kAnchorLocalDim);
  }
}

TEST(Predictor, GradientCheckPassesOnEveryHead)
{
  PredictorModel m = PredictorModel::create({}, 8);
  const auto & c = small_corpus();
  ASSERT_GE(c.items.size(), 3u);
  const std::vector<GeneratedScenario> batch(c.items.begin(), c.items.begin() + 3);
  const auto res = gradient_check(m, batch, 1, 12);
  ASSERT_EQ(res.size(), 4u);
  for (const auto & r : res) {
    EXPECT_LT(r.max_rel_error, 1e-4) << r.head;
    EXPECT_GT(r.checked, 0) << r.head;
  }
}

TEST(Predictor, TrainingLowersLossAndIsDeterministic)
{
  const auto & c = small_corpus();
  TrainHyper h;
  h.epochs = 6;
  h.seed = 2;
  PredictorModel a = PredictorModel::create({}, 1);
  PredictorModel b = PredictorModel::create({}, 1);
  const auto ra = train(a, c.items, h);
  const auto rb = train(b, c.items, h);
  ASSERT_EQ(ra.epoch_loss.size(), 6u);
  EXPECT_LT(ra.epoch_loss.back(), ra.epoch_loss.front());
  EXPECT_EQ(ra.epoch_loss, rb.epoch_loss);
  EXPECT_EQ(checkpoint_to_json(a).dump(), checkpoint_to_json(b).dump());
  EXPECT_THROW(train(a, {}, h), std::invalid_argument);
}

TEST(Predictor, GenerateIsPureGivenParameters)
{
  const PredictorModel m = PredictorModel::create({}, 6);
  const Scenario s = synth_scene(SceneKind::FourWay, 31);
  GenerationRequest req;
  req.ctype = CollisionType::JunctionCrossing;
  req.tta_s = 6.5;
  const auto p1 = predict_pattern(s, kDefaultHistoryFrames, req.ctype, req.tta_s, m);
  const auto p2 = predict_pattern(s, kDefaultHistoryFrames, req.ctype, req.tta_s, m);
  EXPECT_EQ(p1.attacker_id, p2.attacker_id);
  EXPECT_EQ(p1.ego_box.center.x, p2.ego_box.center.x);
  EXPECT_EQ(p1.attacker_box.center.theta, p2.attacker_box.center.theta);
  EXPECT_NE(p1.attacker_id, s.ego_id);
}

TEST(Checkpoint, RoundTripPreservesPredictions)
{
  const PredictorModel m = PredictorModel::create({}, 12);
  const auto path = std::filesystem::temp_directory_path() / "forge_ckpt_rt.json";
  save_checkpoint(m, path);
  const PredictorModel back = load_checkpoint(path);
  std::filesystem::remove(path);
  const Scenario s = synth_scene(SceneKind::TwoLane, 3);
  const auto a = predict_pattern(s, kDefaultHistoryFrames, CollisionType::RearEnd, 5.0, m);
  const auto b = predict_pattern(s, kDefaultHistoryFrames, CollisionType::RearEnd, 5.0, back);
  EXPECT_EQ(a.ego_box.center.x, b.ego_box.center.x);
  EXPECT_EQ(a.attacker_box.center.y, b.attacker_box.center.y);
  EXPECT_EQ(a.attacker_probability, b.attacker_probability);
}

TEST(Checkpoint, RejectsTamperedFiles)
{
  const PredictorModel m = PredictorModel::create({}, 12);
  auto j = checkpoint_to_json(m);
  auto bad_format = j;
  bad_format["format"] = "other";
  EXPECT_THROW(checkpoint_from_json(bad_format), CheckpointError);
  auto bad_version = j;
  bad_version["version"] = 2;
  EXPECT_THROW(checkpoint_from_json(bad_version), CheckpointError);
  auto missing = j;
  missing["tensors"].erase("anchor_scorer.0.w");
  EXPECT_THROW(checkpoint_from_json(missing), CheckpointError);
  EXPECT_THROW(load_checkpoint("/nonexistent/forge.json"), CheckpointError);
}
