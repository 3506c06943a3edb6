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

#include "forge/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace forge
{

namespace
{

constexpr double kPosScale = 50.0;
constexpr double kStepScale = 5.0;
constexpr double kOffsetScale = 5.0;
constexpr double kHardNegativeRadius = 15.0;
constexpr int kHidden = 64;

struct Segment
{
  Vec2 a;
  Vec2 b;
};

bool in_window(Vec2 p, double window)
{
  return std::abs(p.x) <= window && std::abs(p.y) <= window;
}

// lane polylines clipped to the window, in the ego frame
std::vector<std::vector<Segment>> lane_segments(
  const Scenario & scenario, const Pose2D & frame, double window)
{
  std::vector<std::vector<Segment>> out;
  for (const auto & lane : scenario.map.lanes) {
    std::vector<Segment> segs;
    for (std::size_t i = 1; i < lane.points.size(); ++i) {
      const Vec2 a = to_local(frame, lane.points[i - 1]);
      const Vec2 b = to_local(frame, lane.points[i]);
      if (in_window(a, window) || in_window(b, window)) {
        segs.push_back({a, b});
      }
    }
    if (!segs.empty()) {
      out.push_back(std::move(segs));
    }
  }
  return out;
}

std::vector<double> segment_input(const Segment & s, int kind)
{
  const Vec2 d = s.b - s.a;
  const double len = norm(d);
  const double c = len > 1e-9 ? d.x / len : 1.0;
  const double sn = len > 1e-9 ? d.y / len : 0.0;
  return {s.a.x / kPosScale, s.a.y / kPosScale, s.b.x / kPosScale, s.b.y / kPosScale, c, sn,
          d.x / kStepScale, d.y / kStepScale, kind == 0 ? 1.0 : 0.0, kind == 1 ? 1.0 : 0.0,
          kind == 2 ? 1.0 : 0.0};
}

std::vector<double> concat(const std::vector<double> & a, const std::vector<double> & b)
{
  std::vector<double> out;
  out.reserve(a.size() + b.size());
  out.insert(out.end(), a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

std::vector<double> pose_features(const Pose2D & p)
{
  return {p.x / kPosScale, p.y / kPosScale, std::cos(p.theta), std::sin(p.theta)};
}

std::vector<double> candidate_features(
  const Scenario & scenario, const AgentTrack & a, int t_hist, const Pose2D & frame)
{
  const Pose2D p = relative_to(frame, a.states[static_cast<std::size_t>(t_hist)]);
  const double speed = norm(a.velocity_at(t_hist, scenario.rate_hz));
  const double dist = std::hypot(p.x, p.y);
  const double bearing = std::atan2(p.y, p.x);
  return {p.x / kPosScale, p.y / kPosScale, std::cos(p.theta), std::sin(p.theta), speed / 10.0,
          a.length / 5.0, a.width / 2.0, dist / kPosScale, std::cos(bearing), std::sin(bearing)};
}

std::vector<double> offset_input(
  const OrientedBox & ego_box, const std::vector<double> & cond, const Scenario & scenario,
  int t_hist, const AgentTrack & attacker)
{
  const Pose2D frame = ego_pose_at(scenario, t_hist);
  std::vector<double> x = cond;
  const auto ego_feat = pose_features(relative_to(frame, ego_box.center));
  x.insert(x.end(), ego_feat.begin(), ego_feat.end());
  const Pose2D rel = relative_to(ego_box.center, attacker.states[static_cast<std::size_t>(t_hist)]);
  x.push_back(rel.x / kPosScale);
  x.push_back(rel.y / kOffsetScale);
  x.push_back(std::cos(rel.theta));
  x.push_back(std::sin(rel.theta));
  x.push_back(norm(attacker.velocity_at(t_hist, scenario.rate_hz)) / 10.0);
  return x;
}

double tta_from_cond(const std::vector<double> & cond)
{
  return kMinTta + cond.back() * (kMaxTta - kMinTta);
}

// Anchor position relative to where the ego would be at the impact time under constant speed.
std::vector<double> arrival_prior(
  const Pose2D & anchor_local, double ego_speed, double tta_s)
{
  const double dx = anchor_local.x - ego_speed * tta_s;
  const double dy = anchor_local.y;
  return {dx / 10.0, dy / 10.0, std::exp(-std::hypot(dx, dy) / 5.0),
          std::clamp(dx, -5.0, 5.0) / 2.5, std::clamp(dy, -5.0, 5.0) / 2.5};
}

std::vector<double> anchor_input(
  const Anchor & anchor, const Pose2D & frame, double ego_speed, const std::vector<double> & cond)
{
  std::vector<double> x = anchor.local_feature;
  const auto prior = arrival_prior(relative_to(frame, anchor.pose), ego_speed, tta_from_cond(cond));
  x.insert(x.end(), prior.begin(), prior.end());
  x.insert(x.end(), cond.begin(), cond.end());
  return x;
}

double ego_speed_at(const Scenario & scenario, int t_hist)
{
  return norm(scenario.ego().velocity_at(t_hist, scenario.rate_hz));
}

std::vector<double> relu_forward(const Mlp & net, const std::vector<double> & x)
{
  auto y = net.forward(x);
  for (auto & v : y) v = std::max(v, 0.0);
  return y;
}

}  // namespace

PredictorModel PredictorModel::create(const PredictorConfig & config, std::uint64_t seed)
{
  Rng rng(mix_seed(seed, 0xF0E6E));
  PredictorModel m;
  m.config = config;
  m.encoder = Mlp({kSegmentDim, kHidden, kSceneDim}, rng);
  m.anchor_scorer = Mlp({kAnchorInputDim, kHidden, kHidden, 1}, rng);
  m.ego_regressor = Mlp({kAnchorInputDim, kHidden, kHidden, 4}, rng);
  m.attacker_offset =
    Mlp({kCondDim + kEgoPoseDim + kAttackerStateDim, kHidden, kHidden, 4}, rng);
  m.attacker_selector = Mlp({kCandidateDim + kCondDim, kHidden, kHidden, 1}, rng);
  return m;
}

std::vector<double> encode_scene(
  const Scenario & scenario, int t_hist, const Mlp & encoder, double window)
{
  const Pose2D frame = ego_pose_at(scenario, t_hist);
  std::vector<double> sum(kSceneDim, 0.0);
  int n_polylines = 0;
  auto pool = [&](const std::vector<std::vector<double>> & inputs) {
    if (inputs.empty()) {
      return;
    }
    std::vector<double> mx(kSceneDim, 0.0);
    for (const auto & x : inputs) {
      const auto y = relu_forward(encoder, x);
      for (int i = 0; i < kSceneDim; ++i) mx[i] = std::max(mx[i], y[i]);
    }
    for (int i = 0; i < kSceneDim; ++i) sum[i] += mx[i];
    ++n_polylines;
  };
  for (const auto & segs : lane_segments(scenario, frame, window)) {
    std::vector<std::vector<double>> inputs;
    for (const auto & s : segs) inputs.push_back(segment_input(s, 0));
    pool(inputs);
  }
  for (const auto & a : scenario.agents) {
    const int kind = a.id == scenario.ego_id ? 1 : 2;
    std::vector<std::vector<double>> inputs;
    for (int f = 1; f <= t_hist && f < a.num_frames(); ++f) {
      if (a.is_valid(f) && a.is_valid(f - 1)) {
        inputs.push_back(segment_input(
          {to_local(frame, a.states[f - 1].position()), to_local(frame, a.states[f].position())},
          kind));
      }
    }
    pool(inputs);
  }
  if (n_polylines > 0) {
    for (auto & v : sum) v /= n_polylines;
  }
  return sum;
}

std::vector<double> condition(const std::vector<double> & scene, CollisionType type, double tta_s)
{
  std::vector<double> c = scene;
  for (CollisionType t : kAllCollisionTypes) {
    c.push_back(t == type ? 1.0 : 0.0);
  }
  c.push_back((tta_s - kMinTta) / (kMaxTta - kMinTta));
  return c;
}

std::vector<Anchor> sample_anchors(
  const Scenario & scenario, int t_hist, const PredictorConfig & config)
{
  const Pose2D frame = ego_pose_at(scenario, t_hist);
  std::vector<Vec2> mids;
  std::vector<double> headings;
  for (const auto & segs : lane_segments(scenario, frame, config.window)) {
    for (const auto & s : segs) {
      mids.push_back(0.5 * (s.a + s.b));
      headings.push_back(std::atan2(s.b.y - s.a.y, s.b.x - s.a.x));
    }
  }
  const double r2 = config.local_radius * config.local_radius;
  std::vector<Anchor> out;
  for (const auto & lane : scenario.map.lanes) {
    double next = 0.0;
    double s0 = 0.0;
    for (std::size_t i = 1; i < lane.points.size(); ++i) {
      const Vec2 a = lane.points[i - 1];
      const Vec2 b = lane.points[i];
      const double len = norm(b - a);
      const double heading = std::atan2(b.y - a.y, b.x - a.x);
      while (next <= s0 + len + 1e-9) {
        const double t = len > 0.0 ? std::clamp((next - s0) / len, 0.0, 1.0) : 0.0;
        const Vec2 p = a + t * (b - a);
        next += config.anchor_spacing;
        const Pose2D local = relative_to(frame, Pose2D(p.x, p.y, heading));
        if (!in_window(local.position(), config.window)) {
          continue;
        }
        int n = 0;
        double sc = 0.0;
        double ss = 0.0;
        int orth = 0;
        for (std::size_t k = 0; k < mids.size(); ++k) {
          const Vec2 d = mids[k] - local.position();
          if (dot(d, d) <= r2) {
            const double rel = headings[k] - local.theta;
            sc += std::cos(rel);
            ss += std::sin(rel);
            if (std::abs(std::sin(rel)) > 0.7) ++orth;
            ++n;
          }
        }
        Anchor anchor;
        anchor.pose = Pose2D(p.x, p.y, heading);
        anchor.local_feature = pose_features(local);
        anchor.local_feature.push_back(n / 20.0);
        anchor.local_feature.push_back(n > 0 ? sc / n : 0.0);
        anchor.local_feature.push_back(n > 0 ? ss / n : 0.0);
        anchor.local_feature.push_back(n > 0 ? static_cast<double>(orth) / n : 0.0);
        out.push_back(std::move(anchor));
      }
      s0 += len;
    }
  }
  return out;
}

void label_anchors(std::vector<Anchor> & anchors, Vec2 ego_impact_point, double r, double ignore_outer)
{
  if (!(r > 0.0)) {
    throw std::invalid_argument("label_anchors: r must be positive");
  }
  for (auto & a : anchors) {
    const double d = norm(a.pose.position() - ego_impact_point);
    if (d <= r) {
      a.label = AnchorLabel::Positive;
    } else if (ignore_outer > r && d <= ignore_outer) {
      a.label = AnchorLabel::Ignore;
    } else {
      a.label = AnchorLabel::Negative;
    }
  }
}

EgoPrediction predict_ego_box(
  const Scenario & scenario, int t_hist, const std::vector<Anchor> & anchors,
  const std::vector<double> & cond, const PredictorModel & model)
{
  if (anchors.empty()) {
    throw std::invalid_argument("predict_ego_box: no anchors in " + scenario.id);
  }
  const Pose2D frame = ego_pose_at(scenario, t_hist);
  const double v_ego = ego_speed_at(scenario, t_hist);
  EgoPrediction out;
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    const double s = model.anchor_scorer.forward(anchor_input(anchors[i], frame, v_ego, cond))[0];
    if (out.anchor_index < 0 || s > out.score) {
      out.score = s;
      out.anchor_index = static_cast<int>(i);
    }
  }
  const Anchor & best = anchors[static_cast<std::size_t>(out.anchor_index)];
  const auto reg = model.ego_regressor.forward(anchor_input(best, frame, v_ego, cond));
  const Pose2D pose = compose(best.pose, Pose2D(reg[0], reg[1], std::atan2(reg[3], reg[2])));
  const AgentTrack & ego = scenario.ego();
  out.box = OrientedBox(pose, ego.length, ego.width);
  return out;
}

EgoPrediction predict_ego_box(
  const Scenario & scenario, int t_hist, const std::vector<double> & cond,
  const PredictorModel & model)
{
  return predict_ego_box(
    scenario, t_hist, sample_anchors(scenario, t_hist, model.config), cond, model);
}

OrientedBox predict_attacker_box(
  const OrientedBox & ego_box, CollisionType type, const std::vector<double> & cond,
  const Scenario & scenario, int t_hist, const AgentTrack & attacker,
  const PredictorModel & model)
{
  const auto out =
    model.attacker_offset.forward(offset_input(ego_box, cond, scenario, t_hist, attacker));
  const Pose2D rel(kOffsetScale * out[0], kOffsetScale * out[1], std::atan2(out[3], out[2]));
  const Pose2D raw = compose(ego_box.center, rel);
  if (model.config.snap_fraction < 0.0) {
    return OrientedBox(raw, attacker.length, attacker.width);
  }
  const auto snapped = snap_to_pattern(
    ego_box, type, raw, model.config.snap_fraction, attacker.length, attacker.width);
  return OrientedBox(snapped.pose, attacker.length, attacker.width);
}

AttackerSelection select_attacker(
  const Scenario & scenario, int t_hist, const std::vector<double> & cond,
  const PredictorModel & model)
{
  AttackerSelection sel;
  sel.candidates = candidate_attackers(scenario, t_hist);
  if (sel.candidates.empty()) {
    throw std::invalid_argument("select_attacker: no candidates in " + scenario.id);
  }
  const Pose2D frame = ego_pose_at(scenario, t_hist);
  std::vector<double> logits;
  for (const auto & id : sel.candidates) {
    const auto f = candidate_features(scenario, *scenario.find_agent(id), t_hist, frame);
    logits.push_back(model.attacker_selector.forward(concat(f, cond))[0]);
  }
  sel.probabilities = softmax(logits);
  std::size_t best = 0;
  for (std::size_t i = 1; i < sel.candidates.size(); ++i) {
    const double pi = sel.probabilities[i];
    const double pb = sel.probabilities[best];
    if (pi > pb || (pi == pb && sel.candidates[i] < sel.candidates[best])) {
      best = i;
    }
  }
  sel.id = sel.candidates[best];
  return sel;
}

// ---------------------------------------------------------------------------------------
// training

namespace
{

struct TrainSample
{
  std::vector<double> cond;
  std::vector<std::vector<double>> anchor_local;
  std::vector<int> positives;
  std::vector<std::vector<double>> ego_targets;  // per positive
  std::vector<int> hard_negatives;
  std::vector<int> negatives;
  std::vector<double> offset_in;
  std::vector<double> offset_target;
  std::vector<std::vector<double>> candidates;
  int label{-1};
};

TrainSample make_sample(const GeneratedScenario & g, const PredictorModel & model)
{
  TrainSample s;
  const Scenario & sc = g.scenario;
  const int t_hist = g.t_hist;
  s.cond = condition(
    encode_scene(sc, t_hist, model.encoder, model.config.window), g.pattern.ctype, g.pattern.tta_s);
  auto anchors = sample_anchors(sc, t_hist, model.config);
  const Vec2 gt = g.pattern.ego_box.center.position();
  label_anchors(anchors, gt, model.config.anchor_radius, 2.0 * model.config.anchor_radius);
  const Pose2D frame = ego_pose_at(sc, t_hist);
  const double v_ego = ego_speed_at(sc, t_hist);
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    const int idx = static_cast<int>(i);
    auto x = anchor_input(anchors[i], frame, v_ego, s.cond);
    x.resize(x.size() - s.cond.size());
    s.anchor_local.push_back(std::move(x));
    switch (anchors[i].label) {
      case AnchorLabel::Positive: {
        s.positives.push_back(idx);
        const Pose2D rel = relative_to(anchors[i].pose, g.pattern.ego_box.center);
        s.ego_targets.push_back({rel.x, rel.y, std::cos(rel.theta), std::sin(rel.theta)});
        break;
      }
      case AnchorLabel::Negative:
        if (norm(anchors[i].pose.position() - gt) <= kHardNegativeRadius) {
          s.hard_negatives.push_back(idx);
        } else {
          s.negatives.push_back(idx);
        }
        break;
      case AnchorLabel::Ignore:
        break;
    }
  }
  const AgentTrack & atk = *sc.find_agent(g.pattern.attacker_id);
  s.offset_in = offset_input(g.pattern.ego_box, s.cond, sc, t_hist, atk);
  const Pose2D rel = relative_to(g.pattern.ego_box.center, g.pattern.attacker_box.center);
  s.offset_target = {
    rel.x / kOffsetScale, rel.y / kOffsetScale, std::cos(rel.theta), std::sin(rel.theta)};
  const auto ids = candidate_attackers(sc, t_hist);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    s.candidates.push_back(candidate_features(sc, *sc.find_agent(ids[i]), t_hist, frame));
    if (ids[i] == g.pattern.attacker_id) {
      s.label = static_cast<int>(i);
    }
  }
  return s;
}

std::vector<int> draw_negatives(const TrainSample & s, int count, Rng & rng)
{
  std::vector<int> out;
  const int half = count / 2;
  for (int i = 0; i < half && !s.hard_negatives.empty(); ++i) {
    out.push_back(s.hard_negatives[static_cast<std::size_t>(
      rng.uniform_int(0, static_cast<int>(s.hard_negatives.size()) - 1))]);
  }
  const int rest = count - static_cast<int>(out.size());
  for (int i = 0; i < rest && !s.negatives.empty(); ++i) {
    out.push_back(s.negatives[static_cast<std::size_t>(
      rng.uniform_int(0, static_cast<int>(s.negatives.size()) - 1))]);
  }
  return out;
}

struct HeadGrads
{
  MlpGrad scorer;
  MlpGrad ego;
  MlpGrad offset;
  MlpGrad selector;

  explicit HeadGrads(const PredictorModel & m)
  : scorer(m.anchor_scorer.zero_grad()),
    ego(m.ego_regressor.zero_grad()),
    offset(m.attacker_offset.zero_grad()),
    selector(m.attacker_selector.zero_grad())
  {
  }
};

void hash_bits(std::uint64_t * h, const MlpCache & cache)
{
  if (!h) return;
  for (std::size_t l = 0; l + 1 < cache.pre.size(); ++l) {
    for (double z : cache.pre[l]) {
      *h = (*h ^ (z > 0.0 ? 0x9BULL : 0x35ULL)) * 0x100000001B3ULL;
    }
  }
}

void hash_l1(std::uint64_t * h, const std::vector<double> & pred, const std::vector<double> & target)
{
  if (!h) return;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double e = pred[i] - target[i];
    const std::uint64_t code = e >= 1.0 ? 3 : (e <= -1.0 ? 5 : 7);
    *h = (*h ^ code) * 0x100000001B3ULL;
  }
}

// Loss of one sample; gradients are accumulated into grads when given.
double sample_loss(
  const PredictorModel & m, const TrainSample & s, const std::vector<int> & negatives,
  HeadGrads * grads, std::uint64_t * kinks)
{
  double loss = 0.0;
  MlpCache cache;
  const std::size_t n_pos = s.positives.size();
  const std::size_t n_neg = negatives.size();
  const std::size_t n_set = n_pos + n_neg;
  if (n_set > 0) {
    const double w_pos = n_pos > 0 && n_neg > 0 ? static_cast<double>(n_neg) / n_pos : 1.0;
    const double norm_set = 1.0 / static_cast<double>(n_set);
    auto score = [&](int idx, double target, double weight) {
      const auto x = concat(s.anchor_local[static_cast<std::size_t>(idx)], s.cond);
      const double z = m.anchor_scorer.forward(x, &cache)[0];
      hash_bits(kinks, cache);
      double dz = 0.0;
      loss += norm_set * bce_with_logits(z, target, weight, &dz);
      if (grads) m.anchor_scorer.backward(cache, {norm_set * dz}, grads->scorer);
    };
    for (int idx : s.positives) score(idx, 1.0, w_pos);
    for (int idx : negatives) score(idx, 0.0, 1.0);
  }
  for (std::size_t k = 0; k < n_pos; ++k) {
    const auto x = concat(s.anchor_local[static_cast<std::size_t>(s.positives[k])], s.cond);
    const auto y = m.ego_regressor.forward(x, &cache);
    hash_bits(kinks, cache);
    hash_l1(kinks, y, s.ego_targets[k]);
    std::vector<double> d;
    loss += smooth_l1(y, s.ego_targets[k], &d) / static_cast<double>(n_pos);
    if (grads) {
      for (auto & v : d) v /= static_cast<double>(n_pos);
      m.ego_regressor.backward(cache, d, grads->ego);
    }
  }
  {
    const auto y = m.attacker_offset.forward(s.offset_in, &cache);
    hash_bits(kinks, cache);
    hash_l1(kinks, y, s.offset_target);
    std::vector<double> d;
    loss += smooth_l1(y, s.offset_target, &d);
    if (grads) m.attacker_offset.backward(cache, d, grads->offset);
  }
  if (s.label >= 0) {
    std::vector<MlpCache> caches(s.candidates.size());
    std::vector<double> logits;
    for (std::size_t i = 0; i < s.candidates.size(); ++i) {
      logits.push_back(m.attacker_selector.forward(concat(s.candidates[i], s.cond), &caches[i])[0]);
      hash_bits(kinks, caches[i]);
    }
    std::vector<double> d;
    loss += softmax_cross_entropy(logits, s.label, &d);
    if (grads) {
      for (std::size_t i = 0; i < s.candidates.size(); ++i) {
        m.attacker_selector.backward(caches[i], {d[i]}, grads->selector);
      }
    }
  }
  return loss;
}

std::vector<TrainSample> make_samples(
  const std::vector<GeneratedScenario> & corpus, const PredictorModel & model)
{
  std::vector<TrainSample> samples(corpus.size());
  parallel_for(static_cast<int>(corpus.size()), Execution::Parallel, [&](int i) {
    samples[static_cast<std::size_t>(i)] = make_sample(corpus[static_cast<std::size_t>(i)], model);
  });
  return samples;
}

}  // namespace

TrainReport train(
  PredictorModel & model, const std::vector<GeneratedScenario> & corpus, const TrainHyper & hyper)
{
  if (corpus.empty()) {
    throw std::invalid_argument("train: empty corpus");
  }
  if (hyper.batch < 1 || hyper.epochs < 0 || !(hyper.lr > 0.0)) {
    throw std::invalid_argument("train: invalid hyper-parameters");
  }
  const auto samples = make_samples(corpus, model);
  Rng rng(mix_seed(hyper.seed, 0x7EA1));
  TrainReport report;
  std::vector<std::size_t> order(samples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    for (std::size_t i = order.size(); i-- > 1;) {
      std::swap(order[i], order[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(i)))]);
    }
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(hyper.batch)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(hyper.batch));
      HeadGrads grads(model);
      double batch_loss = 0.0;
      for (std::size_t j = start; j < end; ++j) {
        const TrainSample & s = samples[order[j]];
        const auto negs = draw_negatives(s, hyper.negatives, rng);
        batch_loss += sample_loss(model, s, negs, &grads, nullptr);
      }
      if (!std::isfinite(batch_loss)) {
        throw std::runtime_error(
          "train: non-finite loss at epoch " + std::to_string(epoch) + ", batch starting " +
          std::to_string(start));
      }
      const double inv = 1.0 / static_cast<double>(end - start);
      grads.scorer.scale(inv);
      grads.ego.scale(inv);
      grads.offset.scale(inv);
      grads.selector.scale(inv);
      model.anchor_scorer.step(grads.scorer, hyper.lr);
      model.ego_regressor.step(grads.ego, hyper.lr);
      model.attacker_offset.step(grads.offset, hyper.lr);
      model.attacker_selector.step(grads.selector, hyper.lr);
      epoch_loss += batch_loss;
    }
    report.epoch_loss.push_back(epoch_loss / static_cast<double>(samples.size()));
  }
  return report;
}

std::vector<GradCheckResult> gradient_check(
  PredictorModel & model, const std::vector<GeneratedScenario> & batch, std::uint64_t seed,
  int params_per_head, double step)
{
  if (batch.empty()) {
    throw std::invalid_argument("gradient_check: empty batch");
  }
  const auto samples = make_samples(batch, model);
  Rng rng(mix_seed(seed, 0x6C4EC));
  std::vector<std::vector<int>> negs;
  for (const auto & s : samples) negs.push_back(draw_negatives(s, 16, rng));

  auto total = [&](HeadGrads * g, std::uint64_t * h) {
    double l = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      l += sample_loss(model, samples[i], negs[i], g, h);
    }
    return l / static_cast<double>(samples.size());
  };
  HeadGrads grads(model);
  total(&grads, nullptr);
  const double inv = 1.0 / static_cast<double>(samples.size());
  grads.scorer.scale(inv);
  grads.ego.scale(inv);
  grads.offset.scale(inv);
  grads.selector.scale(inv);

  struct Head
  {
    const char * name;
    Mlp * net;
    const MlpGrad * grad;
  };
  const Head heads[] = {
    {"anchor_scorer", &model.anchor_scorer, &grads.scorer},
    {"ego_regressor", &model.ego_regressor, &grads.ego},
    {"attacker_offset", &model.attacker_offset, &grads.offset},
    {"attacker_selector", &model.attacker_selector, &grads.selector},
  };
  std::vector<GradCheckResult> out;
  for (const Head & head : heads) {
    GradCheckResult res;
    res.head = head.name;
    auto params = head.net->parameters();
    const auto slots = head.net->gradient_slots(*head.grad);
    const int n = static_cast<int>(params.size());
    const int count = std::min(params_per_head, n);
    for (int c = 0; c < count; ++c) {
      const int idx = params_per_head >= n ? c : rng.uniform_int(0, n - 1);
      double * p = params[static_cast<std::size_t>(idx)];
      const double saved = *p;
      std::uint64_t h_plus = 0xCBF29CE484222325ULL;
      std::uint64_t h_minus = 0xCBF29CE484222325ULL;
      *p = saved + step;
      const double l_plus = total(nullptr, &h_plus);
      *p = saved - step;
      const double l_minus = total(nullptr, &h_minus);
      *p = saved;
      if (h_plus != h_minus) {
        ++res.skipped_kinks;
        continue;
      }
      const double numeric = (l_plus - l_minus) / (2.0 * step);
      const double analytic = *slots[static_cast<std::size_t>(idx)];
      const double denom = std::max({std::abs(numeric), std::abs(analytic), 1e-5});
      res.max_rel_error = std::max(res.max_rel_error, std::abs(numeric - analytic) / denom);
      ++res.checked;
    }
    out.push_back(res);
  }
  return out;
}

PredictedPattern predict_pattern(
  const Scenario & scenario, int t_hist, CollisionType type, double tta_s,
  const PredictorModel & model)
{
  const auto cond =
    condition(encode_scene(scenario, t_hist, model.encoder, model.config.window), type, tta_s);
  const auto sel = select_attacker(scenario, t_hist, cond, model);
  const auto ego = predict_ego_box(scenario, t_hist, cond, model);
  PredictedPattern out;
  out.ego_box = ego.box;
  out.anchor_score = ego.score;
  out.attacker_id = sel.id;
  for (std::size_t i = 0; i < sel.candidates.size(); ++i) {
    if (sel.candidates[i] == sel.id) out.attacker_probability = sel.probabilities[i];
  }
  out.attacker_box = predict_attacker_box(
    ego.box, type, cond, scenario, t_hist, *scenario.find_agent(sel.id), model);
  return out;
}

BuildResult generate(
  const Scenario & scenario, int t_hist, const GenerationRequest & request,
  const PredictorModel & model, const PipelineOptions & options, GateMode gate)
{
  const int k = t_hist + tta_frames(request.tta_s, scenario.rate_hz);
  if (candidate_attackers(scenario, t_hist, options.min_history_motion).empty()) {
    return Infeasible{InfeasibleReason::NoCandidates, "no moving agent in " + scenario.id};
  }
  const auto cond = condition(
    encode_scene(scenario, t_hist, model.encoder, model.config.window), request.ctype,
    request.tta_s);
  const auto sel = select_attacker(scenario, t_hist, cond, model);
  const auto ego = predict_ego_box(scenario, t_hist, cond, model);

  std::vector<std::size_t> ranked(sel.candidates.size());
  for (std::size_t i = 0; i < ranked.size(); ++i) ranked[i] = i;
  std::stable_sort(ranked.begin(), ranked.end(), [&](std::size_t a, std::size_t b) {
    if (sel.probabilities[a] != sel.probabilities[b]) {
      return sel.probabilities[a] > sel.probabilities[b];
    }
    return sel.candidates[a] < sel.candidates[b];
  });
  ranked.resize(std::min<std::size_t>(
    ranked.size(), static_cast<std::size_t>(std::max(1, model.config.attacker_proposals))));

  const double v_ego = norm(scenario.ego().velocity_at(t_hist, scenario.rate_hz));
  std::map<InfeasibleReason, int> failures;
  std::string detail;
  for (std::size_t idx : ranked) {
    const AgentTrack & atk = *scenario.find_agent(sel.candidates[idx]);
    const OrientedBox atk_box =
      predict_attacker_box(ego.box, request.ctype, cond, scenario, t_hist, atk, model);
    const double v_atk = norm(atk.velocity_at(t_hist, scenario.rate_hz));
    for (double factor : options.end_speed_factors) {
      double end_speed = std::max(options.min_end_speed, factor * v_atk);
      if (request.ctype == CollisionType::RearEnd) {
        end_speed = std::max(end_speed, v_ego + options.rear_end_closing_floor);
      }
      Trajectory plan_traj;
      const AgentTrack replaced =
        plan_attacker_track(scenario, atk, t_hist, k, atk_box.center, end_speed, &plan_traj);
      const auto verdict =
        check_gate(scenario, replaced, plan_traj, t_hist, k, request.ctype, options, gate);
      if (verdict) {
        ++failures[verdict->reason];
        detail = verdict->detail;
        continue;
      }
      GeneratedScenario out;
      out.scenario = with_track(scenario, replaced);
      out.scenario.id = generated_id(scenario.id, request);
      out.pattern.ego_box = ego.box;
      out.pattern.attacker_box = atk_box;
      out.pattern.attacker_id = atk.id;
      out.pattern.ctype = request.ctype;
      out.pattern.tta_s = request.tta_s;
      out.request = request;
      out.t_hist = t_hist;
      out.collision_frame = k;
      return out;
    }
  }
  auto best = failures.begin();
  for (auto it = failures.begin(); it != failures.end(); ++it) {
    if (it->second > best->second) best = it;
  }
  return Infeasible{best->first, detail};
}

}  // namespace forge
