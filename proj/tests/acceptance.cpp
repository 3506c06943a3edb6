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

// Acceptance run: prints one PASS/FAIL line per criterion and exits non-zero on any FAIL.
// Usage: forge_acceptance <path-to-forge-binary> [scratch-dir]

#include "forge/eval.hpp"
#include "forge/predictor.hpp"
#include "forge/quintic.hpp"
#include "forge/synth.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace forge;

namespace
{

struct Verdict
{
  bool pass{false};
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char * f, double a)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// ---------------------------------------------------------------- shared corpus

std::vector<Scenario> corpus_scenes()
{
  std::vector<Scenario> scenes;
  for (auto k : {SceneKind::FourWay, SceneKind::TwoLane, SceneKind::Straight}) {
    auto batch = synth_batch(k, 60, 1);
    scenes.insert(scenes.end(), batch.begin(), batch.end());
  }
  return scenes;
}

// Heading difference in degrees in [0, 180], computed from unit vectors.
double heading_gap_deg(double a, double b)
{
  const double c = std::cos(a) * std::cos(b) + std::sin(a) * std::sin(b);
  return std::acos(std::clamp(c, -1.0, 1.0)) * 180.0 / 3.14159265358979323846;
}

// Request-consistency check at first contact, from the angle table: rear-end 0, lane change
// 20, opposite 180, crossing and left-turn 90 (10 degree tolerance). Crossing and left-turn
// are told apart by whether the entry headings were closer to orthogonal or opposed.
bool matches_request(CollisionType type, double impact_gap, double entry_gap)
{
  const double tol = 10.0 + 1e-6;
  switch (type) {
    case CollisionType::RearEnd:
      return impact_gap <= tol;
    case CollisionType::LaneChange:
      return impact_gap > 10.0 + 1e-6 && std::abs(impact_gap - 20.0) <= tol;
    case CollisionType::OppositeDirection:
      return impact_gap >= 180.0 - tol;
    case CollisionType::JunctionCrossing:
      return std::abs(impact_gap - 90.0) <= tol && std::abs(entry_gap - 90.0) < std::abs(entry_gap - 180.0);
    case CollisionType::LTAP:
      return std::abs(impact_gap - 90.0) <= tol && std::abs(entry_gap - 180.0) < std::abs(entry_gap - 90.0);
  }
  return false;
}

Verdict criterion1(const Corpus & corpus, double build_s)
{
  const auto t0 = Clock::now();
  std::map<std::pair<int, int>, int> per_cell;
  int collided = 0, similar = 0, on_time = 0;
  for (const auto & g : corpus.items) {
    per_cell[{type_index(g.request.ctype), tta_bucket(g.request.tta_s)}]++;
    const Scenario & s = g.scenario;
    const AgentTrack & ego = s.ego();
    const AgentTrack & atk = *s.find_agent(g.pattern.attacker_id);
    int first = -1;
    for (int f = g.t_hist + 1; f < s.num_frames(); ++f) {
      if (ego.is_valid(f) && atk.is_valid(f) && boxes_overlap(ego.box_at(f), atk.box_at(f))) {
        first = f;
        break;
      }
    }
    if (first < 0) continue;
    ++collided;
    const int requested = g.t_hist + static_cast<int>(std::lround(g.request.tta_s * s.rate_hz));
    if (std::abs(first - requested) <= 1) ++on_time;
    const double impact = heading_gap_deg(ego.states[first].theta, atk.states[first].theta);
    const double entry = heading_gap_deg(ego.states[g.t_hist].theta, atk.states[g.t_hist].theta);
    if (matches_request(g.request.ctype, impact, entry)) ++similar;
  }
  int min_cell = per_cell.size() == 15 ? 1 << 30 : 0;
  for (const auto & [k, n] : per_cell) min_cell = std::min(min_cell, n);
  const int n = static_cast<int>(corpus.items.size());
  const double t = build_s + seconds_since(t0);
  std::ostringstream os;
  os << "n=" << n << " min_cell=" << min_cell << " collision=" << collided << "/" << n
     << " similar=" << similar << "/" << collided << " within_1_frame=" << on_time << "/" << n
     << " time=" << fmt("%.1fs", t);
  return {n >= 150 && min_cell >= 2 && collided == n && similar == n && on_time == n && t < 120.0,
          os.str()};
}

// ---------------------------------------------------------------- quintic

double poly(const QuinticCoeffs & c, double t, int deriv)
{
  double sum = 0.0;
  for (int k = deriv; k < 6; ++k) {
    double f = 1.0;
    for (int j = 0; j < deriv; ++j) f *= k - j;
    sum += f * c[static_cast<std::size_t>(k)] * std::pow(t, k - deriv);
  }
  return sum;
}

Verdict criterion2()
{
  const auto t0 = Clock::now();
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> pos(-100.0, 100.0), vel(-20.0, 20.0), acc(-5.0, 5.0),
    hor(0.5, 10.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double b[6] = {pos(gen), vel(gen), acc(gen), pos(gen), vel(gen), acc(gen)};
    const double T = hor(gen);
    const auto c = solve_quintic_1d(b[0], b[1], b[2], b[3], b[4], b[5], T);
    double scale = 1.0;
    for (double v : b) scale = std::max(scale, std::abs(v));
    const double got[6] = {poly(c, 0, 0), poly(c, 0, 1), poly(c, 0, 2),
                           poly(c, T, 0), poly(c, T, 1), poly(c, T, 2)};
    for (int k = 0; k < 6; ++k) worst = std::max(worst, std::abs(got[k] - b[k]) / scale);
  }
  const auto unit = solve_quintic_1d(0, 0, 0, 1, 0, 0, 1.0);
  const double ref[6] = {0, 0, 0, 10, -15, 6};
  double unit_err = 0.0;
  for (int k = 0; k < 6; ++k) unit_err = std::max(unit_err, std::abs(unit[static_cast<std::size_t>(k)] - ref[k]));
  const double t = seconds_since(t0);
  std::ostringstream os;
  os << "max_rel_residual=" << fmt("%.2e", worst) << " unit_case_err=" << fmt("%.2e", unit_err)
     << " time=" << fmt("%.3fs", t);
  return {worst <= 1e-9 && unit_err <= 1e-12 && t < 1.0, os.str()};
}

// ---------------------------------------------------------------- SAT vs sampling

struct Rect
{
  double x, y, th, l, w;
};

bool inside(const Rect & r, double px, double py)
{
  const double dx = px - r.x, dy = py - r.y;
  const double u = dx * std::cos(r.th) + dy * std::sin(r.th);
  const double v = -dx * std::sin(r.th) + dy * std::cos(r.th);
  return std::abs(u) <= r.l / 2 && std::abs(v) <= r.w / 2;
}

// Walks a's outline at 0.01 m and tests each sample against b. For convex shapes any
// intersection puts part of one outline inside the other, so both directions are checked.
bool outline_hits(const Rect & a, const Rect & b)
{
  const double c = std::cos(a.th), s = std::sin(a.th);
  const double hl = a.l / 2, hw = a.w / 2;
  const double lx[5] = {hl, -hl, -hl, hl, hl};
  const double ly[5] = {hw, hw, -hw, -hw, hw};
  for (int e = 0; e < 4; ++e) {
    const double len = std::hypot(lx[e + 1] - lx[e], ly[e + 1] - ly[e]);
    const int n = static_cast<int>(std::ceil(len / 0.01));
    for (int i = 0; i <= n; ++i) {
      const double f = static_cast<double>(i) / n;
      const double u = lx[e] + f * (lx[e + 1] - lx[e]);
      const double v = ly[e] + f * (ly[e + 1] - ly[e]);
      if (inside(b, a.x + c * u - s * v, a.y + s * u + c * v)) return true;
    }
  }
  return false;
}

bool sampled_overlap(const Rect & a, const Rect & b)
{
  return outline_hits(a, b) || outline_hits(b, a);
}

Rect grown(Rect r, double d)
{
  r.l += 2 * d;
  r.w += 2 * d;
  return r;
}

Verdict criterion3()
{
  const auto t0 = Clock::now();
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> ang(-3.14159, 3.14159), off(-7.0, 7.0), len(1.0, 6.0),
    wid(0.5, 3.0);
  int checked = 0, agree = 0, overlapping = 0, drawn = 0;
  while (checked < 10000) {
    ++drawn;
    const Rect a{0.0, 0.0, ang(gen), len(gen), wid(gen)};
    const Rect b{off(gen), off(gen), ang(gen), len(gen), wid(gen)};
    // Marginal pairs change answer when both boxes grow or shrink by 5 cm.
    const bool lo = sampled_overlap(grown(a, -0.05), grown(b, -0.05));
    const bool hi = sampled_overlap(grown(a, 0.05), grown(b, 0.05));
    if (lo != hi) continue;
    const bool oracle = sampled_overlap(a, b);
    const bool sat = boxes_overlap(OrientedBox({a.x, a.y, a.th}, a.l, a.w),
                                   OrientedBox({b.x, b.y, b.th}, b.l, b.w));
    ++checked;
    overlapping += oracle ? 1 : 0;
    agree += oracle == sat ? 1 : 0;
  }
  const double t = seconds_since(t0);
  std::ostringstream os;
  os << "agree=" << agree << "/" << checked << " overlapping=" << overlapping
     << " marginal_skipped=" << drawn - checked << " time=" << fmt("%.1fs", t);
  return {agree == checked && t < 30.0, os.str()};
}

// ---------------------------------------------------------------- gradient check

Verdict criterion4()
{
  const auto t0 = Clock::now();
  std::vector<Scenario> scenes = synth_batch(SceneKind::FourWay, 30, 1);
  const Corpus c = build_corpus(scenes, 2, 7);
  std::map<std::string, double> worst;
  int skipped = 0, checked = 0;
  for (int d = 0; d < 10; ++d) {
    PredictorModel m = PredictorModel::create({}, 100 + static_cast<std::uint64_t>(d));
    const std::vector<GeneratedScenario> batch(c.items.begin() + d, c.items.begin() + d + 4);
    for (const auto & r : gradient_check(m, batch, static_cast<std::uint64_t>(d), 40)) {
      worst[r.head] = std::max(worst[r.head], r.max_rel_error);
      skipped += r.skipped_kinks;
      checked += r.checked;
    }
  }
  bool ok = worst.size() == 4;
  std::ostringstream os;
  for (const auto & [head, e] : worst) {
    os << head << "=" << fmt("%.1e", e) << " ";
    ok = ok && e < 1e-4;
  }
  const double t = seconds_since(t0);
  os << "checked=" << checked << " skipped=" << skipped << " time=" << fmt("%.1fs", t);
  return {ok && checked > 0 && t < 30.0, os.str()};
}

// ---------------------------------------------------------------- learned generation

Verdict criterion5()
{
  const auto t0 = Clock::now();
  std::vector<Scenario> train_scenes, test_scenes;
  for (auto k : {SceneKind::FourWay, SceneKind::TwoLane}) {
    auto tr = synth_batch(k, 150, 1);
    auto te = synth_batch(k, 50, 999);
    train_scenes.insert(train_scenes.end(), tr.begin(), tr.end());
    test_scenes.insert(test_scenes.end(), te.begin(), te.end());
  }
  const Corpus train_corpus = build_corpus(train_scenes, 40, 7);
  PredictorModel model = PredictorModel::create({}, 3);
  TrainHyper hyper;
  hyper.epochs = 30;
  hyper.seed = 5;
  train(model, train_corpus.items, hyper);

  // Held-out requests: pipeline-feasible (scene, type, tta) triples on unseen scenes,
  // spread evenly over the held-out corpus.
  const Corpus held = build_corpus(test_scenes, 7, 99);
  std::map<std::string, const Scenario *> by_id;
  for (const auto & s : test_scenes) by_id[s.id] = &s;
  std::vector<GenerationCase> cases;
  const std::size_t stride = std::max<std::size_t>(1, held.items.size() / 100);
  for (std::size_t i = 0; i < held.items.size() && cases.size() < 100; i += stride) {
    const auto & ref = held.items[i];
    const std::string base = ref.scenario.id.substr(0, ref.scenario.id.find(':'));
    cases.push_back({by_id.at(base), ref.request});
  }
  const GenerationEval ev =
    evaluate_generation(cases, kDefaultHistoryFrames, model, {}, GateMode::KinematicOnly);

  std::map<int, std::pair<int, int>> coll, sim;  // type -> (hits, n)
  for (const auto & o : ev.outcomes) {
    const int ti = type_index(o.requested);
    coll[ti].second++;
    if (o.collided) {
      coll[ti].first++;
      sim[ti].second++;
      if (o.realized == o.requested) sim[ti].first++;
    }
  }
  auto type_mean = [](const std::map<int, std::pair<int, int>> & m) {
    double sum = 0.0;
    int n = 0;
    for (const auto & [k, v] : m) {
      if (v.second == 0) continue;
      sum += static_cast<double>(v.first) / v.second;
      ++n;
    }
    return n ? sum / n : 0.0;
  };
  const double c_mean = type_mean(coll), s_mean = type_mean(sim);
  const double t = seconds_since(t0);
  std::ostringstream os;
  os << "train=" << train_corpus.items.size() << " heldout=" << cases.size()
     << " collision_type_mean=" << fmt("%.3f", c_mean) << " similarity_type_mean="
     << fmt("%.3f", s_mean) << " pooled=" << fmt("%.3f", ev.report.collision_rate.value_or(0))
     << "/" << fmt("%.3f", ev.report.similarity.value_or(0)) << " time=" << fmt("%.1fs", t);
  return {train_corpus.items.size() >= 500 && cases.size() == 100 && c_mean >= 0.7 &&
            s_mean >= 0.7 && t < 900.0,
          os.str()};
}

// ---------------------------------------------------------------- planners

double cell_rate(const PlannerRun & run, CollisionType type)
{
  int n = 0, hit = 0;
  for (const auto & o : run.outcomes) {
    if (o.requested != type || !o.error.empty()) continue;
    ++n;
    hit += o.collided ? 1 : 0;
  }
  return n ? static_cast<double>(hit) / n : 0.0;
}

double plain_rate(const PlannerRun & run)
{
  int hit = 0;
  for (const auto & o : run.outcomes) hit += o.collided ? 1 : 0;
  return static_cast<double>(hit) / static_cast<double>(run.outcomes.size());
}

Verdict criterion6(const Corpus & corpus)
{
  const auto t0 = Clock::now();
  const auto runs = planner_table(corpus.items, {PlannerKind::Replay, PlannerKind::IDM}, {});
  int errors = 0;
  for (const auto & r : runs) errors += r.report.errors;
  const double replay = plain_rate(runs[0]), idm = plain_rate(runs[1]);
  const double re = cell_rate(runs[1], CollisionType::RearEnd);
  const double lt = cell_rate(runs[1], CollisionType::LTAP);
  const double t = seconds_since(t0);
  std::ostringstream os;
  os << "replay=" << fmt("%.3f", replay) << " idm=" << fmt("%.3f", idm) << " idm_rear_end="
     << fmt("%.3f", re) << " idm_ltap=" << fmt("%.3f", lt) << " errors=" << errors
     << " time=" << fmt("%.1fs", t);
  return {errors == 0 && replay == 1.0 && idm < replay && re > lt, os.str()};
}

Verdict criterion7(const Corpus & corpus)
{
  const auto t0 = Clock::now();
  GridSpec grid;
  grid.axes = {{"s0", {2.0, 4.0, 6.0}}, {"w_progress", {0.5, 1.0, 2.0}}};
  const PlannerParams defaults;
  const GridResult r = grid_search(corpus.items, defaults, grid);
  // Default rate measured independently of the grid.
  const auto base = planner_table(corpus.items, {PlannerKind::PDM}, defaults);
  const double default_rate = plain_rate(base[0]);
  const double best = r.rows[r.best_index].mean_rate;
  const double t = seconds_since(t0);
  std::ostringstream os;
  os << "best=(s0=" << r.rows[r.best_index].values[0] << ",w_progress="
     << r.rows[r.best_index].values[1] << ") rate=" << fmt("%.3f", best)
     << " default_rate=" << fmt("%.3f", default_rate) << " time=" << fmt("%.1fs", t);
  return {r.rows.size() == 9 && best <= default_rate, os.str()};
}

// ---------------------------------------------------------------- CLI determinism

bool run(const std::string & cmd)
{
  return std::system((cmd + " 2>/dev/null").c_str()) == 0;
}

bool run_chain(const std::string & forge, const fs::path & dir)
{
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string d = dir.string() + "/";
  std::ofstream(d + "forge.cfg") << "train.epochs = 3\n";
  std::ofstream(d + "grid.txt") << "s0 = 2, 4\nw_progress = 1, 2\n";
  const std::string f = forge + " --config " + d + "forge.cfg";
  return run(f + " --seed 11 synth --kind four_way --n 20 --out " + d + "fw.jsonl") &&
         run(f + " --seed 12 synth --kind two_lane --n 20 --out " + d + "tl.jsonl") &&
         run(f + " --seed 13 generate --scenes " + d + "fw.jsonl " + d + "tl.jsonl --per-cell 3 --out " + d + "corpus") &&
         run(f + " --seed 14 train --corpus " + d + "corpus --out " + d + "model.json") &&
         run(f + " --seed 15 predict --model " + d + "model.json --scenes " + d + "fw.jsonl --tta 6 --gate kinematic --out " + d + "pred") &&
         run(f + " evaluate --corpus " + d + "corpus --planner idm --out " + d + "eval") &&
         run(f + " tune --corpus " + d + "corpus --grid " + d + "grid.txt --out " + d + "tune") &&
         run(f + " report --corpus " + d + "corpus --out " + d + "report.csv") &&
         run(f + " render --corpus " + d + "corpus --limit 5 --out " + d + "svg");
}

std::map<std::string, std::string> snapshot(const fs::path & dir)
{
  std::map<std::string, std::string> files;
  for (const auto & e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    files[fs::relative(e.path(), dir).string()] = ss.str();
  }
  return files;
}

Verdict criterion8(const std::string & forge, const fs::path & scratch)
{
  const auto t0 = Clock::now();
  if (!run_chain(forge, scratch / "run_a") || !run_chain(forge, scratch / "run_b")) {
    return {false, "CLI chain failed"};
  }
  const auto a = snapshot(scratch / "run_a"), b = snapshot(scratch / "run_b");
  int differ = 0;
  for (const auto & [name, bytes] : a) {
    const auto it = b.find(name);
    if (it == b.end() || it->second != bytes) ++differ;
  }
  const bool same_set = a.size() == b.size();
  std::ostringstream os;
  os << "files=" << a.size() << " differing=" << differ << " time=" << fmt("%.1fs", seconds_since(t0));
  return {same_set && differ == 0 && a.size() >= 15, os.str()};
}

}  // namespace

int main(int argc, char ** argv)
{
  if (argc < 2) {
    std::cerr << "usage: forge_acceptance <forge-binary> [scratch-dir]\n";
    return 2;
  }
  const std::string forge = argv[1];
  const fs::path scratch = argc > 2 ? fs::path(argv[2]) : fs::temp_directory_path() / "forge_acceptance";

  int failed = 0;
  auto report = [&](int id, const std::function<Verdict()> & fn) {
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception & e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << v.detail << std::endl;
    failed += v.pass ? 0 : 1;
  };

  const auto t0 = Clock::now();
  const Corpus corpus = build_corpus(corpus_scenes(), 10, 7);
  const double build_s = seconds_since(t0);

  report(1, [&] { return criterion1(corpus, build_s); });
  report(2, criterion2);
  report(3, criterion3);
  report(4, criterion4);
  report(5, criterion5);
  report(6, [&] { return criterion6(corpus); });
  report(7, [&] { return criterion7(corpus); });
  report(8, [&] { return criterion8(forge, scratch); });
  return failed == 0 ? 0 : 1;
}
