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

#include "forge/eval.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace forge
{

namespace
{

std::string fmt(double v, const char * spec = "%.6f")
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

std::string fmt_opt(const std::optional<double> & v)
{
  return v ? fmt(*v) : std::string();
}

}  // namespace

double collision_rate(const std::vector<Outcome> & outcomes)
{
  if (outcomes.empty()) {
    throw std::invalid_argument("collision_rate: no outcomes");
  }
  int hit = 0;
  for (const auto & o : outcomes) hit += o.collided ? 1 : 0;
  return static_cast<double>(hit) / static_cast<double>(outcomes.size());
}

std::optional<double> similarity(const std::vector<Outcome> & outcomes)
{
  int hit = 0;
  int same = 0;
  for (const auto & o : outcomes) {
    if (!o.collided) continue;
    ++hit;
    if (o.realized && *o.realized == o.requested) ++same;
  }
  if (hit == 0) return std::nullopt;
  return static_cast<double>(same) / hit;
}

MetricReport summarize(const std::vector<Outcome> & outcomes, const std::string & label)
{
  MetricReport r;
  r.label = label;
  for (CollisionType t : kAllCollisionTypes) {
    for (int b = 0; b < kNumTtaBuckets; ++b) {
      CellMetrics c;
      c.ctype = t;
      c.bucket = b;
      r.cells.push_back(c);
    }
  }
  int collisions = 0;
  int similar = 0;
  for (const auto & o : outcomes) {
    if (!o.error.empty()) {
      ++r.errors;
      continue;
    }
    if (o.bucket < 0 || o.bucket >= kNumTtaBuckets) {
      throw std::invalid_argument("summarize: bucket out of range for " + o.scenario_id);
    }
    CellMetrics & c =
      r.cells[static_cast<std::size_t>(type_index(o.requested) * kNumTtaBuckets + o.bucket)];
    ++c.n;
    ++r.n;
    if (o.collided) {
      ++c.collisions;
      ++collisions;
      if (o.realized && *o.realized == o.requested) {
        ++c.similar;
        ++similar;
      }
    }
  }
  for (auto & c : r.cells) {
    if (c.n > 0) c.collision_rate = static_cast<double>(c.collisions) / c.n;
    if (c.collisions > 0) c.similarity = static_cast<double>(c.similar) / c.collisions;
  }
  if (r.n > 0) r.collision_rate = static_cast<double>(collisions) / r.n;
  if (collisions > 0) r.similarity = static_cast<double>(similar) / collisions;
  return r;
}

Outcome replay_outcome(const GeneratedScenario & g)
{
  Outcome o;
  o.scenario_id = g.scenario.id;
  o.requested = g.request.ctype;
  o.bucket = tta_bucket(g.request.tta_s);
  const auto impact = replay_impact(g.scenario, g.pattern.attacker_id, g.t_hist);
  o.collided = impact.first_contact_frame.has_value();
  o.realized = impact.realized;
  return o;
}

Outcome rollout_outcome(const GeneratedScenario & g, const RolloutResult & result)
{
  Outcome o;
  o.scenario_id = g.scenario.id;
  o.requested = g.request.ctype;
  o.bucket = tta_bucket(g.request.tta_s);
  o.collided = result.collided;
  if (result.collided && result.collided_with == g.pattern.attacker_id &&
      !result.ego_trace.poses.empty()) {
    const AgentTrack & atk = *g.scenario.find_agent(g.pattern.attacker_id);
    o.realized = classify(
      result.ego_trace.poses.back(), result.other_pose_at_collision,
      entry_heading(g.scenario.ego(), g.t_hist), entry_heading(atk, g.t_hist));
  }
  return o;
}

std::vector<PlannerRun> planner_table(
  const std::vector<GeneratedScenario> & corpus, const std::vector<PlannerKind> & planners,
  const PlannerParams & params, Execution exec)
{
  if (corpus.empty()) {
    throw std::invalid_argument("planner_table: empty corpus");
  }
  std::vector<PlannerRun> runs;
  for (PlannerKind kind : planners) {
    PlannerRun run;
    run.planner = kind;
    run.outcomes.resize(corpus.size());
    run.results.resize(corpus.size());
    parallel_for(static_cast<int>(corpus.size()), exec, [&](int i) {
      const auto & g = corpus[static_cast<std::size_t>(i)];
      try {
        run.results[static_cast<std::size_t>(i)] = rollout(g, kind, params);
        run.outcomes[static_cast<std::size_t>(i)] =
          rollout_outcome(g, run.results[static_cast<std::size_t>(i)]);
      } catch (const std::exception & e) {
        Outcome & o = run.outcomes[static_cast<std::size_t>(i)];
        o.scenario_id = g.scenario.id;
        o.requested = g.request.ctype;
        o.bucket = tta_bucket(g.request.tta_s);
        o.error = e.what();
      }
    });
    run.report = summarize(run.outcomes, to_string(kind));
    runs.push_back(std::move(run));
  }
  return runs;
}

GenerationEval evaluate_generation(
  const std::vector<GenerationCase> & cases, int t_hist, const PredictorModel & model,
  const PipelineOptions & options, GateMode gate, Execution exec)
{
  GenerationEval ev;
  ev.outcomes.resize(cases.size());
  std::vector<std::string> reasons(cases.size());
  parallel_for(static_cast<int>(cases.size()), exec, [&](int i) {
    const GenerationCase & c = cases[static_cast<std::size_t>(i)];
    Outcome & o = ev.outcomes[static_cast<std::size_t>(i)];
    o.scenario_id = generated_id(c.scenario->id, c.request);
    o.requested = c.request.ctype;
    o.bucket = tta_bucket(c.request.tta_s);
    try {
      const BuildResult r = generate(*c.scenario, t_hist, c.request, model, options, gate);
      if (const auto * bad = std::get_if<Infeasible>(&r)) {
        reasons[static_cast<std::size_t>(i)] = to_string(bad->reason);
        return;
      }
      const auto & g = std::get<GeneratedScenario>(r);
      const auto impact = replay_impact(g.scenario, g.pattern.attacker_id, t_hist);
      if (impact.first_contact_frame && *impact.first_contact_frame <= g.collision_frame + 1) {
        o.collided = true;
        o.realized = impact.realized;
      }
    } catch (const std::exception & e) {
      o.error = e.what();
    }
  });
  for (const auto & r : reasons) {
    if (!r.empty()) ++ev.infeasible[r];
  }
  ev.report = summarize(ev.outcomes, "generation");
  return ev;
}

// ---------------------------------------------------------------------------------------

void set_tuning_param(PlannerParams & params, const std::string & name, double value)
{
  IDMParams & idm = params.pdm.idm;
  PDMWeights & w = params.pdm.weights;
  if (name == "s0") idm.s0_min_gap = value;
  else if (name == "T") idm.T_headway = value;
  else if (name == "a_max") idm.a_max = value;
  else if (name == "b") idm.b_comfort = value;
  else if (name == "v0") idm.v0_desired = value;
  else if (name == "delta") idm.delta_exponent = value;
  else if (name == "w_progress") w.w_progress = value;
  else if (name == "w_timing") w.w_timing = value;
  else if (name == "w_comfort") w.w_comfort = value;
  else throw std::invalid_argument("unknown tuning parameter '" + name + "'");
}

double get_tuning_param(const PlannerParams & params, const std::string & name)
{
  const IDMParams & idm = params.pdm.idm;
  const PDMWeights & w = params.pdm.weights;
  if (name == "s0") return idm.s0_min_gap;
  if (name == "T") return idm.T_headway;
  if (name == "a_max") return idm.a_max;
  if (name == "b") return idm.b_comfort;
  if (name == "v0") return idm.v0_desired;
  if (name == "delta") return idm.delta_exponent;
  if (name == "w_progress") return w.w_progress;
  if (name == "w_timing") return w.w_timing;
  if (name == "w_comfort") return w.w_comfort;
  throw std::invalid_argument("unknown tuning parameter '" + name + "'");
}

GridResult grid_search(
  const std::vector<GeneratedScenario> & corpus, const PlannerParams & base, const GridSpec & grid,
  Execution exec)
{
  if (corpus.empty()) {
    throw std::invalid_argument("grid_search: empty corpus");
  }
  if (grid.axes.empty()) {
    throw std::invalid_argument("grid_search: no axes");
  }
  GridResult out;
  std::size_t points = 1;
  for (const auto & [name, values] : grid.axes) {
    get_tuning_param(base, name);
    if (values.empty()) {
      throw std::invalid_argument("grid_search: axis '" + name + "' is empty");
    }
    if (points > kMaxGridPoints / values.size()) {
      throw std::invalid_argument("grid_search: more than 10000 grid points");
    }
    points *= values.size();
    out.names.push_back(name);
  }

  std::vector<PlannerParams> params(points, base);
  out.rows.resize(points);
  for (std::size_t p = 0; p < points; ++p) {
    std::size_t rem = p;
    std::vector<double> values(grid.axes.size());
    for (std::size_t a = grid.axes.size(); a-- > 0;) {
      const auto & axis = grid.axes[a].second;
      values[a] = axis[rem % axis.size()];
      rem /= axis.size();
    }
    for (std::size_t a = 0; a < values.size(); ++a) {
      set_tuning_param(params[p], grid.axes[a].first, values[a]);
    }
    validate(params[p].pdm);
    out.rows[p].values = std::move(values);
  }

  const std::size_t n = corpus.size();
  std::vector<char> collided(points * n, 0);
  parallel_for(static_cast<int>(points * n), exec, [&](int k) {
    const std::size_t p = static_cast<std::size_t>(k) / n;
    const std::size_t i = static_cast<std::size_t>(k) % n;
    collided[static_cast<std::size_t>(k)] =
      rollout(corpus[i], PlannerKind::PDM, params[p]).collided ? 1 : 0;
  });
  for (std::size_t p = 0; p < points; ++p) {
    int hit = 0;
    for (std::size_t i = 0; i < n; ++i) hit += collided[p * n + i];
    out.rows[p].mean_rate = static_cast<double>(hit) / static_cast<double>(n);
    if (out.rows[p].mean_rate < out.rows[out.best_index].mean_rate) {
      out.best_index = p;
    }
  }
  out.best = params[out.best_index];
  return out;
}

// ---------------------------------------------------------------------------------------

std::string report_csv(const MetricReport & report)
{
  std::ostringstream os;
  os << "ctype,tta_bucket,n,collision_rate,similarity\n";
  for (const auto & c : report.cells) {
    os << to_string(c.ctype) << ',' << tta_bucket_label(c.bucket) << ',' << c.n << ','
       << fmt_opt(c.collision_rate) << ',' << fmt_opt(c.similarity) << '\n';
  }
  os << "all,all," << report.n << ',' << fmt_opt(report.collision_rate) << ','
     << fmt_opt(report.similarity) << '\n';
  return os.str();
}

std::string grid_csv(const GridResult & result)
{
  std::ostringstream os;
  for (const auto & name : result.names) os << name << ',';
  os << "mean_rate\n";
  for (const auto & row : result.rows) {
    for (double v : row.values) os << fmt(v, "%g") << ',';
    os << fmt(row.mean_rate) << '\n';
  }
  return os.str();
}

std::string outcome_jsonl(const std::vector<Outcome> & outcomes)
{
  std::string out;
  for (const auto & o : outcomes) {
    nlohmann::ordered_json j;
    j["scenario_id"] = o.scenario_id;
    j["requested"] = to_string(o.requested);
    j["tta_bucket"] = tta_bucket_label(o.bucket);
    j["collided"] = o.collided;
    j["realized"] = o.realized ? nlohmann::ordered_json(to_string(*o.realized)) : nullptr;
    if (!o.error.empty()) j["error"] = o.error;
    out += j.dump();
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------------------

std::string render_svg(const GeneratedScenario & g)
{
  constexpr double kScale = 4.0;
  constexpr double kMargin = 10.0;
  const Scenario & sc = g.scenario;
  const AgentTrack & ego = sc.ego();
  const AgentTrack * atk = sc.find_agent(g.pattern.attacker_id);
  if (!atk) {
    throw std::invalid_argument("render_svg: unknown attacker " + g.pattern.attacker_id);
  }
  auto valid_points = [](const AgentTrack & a) {
    std::vector<Vec2> pts;
    for (int f = 0; f < a.num_frames(); ++f) {
      if (a.is_valid(f)) pts.push_back(a.states[static_cast<std::size_t>(f)].position());
    }
    return pts;
  };
  const auto ego_pts = valid_points(ego);
  const auto atk_pts = valid_points(*atk);

  double min_x = 1e300, min_y = 1e300, max_x = -1e300, max_y = -1e300;
  auto extend = [&](Vec2 p) {
    min_x = std::min(min_x, p.x);
    min_y = std::min(min_y, p.y);
    max_x = std::max(max_x, p.x);
    max_y = std::max(max_y, p.y);
  };
  for (const auto & lane : sc.map.lanes)
    for (const auto & p : lane.points) extend(p);
  for (const auto & p : ego_pts) extend(p);
  for (const auto & p : atk_pts) extend(p);
  if (min_x > max_x) {
    min_x = min_y = 0.0;
    max_x = max_y = 1.0;
  }
  min_x -= kMargin;
  min_y -= kMargin;
  max_x += kMargin;
  max_y += kMargin;
  auto px = [&](Vec2 p) {
    return fmt((p.x - min_x) * kScale, "%.2f") + "," + fmt((max_y - p.y) * kScale, "%.2f");
  };
  auto polyline = [&](const std::vector<Vec2> & pts, const std::string & style) {
    std::string s = "  <polyline fill=\"none\" " + style + " points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i) s += ' ';
      s += px(pts[i]);
    }
    return s + "\"/>\n";
  };
  auto box = [&](const OrientedBox & b, const std::string & colour) {
    std::string s = "  <polygon fill=\"none\" stroke=\"" + colour + "\" stroke-width=\"2\" points=\"";
    const auto c = b.corners();
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (i) s += ' ';
      s += px(c[i]);
    }
    return s + "\"/>\n";
  };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt((max_x - min_x) * kScale, "%.0f")
     << "\" height=\"" << fmt((max_y - min_y) * kScale, "%.0f") << "\">\n";
  os << "  <defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"10\" refY=\"5\" "
        "markerWidth=\"6\" markerHeight=\"6\" orient=\"auto\"><path d=\"M0,0 L10,5 L0,10 z\" "
        "fill=\"#d62728\"/></marker></defs>\n";
  os << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (const auto & lane : sc.map.lanes) {
    os << polyline(lane.points, "stroke=\"#b0b0b0\" stroke-width=\"1\"");
  }
  os << polyline(ego_pts, "stroke=\"#2ca02c\" stroke-width=\"2\"");
  os << polyline(atk_pts, "stroke=\"#d62728\" stroke-width=\"2\" marker-end=\"url(#arrow)\"");
  os << box(g.pattern.ego_box, "#2ca02c");
  os << box(g.pattern.attacker_box, "#d62728");
  os << "</svg>\n";
  return os.str();
}

void write_text(const std::filesystem::path & path, const std::string & text)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  out << text;
  if (!out) {
    throw std::runtime_error("write failed for " + path.string());
  }
}

}  // namespace forge
