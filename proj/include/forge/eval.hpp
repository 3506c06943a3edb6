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

#ifndef FORGE__EVAL_HPP_
#define FORGE__EVAL_HPP_

#include "forge/parallel.hpp"
#include "forge/pipeline.hpp"
#include "forge/planners.hpp"
#include "forge/predictor.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace forge
{

/// One evaluated case: what was requested and what happened.
struct Outcome
{
  std::string scenario_id;
  CollisionType requested{CollisionType::RearEnd};
  int bucket{0};
  bool collided{false};
  /// Classification at the first contact with the attacker; unset when unclassified or
  /// when the contact was with another agent.
  std::optional<CollisionType> realized;
  std::string error;  ///< non-empty when the case could not be evaluated
};

/// (#collided) / n. Throws std::invalid_argument on empty input.
double collision_rate(const std::vector<Outcome> & outcomes);
/// Fraction of colliding cases whose realized type equals the request; unset when nothing
/// collided.
std::optional<double> similarity(const std::vector<Outcome> & outcomes);

struct CellMetrics
{
  CollisionType ctype{CollisionType::RearEnd};
  int bucket{0};
  int n{0};
  int collisions{0};
  int similar{0};
  std::optional<double> collision_rate;  ///< unset for empty cells
  std::optional<double> similarity;
};

struct MetricReport
{
  std::string label;
  std::vector<CellMetrics> cells;  ///< 15 cells, type-major then bucket
  int n{0};
  int errors{0};
  std::optional<double> collision_rate;  ///< over every evaluated case
  std::optional<double> similarity;
};

/// Cases with a non-empty error are counted in errors and left out of the rates.
MetricReport summarize(const std::vector<Outcome> & outcomes, const std::string & label);

/// Open-loop replay of a generated scenario.
Outcome replay_outcome(const GeneratedScenario & generated);
/// Closed-loop outcome; realized is set only when the struck agent is the attacker.
Outcome rollout_outcome(const GeneratedScenario & generated, const RolloutResult & result);

struct PlannerRun
{
  PlannerKind planner{PlannerKind::Replay};
  std::vector<Outcome> outcomes;  ///< corpus order
  std::vector<RolloutResult> results;  ///< corpus order; default for failed cases
  MetricReport report;
};

/// Rolls every scenario out under every planner. Rollout errors are recorded per case.
std::vector<PlannerRun> planner_table(
  const std::vector<GeneratedScenario> & corpus, const std::vector<PlannerKind> & planners,
  const PlannerParams & params, Execution exec = Execution::Parallel);

/// Learned generation on held-out cases. A case counts as a collision when the replayed
/// attacker touches the ego no later than one frame after the requested collision frame.
struct GenerationCase
{
  const Scenario * scenario{nullptr};
  GenerationRequest request;
};

struct GenerationEval
{
  std::vector<Outcome> outcomes;
  MetricReport report;
  std::map<std::string, int> infeasible;  ///< reason -> count
};

GenerationEval evaluate_generation(
  const std::vector<GenerationCase> & cases, int t_hist, const PredictorModel & model,
  const PipelineOptions & options, GateMode gate, Execution exec = Execution::Parallel);

/// Named parameter axes; the last axis varies fastest in grid order.
struct GridSpec
{
  std::vector<std::pair<std::string, std::vector<double>>> axes;
};

inline constexpr std::size_t kMaxGridPoints = 10000;

/// Parameter names understood by the tuner: s0, T, a_max, b, v0, delta (the PDM's IDM
/// block) and w_progress, w_timing, w_comfort. Throws std::invalid_argument otherwise.
void set_tuning_param(PlannerParams & params, const std::string & name, double value);
double get_tuning_param(const PlannerParams & params, const std::string & name);

struct GridRow
{
  std::vector<double> values;
  double mean_rate{0.0};
};

struct GridResult
{
  std::vector<std::string> names;
  std::vector<GridRow> rows;  ///< grid order
  std::size_t best_index{0};
  PlannerParams best;
};

/// Exhaustive PDM tuning: minimizes the collision rate over the corpus (ties: first in grid
/// order). Throws std::invalid_argument on an empty corpus, an empty axis, an unknown name
/// or more than kMaxGridPoints points.
GridResult grid_search(
  const std::vector<GeneratedScenario> & corpus, const PlannerParams & base, const GridSpec & grid,
  Execution exec = Execution::Parallel);

/// ctype,tta_bucket,n,collision_rate,similarity (empty field when undefined), then an "all" row.
std::string report_csv(const MetricReport & report);
/// Parameter names then mean_rate, one row per grid point.
std::string grid_csv(const GridResult & result);
std::string outcome_jsonl(const std::vector<Outcome> & outcomes);

/// Lanes grey, ego track green, attacker track red with an arrowhead, impact boxes outlined.
std::string render_svg(const GeneratedScenario & generated);
void write_text(const std::filesystem::path & path, const std::string & text);

}  // namespace forge

#endif  // FORGE__EVAL_HPP_
