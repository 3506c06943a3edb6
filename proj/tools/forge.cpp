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
#include "forge/config.hpp"
#include "forge/corpus_io.hpp"
#include "forge/eval.hpp"
#include "forge/scene_io.hpp"
#include "forge/synth.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace forge;

namespace
{

constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

// Errors that should map to the usage exit code.
class UsageError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct Common
{
  std::uint64_t seed{0};
  int jobs{0};
  std::string config;
};

Execution setup_jobs(int jobs)
{
  if (jobs > 0) omp_set_num_threads(jobs);
  return jobs == 1 ? Execution::Serial : Execution::Parallel;
}

Config load(const Common & c)
{
  return resolve_config(c.config.empty() ? std::nullopt : std::optional<fs::path>(c.config));
}

CollisionType parse_type(const std::string & s)
{
  const auto t = parse_collision_type(s);
  if (!t) throw UsageError("unknown collision type '" + s + "'");
  return *t;
}

std::vector<Scenario> load_all(const std::vector<std::string> & files)
{
  std::vector<Scenario> out;
  for (const auto & f : files) {
    auto part = load_scenarios(f);
    out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  return out;
}

GridSpec load_grid(const fs::path & path)
{
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read grid " + path.string());
  GridSpec grid;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line.resize(h);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("grid line " + std::to_string(lineno) + ": expected name = v1, v2, ...");
    }
    std::string name = line.substr(0, eq);
    name.erase(0, name.find_first_not_of(" \t"));
    name.erase(name.find_last_not_of(" \t\r") + 1);
    std::vector<double> values;
    std::stringstream ss(line.substr(eq + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(item, &used));
        if (item.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument("");
      } catch (const std::logic_error &) {
        throw ConfigError("grid line " + std::to_string(lineno) + ": bad value '" + item + "'");
      }
    }
    grid.axes.emplace_back(name, values);
  }
  return grid;
}

std::string params_text(const GridResult & r)
{
  std::string out = "# best grid point\n";
  for (std::size_t i = 0; i < r.names.size(); ++i) {
    std::ostringstream os;
    os << r.names[i] << " = " << r.rows[r.best_index].values[i] << '\n';
    out += os.str();
  }
  std::ostringstream os;
  os << "# mean_rate = " << r.rows[r.best_index].mean_rate << '\n';
  return out + os.str();
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"forge: collision scenario forging and planner evaluation"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--seed", common.seed, "seed for every random choice");
  app.add_option("--jobs", common.jobs, "worker threads (1 = serial, 0 = all cores)")
    ->check(CLI::NonNegativeNumber);
  app.add_option("--config", common.config, "key = value config file (else $FORGE_CONFIG)");

  // synth
  auto * synth = app.add_subcommand("synth", "write synthetic non-collision scenes");
  std::string kind_name = "four_way";
  int n_scenes = 50;
  std::string synth_out = "scenes.jsonl";
  synth->add_option("--kind", kind_name, "straight, two_lane or four_way");
  synth->add_option("--n", n_scenes, "number of scenes")->check(CLI::PositiveNumber);
  synth->add_option("--out", synth_out, "output JSONL");

  // generate
  auto * gen = app.add_subcommand("generate", "build a collision corpus with the pipeline");
  std::vector<std::string> gen_scenes;
  int per_cell = 10;
  std::string gen_out = "corpus";
  gen->add_option("--scenes", gen_scenes, "scene JSONL files")->required();
  gen->add_option("--per-cell", per_cell, "scenarios per (type, TTA bucket) cell")
    ->check(CLI::PositiveNumber);
  gen->add_option("--out", gen_out, "output corpus directory");

  // train
  auto * train_cmd = app.add_subcommand("train", "train the pattern predictor on a corpus");
  std::string train_corpus;
  std::string model_out = "model.json";
  train_cmd->add_option("--corpus", train_corpus, "corpus directory")->required();
  train_cmd->add_option("--out", model_out, "checkpoint path");

  // predict
  auto * predict = app.add_subcommand("predict", "learned generation on new scenes");
  std::string model_in;
  std::vector<std::string> pred_scenes;
  std::string ctype_name;
  double tta = 6.0;
  std::string gate_name = "full";
  std::string pred_out = "predicted";
  predict->add_option("--model", model_in, "checkpoint path")->required();
  predict->add_option("--scenes", pred_scenes, "scene JSONL files")->required();
  predict->add_option("--ctype", ctype_name, "collision type (default: cycle through all)");
  predict->add_option("--tta", tta, "time to accident (s)");
  predict->add_option("--gate", gate_name, "full, kinematic or none");
  predict->add_option("--out", pred_out, "output corpus directory");

  // evaluate
  auto * evaluate = app.add_subcommand("evaluate", "roll a planner out on a corpus");
  std::string eval_corpus;
  std::string planner_name = "idm";
  std::string params_file;
  std::string eval_out = "eval";
  evaluate->add_option("--corpus", eval_corpus, "corpus directory")->required();
  evaluate->add_option("--planner", planner_name, "replay, idm, rule or pdm");
  evaluate->add_option("--params", params_file, "planner parameter overrides (config format)");
  evaluate->add_option("--out", eval_out, "output directory");

  // tune
  auto * tune = app.add_subcommand("tune", "grid-search PDM parameters");
  std::string tune_corpus;
  std::string grid_file;
  std::string tune_out = "tune";
  tune->add_option("--corpus", tune_corpus, "corpus directory")->required();
  tune->add_option("--grid", grid_file, "grid file: name = v1, v2, ...")->required();
  tune->add_option("--out", tune_out, "output directory");

  // report
  auto * report = app.add_subcommand("report", "open-loop collision metrics of a corpus");
  std::string report_corpus;
  std::string report_out = "report.csv";
  report->add_option("--corpus", report_corpus, "corpus directory")->required();
  report->add_option("--out", report_out, "CSV path");

  // render
  auto * render = app.add_subcommand("render", "SVG drawings of corpus scenarios");
  std::string render_corpus;
  std::string render_out = "svg";
  int render_limit = 0;
  render->add_option("--corpus", render_corpus, "corpus directory")->required();
  render->add_option("--out", render_out, "output directory");
  render->add_option("--limit", render_limit, "render at most this many (0 = all)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    const int code = app.exit(e);
    if (code == 0) return kExitOk;
    std::cerr << app.help();
    return kExitUsage;
  }

  try {
    const Execution exec = setup_jobs(common.jobs);
    const Config cfg = load(common);

    if (*synth) {
      const auto kind = parse_scene_kind(kind_name);
      if (!kind) throw UsageError("unknown scene kind '" + kind_name + "'");
      save_scenarios(synth_batch(*kind, n_scenes, common.seed), synth_out);
      std::cerr << "wrote " << n_scenes << " scenes to " << synth_out << '\n';
      return kExitOk;
    }

    if (*gen) {
      const auto scenes = load_all(gen_scenes);
      const Corpus corpus = build_corpus(scenes, per_cell, common.seed, cfg.pipeline, exec);
      fs::create_directories(gen_out);
      save_corpus(corpus, gen_out);
      std::cerr << "generated " << corpus.items.size() << " scenarios into " << gen_out << '\n';
      return corpus.items.empty() ? kExitInfeasible : kExitOk;
    }

    if (*train_cmd) {
      const auto items = load_corpus(train_corpus);
      PredictorModel model = PredictorModel::create(cfg.predictor, common.seed);
      TrainHyper hyper = cfg.train;
      hyper.seed = common.seed;
      const TrainReport rep = train(model, items, hyper);
      save_checkpoint(model, model_out);
      std::cerr << "trained on " << items.size() << " scenarios, final loss "
                << (rep.epoch_loss.empty() ? 0.0 : rep.epoch_loss.back()) << '\n';
      return kExitOk;
    }

    if (*predict) {
      GateMode gate = GateMode::Full;
      if (gate_name == "kinematic") gate = GateMode::KinematicOnly;
      else if (gate_name == "none") gate = GateMode::None;
      else if (gate_name != "full") throw UsageError("unknown gate '" + gate_name + "'");
      std::optional<CollisionType> fixed;
      if (!ctype_name.empty()) fixed = parse_type(ctype_name);
      tta_frames(tta);  // validates the grid before any work
      const PredictorModel model = load_checkpoint(model_in);
      const auto scenes = load_all(pred_scenes);
      std::vector<BuildResult> results(scenes.size());
      parallel_for(static_cast<int>(scenes.size()), exec, [&](int i) {
        const auto idx = static_cast<std::size_t>(i);
        GenerationRequest req;
        req.ctype = fixed ? *fixed : kAllCollisionTypes[idx % kAllCollisionTypes.size()];
        req.tta_s = tta;
        req.seed = mix_seed(common.seed, idx);
        results[idx] = generate(scenes[idx], cfg.pipeline.t_hist, req, model, cfg.pipeline, gate);
      });
      std::vector<GeneratedScenario> ok;
      std::string log;
      for (std::size_t i = 0; i < results.size(); ++i) {
        if (auto * g = std::get_if<GeneratedScenario>(&results[i])) {
          ok.push_back(std::move(*g));
        } else {
          const auto & bad = std::get<Infeasible>(results[i]);
          log += scenes[i].id + ": infeasible (" + to_string(bad.reason) + ")\n";
        }
      }
      fs::create_directories(pred_out);
      save_generated(ok, pred_out);
      write_text(fs::path(pred_out) / "infeasible.txt", log);
      std::cerr << "generated " << ok.size() << " of " << scenes.size() << " requests\n";
      return ok.empty() ? kExitInfeasible : kExitOk;
    }

    if (*evaluate) {
      const auto planner = parse_planner(planner_name);
      if (!planner) throw UsageError("unknown planner '" + planner_name + "'");
      const Config pcfg = params_file.empty() ? cfg : load_config(params_file);
      const auto items = load_corpus(eval_corpus);
      const auto runs = planner_table(items, {*planner}, pcfg.planner, exec);
      fs::create_directories(eval_out);
      write_text(fs::path(eval_out) / "results.jsonl", outcome_jsonl(runs[0].outcomes));
      write_text(fs::path(eval_out) / "aggregate.csv", report_csv(runs[0].report));
      std::cerr << to_string(*planner) << " collision rate "
                << runs[0].report.collision_rate.value_or(0.0) << " over " << runs[0].report.n
                << " scenarios\n";
      return kExitOk;
    }

    if (*tune) {
      const auto items = load_corpus(tune_corpus);
      const GridResult r = grid_search(items, cfg.planner, load_grid(grid_file), exec);
      fs::create_directories(tune_out);
      write_text(fs::path(tune_out) / "grid.csv", grid_csv(r));
      write_text(fs::path(tune_out) / "best.txt", params_text(r));
      std::cerr << "best mean rate " << r.rows[r.best_index].mean_rate << '\n';
      return kExitOk;
    }

    if (*report) {
      const auto items = load_corpus(report_corpus);
      std::vector<Outcome> outcomes(items.size());
      parallel_for(static_cast<int>(items.size()), exec, [&](int i) {
        outcomes[static_cast<std::size_t>(i)] = replay_outcome(items[static_cast<std::size_t>(i)]);
      });
      write_text(report_out, report_csv(summarize(outcomes, "replay")));
      return kExitOk;
    }

    if (*render) {
      const auto items = load_corpus(render_corpus);
      fs::create_directories(render_out);
      const std::size_t n = render_limit > 0
                              ? std::min(items.size(), static_cast<std::size_t>(render_limit))
                              : items.size();
      for (std::size_t i = 0; i < n; ++i) {
        std::string name = items[i].scenario.id;
        for (char & ch : name) {
          if (ch == ':' || ch == '/') ch = '_';
        }
        write_text(fs::path(render_out) / (name + ".svg"), render_svg(items[i]));
      }
      return kExitOk;
    }
  } catch (const UsageError & e) {
    std::cerr << "forge: " << e.what() << '\n' << app.help();
    return kExitUsage;
  } catch (const std::invalid_argument & e) {
    std::cerr << "forge: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception & e) {
    std::cerr << "forge: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitUsage;
}
