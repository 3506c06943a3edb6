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

#include "forge/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <type_traits>
#include <variant>

namespace forge
{

namespace
{

using Accessor = std::variant<std::function<double &(Config &)>, std::function<int &(Config &)>,
                              std::function<std::string &(Config &)>>;

struct Key
{
  const char * name;
  Accessor access;
};

const std::vector<Key> & keys()
{
  static const std::vector<Key> table = {
    {"limits.v_max", [](Config & c) -> double & { return c.pipeline.limits.v_max; }},
    {"limits.a_max", [](Config & c) -> double & { return c.pipeline.limits.a_max; }},
    {"limits.kappa_max", [](Config & c) -> double & { return c.pipeline.limits.kappa_max; }},
    {"pipeline.t_hist", [](Config & c) -> int & { return c.pipeline.t_hist; }},
    {"pipeline.n_angles", [](Config & c) -> int & { return c.pipeline.n_angles; }},
    {"pipeline.min_end_speed", [](Config & c) -> double & { return c.pipeline.min_end_speed; }},
    {"predictor.anchor_radius", [](Config & c) -> double & { return c.predictor.anchor_radius; }},
    {"predictor.anchor_spacing", [](Config & c) -> double & { return c.predictor.anchor_spacing; }},
    {"predictor.window", [](Config & c) -> double & { return c.predictor.window; }},
    {"predictor.local_radius", [](Config & c) -> double & { return c.predictor.local_radius; }},
    {"predictor.snap_fraction", [](Config & c) -> double & { return c.predictor.snap_fraction; }},
    {"predictor.attacker_proposals",
     [](Config & c) -> int & { return c.predictor.attacker_proposals; }},
    {"train.epochs", [](Config & c) -> int & { return c.train.epochs; }},
    {"train.batch", [](Config & c) -> int & { return c.train.batch; }},
    {"train.lr", [](Config & c) -> double & { return c.train.lr; }},
    {"train.negatives", [](Config & c) -> int & { return c.train.negatives; }},
    {"idm.v0", [](Config & c) -> double & { return c.planner.idm.v0_desired; }},
    {"idm.T", [](Config & c) -> double & { return c.planner.idm.T_headway; }},
    {"idm.s0", [](Config & c) -> double & { return c.planner.idm.s0_min_gap; }},
    {"idm.a_max", [](Config & c) -> double & { return c.planner.idm.a_max; }},
    {"idm.b", [](Config & c) -> double & { return c.planner.idm.b_comfort; }},
    {"idm.delta", [](Config & c) -> double & { return c.planner.idm.delta_exponent; }},
    {"rule.t_brake", [](Config & c) -> double & { return c.planner.rule.t_brake; }},
    {"rule.t_clear", [](Config & c) -> double & { return c.planner.rule.t_clear; }},
    {"pdm.s0", [](Config & c) -> double & { return c.planner.pdm.idm.s0_min_gap; }},
    {"pdm.T", [](Config & c) -> double & { return c.planner.pdm.idm.T_headway; }},
    {"pdm.w_progress", [](Config & c) -> double & { return c.planner.pdm.weights.w_progress; }},
    {"pdm.w_timing", [](Config & c) -> double & { return c.planner.pdm.weights.w_timing; }},
    {"pdm.w_comfort", [](Config & c) -> double & { return c.planner.pdm.weights.w_comfort; }},
    {"pdm.horizon", [](Config & c) -> double & { return c.planner.pdm.horizon_s; }},
    {"pdm.replan", [](Config & c) -> double & { return c.planner.pdm.replan_s; }},
    {"planner.corridor", [](Config & c) -> double & { return c.planner.corridor; }},
    {"planner.lead_lookahead", [](Config & c) -> double & { return c.planner.lead_lookahead_s; }},
    {"output.dir", [](Config & c) -> std::string & { return c.output_dir; }},
  };
  return table;
}

std::string trim(const std::string & s)
{
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string show(const Accessor & a, Config m)
{
  return std::visit(
    [&](const auto & f) -> std::string {
      const auto & v = f(m);
      if constexpr (std::is_same_v<std::decay_t<decltype(v)>, std::string>) {
        return v;
      } else {
        std::ostringstream os;
        os << v;
        return os.str();
      }
    },
    a);
}

void assign(const Accessor & a, Config & c, const std::string & value)
{
  std::visit(
    [&](const auto & f) {
      auto & dst = f(c);
      using T = std::decay_t<decltype(dst)>;
      if constexpr (std::is_same_v<T, std::string>) {
        if (value.empty()) throw ConfigError("empty value");
        dst = value;
      } else {
        T out{};
        const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
        if (ec != std::errc() || ptr != value.data() + value.size()) {
          throw ConfigError("cannot parse '" + value + "'");
        }
        if constexpr (std::is_same_v<T, double>) {
          if (!std::isfinite(out)) throw ConfigError("non-finite value");
        }
        dst = out;
      }
    },
    a);
}

void check(const Config & c)
{
  const auto & l = c.pipeline.limits;
  if (!(l.v_max > 0.0 && l.a_max > 0.0 && l.kappa_max > 0.0)) {
    throw ConfigError("feasibility limits must be positive");
  }
  if (c.pipeline.t_hist < 4) throw ConfigError("pipeline.t_hist must be at least 4");
  if (c.pipeline.n_angles < 1) throw ConfigError("pipeline.n_angles must be at least 1");
  if (!(c.pipeline.min_end_speed >= 0.0)) throw ConfigError("pipeline.min_end_speed must be >= 0");
  const auto & p = c.predictor;
  if (!(p.anchor_radius > 0.0 && p.anchor_spacing > 0.0 && p.window > 0.0 && p.local_radius > 0.0)) {
    throw ConfigError("predictor distances must be positive");
  }
  if (p.snap_fraction > 1.0) throw ConfigError("predictor.snap_fraction must be <= 1");
  if (p.attacker_proposals < 1) throw ConfigError("predictor.attacker_proposals must be >= 1");
  if (c.train.epochs < 0 || c.train.batch < 1 || !(c.train.lr > 0.0) || c.train.negatives < 0) {
    throw ConfigError("invalid training settings");
  }
  if (!(c.planner.rule.t_brake > 0.0 && c.planner.rule.t_clear >= c.planner.rule.t_brake)) {
    throw ConfigError("rule thresholds need 0 < t_brake <= t_clear");
  }
  if (!(c.planner.corridor > 0.0 && c.planner.lead_lookahead_s >= 0.0)) {
    throw ConfigError("planner.corridor must be positive and planner.lead_lookahead >= 0");
  }
  try {
    validate(c.planner.idm);
    validate(c.planner.pdm);
  } catch (const std::invalid_argument & e) {
    throw ConfigError(e.what());
  }
}

}  // namespace

std::vector<std::pair<std::string, std::string>> config_keys()
{
  const Config defaults;
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto & k : keys()) out.emplace_back(k.name, show(k.access, defaults));
  return out;
}

Config parse_config(const std::string & text)
{
  Config c;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = "config line " + std::to_string(lineno) + ": ";
    if (eq == std::string::npos) {
      throw ConfigError(where + "expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const Key * match = nullptr;
    for (const auto & k : keys()) {
      if (key == k.name) match = &k;
    }
    if (!match) {
      throw ConfigError(where + "unknown key '" + key + "'");
    }
    if (!seen.insert(key).second) {
      throw ConfigError(where + "duplicate key '" + key + "'");
    }
    try {
      assign(match->access, c, value);
    } catch (const ConfigError & e) {
      throw ConfigError(where + key + ": " + e.what());
    }
  }
  check(c);
  return c;
}

Config load_config(const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot read config " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

Config resolve_config(const std::optional<std::filesystem::path> & path)
{
  if (path) return load_config(*path);
  if (const char * env = std::getenv("FORGE_CONFIG"); env && *env) return load_config(env);
  return Config{};
}

std::string default_config_text()
{
  std::string out = "# forge configuration (defaults)\n";
  for (const auto & [k, v] : config_keys()) out += k + " = " + v + "\n";
  return out;
}

}  // namespace forge
