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

#include "forge/scene_io.hpp"

#include <fstream>
#include <sstream>

namespace forge
{

using nlohmann::json;

std::string dump_line(const json & j) { return j.dump(-1, ' ', false, json::error_handler_t::strict); }

json scenario_to_json(const Scenario & s)
{
  json lanes = json::array();
  for (const auto & lane : s.map.lanes) {
    json pts = json::array();
    for (const auto & p : lane.points) {
      pts.push_back({p.x, p.y});
    }
    lanes.push_back({{"id", lane.id}, {"points", pts}, {"successors", lane.successors}});
  }
  json drivable = json::array();
  for (const auto & poly : s.map.drivable) {
    json ring = json::array();
    for (const auto & p : poly) {
      ring.push_back({p.x, p.y});
    }
    drivable.push_back(ring);
  }
  json agents = json::array();
  for (const auto & a : s.agents) {
    json states = json::array();
    for (const auto & st : a.states) {
      states.push_back({st.x, st.y, st.theta});
    }
    json valid = json::array();
    for (bool v : a.valid) {
      valid.push_back(v);
    }
    agents.push_back(
      {{"id", a.id}, {"length", a.length}, {"width", a.width}, {"states", states},
       {"valid", valid}});
  }
  json j;
  j["id"] = s.id;
  j["rate_hz"] = 2;
  j["map"] = {{"lanes", lanes}, {"drivable", drivable}};
  j["agents"] = agents;
  j["ego_id"] = s.ego_id;
  return j;
}

namespace
{

Vec2 read_point(const json & p)
{
  if (!p.is_array() || p.size() != 2) {
    throw ScenarioError("point must be [x, y]");
  }
  return {p.at(0).get<double>(), p.at(1).get<double>()};
}

}  // namespace

Scenario scenario_from_json(const json & j)
{
  Scenario s;
  try {
    s.id = j.at("id").get<std::string>();
    s.rate_hz = j.at("rate_hz").get<double>();
    s.ego_id = j.at("ego_id").get<std::string>();
    const json & map = j.at("map");
    for (const auto & jl : map.at("lanes")) {
      LanePolyline lane;
      lane.id = jl.at("id").get<std::string>();
      for (const auto & p : jl.at("points")) {
        lane.points.push_back(read_point(p));
      }
      lane.successors = jl.at("successors").get<std::vector<std::string>>();
      s.map.lanes.push_back(std::move(lane));
    }
    for (const auto & ring : map.at("drivable")) {
      Polygon poly;
      for (const auto & p : ring) {
        poly.push_back(read_point(p));
      }
      s.map.drivable.push_back(std::move(poly));
    }
    for (const auto & ja : j.at("agents")) {
      AgentTrack a;
      a.id = ja.at("id").get<std::string>();
      a.length = ja.at("length").get<double>();
      a.width = ja.at("width").get<double>();
      for (const auto & st : ja.at("states")) {
        if (!st.is_array() || st.size() != 3) {
          throw ScenarioError("state must be [x, y, theta]");
        }
        a.states.emplace_back(st[0].get<double>(), st[1].get<double>(), st[2].get<double>());
      }
      for (const auto & v : ja.at("valid")) {
        a.valid.push_back(v.get<bool>());
      }
      s.agents.push_back(std::move(a));
    }
  } catch (const json::exception & e) {
    throw ScenarioError("scenario " + s.id + ": schema error: " + e.what());
  } catch (const std::invalid_argument & e) {
    throw ScenarioError("scenario " + s.id + ": " + e.what());
  }
  s.update_duration();
  validate(s);
  return s;
}

std::vector<Scenario> load_scenarios(const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path.string());
  }
  std::vector<Scenario> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error & e) {
      std::ostringstream os;
      os << path.string() << ":" << line_no << ": parse error: " << e.what();
      throw ScenarioError(os.str());
    }
    try {
      out.push_back(scenario_from_json(j));
    } catch (const ScenarioError & e) {
      std::ostringstream os;
      os << path.string() << ":" << line_no << ": " << e.what();
      throw ScenarioError(os.str());
    }
  }
  return out;
}

void save_scenarios(const std::vector<Scenario> & scenarios, const std::filesystem::path & path)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  for (const auto & s : scenarios) {
    out << dump_line(scenario_to_json(s)) << '\n';
  }
  if (!out) {
    throw std::runtime_error("write failed for " + path.string());
  }
}

}  // namespace forge
