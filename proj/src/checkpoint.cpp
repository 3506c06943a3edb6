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

#include <fstream>
#include <string>
#include <type_traits>
#include <utility>

namespace forge
{

namespace
{

constexpr const char * kFormat = "forge-ckpt";
constexpr int kVersion = 1;

template <class Model>
auto heads(Model & m)
{
  using Net = std::conditional_t<std::is_const_v<Model>, const Mlp, Mlp>;
  return std::vector<std::pair<std::string, Net *>>{
    {"encoder", &m.encoder},
    {"anchor_scorer", &m.anchor_scorer},
    {"ego_regressor", &m.ego_regressor},
    {"attacker_offset", &m.attacker_offset},
    {"attacker_selector", &m.attacker_selector}};
}

void read_tensor(
  const nlohmann::json & tensors, const std::string & name, const std::vector<int> & shape,
  std::vector<double> & dst)
{
  if (!tensors.contains(name)) {
    throw CheckpointError("checkpoint: missing tensor " + name);
  }
  const auto & t = tensors.at(name);
  if (t.at("shape").get<std::vector<int>>() != shape) {
    throw CheckpointError("checkpoint: shape mismatch for " + name);
  }
  auto values = t.at("values").get<std::vector<double>>();
  if (values.size() != dst.size()) {
    throw CheckpointError("checkpoint: value count mismatch for " + name);
  }
  dst = std::move(values);
}

}  // namespace

nlohmann::json checkpoint_to_json(const PredictorModel & model)
{
  nlohmann::json j;
  j["format"] = kFormat;
  j["version"] = kVersion;
  j["config"] = {
    {"anchor_radius", model.config.anchor_radius},
    {"anchor_spacing", model.config.anchor_spacing},
    {"window", model.config.window},
    {"local_radius", model.config.local_radius},
    {"snap_fraction", model.config.snap_fraction},
    {"attacker_proposals", model.config.attacker_proposals},
  };
  nlohmann::json tensors = nlohmann::json::object();
  for (const auto & [name, net] : heads(model)) {
    const auto & layers = net->layers();
    for (std::size_t l = 0; l < layers.size(); ++l) {
      const std::string base = name + "." + std::to_string(l);
      tensors[base + ".w"] = {{"shape", {layers[l].out, layers[l].in}}, {"values", layers[l].w}};
      tensors[base + ".b"] = {{"shape", {layers[l].out}}, {"values", layers[l].b}};
    }
  }
  j["tensors"] = std::move(tensors);
  return j;
}

PredictorModel checkpoint_from_json(const nlohmann::json & j)
{
  try {
    if (j.at("format").get<std::string>() != kFormat) {
      throw CheckpointError("checkpoint: unknown format tag");
    }
    if (j.at("version").get<int>() != kVersion) {
      throw CheckpointError(
        "checkpoint: unsupported version " + std::to_string(j.at("version").get<int>()));
    }
    PredictorConfig config;
    const auto & c = j.at("config");
    config.anchor_radius = c.at("anchor_radius").get<double>();
    config.anchor_spacing = c.at("anchor_spacing").get<double>();
    config.window = c.at("window").get<double>();
    config.local_radius = c.at("local_radius").get<double>();
    config.snap_fraction = c.at("snap_fraction").get<double>();
    config.attacker_proposals = c.at("attacker_proposals").get<int>();
    PredictorModel model = PredictorModel::create(config, 0);
    const auto & tensors = j.at("tensors");
    for (const auto & [name, net] : heads(model)) {
      auto & layers = net->layers();
      for (std::size_t l = 0; l < layers.size(); ++l) {
        const std::string base = name + "." + std::to_string(l);
        read_tensor(tensors, base + ".w", {layers[l].out, layers[l].in}, layers[l].w);
        read_tensor(tensors, base + ".b", {layers[l].out}, layers[l].b);
      }
      if (!net->all_finite()) {
        throw CheckpointError("checkpoint: non-finite parameters in " + name);
      }
    }
    return model;
  } catch (const nlohmann::json::exception & e) {
    throw CheckpointError(std::string("checkpoint: malformed json: ") + e.what());
  }
}

void save_checkpoint(const PredictorModel & model, const std::filesystem::path & path)
{
  std::ofstream out(path);
  if (!out) {
    throw CheckpointError("checkpoint: cannot write " + path.string());
  }
  out << checkpoint_to_json(model).dump() << '\n';
}

PredictorModel load_checkpoint(const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) {
    throw CheckpointError("checkpoint: cannot read " + path.string());
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception & e) {
    throw CheckpointError("checkpoint: malformed json in " + path.string() + ": " + e.what());
  }
  return checkpoint_from_json(j);
}

}  // namespace forge
