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

#ifndef FORGE__CONFIG_HPP_
#define FORGE__CONFIG_HPP_

#include "forge/pipeline.hpp"
#include "forge/planners.hpp"
#include "forge/predictor.hpp"

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace forge
{

class ConfigError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct Config
{
  PipelineOptions pipeline;
  PredictorConfig predictor;
  TrainHyper train;
  PlannerParams planner;
  std::string output_dir{"forge_out"};
};

/// Documented keys with their defaults, in file order.
std::vector<std::pair<std::string, std::string>> config_keys();

/// key = value lines; '#' starts a comment. Unknown keys, malformed lines and invalid values
/// throw ConfigError naming the line.
Config parse_config(const std::string & text);
Config load_config(const std::filesystem::path & path);
/// --config path if given, else $FORGE_CONFIG if set, else defaults.
Config resolve_config(const std::optional<std::filesystem::path> & path);
/// Defaults rendered as a config file.
std::string default_config_text();

}  // namespace forge

#endif  // FORGE__CONFIG_HPP_
