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

#ifndef FORGE__CHECKPOINT_HPP_
#define FORGE__CHECKPOINT_HPP_

#include "forge/predictor.hpp"

#include <json.hpp>

#include <filesystem>
#include <stdexcept>

namespace forge
{

class CheckpointError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// {"format": "forge-ckpt", "version": 1, "config": {...}, "tensors": {name: {shape, values}}}
/// with tensors named "<head>.<layer>.w" (out x in) and "<head>.<layer>.b".
nlohmann::json checkpoint_to_json(const PredictorModel & model);
/// Throws CheckpointError on a wrong format tag, version, missing tensor or shape mismatch.
PredictorModel checkpoint_from_json(const nlohmann::json & j);

void save_checkpoint(const PredictorModel & model, const std::filesystem::path & path);
PredictorModel load_checkpoint(const std::filesystem::path & path);

}  // namespace forge

#endif  // FORGE__CHECKPOINT_HPP_
