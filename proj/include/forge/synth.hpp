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

#ifndef FORGE__SYNTH_HPP_
#define FORGE__SYNTH_HPP_

#include "forge/scene.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace forge
{

enum class SceneKind { Straight, TwoLane, FourWay };

std::string to_string(SceneKind kind);
std::optional<SceneKind> parse_scene_kind(const std::string & name);

/// Deterministic collision-free 20 s, 2 Hz scene with an ego and 2-6 lane-following vehicles.
///
/// straight: one-way road with two same-direction lanes.
/// two_lane: bidirectional road with one lane per direction.
/// four_way: crossing of two roads with two lanes per direction and left-turn connectors;
///           the ego crosses the junction 4.5-9 s after the 4 s history window, and at least
///           one vehicle performs a left turn.
Scenario synth_scene(SceneKind kind, std::uint64_t seed);

/// n scenes of one kind with seeds derived from base_seed.
std::vector<Scenario> synth_batch(SceneKind kind, int n, std::uint64_t base_seed);

}  // namespace forge

#endif  // FORGE__SYNTH_HPP_
