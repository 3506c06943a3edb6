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

#ifndef FORGE__COLLISION_PATTERNS_HPP_
#define FORGE__COLLISION_PATTERNS_HPP_

#include "forge/geometry.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace forge
{

enum class CollisionType { LaneChange, OppositeDirection, RearEnd, JunctionCrossing, LTAP };

inline constexpr std::array<CollisionType, 5> kAllCollisionTypes = {
  CollisionType::LaneChange, CollisionType::OppositeDirection, CollisionType::RearEnd,
  CollisionType::JunctionCrossing, CollisionType::LTAP};

/// Half-width of every angle band, degrees.
inline constexpr double kAngleTolerance = 10.0;

/// snake_case name: lane_change, opposite_direction, rear_end, junction_crossing, ltap.
std::string to_string(CollisionType type);
std::optional<CollisionType> parse_collision_type(const std::string & name);
int type_index(CollisionType type);

/// Nominal relative heading in degrees (unsigned).
double nominal_angle(CollisionType type);

/// Band lookup on the unsigned impact relative heading. RearEnd is tested first, so the
/// 10 degree boundary shared with LaneChange belongs to RearEnd. Inside the 90 degree band
/// the entry headings (radians) decide between JunctionCrossing and LTAP. nullopt means
/// Unclassified.
std::optional<CollisionType> classify(
  const Pose2D & ego_impact, const Pose2D & attacker_impact, double ego_entry_heading,
  double attacker_entry_heading);

/// Which ego side face a side-contact attacker touches.
enum class Side { Right, Left };

/// Signed nominal angle (attacker heading minus ego heading, degrees) for a type and side.
/// LTAP always comes from the left; RearEnd and OppositeDirection ignore the side.
double signed_nominal_angle(CollisionType type, Side side);

/// Attacker pose in exact contact with the ego box.
///
/// angle_deg is the signed attacker-minus-ego heading and must lie inside one of the type's
/// bands; its sign picks the face for side-contact types. contact in [-1, 1] slides the
/// touching point along a side face (ignored for front/rear contact). Throws
/// std::invalid_argument for out-of-band angles or contact values.
Pose2D target_pose(
  const OrientedBox & ego_box, CollisionType type, double angle_deg, double contact = 0.0,
  double attacker_length = 4.5, double attacker_width = 2.0);

struct TargetCandidate
{
  Pose2D pose;
  double angle_deg{0.0};
  double contact{0.0};
};

/// Nearest pattern-consistent target to a free attacker pose: the relative heading is
/// clamped to within band_fraction * tolerance of the nominal angle of the closer side and
/// the contact point is read off the pose's offset along the struck face.
TargetCandidate snap_to_pattern(
  const OrientedBox & ego_box, CollisionType type, const Pose2D & attacker_pose,
  double band_fraction = 0.7, double attacker_length = 4.5, double attacker_width = 2.0);

/// n_angles target poses. Angles span the band uniformly (endpoints included, except
/// LaneChange which uses cell centres so no sample falls on the RearEnd boundary); the
/// contact point is swept in step with the angle for side-contact types.
std::vector<TargetCandidate> enumerate_candidates(
  const OrientedBox & ego_box, CollisionType type, int n_angles, Side side = Side::Right,
  double attacker_length = 4.5, double attacker_width = 2.0);

/// Fraction of the ego half-length usable by a side contact sweep.
inline constexpr double kSideContactFraction = 0.4;

struct CollisionPattern
{
  OrientedBox ego_box;
  OrientedBox attacker_box;
  std::string attacker_id;
  CollisionType ctype{CollisionType::RearEnd};
  double tta_s{4.5};
};

}  // namespace forge

#endif  // FORGE__COLLISION_PATTERNS_HPP_
