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

#include <algorithm>
#include "forge/collision_patterns.hpp"

#include <cmath>
#include <stdexcept>

namespace forge
{

namespace
{

constexpr double kBandEps = 1e-9;

bool in_range(double x, double lo, double hi)
{
  return x >= lo - kBandEps && x <= hi + kBandEps;
}

// signed degrees in (-180, 180]
double wrap_deg(double d)
{
  return rad2deg(normalize_angle(deg2rad(d)));
}

double sgn0(double x)
{
  if (std::abs(x) < 1e-12) {
    return 0.0;
  }
  return x > 0.0 ? 1.0 : -1.0;
}

enum class Face { Rear, Front, Right, Left };

std::optional<Face> face_for(CollisionType type, double angle_deg)
{
  const double a = wrap_deg(angle_deg);
  switch (type) {
    case CollisionType::RearEnd:
      if (in_range(a, -kAngleTolerance, kAngleTolerance)) return Face::Rear;
      break;
    case CollisionType::OppositeDirection:
      if (std::abs(wrap_deg(a - 180.0)) <= kAngleTolerance + kBandEps) return Face::Front;
      break;
    case CollisionType::LaneChange:
      if (in_range(a, 10.0, 30.0)) return Face::Right;
      if (in_range(a, -30.0, -10.0)) return Face::Left;
      break;
    case CollisionType::JunctionCrossing:
      if (in_range(a, 80.0, 100.0)) return Face::Right;
      if (in_range(a, -100.0, -80.0)) return Face::Left;
      break;
    case CollisionType::LTAP:
      if (in_range(a, -100.0, -80.0)) return Face::Left;
      break;
  }
  return std::nullopt;
}

}  // namespace

std::string to_string(CollisionType type)
{
  switch (type) {
    case CollisionType::LaneChange:
      return "lane_change";
    case CollisionType::OppositeDirection:
      return "opposite_direction";
    case CollisionType::RearEnd:
      return "rear_end";
    case CollisionType::JunctionCrossing:
      return "junction_crossing";
    case CollisionType::LTAP:
      return "ltap";
  }
  return "unknown";
}

std::optional<CollisionType> parse_collision_type(const std::string & name)
{
  for (CollisionType t : kAllCollisionTypes) {
    if (to_string(t) == name) {
      return t;
    }
  }
  return std::nullopt;
}

int type_index(CollisionType type)
{
  for (std::size_t i = 0; i < kAllCollisionTypes.size(); ++i) {
    if (kAllCollisionTypes[i] == type) {
      return static_cast<int>(i);
    }
  }
  return -1;
}

double nominal_angle(CollisionType type)
{
  switch (type) {
    case CollisionType::RearEnd:
      return 0.0;
    case CollisionType::LaneChange:
      return 20.0;
    case CollisionType::OppositeDirection:
      return 180.0;
    case CollisionType::JunctionCrossing:
    case CollisionType::LTAP:
      return 90.0;
  }
  return 0.0;
}

std::optional<CollisionType> classify(
  const Pose2D & ego_impact, const Pose2D & attacker_impact, double ego_entry_heading,
  double attacker_entry_heading)
{
  const double rel = relative_heading(ego_impact, attacker_impact);
  if (rel <= kAngleTolerance + kBandEps) {
    return CollisionType::RearEnd;
  }
  if (std::abs(rel - 20.0) <= kAngleTolerance + kBandEps) {
    return CollisionType::LaneChange;
  }
  if (rel >= 180.0 - kAngleTolerance - kBandEps) {
    return CollisionType::OppositeDirection;
  }
  if (std::abs(rel - 90.0) <= kAngleTolerance + kBandEps) {
    const double entry = relative_heading(ego_entry_heading, attacker_entry_heading);
    if (in_range(entry, 80.0, 100.0)) {
      return CollisionType::JunctionCrossing;
    }
    if (entry >= 170.0 - kBandEps) {
      return CollisionType::LTAP;
    }
  }
  return std::nullopt;
}

double signed_nominal_angle(CollisionType type, Side side)
{
  const double s = side == Side::Right ? 1.0 : -1.0;
  switch (type) {
    case CollisionType::RearEnd:
      return 0.0;
    case CollisionType::OppositeDirection:
      return 180.0;
    case CollisionType::LaneChange:
      return 20.0 * s;
    case CollisionType::JunctionCrossing:
      return 90.0 * s;
    case CollisionType::LTAP:
      return -90.0;
  }
  return 0.0;
}

Pose2D target_pose(
  const OrientedBox & ego_box, CollisionType type, double angle_deg, double contact,
  double attacker_length, double attacker_width)
{
  const auto face = face_for(type, angle_deg);
  if (!face) {
    throw std::invalid_argument(
      "target_pose: angle " + std::to_string(angle_deg) + " outside the " + to_string(type) +
      " band");
  }
  if (!(std::abs(contact) <= 1.0)) {
    throw std::invalid_argument("target_pose: contact must lie in [-1, 1]");
  }
  const double he_l = 0.5 * ego_box.length;
  const double he_w = 0.5 * ego_box.width;
  Vec2 n;
  Vec2 tau;
  double h = 0.0;
  double t0 = 0.0;
  switch (*face) {
    case Face::Rear:
      n = {-1.0, 0.0};
      tau = {0.0, 1.0};
      h = he_l;
      break;
    case Face::Front:
      n = {1.0, 0.0};
      tau = {0.0, 1.0};
      h = he_l;
      break;
    case Face::Right:
      n = {0.0, -1.0};
      tau = {1.0, 0.0};
      h = he_w;
      t0 = contact * kSideContactFraction * he_l;
      break;
    case Face::Left:
      n = {0.0, 1.0};
      tau = {1.0, 0.0};
      h = he_w;
      t0 = contact * kSideContactFraction * he_l;
      break;
  }
  // attacker axes in the ego frame
  const double psi = deg2rad(angle_deg);
  const Vec2 u{std::cos(psi), std::sin(psi)};
  const Vec2 v{-std::sin(psi), std::cos(psi)};
  // the attacker point reaching furthest towards the ego face (a face centre when aligned)
  const Vec2 m = -1.0 * n;
  const Vec2 support =
    (0.5 * attacker_length * sgn0(dot(u, m))) * u + (0.5 * attacker_width * sgn0(dot(v, m))) * v;
  const Vec2 c = h * n + t0 * tau - support;
  return compose(ego_box.center, Pose2D(c.x, c.y, psi));
}

TargetCandidate snap_to_pattern(
  const OrientedBox & ego_box, CollisionType type, const Pose2D & attacker_pose,
  double band_fraction, double attacker_length, double attacker_width)
{
  if (!(band_fraction >= 0.0 && band_fraction <= 1.0)) {
    throw std::invalid_argument("snap_to_pattern: band_fraction must lie in [0, 1]");
  }
  const Pose2D rel = relative_to(ego_box.center, attacker_pose);
  const double angle = rad2deg(rel.theta);
  const Side side = angle >= 0.0 ? Side::Right : Side::Left;
  const double nominal = signed_nominal_angle(type, side);
  const double limit = band_fraction * kAngleTolerance;
  TargetCandidate out;
  out.angle_deg = wrap_deg(nominal + std::clamp(wrap_deg(angle - nominal), -limit, limit));
  const bool side_contact = type == CollisionType::LaneChange ||
                            type == CollisionType::JunctionCrossing ||
                            type == CollisionType::LTAP;
  if (side_contact) {
    const Pose2D centred =
      target_pose(ego_box, type, out.angle_deg, 0.0, attacker_length, attacker_width);
    const double along = to_local(ego_box.center, attacker_pose.position()).x -
                         to_local(ego_box.center, centred.position()).x;
    out.contact = std::clamp(along / (kSideContactFraction * 0.5 * ego_box.length), -1.0, 1.0);
  }
  out.pose =
    target_pose(ego_box, type, out.angle_deg, out.contact, attacker_length, attacker_width);
  return out;
}

std::vector<TargetCandidate> enumerate_candidates(
  const OrientedBox & ego_box, CollisionType type, int n_angles, Side side,
  double attacker_length, double attacker_width)
{
  if (n_angles < 1) {
    throw std::invalid_argument("enumerate_candidates: n_angles must be >= 1");
  }
  const double nominal = signed_nominal_angle(type, side);
  const bool side_contact = type == CollisionType::LaneChange ||
                            type == CollisionType::JunctionCrossing ||
                            type == CollisionType::LTAP;
  std::vector<TargetCandidate> out;
  out.reserve(static_cast<std::size_t>(n_angles));
  for (int i = 0; i < n_angles; ++i) {
    double frac = 0.5;  // position in [0, 1] across the band
    if (n_angles > 1) {
      frac = type == CollisionType::LaneChange ? (i + 0.5) / n_angles
                                               : static_cast<double>(i) / (n_angles - 1);
    }
    const double angle = nominal - kAngleTolerance + 2.0 * kAngleTolerance * frac;
    const double contact = side_contact && n_angles > 1 ? 2.0 * frac - 1.0 : 0.0;
    TargetCandidate cand;
    cand.angle_deg = wrap_deg(angle);
    cand.contact = contact;
    cand.pose =
      target_pose(ego_box, type, cand.angle_deg, contact, attacker_length, attacker_width);
    out.push_back(cand);
  }
  return out;
}

}  // namespace forge
