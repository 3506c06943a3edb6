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

#ifndef FORGE__GEOMETRY_HPP_
#define FORGE__GEOMETRY_HPP_

#include <array>
#include <span>
#include <vector>

namespace forge
{

inline constexpr double kPi = 3.14159265358979323846;

/// Contact tolerance (meters) used by the overlap test. Boxes whose SAT margin is at
/// least -kContactTolerance are reported as overlapping, so exact contact counts.
inline constexpr double kContactTolerance = 1e-9;

struct Vec2
{
  double x{0.0};
  double y{0.0};
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
double norm(Vec2 a);

/// Wraps an angle into (-pi, pi]. Throws std::invalid_argument on non-finite input.
double normalize_angle(double a);

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

/// Planar pose. The heading is counterclockwise from +x and is normalized on construction.
struct Pose2D
{
  double x{0.0};
  double y{0.0};
  double theta{0.0};

  Pose2D() = default;
  Pose2D(double x_, double y_, double theta_) : x(x_), y(y_), theta(normalize_angle(theta_)) {}

  Vec2 position() const { return {x, y}; }
  Vec2 heading_vector() const;
};

/// Absolute heading difference in degrees, in [0, 180]. Symmetric in its arguments.
double relative_heading(const Pose2D & a, const Pose2D & b);
double relative_heading(double theta_a, double theta_b);

Vec2 rotate(Vec2 v, double angle);
/// base (+) local: expresses a pose given in base's frame in the world frame.
Pose2D compose(const Pose2D & base, const Pose2D & local);
/// Inverse of compose: expresses a world pose in base's frame.
Pose2D relative_to(const Pose2D & base, const Pose2D & world);
Vec2 to_local(const Pose2D & base, Vec2 world_point);
Vec2 to_world(const Pose2D & base, Vec2 local_point);

/// Vehicle footprint positioned in the plane. length runs along the heading.
struct OrientedBox
{
  Pose2D center;
  double length{4.5};
  double width{2.0};

  OrientedBox() = default;
  /// Throws std::invalid_argument when length or width is not strictly positive.
  OrientedBox(const Pose2D & c, double l, double w);

  /// Counterclockwise corners starting at front-left.
  std::array<Vec2, 4> corners() const;
  bool contains(Vec2 p) const;
};

/// Separating-axis margin over the four edge normals: the smallest projected overlap.
/// Positive means penetration depth, negative means the boxes are separated by at least
/// that distance along some edge normal.
double sat_margin(const OrientedBox & a, const OrientedBox & b);

/// Closed-set intersection test; touching edges count as overlap.
bool boxes_overlap(const OrientedBox & a, const OrientedBox & b);

/// Euclidean distance between two boxes, zero when they overlap.
double box_distance(const OrientedBox & a, const OrientedBox & b);

using Polygon = std::vector<Vec2>;

/// Even-odd containment; points on the boundary count as inside.
bool point_in_polygon(Vec2 p, std::span<const Vec2> polygon);

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b);

}  // namespace forge

#endif  // FORGE__GEOMETRY_HPP_
