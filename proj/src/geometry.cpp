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

#include "forge/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace forge
{

double norm(Vec2 a) { return std::hypot(a.x, a.y); }

double normalize_angle(double a)
{
  if (!std::isfinite(a)) {
    throw std::invalid_argument("normalize_angle: non-finite angle");
  }
  double r = std::remainder(a, 2.0 * kPi);
  // values within rounding noise of -pi belong to the closed end
  if (r <= -kPi + 1e-12) {
    r += 2.0 * kPi;
  }
  return std::min(r, kPi);
}

Vec2 Pose2D::heading_vector() const { return {std::cos(theta), std::sin(theta)}; }

double relative_heading(double theta_a, double theta_b)
{
  return rad2deg(std::abs(normalize_angle(theta_a - theta_b)));
}

double relative_heading(const Pose2D & a, const Pose2D & b)
{
  return relative_heading(a.theta, b.theta);
}

Vec2 rotate(Vec2 v, double angle)
{
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

Pose2D compose(const Pose2D & base, const Pose2D & local)
{
  const Vec2 p = to_world(base, local.position());
  return {p.x, p.y, base.theta + local.theta};
}

Pose2D relative_to(const Pose2D & base, const Pose2D & world)
{
  const Vec2 p = to_local(base, world.position());
  return {p.x, p.y, world.theta - base.theta};
}

Vec2 to_local(const Pose2D & base, Vec2 world_point)
{
  return rotate(world_point - base.position(), -base.theta);
}

Vec2 to_world(const Pose2D & base, Vec2 local_point)
{
  return base.position() + rotate(local_point, base.theta);
}

OrientedBox::OrientedBox(const Pose2D & c, double l, double w) : center(c), length(l), width(w)
{
  if (!(l > 0.0) || !(w > 0.0)) {
    throw std::invalid_argument("OrientedBox: length and width must be positive");
  }
}

std::array<Vec2, 4> OrientedBox::corners() const
{
  const double hl = 0.5 * length;
  const double hw = 0.5 * width;
  return {
    to_world(center, {hl, hw}), to_world(center, {-hl, hw}), to_world(center, {-hl, -hw}),
    to_world(center, {hl, -hw})};
}

bool OrientedBox::contains(Vec2 p) const
{
  const Vec2 l = to_local(center, p);
  return std::abs(l.x) <= 0.5 * length && std::abs(l.y) <= 0.5 * width;
}

namespace
{

// half-extent of a box projected on a unit axis
double projected_radius(const OrientedBox & b, Vec2 axis)
{
  const Vec2 u = b.center.heading_vector();
  const Vec2 v{-u.y, u.x};
  return 0.5 * b.length * std::abs(dot(u, axis)) + 0.5 * b.width * std::abs(dot(v, axis));
}

}  // namespace

double sat_margin(const OrientedBox & a, const OrientedBox & b)
{
  const Vec2 ua = a.center.heading_vector();
  const Vec2 ub = b.center.heading_vector();
  const std::array<Vec2, 4> axes{ua, Vec2{-ua.y, ua.x}, ub, Vec2{-ub.y, ub.x}};
  const Vec2 d = b.center.position() - a.center.position();
  double margin = std::numeric_limits<double>::infinity();
  for (const Vec2 & axis : axes) {
    const double overlap =
      projected_radius(a, axis) + projected_radius(b, axis) - std::abs(dot(d, axis));
    margin = std::min(margin, overlap);
  }
  return margin;
}

bool boxes_overlap(const OrientedBox & a, const OrientedBox & b)
{
  return sat_margin(a, b) >= -kContactTolerance;
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b)
{
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return norm(p - (a + t * ab));
}

double box_distance(const OrientedBox & a, const OrientedBox & b)
{
  if (boxes_overlap(a, b)) {
    return 0.0;
  }
  const auto ca = a.corners();
  const auto cb = b.corners();
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      best = std::min(best, point_segment_distance(ca[i], cb[j], cb[(j + 1) % 4]));
      best = std::min(best, point_segment_distance(cb[i], ca[j], ca[(j + 1) % 4]));
    }
  }
  return best;
}

bool point_in_polygon(Vec2 p, std::span<const Vec2> polygon)
{
  const std::size_t n = polygon.size();
  if (n < 3) {
    return false;
  }
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 a = polygon[i];
    const Vec2 b = polygon[j];
    if (point_segment_distance(p, a, b) <= 1e-9) {
      return true;
    }
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x_cross) {
        inside = !inside;
      }
    }
  }
  return inside;
}

}  // namespace forge
