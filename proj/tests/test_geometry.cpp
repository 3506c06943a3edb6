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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

using namespace forge;

TEST(Angle, NormalizeWrapsIntoHalfOpenRange)
{
  EXPECT_NEAR(normalize_angle(3 * kPi), kPi, 1e-12);
  EXPECT_NEAR(normalize_angle(-kPi), kPi, 1e-12);
  EXPECT_NEAR(normalize_angle(2 * kPi + 0.25), 0.25, 1e-12);
  EXPECT_THROW(normalize_angle(std::numeric_limits<double>::quiet_NaN()), std::invalid_argument);
}

TEST(Angle, RelativeHeadingIsSymmetricAndBounded)
{
  EXPECT_NEAR(relative_heading(0.0, deg2rad(170.0)), 170.0, 1e-9);
  EXPECT_NEAR(relative_heading(deg2rad(170.0), deg2rad(-170.0)), 20.0, 1e-9);
  EXPECT_NEAR(relative_heading(deg2rad(-170.0), deg2rad(170.0)), 20.0, 1e-9);
  EXPECT_NEAR(relative_heading(0.0, kPi), 180.0, 1e-9);
}

TEST(Pose, ComposeThenRelativeRoundTrips)
{
  const Pose2D base(3.0, -2.0, 0.7);
  const Pose2D local(1.5, 0.5, -0.3);
  const Pose2D world = compose(base, local);
  const Pose2D back = relative_to(base, world);
  EXPECT_NEAR(back.x, local.x, 1e-12);
  EXPECT_NEAR(back.y, local.y, 1e-12);
  EXPECT_NEAR(back.theta, local.theta, 1e-12);
  const Vec2 p = to_world(base, {2.0, 1.0});
  const Vec2 q = to_local(base, p);
  EXPECT_NEAR(q.x, 2.0, 1e-12);
  EXPECT_NEAR(q.y, 1.0, 1e-12);
}

TEST(Box, RejectsNonPositiveSize)
{
  EXPECT_THROW(OrientedBox(Pose2D(), 0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(OrientedBox(Pose2D(), 1.0, -1.0), std::invalid_argument);
}

TEST(Box, CornersStartFrontLeftCounterclockwise)
{
  const OrientedBox b(Pose2D(0, 0, 0), 4.0, 2.0);
  const auto c = b.corners();
  EXPECT_NEAR(c[0].x, 2.0, 1e-12);
  EXPECT_NEAR(c[0].y, 1.0, 1e-12);
  EXPECT_NEAR(c[1].x, -2.0, 1e-12);
  EXPECT_NEAR(c[1].y, 1.0, 1e-12);
  EXPECT_NEAR(c[2].y, -1.0, 1e-12);
}

TEST(Sat, TouchingCountsAsOverlap)
{
  const OrientedBox a(Pose2D(0, 0, 0), 4.0, 2.0);
  const OrientedBox b(Pose2D(4.0, 0, 0), 4.0, 2.0);
  EXPECT_TRUE(boxes_overlap(a, b));
  EXPECT_NEAR(sat_margin(a, b), 0.0, 1e-12);
  const OrientedBox c(Pose2D(4.01, 0, 0), 4.0, 2.0);
  EXPECT_FALSE(boxes_overlap(a, c));
  EXPECT_NEAR(sat_margin(a, c), -0.01, 1e-12);
}

TEST(Sat, RotatedSeparatedAndCrossed)
{
  // A thin box crossing another at right angles with no corner inside either.
  const OrientedBox a(Pose2D(0, 0, 0), 10.0, 1.0);
  const OrientedBox b(Pose2D(0, 0, kPi / 2), 10.0, 1.0);
  EXPECT_TRUE(boxes_overlap(a, b));
  // Diamond near a corner: the corner-to-corner gap is only visible on the diamond's axes.
  const OrientedBox c(Pose2D(0, 0, 0), 2.0, 2.0);
  const OrientedBox d(Pose2D(2.5, 2.5, kPi / 4), 2.0, 2.0);
  EXPECT_FALSE(boxes_overlap(c, d));
}

TEST(Distance, MatchesAxisAlignedGap)
{
  const OrientedBox a(Pose2D(0, 0, 0), 2.0, 2.0);
  const OrientedBox b(Pose2D(5.0, 0, 0), 2.0, 2.0);
  EXPECT_NEAR(box_distance(a, b), 3.0, 1e-12);
  const OrientedBox c(Pose2D(4.0, 4.0, 0), 2.0, 2.0);
  EXPECT_NEAR(box_distance(a, c), std::sqrt(8.0), 1e-12);
  EXPECT_EQ(box_distance(a, OrientedBox(Pose2D(1.0, 0, 0.3), 2.0, 2.0)), 0.0);
}

TEST(Polygon, BoundaryCountsAsInside)
{
  const Polygon sq = {{0, 0}, {2, 0}, {2, 2}, {0, 2}};
  EXPECT_TRUE(point_in_polygon({1, 1}, sq));
  EXPECT_TRUE(point_in_polygon({2, 1}, sq));
  EXPECT_TRUE(point_in_polygon({0, 0}, sq));
  EXPECT_FALSE(point_in_polygon({2.001, 1}, sq));
}

TEST(Polygon, PointSegmentDistance)
{
  EXPECT_NEAR(point_segment_distance({1, 1}, {0, 0}, {2, 0}), 1.0, 1e-12);
  EXPECT_NEAR(point_segment_distance({3, 0}, {0, 0}, {2, 0}), 1.0, 1e-12);
  EXPECT_NEAR(point_segment_distance({3, 4}, {0, 0}, {0, 0}), 5.0, 1e-12);
}
