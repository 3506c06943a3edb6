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

#ifndef FORGE__QUINTIC_HPP_
#define FORGE__QUINTIC_HPP_

#include "forge/geometry.hpp"

#include <array>
#include <vector>

namespace forge
{

struct BoundaryState
{
  Vec2 pos;
  Vec2 vel;
  Vec2 acc;
};

struct QuinticSpec
{
  BoundaryState start;
  BoundaryState end;
  double horizon{1.0};
};

/// Coefficients c0..c5 of p(t) = sum c_k t^k.
using QuinticCoeffs = std::array<double, 6>;

struct Quintic1D
{
  QuinticCoeffs c{};

  double position(double t) const;
  double velocity(double t) const;
  double acceleration(double t) const;
};

/// Two-point boundary-value solve. The first three coefficients come straight from the
/// start conditions; the remaining three are the closed-form elimination of the 3x3
/// block for the end conditions. Throws std::invalid_argument when horizon <= 0 or any
/// input is non-finite.
QuinticCoeffs solve_quintic_1d(double p0, double v0, double a0, double pT, double vT, double aT,
                               double horizon);

struct Trajectory
{
  double rate_hz{2.0};
  std::vector<Pose2D> poses;
  std::vector<double> speeds;
};

/// Samples per-axis quintics at rate_hz on [0, horizon]; the last sample is exactly at
/// the horizon. Headings follow the velocity direction where speed > 0.1 m/s and are
/// carried over from the nearest moving sample elsewhere.
Trajectory plan(const QuinticSpec & spec, double rate_hz);

struct FeasibilityLimits
{
  double v_max{20.0};
  double a_max{5.0};
  double kappa_max{0.3};
};

/// Finite-difference speed, acceleration and three-point curvature checks.
bool feasible(const Trajectory & traj, const FeasibilityLimits & limits);

}  // namespace forge

#endif  // FORGE__QUINTIC_HPP_
