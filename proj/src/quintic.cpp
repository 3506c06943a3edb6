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

#include "forge/quintic.hpp"

#include <cmath>
#include <stdexcept>

namespace forge
{

double Quintic1D::position(double t) const
{
  return c[0] + t * (c[1] + t * (c[2] + t * (c[3] + t * (c[4] + t * c[5]))));
}

double Quintic1D::velocity(double t) const
{
  return c[1] + t * (2.0 * c[2] + t * (3.0 * c[3] + t * (4.0 * c[4] + t * 5.0 * c[5])));
}

double Quintic1D::acceleration(double t) const
{
  return 2.0 * c[2] + t * (6.0 * c[3] + t * (12.0 * c[4] + t * 20.0 * c[5]));
}

QuinticCoeffs solve_quintic_1d(double p0, double v0, double a0, double pT, double vT, double aT,
                               double horizon)
{
  for (double x : {p0, v0, a0, pT, vT, aT, horizon}) {
    if (!std::isfinite(x)) {
      throw std::invalid_argument("solve_quintic_1d: non-finite input");
    }
  }
  if (horizon <= 0.0) {
    throw std::invalid_argument("solve_quintic_1d: horizon must be positive");
  }
  const double T = horizon;
  const double T2 = T * T;
  const double T3 = T2 * T;
  // residuals of the end conditions after the start terms are fixed
  const double dp = pT - (p0 + v0 * T + 0.5 * a0 * T2);
  const double dv = vT - (v0 + a0 * T);
  const double da = aT - a0;
  // inverse of [[T^3, T^4, T^5], [3T^2, 4T^3, 5T^4], [6T, 12T^2, 20T^3]]
  const double c3 = (10.0 * dp - 4.0 * dv * T + 0.5 * da * T2) / T3;
  const double c4 = (-15.0 * dp + 7.0 * dv * T - da * T2) / (T3 * T);
  const double c5 = (6.0 * dp - 3.0 * dv * T + 0.5 * da * T2) / (T3 * T2);
  return {p0, v0, 0.5 * a0, c3, c4, c5};
}

Trajectory plan(const QuinticSpec & spec, double rate_hz)
{
  if (!(rate_hz > 0.0)) {
    throw std::invalid_argument("plan: rate must be positive");
  }
  const Quintic1D qx{solve_quintic_1d(
    spec.start.pos.x, spec.start.vel.x, spec.start.acc.x, spec.end.pos.x, spec.end.vel.x,
    spec.end.acc.x, spec.horizon)};
  const Quintic1D qy{solve_quintic_1d(
    spec.start.pos.y, spec.start.vel.y, spec.start.acc.y, spec.end.pos.y, spec.end.vel.y,
    spec.end.acc.y, spec.horizon)};

  const double dt = 1.0 / rate_hz;
  int n_steps = static_cast<int>(std::ceil(spec.horizon * rate_hz - 1e-9));
  n_steps = std::max(n_steps, 1);
  std::vector<double> times;
  for (int k = 0; k < n_steps; ++k) {
    times.push_back(k * dt);
  }
  times.push_back(spec.horizon);

  Trajectory traj;
  traj.rate_hz = rate_hz;
  std::vector<double> headings(times.size(), 0.0);
  std::vector<bool> moving(times.size(), false);
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double vx = qx.velocity(times[i]);
    const double vy = qy.velocity(times[i]);
    const double speed = std::hypot(vx, vy);
    traj.speeds.push_back(speed);
    if (speed > 0.1) {
      headings[i] = std::atan2(vy, vx);
      moving[i] = true;
    }
  }
  // stationary samples inherit the heading of the nearest earlier moving sample,
  // or the next moving sample at the start
  int last_moving = -1;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (moving[i]) {
      last_moving = static_cast<int>(i);
    } else if (last_moving >= 0) {
      headings[i] = headings[last_moving];
    }
  }
  if (!times.empty() && !moving[0]) {
    for (std::size_t i = 0; i < times.size(); ++i) {
      if (moving[i]) {
        for (std::size_t j = 0; j < i; ++j) {
          headings[j] = headings[i];
        }
        break;
      }
    }
  }
  for (std::size_t i = 0; i < times.size(); ++i) {
    traj.poses.emplace_back(qx.position(times[i]), qy.position(times[i]), headings[i]);
  }
  // pin the endpoint exactly
  traj.poses.back().x = spec.end.pos.x;
  traj.poses.back().y = spec.end.pos.y;
  return traj;
}

bool feasible(const Trajectory & traj, const FeasibilityLimits & limits)
{
  const std::size_t n = traj.poses.size();
  if (n < 3) {
    return false;
  }
  const double dt = 1.0 / traj.rate_hz;
  for (std::size_t i = 1; i < n; ++i) {
    if (norm(traj.poses[i].position() - traj.poses[i - 1].position()) / dt > limits.v_max) {
      return false;
    }
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const Vec2 a = traj.poses[i - 1].position();
    const Vec2 b = traj.poses[i].position();
    const Vec2 c = traj.poses[i + 1].position();
    if (norm(c - 2.0 * b + a) / (dt * dt) > limits.a_max) {
      return false;
    }
    const double ab = norm(b - a);
    const double bc = norm(c - b);
    const double ca = norm(a - c);
    // curvature is undefined for (near) stationary triples
    if (ab < 1e-3 || bc < 1e-3) {
      continue;
    }
    const double kappa = 2.0 * std::abs(cross(b - a, c - a)) / (ab * bc * ca);
    if (kappa > limits.kappa_max) {
      return false;
    }
  }
  return true;
}

}  // namespace forge
