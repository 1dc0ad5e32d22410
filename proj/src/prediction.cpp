// Copyright 2026 The safeplan Authors
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


#include "safeplan/prediction.hpp"

#include "safeplan/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace safeplan::prediction
{
namespace
{
// Widening of intervals produced by the nonlinear terms, per step.
constexpr double kRemainderPad = 1.05;

struct Interval
{
  double lo;
  double hi;

  double mid() const { return 0.5 * (lo + hi); }
  double mag() const { return std::max(std::abs(lo), std::abs(hi)); }
};

Interval operator+(Interval a, Interval b) { return {a.lo + b.lo, a.hi + b.hi}; }
Interval operator*(double s, Interval a)
{
  return s >= 0.0 ? Interval{s * a.lo, s * a.hi} : Interval{s * a.hi, s * a.lo};
}
Interval operator*(Interval a, Interval b)
{
  const double p[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
  return {*std::min_element(p, p + 4), *std::max_element(p, p + 4)};
}

Interval hull(Interval a, double x) { return {std::min(a.lo, x), std::max(a.hi, x)}; }

Interval clamp_below(Interval a, double floor) { return {std::max(a.lo, floor), std::max(a.hi, floor)}; }

// Remainder pad about the midpoint; a point interval stays a point.
Interval pad(Interval a, double factor)
{
  const double half = 0.5 * (a.hi - a.lo) * factor;
  const double m = a.mid();
  return {std::min(a.lo, m - half), std::max(a.hi, m + half)};
}

// Guards against round-off in the interval endpoints themselves.
Interval round_out(Interval a)
{
  const double e = 1e-12 * (1.0 + a.mag());
  return {a.lo - e, a.hi + e};
}

Interval cos_range(Interval t)
{
  constexpr double two_pi = 2.0 * std::numbers::pi;
  if (t.hi - t.lo >= two_pi) {
    return {-1.0, 1.0};
  }
  const double a = std::cos(t.lo);
  const double b = std::cos(t.hi);
  Interval out{std::min(a, b), std::max(a, b)};
  // maxima at 2k pi, minima at (2k + 1) pi
  if (std::ceil(t.lo / two_pi) <= std::floor(t.hi / two_pi)) {
    out.hi = 1.0;
  }
  if (std::ceil((t.lo - std::numbers::pi) / two_pi) <= std::floor((t.hi - std::numbers::pi) / two_pi)) {
    out.lo = -1.0;
  }
  if (out.hi > out.lo) {
    out.lo = std::max(-1.0, out.lo - 1e-15);
    out.hi = std::min(1.0, out.hi + 1e-15);
  }
  return out;
}

Interval sin_range(Interval t) { return cos_range({t.lo - std::numbers::pi / 2.0, t.hi - std::numbers::pi / 2.0}); }

struct StateBox
{
  Interval px;
  Interval py;
  Interval v;
  Interval theta;
};

OccupancyBox to_box(int k, const StateBox & s, const Footprint & f)
{
  const double c = cos_range(s.theta).mag();
  const double sn = sin_range(s.theta).mag();
  const double hx = f.half_length * c + f.half_width * sn;
  const double hy = f.half_length * sn + f.half_width * c;
  return {k, s.px.lo - hx, s.px.hi + hx, s.py.lo - hy, s.py.hi + hy};
}

void check_dt(double dt)
{
  if (!(dt > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "prediction: dt must be positive");
  }
}

OccupancyBox point_box(int k, const dynamics::VehicleState & x, const Footprint & f)
{
  StateBox s{{x.px, x.px}, {x.py, x.py}, {x.v, x.v}, {x.theta, x.theta}};
  return to_box(k, s, f);
}

}  // namespace

std::vector<OccupancyBox> short_term_occupancy(
  const ObstacleState & o, const ControlBounds & b, double horizon, double dt,
  const dynamics::VehicleParams & params)
{
  check_dt(dt);
  if (horizon > kMaxShortTermHorizon + 1e-9) {
    throw Error(
      ErrorCode::HorizonTooLong,
      "short-term horizon " + std::to_string(horizon) + " s exceeds " + std::to_string(kMaxShortTermHorizon) +
        " s");
  }
  if (b.a_lo > b.a_hi || b.delta_lo > b.delta_hi) {
    throw Error(ErrorCode::InvalidArgument, "control bounds with lo > hi");
  }
  StateBox s{{o.px, o.px}, {o.py, o.py}, {o.v, o.v}, {o.theta, o.theta}};
  if (o.state_uncertainty.dim() == 4) {
    const auto & lo = o.state_uncertainty.lower;
    const auto & hi = o.state_uncertainty.upper;
    s.px = s.px + Interval{lo(0), hi(0)};
    s.py = s.py + Interval{lo(1), hi(1)};
    s.v = s.v + Interval{lo(2), hi(2)};
    s.theta = s.theta + Interval{lo(3), hi(3)};
  } else if (o.state_uncertainty.dim() != 0) {
    throw Error(ErrorCode::DimensionMismatch, "obstacle state uncertainty must be 4-D");
  }
  s.v = clamp_below(s.v, params.v_min);

  // the simulated model clamps inputs to its limits; bound the clamped values
  const Interval a{
    std::clamp(b.a_lo, -params.a_max, params.a_max), std::clamp(b.a_hi, -params.a_max, params.a_max)};
  const Interval delta{
    std::clamp(b.delta_lo, -params.delta_max, params.delta_max),
    std::clamp(b.delta_hi, -params.delta_max, params.delta_max)};
  Interval kappa{std::tan(delta.lo) / params.length, std::tan(delta.hi) / params.length};
  if (kappa.hi > kappa.lo) {
    kappa = round_out(kappa);
  }
  // below the steering threshold the model does not turn at all
  const bool straight_possible = delta.lo < dynamics::kSteerEpsilon && delta.hi > -dynamics::kSteerEpsilon;

  const int steps = static_cast<int>(std::lround(horizon / dt));
  std::vector<OccupancyBox> out;
  out.reserve(steps + 1);
  out.push_back(to_box(0, s, o.footprint));
  for (int k = 1; k <= steps; ++k) {
    Interval l = dt * s.v + (0.5 * dt * dt) * a;
    if (params.v_min >= 0.0) {
      l = clamp_below(l, 0.0);
    }
    const Interval v_next = clamp_below(s.v + dt * a, params.v_min);

    Interval dtheta = kappa * l;
    if (straight_possible) {
      dtheta = hull(dtheta, 0.0);
    }
    dtheta = pad(dtheta, kRemainderPad);

    // headings visited during the step, for the mean-value form of the arc integral
    const Interval swept{s.theta.lo + std::min(0.0, dtheta.lo), s.theta.hi + std::max(0.0, dtheta.hi)};
    const Interval c = pad(cos_range(swept), kRemainderPad);
    const Interval sn = pad(sin_range(swept), kRemainderPad);

    s.px = s.px + l * c;
    s.py = s.py + l * sn;
    if (s.px.hi > s.px.lo || l.hi > l.lo || c.hi > c.lo) {
      s.px = round_out(s.px);
    }
    if (s.py.hi > s.py.lo || l.hi > l.lo || sn.hi > sn.lo) {
      s.py = round_out(s.py);
    }
    s.theta = s.theta + dtheta;
    s.v = v_next;
    out.push_back(to_box(k, s, o.footprint));
  }
  return out;
}

std::vector<OccupancyBox> long_term_predict(const ObstacleState & o, double horizon, double dt)
{
  check_dt(dt);
  const int steps = static_cast<int>(std::lround(std::max(horizon, 0.0) / dt));
  std::vector<OccupancyBox> out;
  out.reserve(steps + 1);
  const double c = std::cos(o.theta);
  const double sn = std::sin(o.theta);
  for (int k = 0; k <= steps; ++k) {
    const double t = k * dt;
    out.push_back(point_box(k, {o.px + o.v * t * c, o.py + o.v * t * sn, o.v, o.theta}, o.footprint));
  }
  return out;
}

dynamics::VehicleState terminal_mean(
  const ObstacleState & o, const ControlBounds & b, double horizon, double dt,
  const dynamics::VehicleParams & params)
{
  check_dt(dt);
  dynamics::VehicleParams p = params;
  p.dt = dt;
  const dynamics::ControlInput u{0.5 * (b.a_lo + b.a_hi), 0.5 * (b.delta_lo + b.delta_hi)};
  dynamics::VehicleState x = o.mean();
  const int steps = static_cast<int>(std::lround(horizon / dt));
  for (int k = 0; k < steps; ++k) {
    x = dynamics::step(x, u, p);
  }
  return x;
}

std::vector<OccupancyBox> predict(
  const ObstacleState & o, const ControlBounds & b, double plan_horizon, double dt,
  const dynamics::VehicleParams & params)
{
  check_dt(dt);
  const double short_horizon = std::min(plan_horizon, kShortTermHorizon);
  std::vector<OccupancyBox> out = short_term_occupancy(o, b, short_horizon, dt, params);
  const int short_steps = static_cast<int>(out.size()) - 1;
  const int total_steps = static_cast<int>(std::lround(plan_horizon / dt));
  if (total_steps <= short_steps) {
    return out;
  }
  ObstacleState seed;
  const dynamics::VehicleState m = terminal_mean(o, b, short_steps * dt, dt, params);
  seed.px = m.px;
  seed.py = m.py;
  seed.v = m.v;
  seed.theta = m.theta;
  seed.footprint = o.footprint;
  const auto tail = long_term_predict(seed, (total_steps - short_steps) * dt, dt);
  for (std::size_t i = 1; i < tail.size(); ++i) {
    OccupancyBox box = tail[i];
    box.t_index += short_steps;
    out.push_back(box);
  }
  return out;
}

std::vector<Eigen::Vector2d> footprint_corners(double px, double py, double theta, const Footprint & f)
{
  const Eigen::Vector2d c(px, py);
  const Eigen::Vector2d fwd(std::cos(theta), std::sin(theta));
  const Eigen::Vector2d left(-fwd.y(), fwd.x());
  return {
    c + f.half_length * fwd - f.half_width * left, c + f.half_length * fwd + f.half_width * left,
    c - f.half_length * fwd + f.half_width * left, c - f.half_length * fwd - f.half_width * left};
}

nlohmann::json to_json(const OccupancyBox & box)
{
  return {{"t", box.t_index}, {"x", {box.x_lo, box.x_hi}}, {"y", {box.y_lo, box.y_hi}}};
}

}  // namespace safeplan::prediction
