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

#include "safeplan/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace safeplan::dynamics
{
namespace
{
// Below this |kappa * l| the arc increments are evaluated by their Taylor series.
constexpr double kSeriesThreshold = 1e-3;

struct ArcIncrement
{
  double dx;       // (sin(theta + kappa l) - sin(theta)) / kappa
  double dy;       // (cos(theta) - cos(theta + kappa l)) / kappa
  double ddx_dk;   // derivatives w.r.t. curvature
  double ddy_dk;
};

ArcIncrement arc_increment(double theta, double kappa, double l, bool with_derivatives)
{
  const double s = std::sin(theta);
  const double c = std::cos(theta);
  ArcIncrement out{};
  if (std::abs(kappa * l) < kSeriesThreshold) {
    const double k = kappa;
    const double l2 = l * l;
    const double l3 = l2 * l;
    const double l4 = l3 * l;
    const double l5 = l4 * l;
    out.dx = l * c - l2 * k * s / 2.0 - l3 * k * k * c / 6.0 + l4 * k * k * k * s / 24.0;
    out.dy = l * s + l2 * k * c / 2.0 - l3 * k * k * s / 6.0 - l4 * k * k * k * c / 24.0;
    if (with_derivatives) {
      out.ddx_dk = -l2 * s / 2.0 - l3 * k * c / 3.0 + l4 * k * k * s / 8.0 + l5 * k * k * k * c / 30.0;
      out.ddy_dk = l2 * c / 2.0 - l3 * k * s / 3.0 - l4 * k * k * c / 8.0 + l5 * k * k * k * s / 30.0;
    }
    return out;
  }
  const double phi = theta + kappa * l;
  const double sp = std::sin(phi);
  const double cp = std::cos(phi);
  out.dx = (sp - s) / kappa;
  out.dy = (c - cp) / kappa;
  if (with_derivatives) {
    out.ddx_dk = l * cp / kappa - out.dx / kappa;
    out.ddy_dk = l * sp / kappa - out.dy / kappa;
  }
  return out;
}

struct Evaluation
{
  Eigen::Vector4d next;
  Linearization lin;
};

Evaluation evaluate(
  const Eigen::Vector4d & x, const Eigen::Vector2d & u, const VehicleParams & p,
  bool with_jacobian)
{
  const double dt = p.dt;
  const double v = x(2);
  const double theta = x(3);
  const double a = u(0);
  const double delta = u(1);

  double l = v * dt + 0.5 * a * dt * dt;
  double dl_dv = dt;
  double dl_da = 0.5 * dt * dt;
  if (p.v_min >= 0.0 && l < 0.0) {
    l = 0.0;
    dl_dv = 0.0;
    dl_da = 0.0;
  }

  double v_next = v + a * dt;
  double dvn_dv = 1.0;
  double dvn_da = dt;
  if (v_next < p.v_min) {
    v_next = p.v_min;
    dvn_dv = 0.0;
    dvn_da = 0.0;
  }

  const double tan_d = std::tan(delta);
  const double kappa = tan_d / p.length;
  const double dk_dd = (1.0 + tan_d * tan_d) / p.length;

  Evaluation ev;
  double dx = 0.0;
  double dy = 0.0;
  double dtheta = 0.0;
  if (std::abs(delta) >= kSteerEpsilon) {
    // dividing by a tiny kappa cancels badly, so near-straight arcs use the series
    const ArcIncrement inc = arc_increment(theta, kappa, l, false);
    dx = inc.dx;
    dy = inc.dy;
    dtheta = kappa * l;
  } else {
    dx = l * std::cos(theta);
    dy = l * std::sin(theta);
    dtheta = 0.0;
  }
  ev.next << x(0) + dx, x(1) + dy, v_next, theta + dtheta;

  if (with_jacobian) {
    // Series-stable increments; consistent with both branches in the limit.
    const ArcIncrement inc = arc_increment(theta, kappa, l, true);
    const double phi = theta + kappa * l;
    const double cp = std::cos(phi);
    const double sp = std::sin(phi);
    auto & A = ev.lin.A;
    auto & B = ev.lin.B;
    A.setIdentity();
    B.setZero();
    // d/dtheta: d(dx)/dtheta = -dy, d(dy)/dtheta = dx.
    A(0, 3) = -inc.dy;
    A(1, 3) = inc.dx;
    // d/dl of the increments is (cos phi, sin phi), of dtheta it is kappa.
    A(0, 2) = cp * dl_dv;
    A(1, 2) = sp * dl_dv;
    A(3, 2) = kappa * dl_dv;
    A(2, 2) = dvn_dv;
    B(0, 0) = cp * dl_da;
    B(1, 0) = sp * dl_da;
    B(2, 0) = dvn_da;
    B(3, 0) = kappa * dl_da;
    B(0, 1) = inc.ddx_dk * dk_dd;
    B(1, 1) = inc.ddy_dk * dk_dd;
    B(3, 1) = l * dk_dd;
    ev.lin.c = ev.next - A * x - B * u;
  }
  return ev;
}

}  // namespace

double wrap_angle(double angle)
{
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(angle + std::numbers::pi, two_pi);
  if (r <= 0.0) {
    r += two_pi;
  }
  return r - std::numbers::pi;
}

bool clamp_input(ControlInput & u, const VehicleParams & p)
{
  const ControlInput before = u;
  u.a = std::clamp(u.a, -p.a_max, p.a_max);
  u.delta = std::clamp(u.delta, -p.delta_max, p.delta_max);
  return before.a != u.a || before.delta != u.delta;
}

VehicleState step(
  const VehicleState & x, const ControlInput & u, const VehicleParams & p, int * clamp_events)
{
  ControlInput uc = u;
  if (clamp_input(uc, p) && clamp_events != nullptr) {
    ++*clamp_events;
  }
  const Eigen::Vector4d next = evaluate(x.vec(), uc.vec(), p, false).next;
  VehicleState out = VehicleState::from_vec(next);
  out.theta = wrap_angle(out.theta);
  return out;
}

Eigen::Vector4d step_unwrapped(
  const Eigen::Vector4d & x, const Eigen::Vector2d & u, const VehicleParams & p)
{
  return evaluate(x, u, p, false).next;
}

Linearization linearize(const VehicleState & x, const ControlInput & u, const VehicleParams & p)
{
  return evaluate(x.vec(), u.vec(), p, true).lin;
}

std::vector<VehicleState> rollout(
  const VehicleState & x0, std::span<const ControlInput> controls, const VehicleParams & p)
{
  std::vector<VehicleState> out;
  out.reserve(controls.size() + 1);
  out.push_back(x0);
  for (const auto & u : controls) {
    out.push_back(step(out.back(), u, p));
  }
  return out;
}

}  // namespace safeplan::dynamics
