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

#ifndef SAFEPLAN__DYNAMICS_HPP_
#define SAFEPLAN__DYNAMICS_HPP_

#include <Eigen/Core>

#include <span>
#include <vector>

namespace safeplan::dynamics
{

/// Planar kinematic bicycle state. Units: m, m, m/s, rad.
struct VehicleState
{
  double px{0.0};
  double py{0.0};
  double v{0.0};
  double theta{0.0};

  Eigen::Vector4d vec() const { return {px, py, v, theta}; }
  static VehicleState from_vec(const Eigen::Vector4d & x) { return {x(0), x(1), x(2), x(3)}; }
};

/// Acceleration (m/s^2) and front steering angle (rad).
struct ControlInput
{
  double a{0.0};
  double delta{0.0};

  Eigen::Vector2d vec() const { return {a, delta}; }
  static ControlInput from_vec(const Eigen::Vector2d & u) { return {u(0), u(1)}; }
};

struct VehicleParams
{
  double length{2.9};  ///< L, used in curvature = tan(delta) / L
  double dt{0.05};
  double a_max{4.0};
  double delta_max{0.6};
  double v_min{0.0};
};

/// Below this steering magnitude the straight-line update is used.
inline constexpr double kSteerEpsilon = 1e-6;

double wrap_angle(double angle);

/// Clamps a control to the actuator limits; returns true if anything changed.
bool clamp_input(ControlInput & u, const VehicleParams & p);

/// One exact arc step of the bicycle model. Inputs outside the limits are
/// clamped; `clamp_events` (when given) is incremented for each clamped call.
/// The returned heading is wrapped to (-pi, pi].
VehicleState step(
  const VehicleState & x, const ControlInput & u, const VehicleParams & p,
  int * clamp_events = nullptr);

/// Same update without angle wrapping, for use inside an optimization horizon.
Eigen::Vector4d step_unwrapped(
  const Eigen::Vector4d & x, const Eigen::Vector2d & u, const VehicleParams & p);

struct Linearization
{
  Eigen::Matrix4d A;
  Eigen::Matrix<double, 4, 2> B;
  /// Affine residual: step(x, u) = A x + B u + c at the linearization point.
  Eigen::Vector4d c;
};

/// Analytic Jacobians of `step_unwrapped` at (x, u).
Linearization linearize(const VehicleState & x, const ControlInput & u, const VehicleParams & p);

std::vector<VehicleState> rollout(
  const VehicleState & x0, std::span<const ControlInput> controls, const VehicleParams & p);

}  // namespace safeplan::dynamics

#endif  // SAFEPLAN__DYNAMICS_HPP_
