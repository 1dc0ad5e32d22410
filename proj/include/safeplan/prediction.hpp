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


#ifndef SAFEPLAN__PREDICTION_HPP_
#define SAFEPLAN__PREDICTION_HPP_

#include "safeplan/dynamics.hpp"
#include "safeplan/polytope.hpp"

#include <json.hpp>

#include <vector>

namespace safeplan::prediction
{

struct Footprint
{
  double half_length{2.4};
  double half_width{1.0};
};

struct ObstacleState
{
  double px{0.0};
  double py{0.0};
  double v{0.0};
  double theta{0.0};
  /// Centered 4-D box on (px, py, v, theta). An empty Box means exact knowledge.
  polytope::Box state_uncertainty;
  Footprint footprint;

  dynamics::VehicleState mean() const { return {px, py, v, theta}; }
};

struct ControlBounds
{
  double a_lo{0.0};
  double a_hi{0.0};
  double delta_lo{0.0};
  double delta_hi{0.0};
};

struct OccupancyBox
{
  int t_index{0};
  double x_lo{0.0};
  double x_hi{0.0};
  double y_lo{0.0};
  double y_hi{0.0};

  bool contains(double x, double y, double tol = 0.0) const
  {
    return x >= x_lo - tol && x <= x_hi + tol && y >= y_lo - tol && y <= y_hi + tol;
  }
};

/// Upper end of the short-term regime.
inline constexpr double kMaxShortTermHorizon = 1.0;
inline constexpr double kShortTermHorizon = 0.5;

/// Reachable-set occupancy by interval propagation of the bicycle model over the
/// initial state box and all piecewise-constant controls within `b`. Box k covers
/// the footprint at time k*dt, k = 0..round(horizon/dt). Throws HorizonTooLong.
std::vector<OccupancyBox> short_term_occupancy(
  const ObstacleState & o, const ControlBounds & b, double horizon, double dt,
  const dynamics::VehicleParams & params);

/// Constant-velocity particle rollout, footprint inflation only.
std::vector<OccupancyBox> long_term_predict(const ObstacleState & o, double horizon, double dt);

/// Mean-state rollout under the midpoint control, the seed of the long-term stage.
dynamics::VehicleState terminal_mean(
  const ObstacleState & o, const ControlBounds & b, double horizon, double dt,
  const dynamics::VehicleParams & params);

/// Short-term boxes up to 0.5 s followed by long-term boxes up to `plan_horizon`.
std::vector<OccupancyBox> predict(
  const ObstacleState & o, const ControlBounds & b, double plan_horizon, double dt,
  const dynamics::VehicleParams & params);

/// Corners of the oriented footprint rectangle, counterclockwise.
std::vector<Eigen::Vector2d> footprint_corners(
  double px, double py, double theta, const Footprint & f);

nlohmann::json to_json(const OccupancyBox & box);

}  // namespace safeplan::prediction

#endif  // SAFEPLAN__PREDICTION_HPP_
