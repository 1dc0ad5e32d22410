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


#ifndef SAFEPLAN__SCENARIO_HPP_
#define SAFEPLAN__SCENARIO_HPP_

#include "safeplan/dynamics.hpp"
#include "safeplan/prediction.hpp"
#include "safeplan/reference_path.hpp"

#include <json.hpp>

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace safeplan::sim
{

enum class ObstaclePolicy {
  /// Straight line at constant speed (speed 0 is a parked car).
  ConstantVelocity,
  /// Constant speed along the scenario reference path at a fixed lateral offset.
  FollowPath,
};

struct ObstacleSpec
{
  std::string name;
  ObstaclePolicy policy{ObstaclePolicy::ConstantVelocity};
  /// ConstantVelocity start state (px, py, v, theta).
  dynamics::VehicleState start{};
  /// FollowPath start: arc length, lateral offset and speed.
  double s0{0.0};
  double d{0.0};
  double speed{0.0};
  prediction::Footprint footprint{};
  /// Control set assumed by the reachability prediction.
  prediction::ControlBounds control_bounds{-2.0, 2.0, -0.1, 0.1};
};

struct WorldBounds
{
  double x_lo{-1e3};
  double x_hi{1e3};
  double y_lo{-1e3};
  double y_hi{1e3};
};

struct Scenario
{
  std::string name;
  std::string description;
  std::vector<Eigen::Vector2d> waypoints;
  dynamics::VehicleState ego_start{};
  double v_ref{10.0};
  prediction::Footprint ego_footprint{};
  std::vector<ObstacleSpec> obstacles;
  WorldBounds world{};
  double duration{10.0};
  /// Disturbance half widths (px, py, v, theta).
  Eigen::Vector4d w_max{0.2, 0.2, 0.2, 0.1};
  bool perception_noise{true};
  /// Additive disturbance on the true state each step.
  bool process_noise{true};
  std::uint64_t seed{1};
  /// Disc radius of the planner's collision filter (the ego half width).
  /// IRIS inflates obstacles by the ego footprint's extent instead.
  double ego_radius{1.0};
  /// Center distance below which the run counts as unsafe.
  double safe_distance{3.5};
  /// Lateral targets offered to the planner; the planner default when empty.
  std::vector<double> d_targets;
  /// Offsets to v_ref forming the planner's speed grid; the planner default when empty.
  std::vector<double> v_offsets;
};

/// Throws ScenarioInvalid with the first problem found.
void validate(const Scenario & s);

Scenario scenario_from_json(const nlohmann::json & j);
nlohmann::json to_json(const Scenario & s);

/// Oriented-rectangle overlap (separating axis test).
bool footprints_overlap(
  const dynamics::VehicleState & a, const prediction::Footprint & fa, const dynamics::VehicleState & b,
  const prediction::Footprint & fb);

/// True obstacle states at time t under their scripted policies.
std::vector<dynamics::VehicleState> obstacle_states(const Scenario & s, const frenet::ReferencePath & path, double t);

/// Overtake, intersection and curve.
std::vector<Scenario> builtin_scenarios();
std::optional<Scenario> find_builtin(const std::string & name);

}  // namespace safeplan::sim

#endif  // SAFEPLAN__SCENARIO_HPP_
