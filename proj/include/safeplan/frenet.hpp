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


#ifndef SAFEPLAN__FRENET_HPP_
#define SAFEPLAN__FRENET_HPP_

#include "safeplan/dynamics.hpp"
#include "safeplan/prediction.hpp"
#include "safeplan/reference_path.hpp"

#include <json.hpp>

#include <array>
#include <cmath>
#include <vector>

namespace safeplan::frenet
{

/// Longitudinal and lateral position with time derivatives.
struct FrenetState
{
  double s{0.0};
  double s_d{0.0};
  double s_dd{0.0};
  double d{0.0};
  double d_d{0.0};
  double d_dd{0.0};
};

/// Coefficients c_0..c_n of sum c_i t^i.
using Quintic = std::array<double, 6>;
using Quartic = std::array<double, 5>;

struct FrenetSample
{
  double t{0.0};
  double x{0.0};
  double y{0.0};
  double v{0.0};
  double theta{0.0};
  /// Frenet-frame second and third derivatives.
  double a_lat{0.0};
  double a_lon{0.0};
  double j_lat{0.0};
  double j_lon{0.0};
  double s{0.0};
  double d{0.0};
  double s_d{0.0};
  double d_d{0.0};
  /// Cartesian tangential acceleration and path curvature of the trajectory.
  double a_tangential{0.0};
  double kappa{0.0};
};

struct FrenetCandidate
{
  Quintic lateral{};
  Quartic longitudinal{};
  double T{0.0};
  double d_target{0.0};
  /// Target speed after any reachability cap.
  double v_target{0.0};
  int index{0};
  std::vector<FrenetSample> samples;
  double cost{0.0};
  /// Kinematic limits respected.
  bool feasible{true};
  bool collision_free{true};
};

struct PlannerConfig
{
  double k_j{0.1};
  double k_a{0.1};
  double k_v{0.1};
  double k_s{1.0};
  double k_t{0.1};
  double k_lat{1.0};
  double k_lon{1.0};
  double k_obs{1.0};
  std::vector<double> d_targets{-3.5, -1.75, 0.0, 1.75, 3.5};
  /// Offsets added to the reference speed to form the speed grid.
  std::vector<double> v_offsets{-4.0, -2.0, 0.0};
  std::vector<double> durations{3.0, 3.5, 4.0};
  double v_ref{10.0};
  double dt{0.1};
  double a_max{4.0};
  double kappa_max{0.236};
  /// Curvature is only checked above this speed; heading is ill-defined at rest.
  double kappa_check_speed{1.0};
  /// Inverse-distance floor of the obstacle term.
  double d_floor{0.1};
  /// Fraction of the acceleration limit a velocity change may ask for.
  double v_target_margin{0.8};
};

/// (s, s_d, d, d_d) of a Cartesian state; accelerations are left zero.
FrenetState to_frenet(const ReferencePath & path, const dynamics::VehicleState & x);
dynamics::VehicleState to_cartesian(const ReferencePath & path, const FrenetState & f);

/// d(0) = d0, d'(0) = d0_d, d''(0) = d0_dd, d(T) = dT, d'(T) = d''(T) = 0.
Quintic quintic_lateral(double d0, double d0_d, double d0_dd, double dT, double T);
/// s(0) = s0, s'(0) = s0_d, s''(0) = s0_dd, s'(T) = sT_d, s''(T) = 0.
Quartic quartic_longitudinal(double s0, double s0_d, double s0_dd, double sT_d, double T);

/// Value and first three derivatives of a polynomial at t.
template <std::size_t N>
std::array<double, 4> poly_eval(const std::array<double, N> & c, double t)
{
  std::array<double, 4> out{};
  for (std::size_t i = 0; i < N; ++i) {
    const double fi = static_cast<double>(i);
    const double ti = std::pow(t, fi);
    out[0] += c[i] * ti;
    if (i >= 1) {
      out[1] += fi * c[i] * std::pow(t, fi - 1);
    }
    if (i >= 2) {
      out[2] += fi * (fi - 1) * c[i] * std::pow(t, fi - 2);
    }
    if (i >= 3) {
      out[3] += fi * (fi - 1) * (fi - 2) * c[i] * std::pow(t, fi - 3);
    }
  }
  return out;
}

/// Candidate state at time t (Frenet derivatives and Cartesian kinematics).
FrenetSample sample_at(const FrenetCandidate & c, const ReferencePath & path, double t);

/// One candidate per (d_target, v_target, T), with samples every cfg.dt.
std::vector<FrenetCandidate> generate_candidates(
  const FrenetState & start, const PlannerConfig & cfg, const ReferencePath & path);

using Occupancy = std::vector<std::vector<prediction::OccupancyBox>>;

/// Distance from a point to an axis-aligned box, 0 inside.
double point_box_distance(double x, double y, const prediction::OccupancyBox & b);

/// True when some sample's disc of radius `ego_radius` meets a same-step box.
bool collides(const FrenetCandidate & c, const Occupancy & occ, double ego_radius);

std::vector<FrenetCandidate> collision_filter(
  const std::vector<FrenetCandidate> & cands, const Occupancy & occ, double ego_radius);

double cost(const FrenetCandidate & c, const Occupancy & occ, const PlannerConfig & cfg);

struct PlanResult
{
  FrenetCandidate best;
  /// Every candidate with its cost and filter outcome.
  std::vector<FrenetCandidate> candidates;
  /// Position of `best` in `candidates`, -1 when nothing survived.
  int best_index{-1};
};

/// Generates, filters and costs every candidate without throwing.
PlanResult evaluate_candidates(
  const FrenetState & start, const ReferencePath & path, const Occupancy & occ, const PlannerConfig & cfg,
  double ego_radius);

/// Minimum-cost feasible, collision-free candidate. Ties go to the smaller
/// |d_target|, then the smaller index. Throws NoFeasibleTrajectory.
PlanResult plan(
  const FrenetState & start, const ReferencePath & path, const Occupancy & occ, const PlannerConfig & cfg,
  double ego_radius);

nlohmann::json to_json(const FrenetCandidate & c, bool with_samples);

}  // namespace safeplan::frenet

#endif  // SAFEPLAN__FRENET_HPP_
