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


#ifndef SAFEPLAN__MPC_HPP_
#define SAFEPLAN__MPC_HPP_

#include "safeplan/dynamics.hpp"
#include "safeplan/polytope.hpp"
#include "safeplan/qp.hpp"

#include <json.hpp>

#include <Eigen/Core>

#include <numbers>
#include <optional>
#include <span>
#include <vector>

namespace safeplan::mpc
{

using GainMatrix = Eigen::Matrix<double, 2, 4>;

enum class Mode { Tube, Nominal };

struct TubeMpcConfig
{
  int N{5};
  double dt{0.05};
  Eigen::Matrix4d Q{Eigen::Vector4d(1.0, 1.0, 0.5, 2.0).asDiagonal()};
  Eigen::Matrix2d R{Eigen::Vector2d(0.1, 0.5).asDiagonal()};
  Eigen::Matrix4d Q_f{Eigen::Vector4d(10.0, 10.0, 5.0, 20.0).asDiagonal()};
  /// Weights for the ancillary gain; the cost weights when unset.
  std::optional<Eigen::Matrix4d> gain_Q;
  std::optional<Eigen::Matrix2d> gain_R;
  /// The gain is computed at max(v_ref, this), where the model stays stabilizable.
  double gain_speed_floor{3.0};
  /// V = [v_min, v_max].
  double v_min{0.0};
  double v_max{40.0};
  /// Y = reference heading +- heading_band.
  double heading_band{std::numbers::pi / 4.0};
  /// Whether Y and the lower speed limit are tightened by Z as well. They only
  /// keep the linearization meaningful, so they may be applied to the nominal
  /// directly.
  bool tighten_heading{true};
  bool tighten_speed_floor{true};
  /// Weight on |x_bar_0 - x|^2; zero leaves x_bar_0 free inside x - Z.
  double initial_deviation_weight{0.0};
  int z_truncation{6};
  Mode mode{Mode::Tube};
  /// Actuator limits define U.
  dynamics::VehicleParams vehicle{};
  qp::Settings qp{};
  /// Slack kept on x - x_bar_0 in Z so the returned point passes a 1e-6 check.
  double membership_margin{2e-6};
};

struct ReferencePoint
{
  dynamics::VehicleState x;
  dynamics::ControlInput u;
};

/// K from the discrete algebraic Riccati equation, u = K x convention, so that
/// A + B K is the closed loop. Throws UnstabilizablePair.
GainMatrix compute_gain(
  const Eigen::Matrix4d & A, const Eigen::Matrix<double, 4, 2> & B, const Eigen::Matrix4d & Q,
  const Eigen::Matrix2d & R);

/// Generic-size variant (used by the small test rigs).
Eigen::MatrixXd compute_gain(
  const Eigen::MatrixXd & A, const Eigen::MatrixXd & B, const Eigen::MatrixXd & Q, const Eigen::MatrixXd & R);

/// Truncated disturbance set sum_{i=0}^{n} A_K^i W, kept with the data needed
/// for exact support queries in any direction.
struct Tube
{
  polytope::InvariantSet set;
  std::vector<Eigen::Matrix4d> powers;  // A_K^0 .. A_K^n
  polytope::VRep w;

  static Tube zero();
  static Tube make(const Eigen::Matrix4d & a_k, const polytope::VRep & w, int n);
  /// Exact support of the truncated sum.
  double support(const Eigen::Vector4d & direction) const;
  /// Exact support of K Z in input space.
  double input_support(const GainMatrix & K, const Eigen::Vector2d & direction) const;
  bool contains(const Eigen::Vector4d & e, double tol = 1e-6) const;
};

struct Constraints
{
  polytope::HRep X;
  polytope::HRep X_bar;
  polytope::HRep U;
  polytope::HRep U_bar;
  bool state_empty{false};
  bool input_empty{false};
};

/// X = region x V x Y (Y centered on `heading_ref`), X_bar = X - Z and
/// U_bar = U - K Z. Emptiness is reported, not thrown.
Constraints assemble_constraints(
  const polytope::HRep & region, const TubeMpcConfig & cfg, const Tube & z, const GainMatrix & K,
  double heading_ref);

struct TubeDesign
{
  GainMatrix K{GainMatrix::Zero()};
  Tube z;
};

/// Gain and Z from the linearization at (x_ref, u_ref), the speed raised to
/// gain_speed_floor. Throws UnstabilizablePair.
TubeDesign design_tube(
  const Eigen::Vector4d & x_ref, const Eigen::Vector2d & u_ref, const polytope::VRep & w, const TubeMpcConfig & cfg);

struct TubeSolution
{
  std::vector<Eigen::Vector4d> nominal_states;
  std::vector<Eigen::Vector2d> nominal_inputs;
  GainMatrix K{GainMatrix::Zero()};
  Tube z;
  Constraints constraints;  // for the first step
  dynamics::ControlInput applied_input;
  bool clamped{false};
  qp::Status status{qp::Status::MaxIter};
  int qp_iterations{0};
  double cost{0.0};
};

/// One receding-horizon step. `ref` holds at least N + 1 points on the MPC grid.
/// `w` is the centered disturbance box and `w_mean` the known offset added to
/// the model. Throws InfeasibleMpc when a set is empty or the QP fails.
TubeSolution solve_step(
  const dynamics::VehicleState & x, std::span<const ReferencePoint> ref, const polytope::HRep & region,
  const polytope::VRep & w, const Eigen::Vector4d & w_mean, const TubeMpcConfig & cfg);

/// u = u_bar_0 + K (x - x_bar_0), clamped to U. Heading error is wrapped.
dynamics::ControlInput ancillary(
  const dynamics::VehicleState & x, const TubeSolution & sol, const dynamics::VehicleParams & params,
  int * clamp_events = nullptr);

/// Maximal braking, zero steering.
dynamics::ControlInput fallback_input(const dynamics::VehicleParams & params);

/// Closest point of a bounded 2-D polygon to p (p itself when inside).
Eigen::Vector2d closest_point(const polytope::HRep & polygon, const Eigen::Vector2d & p);

nlohmann::json to_json(const TubeSolution & sol);

}  // namespace safeplan::mpc

#endif  // SAFEPLAN__MPC_HPP_
