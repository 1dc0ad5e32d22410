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


#ifndef SAFEPLAN__REFERENCE_PATH_HPP_
#define SAFEPLAN__REFERENCE_PATH_HPP_

#include <Eigen/Core>

#include <span>
#include <vector>

namespace safeplan::frenet
{

struct PathPoint
{
  double x{0.0};
  double y{0.0};
  double heading{0.0};
  double curvature{0.0};
  /// d(curvature)/ds
  double dcurvature{0.0};
};

struct FrenetPoint
{
  double s{0.0};
  double d{0.0};
};

/// Cubic-spline centerline through waypoints, parameterized by arc length.
/// Outside [0, length()] the path continues along its end tangents.
class ReferencePath
{
public:
  ReferencePath() = default;

  /// Throws InvalidArgument for fewer than two waypoints or repeated points.
  static ReferencePath from_waypoints(std::span<const Eigen::Vector2d> waypoints);

  double length() const { return total_length_; }
  PathPoint eval(double s) const;
  Eigen::Vector2d to_cartesian(double s, double d) const;
  /// Nearest-point projection; throws ProjectionAmbiguous outside the corridor
  /// |d| < 1 / max_curvature().
  FrenetPoint project(const Eigen::Vector2d & p) const;
  /// Largest |curvature| over the sampled path.
  double max_curvature() const { return max_curvature_; }
  const std::vector<Eigen::Vector2d> & waypoints() const { return waypoints_; }

private:
  struct Cubic
  {
    double a, b, c, d;  // a + b t + c t^2 + d t^3
  };

  Eigen::Vector2d r(double u) const;
  Eigen::Vector2d dr(double u) const;
  Eigen::Vector2d ddr(double u) const;
  Eigen::Vector2d dddr(double u) const;
  std::size_t segment(double u) const;
  double speed_integral(double u0, double u1) const;
  double u_of_s(double s) const;
  double s_of_u(double u) const;

  std::vector<Eigen::Vector2d> waypoints_;
  std::vector<double> knots_;  // cumulative chord length
  std::vector<Cubic> sx_;
  std::vector<Cubic> sy_;
  // arc-length lookup at fine parameter spacing
  std::vector<double> table_u_;
  std::vector<double> table_s_;
  double total_length_{0.0};
  double max_curvature_{0.0};
};

}  // namespace safeplan::frenet

#endif  // SAFEPLAN__REFERENCE_PATH_HPP_
