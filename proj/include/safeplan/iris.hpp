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


#ifndef SAFEPLAN__IRIS_HPP_
#define SAFEPLAN__IRIS_HPP_

#include "safeplan/polytope.hpp"

#include <json.hpp>

#include <Eigen/Core>

#include <vector>

namespace safeplan::iris
{

/// {C x + center : |x| <= 1}, C symmetric positive definite.
struct Ellipse
{
  Eigen::Vector2d center{0.0, 0.0};
  Eigen::Matrix2d C{Eigen::Matrix2d::Identity()};

  double area() const;
  bool contains(const Eigen::Vector2d & p, double tol = 0.0) const;
};

struct ConvexRegion
{
  polytope::HRep polygon;
  Ellipse ellipse;
  int iterations{0};
  /// One flag per required point.
  std::vector<bool> required_contained;
  /// Polygon and inscribed-ellipse area after each iteration.
  std::vector<polytope::HRep> polygon_history;
  std::vector<double> area_history;
};

struct IrisOptions
{
  int max_iterations{10};
  /// Stop once the ellipse area grows by less than this fraction.
  double growth_tolerance{0.02};
  double initial_radius{0.05};
};

/// Bounds plus one tangent plane per obstacle not already cut off, taken at the
/// obstacle point closest to the ellipse in its own metric. Throws
/// SeedInsideObstacle when the ellipse center lies in an obstacle. If the tangent
/// plane would cut off `keep` (when given), the plane is taken at the obstacle
/// point closest to `keep` instead.
polytope::HRep separating_hyperplanes(
  const Ellipse & e, const std::vector<polytope::VRep> & obstacles, const polytope::HRep & bounds,
  const Eigen::Vector2d * keep = nullptr);

/// Maximum-area ellipse inside a bounded 2-D polygon. Throws EmptyPolytope,
/// UnboundedPolytope or DegeneratePolytope.
Ellipse inscribed_ellipse(const polytope::HRep & p);

ConvexRegion grow_region(
  const Eigen::Vector2d & seed, const std::vector<Eigen::Vector2d> & required,
  const std::vector<polytope::VRep> & obstacles, const polytope::HRep & bounds,
  const IrisOptions & options = {});

/// Axis-aligned box as a 2-D V-rep obstacle.
polytope::VRep box_obstacle(double x_lo, double x_hi, double y_lo, double y_hi);

nlohmann::json to_json(const ConvexRegion & region);

}  // namespace safeplan::iris

#endif  // SAFEPLAN__IRIS_HPP_
