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

#ifndef SAFEPLAN__POLYTOPE_HPP_
#define SAFEPLAN__POLYTOPE_HPP_

#include <json.hpp>

#include <Eigen/Core>

#include <span>
#include <vector>

namespace safeplan::polytope
{

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Convex hull of a finite point set.
///
/// For d = 2 the vertices produced by `convex_hull_2d` are the extreme points in
/// counterclockwise order. Higher-dimensional V-reps are kept as generator sets
/// (possibly containing non-extreme points), since general n-D hulls are never built.
struct VRep
{
  int dim{0};
  std::vector<Vector> vertices;
  /// True when the 2-D hull has zero area (a point or a segment).
  bool lower_dimensional{false};

  static VRep from_points(std::span<const Vector> points);
  std::size_t size() const { return vertices.size(); }
};

/// Intersection of halfspaces a_i . x <= b_i with unit-norm a_i (rows of `A`).
struct HRep
{
  int dim{0};
  Matrix A;
  Vector b;
  /// Set when a tightening operation produced an empty set; not an error.
  bool empty{false};

  static HRep make(int dim);
  Eigen::Index num_halfspaces() const { return A.rows(); }
  /// Appends a halfspace, normalizing (a, b) so that |a| = 1.
  void add(const Vector & a, double b);
};

/// Axis-aligned box, lower <= upper componentwise.
struct Box
{
  Vector lower;
  Vector upper;

  int dim() const { return static_cast<int>(lower.size()); }
  Vector center() const { return 0.5 * (lower + upper); }
  VRep to_vrep() const;
  HRep to_hrep() const;
};

Box make_box(const Vector & lower, const Vector & upper);
/// Box centered at the origin with the given per-dimension half widths.
Box centered_box(const Vector & half_widths);

VRep convex_hull_2d(std::span<const Eigen::Vector2d> points);
VRep convex_hull_2d(std::span<const Vector> points);

/// Signed area of a 2-D V-rep (vertices in counterclockwise order).
double area(const VRep & p);

/// H-rep of a full-dimensional 2-D polygon. Throws DegeneratePolytope on zero area.
HRep v_to_h(const VRep & p);

/// H-rep of any 2-D hull, including points and segments, which are encoded
/// with opposing halfspace pairs. Used where degenerate sets are legal values.
HRep v_to_h_closed(const VRep & p);

/// Vertices of a bounded, non-empty 2-D polygon given in H-rep.
VRep h_to_v_2d(const HRep & p);

VRep minkowski_sum(const VRep & p, const VRep & q);

/// Tightens every halfspace of p by the support of q; may return an empty set.
HRep pontryagin_diff(const HRep & p, const VRep & q);

VRep project(const VRep & p, std::span<const int> indices);

HRep concat(const HRep & p, const HRep & q);

double support(const VRep & p, const Vector & direction);

/// Maps every vertex through a linear map; 2-D results are re-hulled.
VRep linear_map(const Matrix & M, const VRep & p);

bool contains(const HRep & p, const Vector & x, double tol = 1e-9);

/// Membership in the hull of a 2-D V-rep (orientation test against every edge).
bool hull_contains_2d(const VRep & p, const Eigen::Vector2d & x, double tol = 1e-9);

/// Emptiness of an H-rep whose halfspaces couple at most two coordinates at a
/// time (every constraint set built by this library has that block structure).
bool is_empty(const HRep & p, double tol = 1e-9);

/// Result of the projection-based disturbance invariant set construction.
struct InvariantSet
{
  /// Generators of the truncated sum, pruned to points extreme in either plane.
  VRep vertices;
  /// Hulls of the (px, py) and (v, theta) projections.
  VRep position_hull;
  VRep velocity_heading_hull;
  /// Product of the two projected H-reps; a superset of `vertices`.
  HRep hrep;
};

/// Z = sum_{i=0}^{n} A_K^i W in 4-D, represented in H-rep as the product of the
/// H-reps of its (px, py) and (v, theta) projections. Never forms a 4-D hull.
/// Throws UnstableGain when the spectral radius of A_K is >= 1.
InvariantSet compute_z_hrep(const Matrix & a_k, const VRep & w, int n);

double spectral_radius(const Matrix & m);

nlohmann::json to_json(const VRep & p);
nlohmann::json to_json(const HRep & p);

}  // namespace safeplan::polytope

#endif  // SAFEPLAN__POLYTOPE_HPP_
