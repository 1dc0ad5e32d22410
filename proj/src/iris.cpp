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


#include "safeplan/iris.hpp"

#include "safeplan/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace safeplan::iris
{
namespace
{
using polytope::HRep;
using polytope::VRep;

std::vector<Eigen::Vector2d> points_of(const VRep & v)
{
  std::vector<Eigen::Vector2d> out;
  out.reserve(v.vertices.size());
  for (const auto & p : v.vertices) {
    out.emplace_back(p(0), p(1));
  }
  return out;
}

Eigen::Vector2d closest_on_segment(const Eigen::Vector2d & a, const Eigen::Vector2d & b, const Eigen::Vector2d & q)
{
  const Eigen::Vector2d ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((q - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return a + t * ab;
}

// Closest point of the convex polygon (hull of pts, counterclockwise) to q; sets
// inside when q is in the closed polygon.
Eigen::Vector2d closest_on_polygon(const std::vector<Eigen::Vector2d> & pts, const Eigen::Vector2d & q, bool & inside)
{
  const std::size_t n = pts.size();
  inside = false;
  if (n >= 3) {
    inside = true;
    for (std::size_t i = 0; i < n; ++i) {
      const Eigen::Vector2d e = pts[(i + 1) % n] - pts[i];
      const Eigen::Vector2d r = q - pts[i];
      if (e.x() * r.y() - e.y() * r.x() < 0.0) {
        inside = false;
        break;
      }
    }
    if (inside) {
      return q;
    }
  }
  Eigen::Vector2d best = pts[0];
  double best_d2 = (pts[0] - q).squaredNorm();
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector2d c = closest_on_segment(pts[i], pts[(i + 1) % n], q);
    const double d2 = (c - q).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best = c;
    }
  }
  if (best_d2 == 0.0) {
    inside = true;
  }
  return best;
}

bool excluded_by(const HRep & h, Eigen::Index row, const std::vector<Eigen::Vector2d> & pts)
{
  const Eigen::Vector2d a(h.A(row, 0), h.A(row, 1));
  for (const auto & p : pts) {
    if (a.dot(p) < h.b(row) - 1e-9) {
      return false;
    }
  }
  return true;
}

// Objective of the barrier problem over (c11, c12, c22, dx, dy).
struct Barrier
{
  const HRep & p;
  double t;

  static Eigen::Matrix2d shape(const Eigen::Matrix<double, 5, 1> & z)
  {
    Eigen::Matrix2d C;
    C << z(0), z(1), z(1), z(2);
    return C;
  }

  bool feasible(const Eigen::Matrix<double, 5, 1> & z) const
  {
    const Eigen::Matrix2d C = shape(z);
    if (!(C(0, 0) > 0.0) || !(C.determinant() > 0.0)) {
      return false;
    }
    for (Eigen::Index i = 0; i < p.A.rows(); ++i) {
      const Eigen::Vector2d a(p.A(i, 0), p.A(i, 1));
      if (!(p.b(i) - a.dot(z.tail<2>()) - (C * a).norm() > 0.0)) {
        return false;
      }
    }
    return true;
  }

  double value(const Eigen::Matrix<double, 5, 1> & z) const
  {
    const Eigen::Matrix2d C = shape(z);
    double f = -t * std::log(C.determinant());
    for (Eigen::Index i = 0; i < p.A.rows(); ++i) {
      const Eigen::Vector2d a(p.A(i, 0), p.A(i, 1));
      f -= std::log(p.b(i) - a.dot(z.tail<2>()) - (C * a).norm());
    }
    return f;
  }

  Eigen::Matrix<double, 5, 1> gradient(const Eigen::Matrix<double, 5, 1> & z) const
  {
    const Eigen::Matrix2d C = shape(z);
    const Eigen::Matrix2d Ci = C.inverse();
    Eigen::Matrix<double, 5, 1> g;
    g << -t * Ci(0, 0), -t * 2.0 * Ci(0, 1), -t * Ci(1, 1), 0.0, 0.0;
    for (Eigen::Index i = 0; i < p.A.rows(); ++i) {
      const Eigen::Vector2d a(p.A(i, 0), p.A(i, 1));
      const Eigen::Vector2d ca = C * a;
      const double norm = ca.norm();
      const double slack = p.b(i) - a.dot(z.tail<2>()) - norm;
      const Eigen::Vector2d u = norm > 0.0 ? Eigen::Vector2d(ca / norm) : Eigen::Vector2d::Zero();
      // d(slack) w.r.t. each variable, negated and divided by slack
      Eigen::Matrix<double, 5, 1> ds;
      ds << -u(0) * a(0), -(u(0) * a(1) + u(1) * a(0)), -u(1) * a(1), -a(0), -a(1);
      g -= ds / slack;
    }
    return g;
  }

  Eigen::Matrix<double, 5, 5> hessian(const Eigen::Matrix<double, 5, 1> & z) const
  {
    Eigen::Matrix<double, 5, 5> H;
    const Eigen::Matrix<double, 5, 1> g0 = gradient(z);
    for (int j = 0; j < 5; ++j) {
      const double h = 1e-7 * std::max(1.0, std::abs(z(j)));
      Eigen::Matrix<double, 5, 1> zp = z;
      zp(j) += h;
      if (!feasible(zp)) {
        zp(j) = z(j) - h;
        H.col(j) = (g0 - gradient(zp)) / h;
      } else {
        H.col(j) = (gradient(zp) - g0) / h;
      }
    }
    return 0.5 * (H + H.transpose());
  }
};

}  // namespace

double Ellipse::area() const { return std::numbers::pi * std::abs(C.determinant()); }

bool Ellipse::contains(const Eigen::Vector2d & p, double tol) const
{
  return (C.inverse() * (p - center)).norm() <= 1.0 + tol;
}

polytope::HRep separating_hyperplanes(
  const Ellipse & e, const std::vector<VRep> & obstacles, const HRep & bounds, const Eigen::Vector2d * keep)
{
  if (bounds.dim != 2) {
    throw Error(ErrorCode::DimensionMismatch, "IRIS bounds must be 2-D");
  }
  const Eigen::Matrix2d Ci = e.C.inverse();
  struct Candidate
  {
    double distance;
    std::size_t index;
    Eigen::Vector2d closest;  // in ellipse coordinates
  };
  std::vector<std::vector<Eigen::Vector2d>> world(obstacles.size());
  std::vector<Candidate> order;
  for (std::size_t i = 0; i < obstacles.size(); ++i) {
    if (obstacles[i].dim != 2) {
      throw Error(ErrorCode::DimensionMismatch, "IRIS obstacles must be 2-D");
    }
    world[i] = points_of(polytope::convex_hull_2d(points_of(obstacles[i])));
    std::vector<Eigen::Vector2d> local;
    for (const auto & p : world[i]) {
      local.push_back(Ci * (p - e.center));
    }
    bool inside = false;
    const Eigen::Vector2d c = closest_on_polygon(local, Eigen::Vector2d::Zero(), inside);
    if (inside) {
      throw Error(ErrorCode::SeedInsideObstacle, "ellipse center lies inside obstacle " + std::to_string(i));
    }
    order.push_back({c.norm(), i, c});
  }
  std::stable_sort(order.begin(), order.end(), [](const Candidate & a, const Candidate & b) {
    return a.distance < b.distance;
  });

  HRep out = bounds;
  for (const auto & cand : order) {
    const auto & pts = world[cand.index];
    bool separated = false;
    for (Eigen::Index r = bounds.num_halfspaces(); r < out.num_halfspaces(); ++r) {
      if (excluded_by(out, r, pts)) {
        separated = true;
        break;
      }
    }
    if (separated) {
      continue;
    }
    // tangent plane to the scaled ellipse through the closest point
    const Eigen::Vector2d n_local = cand.closest / cand.distance;
    Eigen::Vector2d a = Ci.transpose() * n_local;
    const Eigen::Vector2d x_star = e.C * cand.closest + e.center;
    double b = a.dot(x_star);
    if (keep != nullptr && a.dot(*keep) >= b - 1e-6 * a.norm()) {
      bool inside = false;
      const Eigen::Vector2d c = closest_on_polygon(pts, *keep, inside);
      if (inside) {
        throw Error(ErrorCode::SeedInsideObstacle, "kept point lies inside an obstacle");
      }
      a = c - *keep;
      b = a.dot(c);
    }
    const double norm = a.norm();
    out.add(a / norm, b / norm);
  }
  return out;
}

Ellipse inscribed_ellipse(const HRep & p)
{
  const VRep verts = polytope::h_to_v_2d(p);
  if (verts.lower_dimensional || polytope::area(verts) < 1e-12) {
    throw Error(ErrorCode::DegeneratePolytope, "inscribed ellipse needs a full-dimensional polygon");
  }
  // strictly interior start: vertex mean with a circle at half the plane clearance
  Eigen::Vector2d d = Eigen::Vector2d::Zero();
  for (const auto & v : verts.vertices) {
    d += Eigen::Vector2d(v(0), v(1));
  }
  d /= static_cast<double>(verts.size());
  double clearance = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < p.A.rows(); ++i) {
    clearance = std::min(clearance, p.b(i) - Eigen::Vector2d(p.A(i, 0), p.A(i, 1)).dot(d));
  }
  if (!(clearance > 0.0)) {
    throw Error(ErrorCode::DegeneratePolytope, "polygon has no interior");
  }
  Eigen::Matrix<double, 5, 1> z;
  z << 0.5 * clearance, 0.0, 0.5 * clearance, d(0), d(1);

  const double m = static_cast<double>(p.A.rows());
  Barrier barrier{p, 1.0};
  int newton_steps = 0;
  constexpr int kNewtonCap = 200;
  while (m / barrier.t > 1e-9 && newton_steps < kNewtonCap) {
    for (int inner = 0; inner < 50 && newton_steps < kNewtonCap; ++inner, ++newton_steps) {
      const Eigen::Matrix<double, 5, 1> g = barrier.gradient(z);
      Eigen::Matrix<double, 5, 5> H = barrier.hessian(z);
      Eigen::LDLT<Eigen::Matrix<double, 5, 5>> ldlt(H);
      Eigen::Matrix<double, 5, 1> step;
      if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
        step = -ldlt.solve(g);
      } else {
        step = -g;
      }
      const double decrement = -g.dot(step);
      if (decrement < 0.0) {
        step = -g;
      }
      if (std::abs(decrement) < 1e-12) {
        break;
      }
      // backtracking, staying strictly feasible
      const double f0 = barrier.value(z);
      double alpha = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 60; ++ls, alpha *= 0.5) {
        const Eigen::Matrix<double, 5, 1> trial = z + alpha * step;
        if (barrier.feasible(trial) && barrier.value(trial) <= f0 + 0.25 * alpha * g.dot(step)) {
          z = trial;
          moved = true;
          break;
        }
      }
      if (!moved) {
        break;
      }
    }
    barrier.t *= 10.0;
  }
  Ellipse e;
  e.C = Barrier::shape(z);
  e.center = z.tail<2>();
  return e;
}

ConvexRegion grow_region(
  const Eigen::Vector2d & seed, const std::vector<Eigen::Vector2d> & required, const std::vector<VRep> & obstacles,
  const HRep & bounds, const IrisOptions & options)
{
  Ellipse e;
  e.center = seed;
  e.C = options.initial_radius * Eigen::Matrix2d::Identity();
  ConvexRegion region;
  double area = e.area();
  for (int it = 0; it < options.max_iterations; ++it) {
    HRep poly = separating_hyperplanes(e, obstacles, bounds, &seed);
    Ellipse next = inscribed_ellipse(poly);
    region.polygon = poly;
    region.polygon_history.push_back(poly);
    region.iterations = it + 1;
    const double next_area = next.area();
    if (next_area >= area) {
      e = next;
    }
    region.ellipse = next;
    region.area_history.push_back(std::max(next_area, area));
    const bool converged = next_area < area * (1.0 + options.growth_tolerance);
    area = std::max(area, next_area);
    if (converged) {
      break;
    }
  }
  for (const auto & q : required) {
    region.required_contained.push_back(polytope::contains(region.polygon, q, 0.0));
  }
  return region;
}

VRep box_obstacle(double x_lo, double x_hi, double y_lo, double y_hi)
{
  const std::vector<Eigen::Vector2d> pts{{x_lo, y_lo}, {x_hi, y_lo}, {x_hi, y_hi}, {x_lo, y_hi}};
  return polytope::convex_hull_2d(pts);
}

nlohmann::json to_json(const ConvexRegion & region)
{
  nlohmann::json j;
  j["polygon"] = polytope::to_json(region.polygon);
  try {
    j["vertices"] = polytope::to_json(polytope::h_to_v_2d(region.polygon))["vertices"];
  } catch (const Error &) {
    j["vertices"] = nlohmann::json::array();
  }
  j["ellipse"] = {
    {"center", {region.ellipse.center(0), region.ellipse.center(1)}},
    {"C", {region.ellipse.C(0, 0), region.ellipse.C(0, 1), region.ellipse.C(1, 1)}}};
  j["iterations"] = region.iterations;
  return j;
}

}  // namespace safeplan::iris
