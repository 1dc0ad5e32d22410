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

#include "safeplan/polytope.hpp"

#include "safeplan/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <string>

namespace safeplan::polytope
{
namespace
{
constexpr double kCollinearTol = 1e-12;
constexpr double kPi = 3.14159265358979323846;

void require_dim(int expected, int actual, const char * what)
{
  if (expected != actual) {
    throw Error(
      ErrorCode::DimensionMismatch, std::string(what) + ": expected dimension " +
                                      std::to_string(expected) + ", got " + std::to_string(actual));
  }
}

double cross(const Eigen::Vector2d & o, const Eigen::Vector2d & a, const Eigen::Vector2d & b)
{
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

// Strict left turn o -> a -> b, treating near-collinear triples as collinear.
bool left_turn(const Eigen::Vector2d & o, const Eigen::Vector2d & a, const Eigen::Vector2d & b)
{
  const double c = cross(o, a, b);
  const double scale = (a - o).norm() * (b - o).norm();
  return c > kCollinearTol * scale;
}

// Monotone chain; returns indices of the extreme points in counterclockwise order.
std::vector<std::size_t> hull_indices_2d(const std::vector<Eigen::Vector2d> & pts)
{
  std::vector<std::size_t> order(pts.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    if (pts[i].x() != pts[j].x()) {
      return pts[i].x() < pts[j].x();
    }
    if (pts[i].y() != pts[j].y()) {
      return pts[i].y() < pts[j].y();
    }
    return i < j;
  });
  order.erase(
    std::unique(
      order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return pts[i] == pts[j]; }),
    order.end());
  if (order.size() <= 2) {
    return order;
  }

  std::vector<std::size_t> hull(2 * order.size());
  std::size_t k = 0;
  for (const std::size_t idx : order) {
    while (k >= 2 && !left_turn(pts[hull[k - 2]], pts[hull[k - 1]], pts[idx])) {
      --k;
    }
    hull[k++] = idx;
  }
  const std::size_t lower_size = k + 1;
  for (auto it = order.rbegin() + 1; it != order.rend(); ++it) {
    while (k >= lower_size && !left_turn(pts[hull[k - 2]], pts[hull[k - 1]], pts[*it])) {
      --k;
    }
    hull[k++] = *it;
  }
  hull.resize(k - 1);
  return hull;
}

VRep hull_from_2d(const std::vector<Eigen::Vector2d> & pts)
{
  VRep out;
  out.dim = 2;
  for (const std::size_t idx : hull_indices_2d(pts)) {
    out.vertices.emplace_back(pts[idx]);
  }
  out.lower_dimensional = out.vertices.size() < 3;
  return out;
}

std::vector<Eigen::Vector2d> as_2d(std::span<const Vector> points)
{
  std::vector<Eigen::Vector2d> pts;
  pts.reserve(points.size());
  for (const auto & p : points) {
    require_dim(2, static_cast<int>(p.size()), "convex_hull_2d");
    pts.emplace_back(p(0), p(1));
  }
  return pts;
}

void dedupe(std::vector<Vector> & pts)
{
  std::sort(pts.begin(), pts.end(), [](const Vector & a, const Vector & b) {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
}

// Vertex enumeration of a 2-D H-rep, clipped by a large bounding box so that
// unbounded inputs still yield finitely many candidates.
std::vector<Eigen::Vector2d> enumerate_2d(const Matrix & A, const Vector & b, double clip, double tol)
{
  Matrix a_all(A.rows() + 4, 2);
  Vector b_all(A.rows() + 4);
  a_all.topRows(A.rows()) = A;
  b_all.head(A.rows()) = b;
  a_all.bottomRows(4) << 1, 0, -1, 0, 0, 1, 0, -1;
  b_all.tail(4).setConstant(clip);

  std::vector<Eigen::Vector2d> feasible;
  const Eigen::Index m = a_all.rows();
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i + 1; j < m; ++j) {
      Eigen::Matrix2d M;
      M.row(0) = a_all.row(i);
      M.row(1) = a_all.row(j);
      const double det = M.determinant();
      if (std::abs(det) < 1e-12) {
        continue;
      }
      const Eigen::Vector2d v = M.inverse() * Eigen::Vector2d(b_all(i), b_all(j));
      const Vector slack = a_all * v - b_all;
      if (slack.maxCoeff() <= tol * (1.0 + b_all.cwiseAbs().maxCoeff())) {
        feasible.push_back(v);
      }
    }
  }
  return feasible;
}

bool normals_positively_span(const Matrix & A)
{
  if (A.rows() < 3) {
    return false;
  }
  std::vector<double> angles;
  angles.reserve(A.rows());
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    angles.push_back(std::atan2(A(i, 1), A(i, 0)));
  }
  std::sort(angles.begin(), angles.end());
  double max_gap = angles.front() + 2.0 * kPi - angles.back();
  for (std::size_t i = 1; i < angles.size(); ++i) {
    max_gap = std::max(max_gap, angles[i] - angles[i - 1]);
  }
  return max_gap < kPi - 1e-12;
}

// Fourier-Motzkin feasibility for small coupled blocks of dimension > 2.
bool fm_empty(Matrix A, Vector b, double tol)
{
  while (A.cols() > 0) {
    const Eigen::Index last = A.cols() - 1;
    std::vector<Eigen::Index> pos;
    std::vector<Eigen::Index> neg;
    std::vector<Eigen::Index> zero;
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
      const double c = A(i, last);
      if (c > 1e-14) {
        pos.push_back(i);
      } else if (c < -1e-14) {
        neg.push_back(i);
      } else {
        zero.push_back(i);
      }
    }
    const std::size_t rows = zero.size() + pos.size() * neg.size();
    if (rows > 20000) {
      throw Error(ErrorCode::InvalidArgument, "is_empty: constraint block too large");
    }
    Matrix next(static_cast<Eigen::Index>(rows), last);
    Vector next_b(static_cast<Eigen::Index>(rows));
    Eigen::Index r = 0;
    for (const auto i : zero) {
      next.row(r) = A.row(i).head(last);
      next_b(r++) = b(i);
    }
    for (const auto i : pos) {
      for (const auto j : neg) {
        const double ci = A(i, last);
        const double cj = -A(j, last);
        next.row(r) = cj * A.row(i).head(last) + ci * A.row(j).head(last);
        next_b(r++) = cj * b(i) + ci * b(j);
      }
    }
    A = std::move(next);
    b = std::move(next_b);
  }
  return b.size() > 0 && b.minCoeff() < -tol;
}

}  // namespace

VRep VRep::from_points(std::span<const Vector> points)
{
  if (points.empty()) {
    throw Error(ErrorCode::InvalidArgument, "VRep requires at least one point");
  }
  const int d = static_cast<int>(points.front().size());
  for (const auto & p : points) {
    require_dim(d, static_cast<int>(p.size()), "VRep");
  }
  if (d == 2) {
    return convex_hull_2d(points);
  }
  VRep out;
  out.dim = d;
  out.vertices.assign(points.begin(), points.end());
  dedupe(out.vertices);
  return out;
}

HRep HRep::make(int dim)
{
  HRep h;
  h.dim = dim;
  h.A.resize(0, dim);
  h.b.resize(0);
  return h;
}

void HRep::add(const Vector & a, double offset)
{
  require_dim(dim, static_cast<int>(a.size()), "HRep::add");
  const double n = a.norm();
  if (n <= 0.0) {
    throw Error(ErrorCode::InvalidArgument, "halfspace normal must be non-zero");
  }
  A.conservativeResize(A.rows() + 1, dim);
  b.conservativeResize(b.size() + 1);
  A.row(A.rows() - 1) = a.transpose() / n;
  b(b.size() - 1) = offset / n;
}

Box make_box(const Vector & lower, const Vector & upper)
{
  require_dim(static_cast<int>(lower.size()), static_cast<int>(upper.size()), "make_box");
  if ((upper - lower).minCoeff() < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "box requires lower <= upper");
  }
  return Box{lower, upper};
}

Box centered_box(const Vector & half_widths) { return make_box(-half_widths, half_widths); }

VRep Box::to_vrep() const
{
  const int d = dim();
  std::vector<Vector> corners;
  const std::size_t count = std::size_t{1} << d;
  corners.reserve(count);
  for (std::size_t mask = 0; mask < count; ++mask) {
    Vector c(d);
    for (int i = 0; i < d; ++i) {
      c(i) = (mask >> i) & 1U ? upper(i) : lower(i);
    }
    corners.push_back(std::move(c));
  }
  return VRep::from_points(corners);
}

HRep Box::to_hrep() const
{
  const int d = dim();
  HRep h = HRep::make(d);
  for (int i = 0; i < d; ++i) {
    Vector e = Vector::Zero(d);
    e(i) = 1.0;
    h.add(e, upper(i));
    h.add(-e, -lower(i));
  }
  return h;
}

VRep convex_hull_2d(std::span<const Eigen::Vector2d> points)
{
  if (points.empty()) {
    throw Error(ErrorCode::InvalidArgument, "convex_hull_2d requires at least one point");
  }
  return hull_from_2d(std::vector<Eigen::Vector2d>(points.begin(), points.end()));
}

VRep convex_hull_2d(std::span<const Vector> points)
{
  if (points.empty()) {
    throw Error(ErrorCode::InvalidArgument, "convex_hull_2d requires at least one point");
  }
  return hull_from_2d(as_2d(points));
}

double area(const VRep & p)
{
  require_dim(2, p.dim, "area");
  if (p.vertices.size() < 3) {
    return 0.0;
  }
  double twice = 0.0;
  for (std::size_t i = 0; i < p.vertices.size(); ++i) {
    const auto & a = p.vertices[i];
    const auto & b = p.vertices[(i + 1) % p.vertices.size()];
    twice += a(0) * b(1) - a(1) * b(0);
  }
  return 0.5 * twice;
}

HRep v_to_h(const VRep & p)
{
  require_dim(2, p.dim, "v_to_h");
  const VRep hull = convex_hull_2d(p.vertices);
  if (hull.lower_dimensional || area(hull) <= 0.0) {
    throw Error(ErrorCode::DegeneratePolytope, "v_to_h: polygon has zero area");
  }
  HRep h = HRep::make(2);
  const std::size_t n = hull.vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vector & a = hull.vertices[i];
    const Vector & b = hull.vertices[(i + 1) % n];
    Vector normal(2);
    normal << b(1) - a(1), a(0) - b(0);
    normal.normalize();
    h.add(normal, normal.dot(a));
  }
  return h;
}

HRep v_to_h_closed(const VRep & p)
{
  require_dim(2, p.dim, "v_to_h_closed");
  const VRep hull = convex_hull_2d(p.vertices);
  if (!hull.lower_dimensional) {
    return v_to_h(hull);
  }
  HRep h = HRep::make(2);
  const Vector & first = hull.vertices.front();
  if (hull.vertices.size() == 1) {
    h.add(Vector::Unit(2, 0), first(0));
    h.add(-Vector::Unit(2, 0), -first(0));
    h.add(Vector::Unit(2, 1), first(1));
    h.add(-Vector::Unit(2, 1), -first(1));
    return h;
  }
  const Vector & last = hull.vertices.back();
  const Vector t = (last - first).normalized();
  Vector n(2);
  n << -t(1), t(0);
  h.add(n, n.dot(first));
  h.add(-n, -n.dot(first));
  h.add(t, t.dot(last));
  h.add(-t, -t.dot(first));
  return h;
}

VRep h_to_v_2d(const HRep & p)
{
  require_dim(2, p.dim, "h_to_v_2d");
  const double scale = 1.0 + (p.b.size() > 0 ? p.b.cwiseAbs().maxCoeff() : 0.0);
  const double clip = 1e6 * scale;
  const auto clipped = enumerate_2d(p.A, p.b, clip, 1e-9);
  if (clipped.empty()) {
    throw Error(ErrorCode::EmptyPolytope, "h_to_v_2d: halfspaces have empty intersection");
  }
  if (!normals_positively_span(p.A)) {
    throw Error(ErrorCode::UnboundedPolytope, "h_to_v_2d: halfspaces do not bound a polygon");
  }
  std::vector<Eigen::Vector2d> inner;
  for (const auto & v : clipped) {
    if (v.cwiseAbs().maxCoeff() < 0.5 * clip) {
      inner.push_back(v);
    }
  }
  if (inner.empty()) {
    throw Error(ErrorCode::UnboundedPolytope, "h_to_v_2d: no finite vertices");
  }
  return hull_from_2d(inner);
}

VRep minkowski_sum(const VRep & p, const VRep & q)
{
  require_dim(p.dim, q.dim, "minkowski_sum");
  std::vector<Vector> sums;
  sums.reserve(p.size() * q.size());
  for (const auto & a : p.vertices) {
    for (const auto & b : q.vertices) {
      sums.push_back(a + b);
    }
  }
  return VRep::from_points(sums);
}

HRep pontryagin_diff(const HRep & p, const VRep & q)
{
  require_dim(p.dim, q.dim, "pontryagin_diff");
  HRep out = p;
  for (Eigen::Index i = 0; i < p.A.rows(); ++i) {
    out.b(i) = p.b(i) - support(q, p.A.row(i).transpose());
  }
  out.empty = p.empty || is_empty(out);
  return out;
}

VRep project(const VRep & p, std::span<const int> indices)
{
  if (indices.empty()) {
    throw Error(ErrorCode::IndexOutOfRange, "project: empty index set");
  }
  for (const int idx : indices) {
    if (idx < 0 || idx >= p.dim) {
      throw Error(ErrorCode::IndexOutOfRange, "project: index " + std::to_string(idx));
    }
  }
  std::vector<Vector> pts;
  pts.reserve(p.size());
  for (const auto & v : p.vertices) {
    Vector r(static_cast<Eigen::Index>(indices.size()));
    for (std::size_t i = 0; i < indices.size(); ++i) {
      r(static_cast<Eigen::Index>(i)) = v(indices[i]);
    }
    pts.push_back(std::move(r));
  }
  if (indices.size() == 1) {
    const auto [lo, hi] = std::minmax_element(
      pts.begin(), pts.end(), [](const Vector & a, const Vector & b) { return a(0) < b(0); });
    std::vector<Vector> ends{*lo, *hi};
    return VRep::from_points(ends);
  }
  return VRep::from_points(pts);
}

HRep concat(const HRep & p, const HRep & q)
{
  HRep out = HRep::make(p.dim + q.dim);
  out.A = Matrix::Zero(p.A.rows() + q.A.rows(), p.dim + q.dim);
  out.b.resize(p.b.size() + q.b.size());
  out.A.topLeftCorner(p.A.rows(), p.dim) = p.A;
  out.A.bottomRightCorner(q.A.rows(), q.dim) = q.A;
  out.b << p.b, q.b;
  out.empty = p.empty || q.empty;
  return out;
}

double support(const VRep & p, const Vector & direction)
{
  require_dim(p.dim, static_cast<int>(direction.size()), "support");
  if (p.vertices.empty()) {
    throw Error(ErrorCode::InvalidArgument, "support of an empty vertex set");
  }
  const double n = direction.norm();
  if (n <= 0.0) {
    throw Error(ErrorCode::InvalidArgument, "support: zero direction");
  }
  double best = -std::numeric_limits<double>::infinity();
  for (const auto & v : p.vertices) {
    best = std::max(best, direction.dot(v) / n);
  }
  return best;
}

VRep linear_map(const Matrix & M, const VRep & p)
{
  require_dim(static_cast<int>(M.cols()), p.dim, "linear_map");
  std::vector<Vector> pts;
  pts.reserve(p.size());
  for (const auto & v : p.vertices) {
    pts.push_back(M * v);
  }
  return VRep::from_points(pts);
}

bool contains(const HRep & p, const Vector & x, double tol)
{
  require_dim(p.dim, static_cast<int>(x.size()), "contains");
  if (p.empty) {
    return false;
  }
  if (p.A.rows() == 0) {
    return true;
  }
  return (p.A * x - p.b).maxCoeff() <= tol;
}

bool hull_contains_2d(const VRep & p, const Eigen::Vector2d & x, double tol)
{
  require_dim(2, p.dim, "hull_contains_2d");
  const auto & v = p.vertices;
  if (v.size() == 1) {
    return (x - Eigen::Vector2d(v[0])).norm() <= tol;
  }
  if (v.size() == 2) {
    const Eigen::Vector2d a = v[0];
    const Eigen::Vector2d b = v[1];
    const double t = std::clamp((x - a).dot(b - a) / (b - a).squaredNorm(), 0.0, 1.0);
    return (a + t * (b - a) - x).norm() <= tol;
  }
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Eigen::Vector2d a = v[i];
    const Eigen::Vector2d b = v[(i + 1) % v.size()];
    const double len = (b - a).norm();
    if (cross(a, b, x) < -tol * len) {
      return false;
    }
  }
  return true;
}

bool is_empty(const HRep & p, double tol)
{
  if (p.empty) {
    return true;
  }
  const Eigen::Index m = p.A.rows();
  const int d = p.dim;
  // Union-find over coordinates coupled by a common halfspace.
  std::vector<int> parent(d);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int i) {
    while (parent[i] != i) {
      parent[i] = parent[parent[i]];
      i = parent[i];
    }
    return i;
  };
  std::vector<std::vector<int>> row_support(m);
  for (Eigen::Index r = 0; r < m; ++r) {
    for (int c = 0; c < d; ++c) {
      if (std::abs(p.A(r, c)) > 1e-15) {
        row_support[r].push_back(c);
      }
    }
    if (row_support[r].empty()) {
      if (p.b(r) < -tol) {
        return true;
      }
      continue;
    }
    for (std::size_t k = 1; k < row_support[r].size(); ++k) {
      parent[find(row_support[r][k])] = find(row_support[r][0]);
    }
  }
  std::vector<int> roots;
  for (int c = 0; c < d; ++c) {
    roots.push_back(find(c));
  }
  std::set<int> components(roots.begin(), roots.end());
  for (const int root : components) {
    std::vector<int> coords;
    for (int c = 0; c < d; ++c) {
      if (roots[c] == root) {
        coords.push_back(c);
      }
    }
    std::vector<Eigen::Index> rows;
    for (Eigen::Index r = 0; r < m; ++r) {
      if (!row_support[r].empty() && find(row_support[r][0]) == root) {
        rows.push_back(r);
      }
    }
    if (rows.empty()) {
      continue;
    }
    Matrix sub(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(coords.size()));
    Vector sub_b(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (std::size_t j = 0; j < coords.size(); ++j) {
        sub(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = p.A(rows[i], coords[j]);
      }
      sub_b(static_cast<Eigen::Index>(i)) = p.b(rows[i]);
    }
    if (coords.size() == 1) {
      double lo = -std::numeric_limits<double>::infinity();
      double hi = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < sub.rows(); ++i) {
        if (sub(i, 0) > 0) {
          hi = std::min(hi, sub_b(i) / sub(i, 0));
        } else {
          lo = std::max(lo, sub_b(i) / sub(i, 0));
        }
      }
      if (lo > hi + tol) {
        return true;
      }
    } else if (coords.size() == 2) {
      const double scale = 1.0 + sub_b.cwiseAbs().maxCoeff();
      if (enumerate_2d(sub, sub_b, 1e6 * scale, tol).empty()) {
        return true;
      }
    } else if (fm_empty(sub, sub_b, tol)) {
      return true;
    }
  }
  return false;
}

double spectral_radius(const Matrix & m)
{
  Eigen::EigenSolver<Matrix> es(m, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

InvariantSet compute_z_hrep(const Matrix & a_k, const VRep & w, int n)
{
  require_dim(4, static_cast<int>(a_k.rows()), "compute_z_hrep (A_K rows)");
  require_dim(4, static_cast<int>(a_k.cols()), "compute_z_hrep (A_K cols)");
  require_dim(4, w.dim, "compute_z_hrep (W)");
  if (n < 0) {
    throw Error(ErrorCode::InvalidArgument, "compute_z_hrep: negative truncation depth");
  }
  const double rho = spectral_radius(a_k);
  if (rho >= 1.0) {
    throw Error(
      ErrorCode::UnstableGain, "compute_z_hrep: spectral radius " + std::to_string(rho) + " >= 1");
  }

  // Keeps a generator iff it maps to an extreme point of either projection,
  // which leaves both projected hulls (and thus the returned H-rep) unchanged.
  auto prune = [](const std::vector<Vector> & pts) {
    std::vector<Eigen::Vector2d> pos;
    std::vector<Eigen::Vector2d> vh;
    pos.reserve(pts.size());
    vh.reserve(pts.size());
    for (const auto & p : pts) {
      pos.emplace_back(p(0), p(1));
      vh.emplace_back(p(2), p(3));
    }
    std::set<std::size_t> keep;
    for (const auto idx : hull_indices_2d(pos)) {
      keep.insert(idx);
    }
    for (const auto idx : hull_indices_2d(vh)) {
      keep.insert(idx);
    }
    std::vector<Vector> out;
    out.reserve(keep.size());
    for (const auto idx : keep) {
      out.push_back(pts[idx]);
    }
    return out;
  };

  std::vector<Vector> z = prune(w.vertices);
  Matrix power = Matrix::Identity(4, 4);
  for (int i = 1; i <= n; ++i) {
    power = a_k * power;
    std::vector<Vector> term;
    term.reserve(w.size());
    for (const auto & v : w.vertices) {
      term.push_back(power * v);
    }
    std::vector<Vector> sums;
    sums.reserve(z.size() * term.size());
    for (const auto & a : z) {
      for (const auto & b : term) {
        sums.push_back(a + b);
      }
    }
    z = prune(sums);
  }

  InvariantSet out;
  out.vertices.dim = 4;
  out.vertices.vertices = z;
  const int pos_idx[] = {0, 1};
  const int vh_idx[] = {2, 3};
  out.position_hull = project(out.vertices, pos_idx);
  out.velocity_heading_hull = project(out.vertices, vh_idx);
  out.hrep = concat(v_to_h_closed(out.position_hull), v_to_h_closed(out.velocity_heading_hull));
  return out;
}

nlohmann::json to_json(const VRep & p)
{
  nlohmann::json verts = nlohmann::json::array();
  for (const auto & v : p.vertices) {
    verts.push_back(std::vector<double>(v.data(), v.data() + v.size()));
  }
  return {{"dim", p.dim}, {"vertices", verts}};
}

nlohmann::json to_json(const HRep & p)
{
  nlohmann::json hs = nlohmann::json::array();
  for (Eigen::Index i = 0; i < p.A.rows(); ++i) {
    std::vector<double> a(static_cast<std::size_t>(p.dim));
    for (int j = 0; j < p.dim; ++j) {
      a[static_cast<std::size_t>(j)] = p.A(i, j);
    }
    hs.push_back({{"a", a}, {"b", p.b(i)}});
  }
  nlohmann::json j{{"dim", p.dim}, {"halfspaces", hs}};
  if (p.empty) {
    j["empty"] = true;
  }
  return j;
}

}  // namespace safeplan::polytope
