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


#include "safeplan/reference_path.hpp"

#include "safeplan/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace safeplan::frenet
{
namespace
{
// Arc-length lookup spacing in the chord parameter; keeps table steps near 1 cm.
constexpr double kTableStep = 0.01;

// Cubic spline with parabolic run-out ends (m_0 = m_1, m_n = m_{n-1}), so that
// arcs keep their curvature up to the last waypoint.
template <typename C>
std::vector<C> runout_spline(const std::vector<double> & t, const std::vector<double> & y)
{
  const std::size_t n = t.size() - 1;
  std::vector<C> out(n);
  if (n == 1) {
    out[0] = {y[0], (y[1] - y[0]) / (t[1] - t[0]), 0.0, 0.0};
    return out;
  }
  // second derivatives m_i, tridiagonal solve
  std::vector<double> h(n);
  for (std::size_t i = 0; i < n; ++i) {
    h[i] = t[i + 1] - t[i];
  }
  std::vector<double> diag(n + 1, 1.0);
  std::vector<double> upper(n + 1, 0.0);
  std::vector<double> lower(n + 1, 0.0);
  std::vector<double> rhs(n + 1, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    lower[i] = h[i - 1];
    diag[i] = 2.0 * (h[i - 1] + h[i]);
    upper[i] = h[i];
    rhs[i] = 6.0 * ((y[i + 1] - y[i]) / h[i] - (y[i] - y[i - 1]) / h[i - 1]);
  }
  upper[0] = -1.0;
  lower[n] = -1.0;
  for (std::size_t i = 1; i <= n; ++i) {
    const double w = lower[i] / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  std::vector<double> m(n + 1);
  m[n] = rhs[n] / diag[n];
  for (std::size_t i = n; i-- > 0;) {
    m[i] = (rhs[i] - upper[i] * m[i + 1]) / diag[i];
  }
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = {
      y[i], (y[i + 1] - y[i]) / h[i] - h[i] * (2.0 * m[i] + m[i + 1]) / 6.0, m[i] / 2.0,
      (m[i + 1] - m[i]) / (6.0 * h[i])};
  }
  return out;
}

}  // namespace

ReferencePath ReferencePath::from_waypoints(std::span<const Eigen::Vector2d> waypoints)
{
  if (waypoints.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "reference path needs at least two waypoints");
  }
  ReferencePath path;
  path.waypoints_.assign(waypoints.begin(), waypoints.end());
  path.knots_.push_back(0.0);
  for (std::size_t i = 1; i < waypoints.size(); ++i) {
    const double chord = (waypoints[i] - waypoints[i - 1]).norm();
    if (!(chord > 1e-9)) {
      throw Error(ErrorCode::InvalidArgument, "reference path has repeated waypoints");
    }
    path.knots_.push_back(path.knots_.back() + chord);
  }
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto & w : waypoints) {
    xs.push_back(w.x());
    ys.push_back(w.y());
  }
  path.sx_ = runout_spline<Cubic>(path.knots_, xs);
  path.sy_ = runout_spline<Cubic>(path.knots_, ys);

  const double u_end = path.knots_.back();
  const auto steps = static_cast<std::size_t>(std::ceil(u_end / kTableStep));
  path.table_u_.resize(steps + 1);
  path.table_s_.resize(steps + 1);
  path.table_u_[0] = 0.0;
  path.table_s_[0] = 0.0;
  for (std::size_t i = 1; i <= steps; ++i) {
    const double u0 = path.table_u_[i - 1];
    const double u1 = i == steps ? u_end : static_cast<double>(i) * kTableStep;
    path.table_u_[i] = u1;
    path.table_s_[i] = path.table_s_[i - 1] + path.speed_integral(u0, u1);
  }
  path.total_length_ = path.table_s_.back();
  for (std::size_t i = 0; i <= steps; i += 10) {
    path.max_curvature_ = std::max(path.max_curvature_, std::abs(path.eval(path.table_s_[i]).curvature));
  }
  return path;
}

std::size_t ReferencePath::segment(double u) const
{
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), u);
  const auto i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, it - knots_.begin() - 1));
  return std::min(i, sx_.size() - 1);
}

Eigen::Vector2d ReferencePath::r(double u) const
{
  const std::size_t i = segment(u);
  const double t = u - knots_[i];
  const Cubic & x = sx_[i];
  const Cubic & y = sy_[i];
  return {x.a + t * (x.b + t * (x.c + t * x.d)), y.a + t * (y.b + t * (y.c + t * y.d))};
}

Eigen::Vector2d ReferencePath::dr(double u) const
{
  const std::size_t i = segment(u);
  const double t = u - knots_[i];
  const Cubic & x = sx_[i];
  const Cubic & y = sy_[i];
  return {x.b + t * (2.0 * x.c + 3.0 * t * x.d), y.b + t * (2.0 * y.c + 3.0 * t * y.d)};
}

Eigen::Vector2d ReferencePath::ddr(double u) const
{
  const std::size_t i = segment(u);
  const double t = u - knots_[i];
  return {2.0 * sx_[i].c + 6.0 * t * sx_[i].d, 2.0 * sy_[i].c + 6.0 * t * sy_[i].d};
}

Eigen::Vector2d ReferencePath::dddr(double u) const
{
  const std::size_t i = segment(u);
  return {6.0 * sx_[i].d, 6.0 * sy_[i].d};
}

double ReferencePath::speed_integral(double u0, double u1) const
{
  // 3-point Gauss-Legendre; exact enough on 1 cm pieces
  static const double nodes[3] = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
  static const double weights[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  const double half = 0.5 * (u1 - u0);
  const double mid = 0.5 * (u1 + u0);
  double sum = 0.0;
  for (int k = 0; k < 3; ++k) {
    sum += weights[k] * dr(mid + half * nodes[k]).norm();
  }
  return half * sum;
}

double ReferencePath::s_of_u(double u) const
{
  const auto it = std::upper_bound(table_u_.begin(), table_u_.end(), u);
  const auto i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, it - table_u_.begin() - 1));
  return table_s_[i] + speed_integral(table_u_[i], u);
}

double ReferencePath::u_of_s(double s) const
{
  const auto it = std::upper_bound(table_s_.begin(), table_s_.end(), s);
  const auto i = std::min(
    table_s_.size() - 2, static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, it - table_s_.begin() - 1)));
  const double s0 = table_s_[i];
  const double s1 = table_s_[i + 1];
  double u = table_u_[i] + (table_u_[i + 1] - table_u_[i]) * (s - s0) / (s1 - s0);
  for (int iter = 0; iter < 3; ++iter) {
    const double f = s0 + speed_integral(table_u_[i], u) - s;
    u -= f / dr(u).norm();
  }
  return u;
}

PathPoint ReferencePath::eval(double s) const
{
  PathPoint out;
  if (s < 0.0 || s > total_length_) {
    // straight continuation along the end tangent
    const bool before = s < 0.0;
    const double u_end = before ? 0.0 : knots_.back();
    const Eigen::Vector2d t = dr(u_end).normalized();
    const Eigen::Vector2d p = r(u_end) + (before ? s : s - total_length_) * t;
    out.x = p.x();
    out.y = p.y();
    out.heading = std::atan2(t.y(), t.x());
    return out;
  }
  const double u = u_of_s(s);
  const Eigen::Vector2d p = r(u);
  const Eigen::Vector2d d1 = dr(u);
  const Eigen::Vector2d d2 = ddr(u);
  const Eigen::Vector2d d3 = dddr(u);
  const double speed = d1.norm();
  const double cross = d1.x() * d2.y() - d1.y() * d2.x();
  out.x = p.x();
  out.y = p.y();
  out.heading = std::atan2(d1.y(), d1.x());
  out.curvature = cross / (speed * speed * speed);
  // d(kappa)/du divided by ds/du
  const double dcross = d1.x() * d3.y() - d1.y() * d3.x();
  const double dspeed = d1.dot(d2) / speed;
  const double dk_du = dcross / std::pow(speed, 3) - 3.0 * cross * dspeed / std::pow(speed, 4);
  out.dcurvature = dk_du / speed;
  return out;
}

Eigen::Vector2d ReferencePath::to_cartesian(double s, double d) const
{
  const PathPoint p = eval(s);
  return {p.x - d * std::sin(p.heading), p.y + d * std::cos(p.heading)};
}

FrenetPoint ReferencePath::project(const Eigen::Vector2d & q) const
{
  // coarse scan over the lookup table, then Newton on the chord parameter
  std::size_t best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  const std::size_t stride = 25;
  for (std::size_t i = 0; i < table_u_.size(); i += stride) {
    const double d2 = (r(table_u_[i]) - q).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best = i;
    }
  }
  {
    const double d2 = (r(table_u_.back()) - q).squaredNorm();
    if (d2 < best_d2) {
      best = table_u_.size() - 1;
    }
  }
  const std::size_t lo = best >= stride ? best - stride : 0;
  const std::size_t hi = std::min(table_u_.size() - 1, best + stride);
  best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = lo; i <= hi; ++i) {
    const double d2 = (r(table_u_[i]) - q).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best = i;
    }
  }
  const double u_end = knots_.back();
  double u = table_u_[best];
  bool outside = false;
  for (int iter = 0; iter < 20; ++iter) {
    const Eigen::Vector2d e = r(u) - q;
    const Eigen::Vector2d d1 = dr(u);
    const double g = e.dot(d1);
    const double h = d1.squaredNorm() + e.dot(ddr(u));
    if (h <= 0.0) {
      break;
    }
    double next = u - g / h;
    if (next < 0.0 || next > u_end) {
      outside = true;
      next = std::clamp(next, 0.0, u_end);
    }
    const bool done = std::abs(next - u) < 1e-13 * (1.0 + u_end);
    u = next;
    if (done) {
      break;
    }
  }
  // beyond an end, project onto the tangent continuation
  const Eigen::Vector2d t0 = dr(0.0).normalized();
  const Eigen::Vector2d t1 = dr(u_end).normalized();
  const double before = (q - r(0.0)).dot(t0);
  const double after = (q - r(u_end)).dot(t1);
  if ((outside || u <= 0.0) && before < 0.0) {
    const Eigen::Vector2d n(-t0.y(), t0.x());
    return {before, (q - r(0.0)).dot(n)};
  }
  if ((outside || u >= u_end) && after > 0.0) {
    const Eigen::Vector2d n(-t1.y(), t1.x());
    return {total_length_ + after, (q - r(u_end)).dot(n)};
  }
  const Eigen::Vector2d d1 = dr(u);
  const Eigen::Vector2d n = Eigen::Vector2d(-d1.y(), d1.x()) / d1.norm();
  FrenetPoint out{s_of_u(u), (q - r(u)).dot(n)};
  // unique only inside the corridor |d| < 1 / max curvature; the margin absorbs
  // spline curvature error at the center of an arc
  if (std::abs(out.d) * max_curvature_ >= 1.0 - 1e-3) {
    throw Error(ErrorCode::ProjectionAmbiguous, "point too far from the path for a unique projection");
  }
  return out;
}

}  // namespace safeplan::frenet
