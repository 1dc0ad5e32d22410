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


#include "safeplan/frenet.hpp"

#include "safeplan/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace safeplan::frenet
{
namespace
{
const prediction::OccupancyBox * box_at(const std::vector<prediction::OccupancyBox> & boxes, int k)
{
  if (k < static_cast<int>(boxes.size()) && boxes[k].t_index == k) {
    return &boxes[k];
  }
  for (const auto & b : boxes) {
    if (b.t_index == k) {
      return &b;
    }
  }
  return nullptr;
}

}  // namespace

FrenetState to_frenet(const ReferencePath & path, const dynamics::VehicleState & x)
{
  const FrenetPoint fp = path.project({x.px, x.py});
  const PathPoint pp = path.eval(fp.s);
  const double dtheta = x.theta - pp.heading;
  FrenetState f;
  f.s = fp.s;
  f.d = fp.d;
  f.s_d = x.v * std::cos(dtheta) / (1.0 - pp.curvature * fp.d);
  f.d_d = x.v * std::sin(dtheta);
  return f;
}

dynamics::VehicleState to_cartesian(const ReferencePath & path, const FrenetState & f)
{
  const PathPoint pp = path.eval(f.s);
  const Eigen::Vector2d p = path.to_cartesian(f.s, f.d);
  const double vt = f.s_d * (1.0 - pp.curvature * f.d);
  const double v = std::hypot(vt, f.d_d);
  const double theta = v > 1e-12 ? pp.heading + std::atan2(f.d_d, vt) : pp.heading;
  return {p.x(), p.y(), v, dynamics::wrap_angle(theta)};
}

Quintic quintic_lateral(double d0, double d0_d, double d0_dd, double dT, double T)
{
  if (!(T > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "polynomial duration must be positive");
  }
  const double c0 = d0;
  const double c1 = d0_d;
  const double c2 = 0.5 * d0_dd;
  const double T2 = T * T;
  const double T3 = T2 * T;
  Eigen::Matrix3d M;
  M << T3, T3 * T, T3 * T2, 3 * T2, 4 * T3, 5 * T3 * T, 6 * T, 12 * T2, 20 * T3;
  const Eigen::Vector3d rhs(dT - (c0 + c1 * T + c2 * T2), -(c1 + 2 * c2 * T), -2 * c2);
  const Eigen::Vector3d c = M.fullPivLu().solve(rhs);
  return {c0, c1, c2, c(0), c(1), c(2)};
}

Quartic quartic_longitudinal(double s0, double s0_d, double s0_dd, double sT_d, double T)
{
  if (!(T > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "polynomial duration must be positive");
  }
  const double c1 = s0_d;
  const double c2 = 0.5 * s0_dd;
  const double T2 = T * T;
  Eigen::Matrix2d M;
  M << 3 * T2, 4 * T2 * T, 6 * T, 12 * T2;
  const Eigen::Vector2d rhs(sT_d - c1 - 2 * c2 * T, -2 * c2);
  const Eigen::Vector2d c = M.fullPivLu().solve(rhs);
  return {s0, c1, c2, c(0), c(1)};
}

FrenetSample sample_at(const FrenetCandidate & c, const ReferencePath & path, double t)
{
  const auto lon = poly_eval(c.longitudinal, t);
  const auto lat = poly_eval(c.lateral, t);
  FrenetSample out;
  out.t = t;
  out.s = lon[0];
  out.s_d = lon[1];
  out.a_lon = lon[2];
  out.j_lon = lon[3];
  out.d = lat[0];
  out.d_d = lat[1];
  out.a_lat = lat[2];
  out.j_lat = lat[3];

  const PathPoint pp = path.eval(out.s);
  const Eigen::Vector2d p = path.to_cartesian(out.s, out.d);
  out.x = p.x();
  out.y = p.y();
  const double k = pp.curvature;
  const double om = 1.0 - k * out.d;
  // velocity and acceleration in the path's (tangent, normal) frame
  const double vt = out.s_d * om;
  const double vn = out.d_d;
  const double at =
    out.a_lon * om - out.s_d * (pp.dcurvature * out.s_d * out.d + k * out.d_d) - k * out.s_d * out.d_d;
  const double an = k * out.s_d * out.s_d * om + out.a_lat;
  out.v = std::hypot(vt, vn);
  if (out.v > 1e-9) {
    out.theta = pp.heading + std::atan2(vn, vt);
    out.a_tangential = (vt * at + vn * an) / out.v;
    out.kappa = (vt * an - vn * at) / (out.v * out.v * out.v);
  } else {
    out.theta = (at != 0.0 || an != 0.0) ? pp.heading + std::atan2(an, at) : pp.heading;
    out.a_tangential = std::hypot(at, an) * (at < 0.0 ? -1.0 : 1.0);
    out.kappa = 0.0;
  }
  out.theta = dynamics::wrap_angle(out.theta);
  return out;
}

std::vector<FrenetCandidate> generate_candidates(
  const FrenetState & start, const PlannerConfig & cfg, const ReferencePath & path)
{
  if (cfg.d_targets.empty() || cfg.v_offsets.empty() || cfg.durations.empty()) {
    throw Error(ErrorCode::InvalidArgument, "planner sampling grids must be non-empty");
  }
  std::vector<FrenetCandidate> out;
  out.reserve(cfg.d_targets.size() * cfg.v_offsets.size() * cfg.durations.size());
  for (const double d_target : cfg.d_targets) {
    for (const double dv : cfg.v_offsets) {
      for (const double T : cfg.durations) {
        FrenetCandidate c;
        c.index = static_cast<int>(out.size());
        c.T = T;
        c.d_target = d_target;
        // a quartic speed change peaks at 1.5 dv / T in acceleration
        const double reach = cfg.v_target_margin * cfg.a_max * T / 1.5;
        c.v_target = std::max(0.0, std::clamp(cfg.v_ref + dv, start.s_d - reach, start.s_d + reach));
        c.lateral = quintic_lateral(start.d, start.d_d, start.d_dd, d_target, T);
        c.longitudinal = quartic_longitudinal(start.s, start.s_d, start.s_dd, c.v_target, T);
        const int n = static_cast<int>(std::lround(T / cfg.dt));
        c.samples.reserve(n + 1);
        for (int k = 0; k <= n; ++k) {
          const FrenetSample smp = sample_at(c, path, k * cfg.dt);
          if (
            std::abs(smp.a_tangential) > cfg.a_max + 1e-9 || smp.s_d < -1e-6 ||
            (smp.v >= cfg.kappa_check_speed && std::abs(smp.kappa) > cfg.kappa_max)) {
            c.feasible = false;
          }
          c.samples.push_back(smp);
        }
        out.push_back(std::move(c));
      }
    }
  }
  return out;
}

double point_box_distance(double x, double y, const prediction::OccupancyBox & b)
{
  const double dx = std::max({b.x_lo - x, 0.0, x - b.x_hi});
  const double dy = std::max({b.y_lo - y, 0.0, y - b.y_hi});
  return std::hypot(dx, dy);
}

bool collides(const FrenetCandidate & c, const Occupancy & occ, double ego_radius)
{
  for (std::size_t k = 0; k < c.samples.size(); ++k) {
    for (const auto & boxes : occ) {
      const auto * b = box_at(boxes, static_cast<int>(k));
      if (b != nullptr && point_box_distance(c.samples[k].x, c.samples[k].y, *b) <= ego_radius) {
        return true;
      }
    }
  }
  return false;
}

std::vector<FrenetCandidate> collision_filter(
  const std::vector<FrenetCandidate> & cands, const Occupancy & occ, double ego_radius)
{
  std::vector<FrenetCandidate> out;
  for (const auto & c : cands) {
    if (!collides(c, occ, ego_radius)) {
      out.push_back(c);
    }
  }
  return out;
}

double cost(const FrenetCandidate & c, const Occupancy & occ, const PlannerConfig & cfg)
{
  double j_lat = 0.0;
  double a_lat = 0.0;
  double v_lat = 0.0;
  double j_lon = 0.0;
  double a_lon = 0.0;
  double s_obs = 0.0;
  for (std::size_t k = 0; k < c.samples.size(); ++k) {
    const FrenetSample & s = c.samples[k];
    j_lat += s.j_lat * s.j_lat;
    a_lat += s.a_lat * s.a_lat;
    v_lat += s.d_d * s.d_d;
    j_lon += s.j_lon * s.j_lon;
    a_lon += s.a_lon * s.a_lon;
    double nearest = std::numeric_limits<double>::infinity();
    for (const auto & boxes : occ) {
      const auto * b = box_at(boxes, static_cast<int>(k));
      if (b != nullptr) {
        nearest = std::min(nearest, point_box_distance(s.x, s.y, *b));
      }
    }
    if (std::isfinite(nearest)) {
      s_obs += 1.0 / std::max(nearest, cfg.d_floor);
    }
  }
  const FrenetSample & end = c.samples.back();
  const double s_lat = end.d * end.d;
  const double s_lon = (cfg.v_ref - end.s_d) * (cfg.v_ref - end.s_d);
  const double c_lat = cfg.k_j * j_lat + cfg.k_a * a_lat + cfg.k_v * v_lat + cfg.k_s * s_lat;
  const double c_lon = cfg.k_j * j_lon + cfg.k_a * a_lon + cfg.k_t * c.T + cfg.k_s * s_lon;
  return cfg.k_lat * c_lat + cfg.k_lon * c_lon + cfg.k_obs * s_obs;
}

PlanResult evaluate_candidates(
  const FrenetState & start, const ReferencePath & path, const Occupancy & occ, const PlannerConfig & cfg,
  double ego_radius)
{
  PlanResult result;
  result.candidates = generate_candidates(start, cfg, path);
  for (std::size_t i = 0; i < result.candidates.size(); ++i) {
    auto & c = result.candidates[i];
    c.collision_free = !collides(c, occ, ego_radius);
    c.cost = cost(c, occ, cfg);
    if (!c.feasible || !c.collision_free) {
      continue;
    }
    const FrenetCandidate * best = result.best_index < 0 ? nullptr : &result.candidates[result.best_index];
    if (
      best == nullptr || c.cost < best->cost ||
      (c.cost == best->cost && std::abs(c.d_target) < std::abs(best->d_target))) {
      result.best_index = static_cast<int>(i);
    }
  }
  if (result.best_index >= 0) {
    result.best = result.candidates[result.best_index];
  }
  return result;
}

PlanResult plan(
  const FrenetState & start, const ReferencePath & path, const Occupancy & occ, const PlannerConfig & cfg,
  double ego_radius)
{
  PlanResult result = evaluate_candidates(start, path, occ, cfg, ego_radius);
  if (result.best_index < 0) {
    throw Error(ErrorCode::NoFeasibleTrajectory, "every candidate is infeasible or in collision");
  }
  return result;
}

nlohmann::json to_json(const FrenetCandidate & c, bool with_samples)
{
  nlohmann::json j = {
    {"index", c.index}, {"d_target", c.d_target}, {"v_target", c.v_target}, {"T", c.T},
    {"cost", c.cost},   {"feasible", c.feasible}, {"collision_free", c.collision_free}};
  if (with_samples) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto & s : c.samples) {
      pts.push_back({s.t, s.x, s.y, s.v, s.theta});
    }
    j["samples"] = pts;
  }
  return j;
}

}  // namespace safeplan::frenet
