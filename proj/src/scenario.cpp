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


#include "safeplan/scenario.hpp"

#include "safeplan/errors.hpp"

#include <cmath>
#include <numbers>
#include <set>

namespace safeplan::sim
{
namespace
{
using nlohmann::json;

[[noreturn]] void invalid(const std::string & msg)
{
  throw Error(ErrorCode::ScenarioInvalid, msg);
}

bool finite(double x) { return std::isfinite(x); }

std::string policy_name(ObstaclePolicy p)
{
  return p == ObstaclePolicy::ConstantVelocity ? "constant_velocity" : "follow_path";
}

json footprint_json(const prediction::Footprint & f) { return {{"half_length", f.half_length}, {"half_width", f.half_width}}; }

prediction::Footprint footprint_from(const json & j, const prediction::Footprint & def)
{
  prediction::Footprint f = def;
  f.half_length = j.value("half_length", def.half_length);
  f.half_width = j.value("half_width", def.half_width);
  return f;
}

dynamics::VehicleState state_from(const json & j)
{
  if (!j.is_array() || j.size() != 4) {
    invalid("state must be [px, py, v, theta]");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

std::pair<double, double> pair_from(const json & j, const char * what)
{
  if (!j.is_array() || j.size() != 2) {
    invalid(std::string(what) + " must be [lo, hi]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

// Arc of radius r around `center` from angle a0 to a1, step in radians.
void append_arc(std::vector<Eigen::Vector2d> & pts, Eigen::Vector2d center, double r, double a0, double a1, double step)
{
  const int n = static_cast<int>(std::ceil(std::abs(a1 - a0) / step));
  for (int i = 1; i <= n; ++i) {
    const double a = a0 + (a1 - a0) * i / n;
    pts.push_back(center + r * Eigen::Vector2d(std::cos(a), std::sin(a)));
  }
}

}  // namespace

bool footprints_overlap(
  const dynamics::VehicleState & a, const prediction::Footprint & fa, const dynamics::VehicleState & b,
  const prediction::Footprint & fb)
{
  const auto ca = prediction::footprint_corners(a.px, a.py, a.theta, fa);
  const auto cb = prediction::footprint_corners(b.px, b.py, b.theta, fb);
  const Eigen::Vector2d axes[4] = {
    {std::cos(a.theta), std::sin(a.theta)}, {-std::sin(a.theta), std::cos(a.theta)},
    {std::cos(b.theta), std::sin(b.theta)}, {-std::sin(b.theta), std::cos(b.theta)}};
  for (const auto & ax : axes) {
    double amin = 1e300, amax = -1e300, bmin = 1e300, bmax = -1e300;
    for (const auto & c : ca) {
      amin = std::min(amin, ax.dot(c));
      amax = std::max(amax, ax.dot(c));
    }
    for (const auto & c : cb) {
      bmin = std::min(bmin, ax.dot(c));
      bmax = std::max(bmax, ax.dot(c));
    }
    if (amax < bmin || bmax < amin) {
      return false;
    }
  }
  return true;
}

std::vector<dynamics::VehicleState> obstacle_states(const Scenario & s, const frenet::ReferencePath & path, double t)
{
  std::vector<dynamics::VehicleState> out;
  out.reserve(s.obstacles.size());
  for (const auto & o : s.obstacles) {
    if (o.policy == ObstaclePolicy::ConstantVelocity) {
      const auto & x = o.start;
      out.push_back({x.px + x.v * t * std::cos(x.theta), x.py + x.v * t * std::sin(x.theta), x.v, x.theta});
    } else {
      const double sv = o.s0 + o.speed * t;
      const frenet::PathPoint p = path.eval(sv);
      const Eigen::Vector2d pos = path.to_cartesian(sv, o.d);
      out.push_back({pos.x(), pos.y(), o.speed, p.heading});
    }
  }
  return out;
}

void validate(const Scenario & s)
{
  if (s.name.empty()) {
    invalid("scenario name is empty");
  }
  if (s.waypoints.size() < 2) {
    invalid("at least two waypoints are required");
  }
  for (const auto & w : s.waypoints) {
    if (!finite(w.x()) || !finite(w.y())) {
      invalid("waypoints must be finite");
    }
  }
  std::optional<frenet::ReferencePath> path;
  try {
    path = frenet::ReferencePath::from_waypoints(s.waypoints);
  } catch (const Error & e) {
    invalid(std::string("waypoints: ") + e.what());
  }
  if (!(s.duration > 0.0) || !finite(s.duration)) {
    invalid("duration must be positive");
  }
  if (!(s.v_ref > 0.0) || !finite(s.v_ref)) {
    invalid("v_ref must be positive");
  }
  if (!(s.w_max.array() >= 0.0).all() || !s.w_max.allFinite()) {
    invalid("w_max must be non-negative");
  }
  if (!(s.ego_radius > 0.0) || !(s.safe_distance >= 0.0)) {
    invalid("ego radius must be positive and safe distance non-negative");
  }
  auto check_fp = [](const prediction::Footprint & f, const std::string & who) {
    if (!(f.half_length > 0.0) || !(f.half_width > 0.0)) {
      invalid(who + ": footprint extents must be positive");
    }
  };
  check_fp(s.ego_footprint, "ego");
  if (!(s.world.x_lo < s.world.x_hi) || !(s.world.y_lo < s.world.y_hi)) {
    invalid("world bounds are empty");
  }
  const auto & e = s.ego_start;
  if (!finite(e.px) || !finite(e.py) || !finite(e.v) || !finite(e.theta) || e.v < 0.0) {
    invalid("ego start state must be finite with v >= 0");
  }
  if (e.px < s.world.x_lo || e.px > s.world.x_hi || e.py < s.world.y_lo || e.py > s.world.y_hi) {
    invalid("ego start lies outside the world bounds");
  }
  std::set<std::string> names;
  for (const auto & o : s.obstacles) {
    const std::string who = "obstacle '" + o.name + "'";
    if (o.name.empty() || !names.insert(o.name).second) {
      invalid("obstacle names must be non-empty and unique");
    }
    check_fp(o.footprint, who);
    const auto & b = o.control_bounds;
    if (!(b.a_lo <= b.a_hi) || !(b.delta_lo <= b.delta_hi)) {
      invalid(who + ": control bounds lo > hi");
    }
    if (o.policy == ObstaclePolicy::ConstantVelocity) {
      if (!(o.start.v >= 0.0) || !finite(o.start.px) || !finite(o.start.py) || !finite(o.start.theta)) {
        invalid(who + ": start state must be finite with v >= 0");
      }
    } else if (!(o.speed >= 0.0) || !finite(o.s0) || !finite(o.d)) {
      invalid(who + ": path start must be finite with speed >= 0");
    }
  }
  const auto obs = obstacle_states(s, *path, 0.0);
  for (std::size_t i = 0; i < obs.size(); ++i) {
    if (footprints_overlap(e, s.ego_footprint, obs[i], s.obstacles[i].footprint)) {
      invalid("ego start overlaps obstacle '" + s.obstacles[i].name + "'");
    }
  }
}

Scenario scenario_from_json(const json & j)
{
  Scenario s;
  try {
    if (!j.is_object()) {
      invalid("scenario must be a JSON object");
    }
    for (const char * key : {"name", "waypoints", "ego", "duration"}) {
      if (!j.contains(key)) {
        invalid(std::string("missing required field '") + key + "'");
      }
    }
    s.name = j.at("name").get<std::string>();
    s.description = j.value("description", "");
    for (const auto & w : j.at("waypoints")) {
      const auto [x, y] = pair_from(w, "waypoint");
      s.waypoints.emplace_back(x, y);
    }
    const json & ego = j.at("ego");
    if (!ego.contains("start") || !ego.contains("v_ref")) {
      invalid("ego needs 'start' and 'v_ref'");
    }
    s.ego_start = state_from(ego.at("start"));
    s.v_ref = ego.at("v_ref").get<double>();
    if (ego.contains("footprint")) {
      s.ego_footprint = footprint_from(ego.at("footprint"), s.ego_footprint);
    }
    s.ego_radius = ego.value("radius", s.ego_radius);
    s.duration = j.at("duration").get<double>();
    s.seed = j.value("seed", s.seed);
    s.safe_distance = j.value("safe_distance", s.safe_distance);
    if (j.contains("world")) {
      const auto [xl, xh] = pair_from(j.at("world").at("x"), "world.x");
      const auto [yl, yh] = pair_from(j.at("world").at("y"), "world.y");
      s.world = {xl, xh, yl, yh};
    }
    if (j.contains("disturbance")) {
      const json & d = j.at("disturbance");
      if (d.contains("w_max")) {
        const auto & w = d.at("w_max");
        if (!w.is_array() || w.size() != 4) {
          invalid("disturbance.w_max must have four entries");
        }
        s.w_max = {w[0].get<double>(), w[1].get<double>(), w[2].get<double>(), w[3].get<double>()};
      }
      s.perception_noise = d.value("perception", s.perception_noise);
      s.process_noise = d.value("process", s.process_noise);
    }
    if (j.contains("planner") && j.at("planner").contains("d_targets")) {
      s.d_targets = j.at("planner").at("d_targets").get<std::vector<double>>();
    }
    if (j.contains("planner") && j.at("planner").contains("v_offsets")) {
      s.v_offsets = j.at("planner").at("v_offsets").get<std::vector<double>>();
    }
    for (const auto & oj : j.value("obstacles", json::array())) {
      ObstacleSpec o;
      o.name = oj.at("name").get<std::string>();
      const std::string policy = oj.value("policy", "constant_velocity");
      if (policy == "constant_velocity") {
        o.policy = ObstaclePolicy::ConstantVelocity;
        o.start = state_from(oj.at("start"));
      } else if (policy == "follow_path") {
        o.policy = ObstaclePolicy::FollowPath;
        o.s0 = oj.at("s0").get<double>();
        o.d = oj.value("d", 0.0);
        o.speed = oj.at("speed").get<double>();
      } else {
        invalid("unknown obstacle policy '" + policy + "'");
      }
      if (oj.contains("footprint")) {
        o.footprint = footprint_from(oj.at("footprint"), o.footprint);
      }
      if (oj.contains("control_bounds")) {
        const auto [al, ah] = pair_from(oj.at("control_bounds").at("a"), "control_bounds.a");
        const auto [dl, dh] = pair_from(oj.at("control_bounds").at("delta"), "control_bounds.delta");
        o.control_bounds = {al, ah, dl, dh};
      }
      s.obstacles.push_back(o);
    }
  } catch (const json::exception & e) {
    invalid(std::string("malformed scenario: ") + e.what());
  }
  validate(s);
  return s;
}

json to_json(const Scenario & s)
{
  json j;
  j["name"] = s.name;
  j["description"] = s.description;
  json wp = json::array();
  for (const auto & w : s.waypoints) {
    wp.push_back({w.x(), w.y()});
  }
  j["waypoints"] = wp;
  const auto & e = s.ego_start;
  j["ego"] = {
    {"start", {e.px, e.py, e.v, e.theta}},
    {"v_ref", s.v_ref},
    {"footprint", footprint_json(s.ego_footprint)},
    {"radius", s.ego_radius}};
  json obs = json::array();
  for (const auto & o : s.obstacles) {
    json oj;
    oj["name"] = o.name;
    oj["policy"] = policy_name(o.policy);
    if (o.policy == ObstaclePolicy::ConstantVelocity) {
      oj["start"] = {o.start.px, o.start.py, o.start.v, o.start.theta};
    } else {
      oj["s0"] = o.s0;
      oj["d"] = o.d;
      oj["speed"] = o.speed;
    }
    oj["footprint"] = footprint_json(o.footprint);
    oj["control_bounds"] = {
      {"a", {o.control_bounds.a_lo, o.control_bounds.a_hi}},
      {"delta", {o.control_bounds.delta_lo, o.control_bounds.delta_hi}}};
    obs.push_back(oj);
  }
  j["obstacles"] = obs;
  j["world"] = {{"x", {s.world.x_lo, s.world.x_hi}}, {"y", {s.world.y_lo, s.world.y_hi}}};
  j["duration"] = s.duration;
  j["disturbance"] = {
    {"w_max", {s.w_max(0), s.w_max(1), s.w_max(2), s.w_max(3)}},
    {"perception", s.perception_noise},
    {"process", s.process_noise}};
  j["seed"] = s.seed;
  j["safe_distance"] = s.safe_distance;
  if (!s.d_targets.empty()) {
    j["planner"]["d_targets"] = s.d_targets;
  }
  if (!s.v_offsets.empty()) {
    j["planner"]["v_offsets"] = s.v_offsets;
  }
  return j;
}

std::vector<Scenario> builtin_scenarios()
{
  std::vector<Scenario> out;
  const prediction::ControlBounds parked{0.0, 0.0, 0.0, 0.0};

  {
    Scenario s;
    s.name = "overtake";
    s.description =
      "Straight two-lane road (3.5 m lanes). A lead car at 8 m/s is 30 m ahead in the ego lane, a faster car "
      "drives in the left lane and a car is parked in the ego lane further on.";
    s.waypoints = {{-50.0, 0.0}, {800.0, 0.0}};
    s.ego_start = {0.0, 0.0, 15.0, 0.0};
    s.v_ref = 25.0;
    ObstacleSpec lead;
    lead.name = "lead";
    lead.start = {30.0, 0.0, 8.0, 0.0};
    ObstacleSpec adjacent;
    adjacent.name = "adjacent";
    adjacent.start = {60.0, 3.5, 20.0, 0.0};
    ObstacleSpec park;
    park.name = "parked";
    park.start = {230.0, 0.0, 0.0, 0.0};
    park.control_bounds = parked;
    s.obstacles = {lead, adjacent, park};
    s.world = {-100.0, 1000.0, -50.0, 50.0};
    s.duration = 14.0;
    s.d_targets = {0.0, 1.75, 3.5};
    s.v_offsets = {-17.0, -10.0, -4.0, -2.0, 0.0};
    out.push_back(s);
  }
  {
    Scenario s;
    s.name = "intersection";
    s.description =
      "Straight road through an intersection at x = 70 m. A target vehicle crosses from the right at 5 m/s.";
    s.waypoints = {{-50.0, 0.0}, {600.0, 0.0}};
    s.ego_start = {0.0, 0.0, 15.0, 0.0};
    s.v_ref = 25.0;
    ObstacleSpec target;
    target.name = "target";
    target.start = {70.0, -20.0, 5.0, std::numbers::pi / 2.0};
    s.obstacles = {target};
    s.world = {-100.0, 700.0, -100.0, 100.0};
    s.duration = 8.0;
    s.v_offsets = {-25.0, -20.0, -15.0, -10.0, -4.0, -2.0, 0.0};
    out.push_back(s);
  }
  {
    Scenario s;
    s.name = "curve";
    s.description =
      "A 50 m straight into a 90 degree left curve of radius 100 m. A lead car at 6 m/s starts with a 10 m gap "
      "(bumper to bumper) ahead of the ego.";
    s.waypoints = {{-50.0, 0.0}, {0.0, 0.0}, {50.0, 0.0}};
    append_arc(s.waypoints, {50.0, 100.0}, 100.0, -std::numbers::pi / 2.0, 0.0, 5.0 * std::numbers::pi / 180.0);
    s.waypoints.emplace_back(150.0, 200.0);
    s.waypoints.emplace_back(150.0, 400.0);
    s.ego_start = {0.0, 0.0, 6.0, 0.0};
    s.v_ref = 20.0;
    ObstacleSpec lead;
    lead.name = "lead";
    lead.policy = ObstaclePolicy::FollowPath;
    lead.s0 = 64.8;  // ego at s = 50, 2.4 + 10 + 2.4 m
    lead.d = 0.0;
    lead.speed = 6.0;
    s.obstacles = {lead};
    s.world = {-100.0, 300.0, -100.0, 500.0};
    s.duration = 14.0;
    s.d_targets = {0.0, 1.75, 3.5};
    s.v_offsets = {-14.0, -8.0, -4.0, -2.0, 0.0};
    out.push_back(s);
  }
  return out;
}

std::optional<Scenario> find_builtin(const std::string & name)
{
  for (auto & s : builtin_scenarios()) {
    if (s.name == name) {
      return s;
    }
  }
  return std::nullopt;
}

}  // namespace safeplan::sim
