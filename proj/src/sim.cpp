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


#include "safeplan/sim.hpp"

#include "safeplan/errors.hpp"
#include "safeplan/iris.hpp"
#include "safeplan/prediction.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>

namespace safeplan::sim
{
namespace
{
using nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr double kControlDt = 0.05;
constexpr int kReplanEvery = 2;  // 0.1 s
constexpr double kTubeTol = 1e-6;
constexpr double kPlanDt = 0.1;

double ms_since(Clock::time_point t0)
{
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

double median(std::vector<double> v)
{
  if (v.empty()) {
    return 0.0;
  }
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

json state_json(const dynamics::VehicleState & x) { return {x.px, x.py, x.v, x.theta}; }

dynamics::VehicleState state_of(const json & j)
{
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

double uniform(std::mt19937_64 & rng, double half)
{
  if (half <= 0.0) {
    return 0.0;
  }
  return std::uniform_real_distribution<double>(-half, half)(rng);
}

polytope::HRep product_hrep(const polytope::VRep & pos, const polytope::VRep & vh)
{
  return polytope::concat(polytope::v_to_h_closed(pos), polytope::v_to_h_closed(vh));
}

polytope::VRep vrep_from_json(const json & j)
{
  polytope::VRep v;
  v.dim = 2;
  for (const auto & p : j.at("vertices")) {
    polytope::Vector x(2);
    x << p[0].get<double>(), p[1].get<double>();
    v.vertices.push_back(x);
  }
  return v;
}

struct DistanceSample
{
  double actual{1e300};
  double perceived{1e300};
  bool collision{false};
};

DistanceSample distances(
  const Scenario & s, const dynamics::VehicleState & truth, const dynamics::VehicleState & perceived,
  const std::vector<dynamics::VehicleState> & obs)
{
  DistanceSample d;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    d.actual = std::min(d.actual, std::hypot(truth.px - obs[i].px, truth.py - obs[i].py));
    d.perceived = std::min(d.perceived, std::hypot(perceived.px - obs[i].px, perceived.py - obs[i].py));
    d.collision = d.collision || footprints_overlap(truth, s.ego_footprint, obs[i], s.obstacles[i].footprint);
  }
  return d;
}

// Reference for the MPC grid from the current plan, or a braking line.
std::vector<mpc::ReferencePoint> mpc_reference(
  const std::optional<frenet::FrenetCandidate> & plan, double plan_age, const frenet::ReferencePath & path,
  const dynamics::VehicleState & x, double brake_heading, const RunConfig & cfg)
{
  const int N = cfg.mpc.N;
  const double L = cfg.mpc.vehicle.length;
  std::vector<mpc::ReferencePoint> ref;
  if (plan) {
    for (int k = 0; k <= N; ++k) {
      const double tau = std::min(plan_age + k * cfg.mpc.dt, plan->T);
      const frenet::FrenetSample smp = frenet::sample_at(*plan, path, tau);
      ref.push_back({{smp.x, smp.y, smp.v, smp.theta}, {smp.a_tangential, std::atan(smp.kappa * L)}});
    }
    return ref;
  }
  const double a = cfg.mpc.vehicle.a_max;
  double v = x.v;
  Eigen::Vector2d p(x.px, x.py);
  const Eigen::Vector2d dir(std::cos(brake_heading), std::sin(brake_heading));
  for (int k = 0; k <= N; ++k) {
    ref.push_back({{p.x(), p.y(), v, brake_heading}, {v > 0.0 ? -a : 0.0, 0.0}});
    const double vn = std::max(0.0, v - a * cfg.mpc.dt);
    p += dir * 0.5 * (v + vn) * cfg.mpc.dt;
    v = vn;
  }
  return ref;
}

// Half extents along x and y of the position projection of Z at the current state.
Eigen::Vector2d tube_extent(
  const dynamics::VehicleState & x, const gpr::DisturbanceBound & bound, const mpc::TubeMpcConfig & cfg)
{
  Eigen::Vector2d ext = Eigen::Vector2d::Zero();
  try {
    const mpc::TubeDesign d = mpc::design_tube(x.vec(), Eigen::Vector2d::Zero(), bound.centered_vrep(), cfg);
    for (const auto & v : d.z.set.position_hull.vertices) {
      ext = ext.cwiseMax(Eigen::Vector2d(v).cwiseAbs());
    }
  } catch (const Error &) {
  }
  return ext;
}

}  // namespace

RunConfig default_run_config()
{
  RunConfig cfg;
  // A weak ancillary gain: Z is dominated by W itself over the truncation
  // horizon, and a stiff K only enlarges K Z against U.
  cfg.mpc.gain_R = Eigen::Matrix2d(cfg.mpc.R * 1e6);
  cfg.mpc.initial_deviation_weight = 10.0;
  cfg.mpc.tighten_heading = false;
  cfg.mpc.tighten_speed_floor = false;
  cfg.gpr_warmup_steps = 20;
  return cfg;
}

json to_json(const RunMetrics & m, bool with_timing)
{
  json j{
    {"scenario", m.scenario},
    {"mode", m.mode},
    {"seed", m.seed},
    {"steps", m.steps},
    {"collision", m.collision},
    {"collision_time", m.collision_time},
    {"min_actual_distance", m.min_actual_distance},
    {"min_perceived_distance", m.min_perceived_distance},
    {"tube_checks", m.tube_checks},
    {"tube_violations", m.tube_violations},
    {"fallback_activations", m.fallback_activations},
    {"planner_fallbacks", m.planner_fallbacks},
    {"clamp_events", m.clamp_events},
    {"gpr_covered", m.gpr_covered},
    {"gpr_held_out", m.gpr_held_out},
    {"final_d", m.final_d},
    {"final_speed", m.final_speed}};
  if (with_timing) {
    j["timing"] = {
      {"cycle_ms_median", m.cycle_ms_median},
      {"cycle_ms_mean", m.cycle_ms_mean},
      {"cycle_ms_max", m.cycle_ms_max},
      {"qp_ms_median", m.qp_ms_median},
      {"reference_ms", 20.0}};
  }
  return j;
}

dynamics::VehicleState perceive(
  const dynamics::VehicleState & truth, const Eigen::Vector4d & w_max, std::mt19937_64 & rng)
{
  dynamics::VehicleState p = truth;
  p.px += uniform(rng, w_max(0));
  p.py += uniform(rng, w_max(1));
  p.v += uniform(rng, w_max(2));
  p.theta = dynamics::wrap_angle(p.theta + uniform(rng, w_max(3)));
  return p;
}

RunResult run(const Scenario & s, const RunConfig & cfg)
{
  validate(s);
  const frenet::ReferencePath path = frenet::ReferencePath::from_waypoints(s.waypoints);
  dynamics::VehicleParams vp = cfg.mpc.vehicle;
  vp.dt = kControlDt;
  mpc::TubeMpcConfig mcfg = cfg.mpc;
  mcfg.mode = cfg.mode;
  mcfg.dt = kControlDt;
  frenet::PlannerConfig pcfg = cfg.planner;
  pcfg.v_ref = s.v_ref;
  pcfg.dt = kPlanDt;
  if (!s.d_targets.empty()) {
    pcfg.d_targets = s.d_targets;
  }
  if (!s.v_offsets.empty()) {
    pcfg.v_offsets = s.v_offsets;
  }
  const double plan_horizon = *std::max_element(pcfg.durations.begin(), pcfg.durations.end());
  const double duration = cfg.duration > 0.0 ? cfg.duration : s.duration;
  const int steps = static_cast<int>(std::llround(duration / kControlDt));
  const bool tube = cfg.mode == mpc::Mode::Tube;

  std::mt19937_64 rng(s.seed);
  gpr::GprModel gp(cfg.gpr);
  const Eigen::Vector4d w_perception = s.perception_noise ? s.w_max : Eigen::Vector4d::Zero();
  const Eigen::Vector4d w_process = s.process_noise ? s.w_max : Eigen::Vector4d::Zero();

  // calibration drive: coasting from the start state under the same noise
  if (cfg.gpr_warmup_steps > 0) {
    dynamics::VehicleState ghost = s.ego_start;
    dynamics::VehicleState prev = perceive(ghost, w_perception, rng);
    for (int k = 0; k < cfg.gpr_warmup_steps; ++k) {
      ghost = dynamics::step(ghost, {0.0, 0.0}, vp);
      ghost = perceive(ghost, w_process, rng);
      const dynamics::VehicleState obs = perceive(ghost, w_perception, rng);
      gp.ingest(prev, {0.0, 0.0}, obs, vp);
      prev = obs;
    }
  }

  RunResult res;
  RunMetrics & m = res.metrics;
  m.scenario = s.name;
  m.mode = tube ? "tube" : "nominal";
  m.seed = s.seed;
  m.steps = steps;
  std::vector<double> qp_ms;

  if (cfg.record_trace) {
    res.trace.push_back(json{{"type", "header"}, {"scenario", to_json(s)}, {"mode", m.mode}, {"steps", steps}}.dump());
  }

  dynamics::VehicleState truth = s.ego_start;
  dynamics::VehicleState perceived_prev{};
  dynamics::ControlInput u_prev{};
  std::optional<gpr::DisturbanceBound> bound_prev;
  std::optional<frenet::FrenetCandidate> plan;
  double plan_time = 0.0;
  double brake_heading = truth.theta;
  std::vector<std::vector<prediction::OccupancyBox>> occupancy;
  double occupancy_time = 0.0;
  // x_bar_1 and Z of the previous solve: the tube the current state must lie in
  std::optional<std::pair<Eigen::Vector4d, mpc::Tube>> carried;

  for (int k = 0; k <= steps; ++k) {
    const double t = k * kControlDt;
    const std::vector<dynamics::VehicleState> obs = obstacle_states(s, path, t);
    const dynamics::VehicleState perceived = perceive(truth, w_perception, rng);
    const DistanceSample dist = distances(s, truth, perceived, obs);
    m.min_actual_distance = std::min(m.min_actual_distance, dist.actual);
    m.min_perceived_distance = std::min(m.min_perceived_distance, dist.perceived);
    if (dist.collision && !m.collision) {
      m.collision = true;
      m.collision_time = t;
    }
    if (cfg.record_trace) {
      std::ostringstream row;
      row.precision(10);
      row << t << ',' << truth.px << ',' << truth.py << ',' << truth.v << ',' << truth.theta << ','
          << (obs.empty() ? -1.0 : dist.actual);
      res.csv_rows.push_back(row.str());
    }
    std::optional<bool> tube_ok;
    if (tube && carried) {
      Eigen::Vector4d e = perceived.vec() - carried->first;
      e(3) = dynamics::wrap_angle(e(3));
      tube_ok = carried->second.contains(e, kTubeTol);
      ++m.tube_checks;
      m.tube_violations += *tube_ok ? 0 : 1;
    }
    carried.reset();
    if (k == steps) {
      if (cfg.record_trace) {
        json ob = json::array();
        for (const auto & o : obs) {
          ob.push_back(state_json(o));
        }
        json fin{{"type", "final"}, {"t", t}, {"true", state_json(truth)}, {"perceived", state_json(perceived)},
                 {"obstacles", ob}};
        if (tube_ok) {
          fin["tube_ok"] = *tube_ok;
        }
        res.trace.push_back(fin.dump());
      }
      break;
    }

    std::optional<bool> gp_covered;
    if (k > 0) {
      const gpr::Label y = gpr::GprModel::residual(perceived_prev, u_prev, perceived, vp);
      if (bound_prev) {
        ++m.gpr_held_out;
        gp_covered = bound_prev->contains(y);
        m.gpr_covered += *gp_covered ? 1 : 0;
      }
      gp.add({perceived_prev.v, perceived_prev.theta}, y);
    }

    const auto gp_t0 = Clock::now();
    const gpr::DisturbanceBound bound = gp.bounds({perceived.v, perceived.theta}, cfg.c);
    bound_prev = bound;
    const double gp_ms = ms_since(gp_t0);

    // planning layer
    const auto plan_t0 = Clock::now();
    bool replanned = false;
    std::string planner_status = "hold";
    json candidates = json::array();
    if (k % kReplanEvery == 0) {
      replanned = true;
      occupancy.clear();
      for (std::size_t i = 0; i < obs.size(); ++i) {
        prediction::ObstacleState o;
        o.px = obs[i].px;
        o.py = obs[i].py;
        o.v = obs[i].v;
        o.theta = obs[i].theta;
        o.footprint = s.obstacles[i].footprint;
        occupancy.push_back(prediction::predict(o, s.obstacles[i].control_bounds, plan_horizon, kPlanDt, vp));
      }
      occupancy_time = t;
      try {
        frenet::FrenetState start = frenet::to_frenet(path, perceived);
        if (plan) {
          // derivatives from the running plan keep consecutive plans continuous
          const double tau = t - plan_time;
          if (tau <= plan->T) {
            const auto lon = frenet::poly_eval(plan->longitudinal, tau);
            const auto lat = frenet::poly_eval(plan->lateral, tau);
            if (std::abs(lon[1] - start.s_d) < 2.0) {
              start.s_d = lon[1];
              start.s_dd = lon[2];
              start.d_d = lat[1];
              start.d_dd = lat[2];
            }
          }
        }
        frenet::Occupancy planner_occupancy = occupancy;
        if (tube && cfg.tube_aware_planner) {
          const Eigen::Vector2d ext = tube_extent(perceived, bound, mcfg);
          for (auto & boxes : planner_occupancy) {
            for (auto & b : boxes) {
              b.x_lo -= ext.x();
              b.x_hi += ext.x();
              b.y_lo -= ext.y();
              b.y_hi += ext.y();
            }
          }
        }
        const frenet::PlanResult pr =
          frenet::evaluate_candidates(start, path, planner_occupancy, pcfg, s.ego_radius);
        if (cfg.record_trace) {
          for (const auto & c : pr.candidates) {
            candidates.push_back({c.d_target, c.v_target, c.T, c.cost, c.feasible, c.collision_free});
          }
        }
        if (pr.best_index < 0) {
          throw Error(ErrorCode::NoFeasibleTrajectory, "every candidate is infeasible or in collision");
        }
        plan = pr.best;
        plan_time = t;
        planner_status = "ok";
      } catch (const Error & e) {
        if (e.code() != ErrorCode::NoFeasibleTrajectory && e.code() != ErrorCode::ProjectionAmbiguous) {
          throw;
        }
        // the heading is fixed for the whole braking episode
        if (plan) {
          brake_heading = frenet::sample_at(*plan, path, std::min(t - plan_time, plan->T)).theta;
        } else if (k == 0) {
          brake_heading = perceived.theta;
        }
        plan.reset();
        ++m.planner_fallbacks;
        planner_status = "fallback";
      }
    }
    res.plan_ms.push_back(ms_since(plan_t0));

    // control layer: GP bound, IRIS region, tube MPC
    const auto cycle_t0 = Clock::now();

    const double win = cfg.iris_window;
    polytope::HRep bounds = polytope::HRep::make(2);
    bounds.add(Eigen::Vector2d(1, 0), std::min(perceived.px + win, s.world.x_hi));
    bounds.add(Eigen::Vector2d(-1, 0), -std::max(perceived.px - win, s.world.x_lo));
    bounds.add(Eigen::Vector2d(0, 1), std::min(perceived.py + win, s.world.y_hi));
    bounds.add(Eigen::Vector2d(0, -1), -std::max(perceived.py - win, s.world.y_lo));
    // per obstacle: hull of its boxes over the MPC horizon, grown by the extent
    // of the ego footprint at the current heading
    const double ct = std::abs(std::cos(perceived.theta));
    const double st = std::abs(std::sin(perceived.theta));
    const double ego_ex = s.ego_footprint.half_length * ct + s.ego_footprint.half_width * st;
    const double ego_ey = s.ego_footprint.half_length * st + s.ego_footprint.half_width * ct;
    std::vector<polytope::VRep> iris_obstacles;
    std::vector<std::array<double, 4>> iris_boxes;
    const double age = t - occupancy_time;
    const int i_lo = static_cast<int>(std::floor(age / kPlanDt + 1e-9));
    const int i_hi = static_cast<int>(std::ceil((age + mcfg.N * kControlDt) / kPlanDt - 1e-9));
    for (const auto & boxes : occupancy) {
      double xl = 1e300, xh = -1e300, yl = 1e300, yh = -1e300;
      for (const auto & b : boxes) {
        if (b.t_index >= i_lo && b.t_index <= i_hi) {
          xl = std::min(xl, b.x_lo);
          xh = std::max(xh, b.x_hi);
          yl = std::min(yl, b.y_lo);
          yh = std::max(yh, b.y_hi);
        }
      }
      if (xl > xh) {
        continue;
      }
      xl -= ego_ex;
      xh += ego_ex;
      yl -= ego_ey;
      yh += ego_ey;
      if (xl > perceived.px + win || xh < perceived.px - win || yl > perceived.py + win || yh < perceived.py - win) {
        continue;
      }
      iris_boxes.push_back({xl, xh, yl, yh});
      iris_obstacles.push_back(iris::box_obstacle(xl, xh, yl, yh));
    }

    std::string status = "ok";
    std::string qp_status = "none";
    std::string status_detail;
    std::optional<mpc::TubeSolution> sol;
    int clamps = 0;
    std::optional<iris::ConvexRegion> region;
    std::vector<mpc::ReferencePoint> ref;
    dynamics::ControlInput u;
    try {
      region = iris::grow_region({perceived.px, perceived.py}, {}, iris_obstacles, bounds);
      ref = mpc_reference(plan, t - plan_time, path, perceived, brake_heading, cfg);
      const auto qp_t0 = Clock::now();
      sol = mpc::solve_step(perceived, ref, region->polygon, bound.centered_vrep(), bound.mean, mcfg);
      qp_ms.push_back(ms_since(qp_t0));
      qp_status = qp::to_string(sol->status);
      u = mpc::ancillary(perceived, *sol, vp, &clamps);
      m.clamp_events += clamps;
      if (tube) {
        carried.emplace(sol->nominal_states[1], sol->z);
      }
    } catch (const Error & e) {
      if (e.code() != ErrorCode::InfeasibleMpc && e.code() != ErrorCode::SeedInsideObstacle) {
        throw;
      }
      status = e.code() == ErrorCode::InfeasibleMpc ? "infeasible" : "seed_in_obstacle";
      status_detail = e.what();
      u = mpc::fallback_input(vp);
      ++m.fallback_activations;
    }
    res.cycle_ms.push_back(gp_ms + ms_since(cycle_t0));

    if (cfg.record_trace) {
      json rec;
      rec["type"] = "step";
      rec["k"] = k;
      rec["t"] = t;
      rec["true"] = state_json(truth);
      rec["perceived"] = state_json(perceived);
      rec["u"] = {u.a, u.delta};
      rec["status"] = status;
      rec["qp_status"] = qp_status;
      rec["clamps"] = clamps;
      if (gp_covered) {
        rec["gpr_covered"] = *gp_covered;
      }
      if (!status_detail.empty()) {
        rec["detail"] = status_detail;
      }
      rec["planner"] = replanned ? planner_status : "hold";
      if (replanned) {
        // [d_target, v_target, T, cost, feasible, collision_free]
        rec["candidates"] = candidates;
      }
      json ob = json::array();
      for (const auto & o : obs) {
        ob.push_back(state_json(o));
      }
      rec["obstacles"] = ob;
      rec["iris_boxes"] = iris_boxes;
      rec["w_mean"] = {bound.mean(0), bound.mean(1), bound.mean(2), bound.mean(3)};
      const gpr::Label hw = bound.half_widths();
      rec["w_half"] = {hw(0), hw(1), hw(2), hw(3)};
      if (region) {
        rec["iris_polygon"] = polytope::to_json(polytope::h_to_v_2d(region->polygon));
      }
      json rs = json::array();
      for (const auto & r : ref) {
        rs.push_back(state_json(r.x));
      }
      rec["reference"] = rs;
      if (sol) {
        json xs = json::array();
        for (const auto & xb : sol->nominal_states) {
          xs.push_back({xb(0), xb(1), xb(2), xb(3)});
        }
        rec["nominal"] = xs;
        rec["z_position"] = polytope::to_json(sol->z.set.position_hull);
        rec["z_velocity_heading"] = polytope::to_json(sol->z.set.velocity_heading_hull);
      }
      if (tube_ok) {
        rec["tube_ok"] = *tube_ok;
      }
      res.trace.push_back(rec.dump());
    }

    // plant
    dynamics::VehicleState next = dynamics::step(truth, u, vp);
    next = perceive(next, w_process, rng);
    truth = next;
    perceived_prev = perceived;
    u_prev = u;
    dynamics::clamp_input(u_prev, vp);
  }

  try {
    m.final_d = path.project({truth.px, truth.py}).d;
  } catch (const Error &) {
    m.final_d = std::numeric_limits<double>::quiet_NaN();
  }
  m.final_speed = truth.v;
  if (!res.cycle_ms.empty()) {
    m.cycle_ms_median = median(res.cycle_ms);
    double sum = 0.0;
    for (double c : res.cycle_ms) {
      sum += c;
      m.cycle_ms_max = std::max(m.cycle_ms_max, c);
    }
    m.cycle_ms_mean = sum / static_cast<double>(res.cycle_ms.size());
  }
  m.qp_ms_median = median(qp_ms);
  return res;
}

void write_outputs(const RunResult & r, const std::filesystem::path & dir)
{
  std::filesystem::create_directories(dir);
  {
    std::ofstream f(dir / "trace.jsonl");
    for (const auto & line : r.trace) {
      f << line << '\n';
    }
  }
  {
    std::ofstream f(dir / "metrics.json");
    f << to_json(r.metrics).dump(2) << '\n';
  }
  {
    std::ofstream f(dir / "trace.csv");
    f << "time,px,py,v,theta,min_distance\n";
    for (const auto & row : r.csv_rows) {
      f << row << '\n';
    }
  }
  {
    std::ofstream f(dir / "timing.csv");
    f << "step,cycle_ms,plan_ms\n";
    for (std::size_t i = 0; i < r.cycle_ms.size(); ++i) {
      f << i << ',' << r.cycle_ms[i] << ',' << r.plan_ms[i] << '\n';
    }
  }
}

RunMetrics replay(const std::filesystem::path & trace_file)
{
  std::ifstream f(trace_file);
  if (!f) {
    throw Error(ErrorCode::InvalidArgument, "replay: cannot open " + trace_file.string());
  }
  RunMetrics m;
  std::optional<Scenario> s;
  std::string line;
  std::optional<dynamics::VehicleState> last_true;
  std::vector<dynamics::VehicleState> last_obs;
  std::optional<std::pair<Eigen::Vector4d, polytope::HRep>> carried;
  while (std::getline(f, line)) {
    if (line.empty()) {
      continue;
    }
    const json rec = json::parse(line);
    if (rec.at("type") == "header") {
      s = scenario_from_json(rec.at("scenario"));
      m.scenario = s->name;
      m.mode = rec.at("mode").get<std::string>();
      m.seed = s->seed;
      m.steps = rec.at("steps").get<int>();
      continue;
    }
    if (!s) {
      throw Error(ErrorCode::InvalidArgument, "replay: trace has no header");
    }
    const dynamics::VehicleState tr = state_of(rec.at("true"));
    const dynamics::VehicleState pe = state_of(rec.at("perceived"));
    std::vector<dynamics::VehicleState> obs;
    for (const auto & o : rec.at("obstacles")) {
      obs.push_back(state_of(o));
    }
    const DistanceSample d = distances(*s, tr, pe, obs);
    m.min_actual_distance = std::min(m.min_actual_distance, d.actual);
    m.min_perceived_distance = std::min(m.min_perceived_distance, d.perceived);
    if (d.collision && !m.collision) {
      m.collision = true;
      m.collision_time = rec.at("t").get<double>();
    }
    if (m.mode == "tube" && carried) {
      Eigen::Vector4d e = pe.vec() - carried->first;
      e(3) = dynamics::wrap_angle(e(3));
      ++m.tube_checks;
      m.tube_violations += polytope::contains(carried->second, e, kTubeTol) ? 0 : 1;
    }
    carried.reset();
    if (rec.at("type") == "final") {
      last_true = tr;
      continue;
    }
    m.clamp_events += rec.at("clamps").get<int>();
    if (rec.contains("gpr_covered")) {
      ++m.gpr_held_out;
      m.gpr_covered += rec["gpr_covered"].get<bool>() ? 1 : 0;
    }
    const std::string status = rec.at("status").get<std::string>();
    if (status != "ok") {
      ++m.fallback_activations;
    }
    if (rec.at("planner") == "fallback") {
      ++m.planner_fallbacks;
    }
    if (m.mode == "tube" && status == "ok") {
      const auto & xb = rec.at("nominal")[1];
      carried.emplace(
        Eigen::Vector4d(xb[0].get<double>(), xb[1].get<double>(), xb[2].get<double>(), xb[3].get<double>()),
        product_hrep(vrep_from_json(rec.at("z_position")), vrep_from_json(rec.at("z_velocity_heading"))));
    }
    last_true = tr;
    last_obs = obs;
  }
  if (last_true) {
    m.final_speed = last_true->v;
    try {
      m.final_d = frenet::ReferencePath::from_waypoints(s->waypoints).project({last_true->px, last_true->py}).d;
    } catch (const Error &) {
      m.final_d = std::numeric_limits<double>::quiet_NaN();
    }
  }
  return m;
}

}  // namespace safeplan::sim
