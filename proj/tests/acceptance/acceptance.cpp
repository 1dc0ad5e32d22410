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


// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include "oracles.hpp"
#include "safeplan/dynamics.hpp"
#include "safeplan/frenet.hpp"
#include "safeplan/gpr.hpp"
#include "safeplan/polytope.hpp"
#include "safeplan/prediction.hpp"
#include "safeplan/qp.hpp"
#include "safeplan/scenario.hpp"
#include "safeplan/sim.hpp"
#include "test_util.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

namespace
{

using namespace safeplan;
using Clock = std::chrono::steady_clock;
using test::Rng;

constexpr int kSeeds = 10;
constexpr int kContainmentSeeds = 5;

int g_failed = 0;

double seconds_since(Clock::time_point t0)
{
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <typename... Args>
std::string fmt(const char * f, Args... args)
{
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

void report(int id, const std::string & title, bool pass, const std::string & detail)
{
  g_failed += pass ? 0 : 1;
  const std::string num = id > 0 ? fmt("%2d", id) : std::string("--");
  std::printf("[%s] %s %-28s %s\n", pass ? "PASS" : "FAIL", num.c_str(), title.c_str(), detail.c_str());
  std::fflush(stdout);
}

// Closed-loop runs are shared between criteria.
class RunCache
{
public:
  const sim::RunResult & get(const std::string & scenario, mpc::Mode mode, std::uint64_t seed)
  {
    const auto key = std::make_tuple(scenario, mode == mpc::Mode::Tube, seed);
    auto it = runs_.find(key);
    if (it == runs_.end()) {
      sim::Scenario s = *sim::find_builtin(scenario);
      s.seed = seed;
      sim::RunConfig cfg = sim::default_run_config();
      cfg.mode = mode;
      it = runs_.emplace(key, sim::run(s, cfg)).first;
    }
    return it->second;
  }

private:
  std::map<std::tuple<std::string, bool, std::uint64_t>, sim::RunResult> runs_;
};

const std::vector<std::string> kScenarios{"overtake", "intersection", "curve"};

void criterion_1(RunCache & cache)
{
  const auto t0 = Clock::now();
  int nominal_collisions = 0;
  int tube_collisions = 0;
  double tube_min = 1e300;
  for (int seed = 1; seed <= kSeeds; ++seed) {
    nominal_collisions += cache.get("intersection", mpc::Mode::Nominal, seed).metrics.collision ? 1 : 0;
    const auto & m = cache.get("intersection", mpc::Mode::Tube, seed).metrics;
    tube_collisions += m.collision ? 1 : 0;
    tube_min = std::min(tube_min, m.min_actual_distance);
  }
  const double secs = seconds_since(t0);
  const bool pass = nominal_collisions >= 1 && tube_collisions == 0 && tube_min >= 3.5 && secs < 120.0;
  report(
    1, "nominal vs tube A/B", pass,
    fmt(
      "intersection x %d seeds: nominal collisions %d (need >= 1), tube collisions %d, tube min distance %.2f m "
      "(need >= 3.5), %.1f s (need < 120)",
      kSeeds, nominal_collisions, tube_collisions, tube_min, secs));
}

void criterion_2(RunCache & cache)
{
  int checks = 0;
  int violations = 0;
  int fallbacks = 0;
  int planner_fallbacks = 0;
  for (const auto & name : kScenarios) {
    for (int seed = 1; seed <= kContainmentSeeds; ++seed) {
      const auto & m = cache.get(name, mpc::Mode::Tube, seed).metrics;
      checks += m.tube_checks;
      violations += m.tube_violations;
      fallbacks += m.fallback_activations;
      planner_fallbacks += m.planner_fallbacks;
    }
  }
  report(
    2, "tube containment", violations == 0 && checks > 0,
    fmt(
      "3 scenarios x %d seeds: %d violations in %d checks (tol 1e-6); fallback steps %d, planner fallbacks %d",
      kContainmentSeeds, violations, checks, fallbacks, planner_fallbacks));
}

// invariant of the harness, not a numbered criterion
void safety_invariant(RunCache & cache)
{
  int collisions = 0;
  double min_d = 1e300;
  for (const auto & name : kScenarios) {
    for (int seed = 1; seed <= kSeeds; ++seed) {
      const auto & m = cache.get(name, mpc::Mode::Tube, seed).metrics;
      collisions += m.collision ? 1 : 0;
      min_d = std::min(min_d, m.min_actual_distance);
    }
  }
  report(
    0, "tube safety (all scenarios)", collisions == 0,
    fmt("3 scenarios x %d seeds: %d collisions, min actual distance %.2f m", kSeeds, collisions, min_d));
}

void criterion_3()
{
  using namespace polytope;
  const auto t0 = Clock::now();
  Rng rng(3001);
  constexpr int kCases = 50;
  int bad_adjunction = 0;
  int bad_round_trip = 0;
  int bad_z = 0;
  int bad_support = 0;
  for (int c = 0; c < kCases; ++c) {
    const VRep p = test::random_polygon(rng, 8, 3.0);
    const VRep q = test::random_polygon(rng, 5, 0.5);
    const HRep p_h = v_to_h(p);
    const HRep diff = pontryagin_diff(p_h, q);
    if (!diff.empty) {
      const VRep diff_v = h_to_v_2d(diff);
      if (!diff_v.lower_dimensional) {
        for (int i = 0; i < 20; ++i) {
          const Eigen::Vector2d x = test::sample_in(rng, diff_v) + test::sample_in(rng, q);
          bad_adjunction += contains(p_h, Vector(x), 1e-9) ? 0 : 1;
        }
      }
    }
    const HRep back = pontryagin_diff(v_to_h(minkowski_sum(p, q)), q);
    for (int i = 0; i < 20; ++i) {
      bad_adjunction += contains(back, Vector(test::sample_in(rng, p)), 1e-9) ? 0 : 1;
    }
  }
  for (int c = 0; c < kCases; ++c) {
    const VRep p = test::random_polygon(rng, 9, 2.0);
    const HRep h = v_to_h(p);
    const VRep back = h_to_v_2d(h);
    bad_round_trip += test::hausdorff(p, back) < 1e-7 ? 0 : 1;
    for (int i = 0; i < 200; ++i) {
      const Eigen::Vector2d x(rng.uniform(-2.5, 2.5), rng.uniform(-2.5, 2.5));
      bad_round_trip += hull_contains_2d(p, x, 0.0) == contains(h, Vector(x), 0.0) ? 0 : 1;
    }
  }
  const VRep w = centered_box(Eigen::Vector4d(0.2, 0.2, 0.2, 0.1)).to_vrep();
  for (int c = 0; c < kCases; ++c) {
    Matrix a(4, 4);
    for (int i = 0; i < 16; ++i) {
      a(i / 4, i % 4) = rng.uniform(-1, 1);
    }
    a *= rng.uniform(0.3, 0.95) / spectral_radius(a);
    const int n = 2;
    const InvariantSet z = compute_z_hrep(a, w, n);
    std::vector<Vector> terms[3];
    Matrix power = Matrix::Identity(4, 4);
    for (int i = 0; i <= n; ++i) {
      for (const auto & v : w.vertices) {
        terms[i].push_back(power * v);
      }
      power = a * power;
    }
    for (const auto & t0v : terms[0]) {
      for (const auto & t1 : terms[1]) {
        for (const auto & t2 : terms[2]) {
          bad_z += contains(z.hrep, t0v + t1 + t2, 1e-9) ? 0 : 1;
        }
      }
    }
  }
  for (int c = 0; c < kCases; ++c) {
    const VRep p = test::random_polygon(rng, 6, 2.0);
    const VRep q = test::random_polygon(rng, 6, 1.0, {1, -1});
    const VRep pq = minkowski_sum(p, q);
    for (int k = 0; k < 10; ++k) {
      const double ang = rng.uniform(-std::numbers::pi, std::numbers::pi);
      Vector a(2);
      a << std::cos(ang), std::sin(ang);
      bad_support += std::abs(support(pq, a) - support(p, a) - support(q, a)) <= 1e-9 ? 0 : 1;
    }
  }
  const double secs = seconds_since(t0);
  const bool pass = bad_adjunction + bad_round_trip + bad_z + bad_support == 0 && secs < 30.0;
  report(
    3, "set-algebra oracles", pass,
    fmt(
      "%d cases each; failures: adjunction %d, dual round trip %d, Z over-approximation %d, support additivity %d; "
      "%.1f s (need < 30)",
      kCases, bad_adjunction, bad_round_trip, bad_z, bad_support, secs));
}

void criterion_4()
{
  const auto t0 = Clock::now();
  constexpr int kSamples = 10000;
  dynamics::VehicleParams params;
  Rng rng(4001);
  std::string detail;
  bool pass = true;
  for (const auto & name : kScenarios) {
    const sim::Scenario s = *sim::find_builtin(name);
    const auto path = frenet::ReferencePath::from_waypoints(s.waypoints);
    // obstacles sampled along their scripted motion, state known up to w_max
    const std::vector<double> times{0.0, 0.25 * s.duration, 0.5 * s.duration, 0.75 * s.duration};
    const int per = kSamples / static_cast<int>(times.size() * s.obstacles.size());
    int violations = 0;
    int drawn = 0;
    for (double t : times) {
      const auto states = sim::obstacle_states(s, path, t);
      for (std::size_t i = 0; i < states.size(); ++i) {
        prediction::ObstacleState o;
        o.px = states[i].px;
        o.py = states[i].py;
        o.v = states[i].v;
        o.theta = states[i].theta;
        o.footprint = s.obstacles[i].footprint;
        o.state_uncertainty = polytope::centered_box(s.w_max);
        const int n = &states[i] == &states.back() && t == times.back() ? kSamples - drawn : per;
        violations += test::monte_carlo_violations(
          rng, o, s.obstacles[i].control_bounds, prediction::kShortTermHorizon, 0.1, params, n);
        drawn += n;
      }
    }
    pass = pass && violations == 0 && drawn >= kSamples;
    detail += fmt("%s %d samples %d violations; ", name.c_str(), drawn, violations);
  }
  const double secs = seconds_since(t0);
  pass = pass && secs < 30.0;
  report(4, "prediction soundness", pass, detail + fmt("%.1f s (need < 30)", secs));
}

void criterion_5()
{
  using test::horner_derivative;
  Rng rng(5001);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double d0 = rng.uniform(-5, 5);
    const double d1 = rng.uniform(-3, 3);
    const double d2 = rng.uniform(-2, 2);
    const double dT = rng.uniform(-5, 5);
    const double T = rng.uniform(0.5, 5.0);
    const auto q = frenet::quintic_lateral(d0, d1, d2, dT, T);
    for (auto [got, want] : {std::pair{horner_derivative(q, 0.0, 0), d0}, {horner_derivative(q, 0.0, 1), d1},
                             {horner_derivative(q, 0.0, 2), d2}, {horner_derivative(q, T, 0), dT},
                             {horner_derivative(q, T, 1), 0.0}, {horner_derivative(q, T, 2), 0.0}}) {
      worst = std::max(worst, std::abs(got - want));
    }
    const double s0 = rng.uniform(0, 100);
    const double v0 = rng.uniform(0, 30);
    const double a0 = rng.uniform(-3, 3);
    const double vT = rng.uniform(0, 30);
    const auto l = frenet::quartic_longitudinal(s0, v0, a0, vT, T);
    for (auto [got, want] : {std::pair{horner_derivative(l, 0.0, 0), s0}, {horner_derivative(l, 0.0, 1), v0},
                             {horner_derivative(l, 0.0, 2), a0}, {horner_derivative(l, T, 1), vT},
                             {horner_derivative(l, T, 2), 0.0}}) {
      worst = std::max(worst, std::abs(got - want));
    }
  }

  // collision filter against the brute-force re-check, on the builtin roads
  int disagreements = 0;
  int hits = 0;
  int checked = 0;
  for (const auto & name : kScenarios) {
    const sim::Scenario s = *sim::find_builtin(name);
    const auto path = frenet::ReferencePath::from_waypoints(s.waypoints);
    frenet::PlannerConfig cfg;
    cfg.v_ref = s.v_ref;
    const auto start = frenet::to_frenet(path, s.ego_start);
    const auto cands = frenet::generate_candidates(start, cfg, path);
    for (int scene = 0; scene < 40; ++scene) {
      frenet::Occupancy occ(3);
      for (auto & boxes : occ) {
        const auto & c = cands[static_cast<std::size_t>(rng.integer(0, static_cast<int>(cands.size()) - 1))];
        const auto & anchor = c.samples[static_cast<std::size_t>(rng.integer(0, static_cast<int>(c.samples.size()) - 1))];
        const double x = anchor.x + rng.uniform(-15, 15);
        const double y = anchor.y + rng.uniform(-15, 15);
        for (int k = 0; k <= 40; ++k) {
          const double cx = x + rng.uniform(-1, 1);
          const double cy = y + rng.uniform(-1, 1);
          boxes.push_back({k, cx - 2.4, cx + 2.4, cy - 1.0, cy + 1.0});
        }
      }
      const double r = rng.uniform(0.5, 2.0);
      for (const auto & c : cands) {
        const bool bf = test::brute_force_collides(c, occ, r);
        hits += bf ? 1 : 0;
        ++checked;
        disagreements += bf != frenet::collides(c, occ, r) ? 1 : 0;
      }
    }
  }
  report(
    5, "polynomial planner", worst <= 1e-9 && disagreements == 0 && hits > 0 && hits < checked,
    fmt(
      "1000 instances, worst boundary error %.2e (need <= 1e-9); collision filter %d disagreements in %d checks "
      "(%d collisions)",
      worst, disagreements, checked, hits));
}

void criterion_6(RunCache & cache)
{
  Rng rng(6001);
  double worst = 0.0;
  for (int size : {1, 5, 50}) {
    for (auto mode : {gpr::NoiseMode::Fixed, gpr::NoiseMode::Adaptive}) {
      gpr::GprConfig cfg;
      cfg.noise_mode = mode;
      for (int trial = 0; trial < 10; ++trial) {
        gpr::GprModel m(cfg);
        std::vector<gpr::Feature> X;
        std::vector<std::vector<double>> Y(4);
        for (int i = 0; i < size; ++i) {
          const gpr::Feature f(rng.uniform(0, 25), rng.uniform(-3, 3));
          const gpr::Label y(
            rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2), rng.uniform(-0.1, 0.1));
          m.add(f, y);
          X.push_back(f);
          for (int d = 0; d < 4; ++d) {
            Y[d].push_back(y(d));
          }
        }
        for (int qi = 0; qi < 5; ++qi) {
          const gpr::Feature xq = qi == 0 ? X.front() : gpr::Feature(rng.uniform(0, 25), rng.uniform(-3, 3));
          const auto p = m.predict(xq);
          for (int d = 0; d < 4; ++d) {
            const auto o = test::dense_gp_posterior(X, Y[d], xq, cfg, m.noise_variance(d));
            worst = std::max(worst, std::abs(p.mean(d) - o.mean));
            worst = std::max(worst, std::abs(p.std(d) * p.std(d) - std::max(0.0, o.var)));
          }
        }
      }
    }
  }
  bool coverage_ok = true;
  std::string cov;
  for (const auto & name : kScenarios) {
    int covered = 0;
    int held = 0;
    for (int seed = 1; seed <= kContainmentSeeds; ++seed) {
      const auto & m = cache.get(name, mpc::Mode::Tube, seed).metrics;
      covered += m.gpr_covered;
      held += m.gpr_held_out;
    }
    const double frac = held > 0 ? static_cast<double>(covered) / held : 0.0;
    coverage_ok = coverage_ok && frac >= 0.95;
    cov += fmt(" %s %.1f%% of %d", name.c_str(), 100.0 * frac, held);
  }
  report(
    6, "GPR oracle and coverage", worst <= 1e-8 && coverage_ok,
    fmt("windows 1/5/50 worst deviation %.2e (need <= 1e-8); c=3 coverage (need >= 95%%):", worst) + cov);
}

void criterion_7()
{
  dynamics::VehicleParams p;
  Rng rng(7001);
  int bad = 0;
  double worst_rel = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    Eigen::Vector4d x(rng.uniform(-100, 100), rng.uniform(-100, 100), rng.uniform(0.5, 30), rng.uniform(-3.1, 3.1));
    Eigen::Vector2d u(rng.uniform(-4, 4), rng.uniform(-0.6, 0.6));
    double h = 1e-5;
    if (trial % 10 == 0) {
      u(1) = 0.0;
    } else if (trial % 10 == 1) {
      u(1) = (rng.integer(0, 1) ? 1.0 : -1.0) * rng.uniform(3e-6, 1e-5);
      h = 1e-6;
    }
    const auto lin =
      dynamics::linearize(dynamics::VehicleState::from_vec(x), dynamics::ControlInput::from_vec(u), p);
    for (int j = 0; j < 6; ++j) {
      Eigen::Vector4d xp = x;
      Eigen::Vector4d xm = x;
      Eigen::Vector2d up = u;
      Eigen::Vector2d um = u;
      if (j < 4) {
        xp(j) += h;
        xm(j) -= h;
      } else {
        up(j - 4) += h;
        um(j - 4) -= h;
      }
      const Eigen::Vector4d fd =
        (dynamics::step_unwrapped(xp, up, p) - dynamics::step_unwrapped(xm, um, p)) / (2.0 * h);
      const Eigen::Vector4d an = j < 4 ? Eigen::Vector4d(lin.A.col(j)) : Eigen::Vector4d(lin.B.col(j - 4));
      for (int i = 0; i < 4; ++i) {
        const double err = std::abs(an(i) - fd(i));
        // structural zeros are compared absolutely
        bad += err <= 1e-4 * std::abs(fd(i)) + 1e-7 ? 0 : 1;
        if (std::abs(fd(i)) > 1e-3) {
          worst_rel = std::max(worst_rel, err / std::abs(fd(i)));
        }
      }
    }
  }
  report(
    7, "Jacobian gradient check", bad == 0,
    fmt("1000 points x 24 entries: %d outside 1e-4 relative, worst relative error %.2e", bad, worst_rel));
}

void criterion_8()
{
  Rng rng(8001);
  int optimal = 0;
  int returned = 0;
  double worst_kkt = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = trial % 2 == 0 ? 20 : 8;
    const auto p = test::box_qp(rng, n, 5, trial % 3 == 0 ? 3 : 0);
    const auto s = qp::solve(p);
    ++returned;
    if (s.status == qp::Status::Optimal) {
      ++optimal;
      worst_kkt = std::max(worst_kkt, qp::kkt_residuals(p, s.z, s.lambda_eq, s.mu_in).max());
    }
  }
  double worst_oracle = 0.0;
  int oracle_cases = 0;
  int oracle_failures = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = test::box_qp(rng, 5, 2, trial % 3 == 0 ? 1 : 0);
    const auto oracle = test::enumerate_active_sets(p);
    if (!oracle) {
      continue;
    }
    ++oracle_cases;
    const auto s = qp::solve(p);
    if (s.status != qp::Status::Optimal) {
      ++oracle_failures;
      continue;
    }
    worst_kkt = std::max(worst_kkt, qp::kkt_residuals(p, s.z, s.lambda_eq, s.mu_in).max());
    worst_oracle = std::max(worst_oracle, (s.z - *oracle).lpNorm<Eigen::Infinity>());
  }
  const bool pass = worst_kkt < 1e-5 && worst_oracle <= 1e-6 && oracle_failures == 0 && oracle_cases >= 90 &&
                    optimal >= returned * 9 / 10;
  report(
    8, "QP solver", pass,
    fmt(
      "KKT worst %.2e over %d optimal returns (need < 1e-5); active-set oracle worst %.2e on %d 5-variable "
      "instances (need <= 1e-6), %d non-optimal",
      worst_kkt, optimal + oracle_cases - oracle_failures, worst_oracle, oracle_cases, oracle_failures));
}

void criterion_9(RunCache & cache)
{
  std::vector<double> cycles;
  for (const auto & name : kScenarios) {
    for (int seed = 1; seed <= kContainmentSeeds; ++seed) {
      const auto & r = cache.get(name, mpc::Mode::Tube, seed);
      cycles.insert(cycles.end(), r.cycle_ms.begin(), r.cycle_ms.end());
    }
  }
  std::sort(cycles.begin(), cycles.end());
  const double median = cycles.empty() ? 1e300 : cycles[cycles.size() / 2];
  const double p95 = cycles.empty() ? 1e300 : cycles[cycles.size() * 95 / 100];
  report(
    9, "control-cycle timing", median < 50.0,
    fmt(
      "median %.2f ms, p95 %.2f ms, max %.2f ms over %zu cycles (need median < 50; 20 ms reference)", median, p95,
      cycles.empty() ? 0.0 : cycles.back(), cycles.size()));
}

std::string slurp(const std::filesystem::path & p)
{
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void criterion_10(RunCache & cache)
{
  int identical = 0;
  int compared = 0;
  const auto root = std::filesystem::temp_directory_path() / "safeplan_acceptance";
  for (const auto & name : kScenarios) {
    for (auto mode : {mpc::Mode::Tube, mpc::Mode::Nominal}) {
      sim::Scenario s = *sim::find_builtin(name);
      s.seed = 3;
      sim::RunConfig cfg = sim::default_run_config();
      cfg.mode = mode;
      const auto & first = cache.get(name, mode, 3);
      const auto second = sim::run(s, cfg);
      const auto tag = name + (mode == mpc::Mode::Tube ? "_tube" : "_nominal");
      sim::write_outputs(first, root / (tag + "_a"));
      sim::write_outputs(second, root / (tag + "_b"));
      ++compared;
      const std::string a = slurp(root / (tag + "_a") / "trace.jsonl");
      identical += !a.empty() && a == slurp(root / (tag + "_b") / "trace.jsonl") &&
                       slurp(root / (tag + "_a") / "trace.csv") == slurp(root / (tag + "_b") / "trace.csv")
                     ? 1
                     : 0;
    }
  }
  std::filesystem::remove_all(root);
  report(
    10, "determinism", identical == compared,
    fmt("%d of %d repeated seeded runs produced byte-identical trace files", identical, compared));
}

}  // namespace

int main()
{
  const auto t0 = Clock::now();
  RunCache cache;
  criterion_1(cache);
  criterion_2(cache);
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6(cache);
  criterion_7();
  criterion_8();
  criterion_9(cache);
  criterion_10(cache);
  safety_invariant(cache);
  std::printf("%d failed, total %.1f s\n", g_failed, seconds_since(t0));
  return g_failed == 0 ? 0 : 1;
}
