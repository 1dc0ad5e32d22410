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


#ifndef SAFEPLAN__SIM_HPP_
#define SAFEPLAN__SIM_HPP_

#include "safeplan/dynamics.hpp"
#include "safeplan/frenet.hpp"
#include "safeplan/gpr.hpp"
#include "safeplan/mpc.hpp"
#include "safeplan/scenario.hpp"

#include <json.hpp>

#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace safeplan::sim
{

struct RunConfig
{
  mpc::Mode mode{mpc::Mode::Tube};
  mpc::TubeMpcConfig mpc{};
  gpr::GprConfig gpr{};
  /// Width multiplier of the disturbance box.
  double c{3.0};
  frenet::PlannerConfig planner{};
  /// Half extent of the IRIS bounding box around the ego.
  double iris_window{30.0};
  /// Straight-line calibration steps ingested into the GP before t = 0.
  int gpr_warmup_steps{0};
  /// Tube mode: occupancy boxes seen by the planner grow by the x/y extent of
  /// the position projection of Z, so chosen plans leave room for the tube.
  bool tube_aware_planner{true};
  /// Run length override; the scenario duration when <= 0.
  double duration{0.0};
  /// Keeps every per-step record in memory (needed for files and tests).
  bool record_trace{true};
};

/// The tuned configuration used by the CLI and the acceptance runs.
RunConfig default_run_config();

struct RunMetrics
{
  std::string scenario;
  std::string mode;
  std::uint64_t seed{0};
  int steps{0};
  bool collision{false};
  double collision_time{-1.0};
  double min_actual_distance{1e300};
  double min_perceived_distance{1e300};
  int tube_checks{0};
  int tube_violations{0};
  int fallback_activations{0};
  int planner_fallbacks{0};
  int clamp_events{0};
  int gpr_covered{0};
  int gpr_held_out{0};
  double final_d{0.0};
  double final_speed{0.0};
  /// Wall-clock statistics; not part of the trace.
  double cycle_ms_median{0.0};
  double cycle_ms_mean{0.0};
  double cycle_ms_max{0.0};
  double qp_ms_median{0.0};
};

nlohmann::json to_json(const RunMetrics & m, bool with_timing = true);

struct RunResult
{
  RunMetrics metrics;
  /// One JSON object per line: a header, then one record per control step.
  std::vector<std::string> trace;
  std::vector<double> cycle_ms;
  std::vector<double> plan_ms;
  std::vector<std::string> csv_rows;
};

/// True state plus independent uniform noise in [-w_max, w_max] per dimension.
dynamics::VehicleState perceive(
  const dynamics::VehicleState & truth, const Eigen::Vector4d & w_max, std::mt19937_64 & rng);

RunResult run(const Scenario & s, const RunConfig & cfg);

/// Writes trace.jsonl, metrics.json, trace.csv and timing.csv into `dir`.
void write_outputs(const RunResult & r, const std::filesystem::path & dir);

/// Recomputes the timing-free metrics from a trace file.
RunMetrics replay(const std::filesystem::path & trace_file);

}  // namespace safeplan::sim

#endif  // SAFEPLAN__SIM_HPP_
