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


// safeplan command-line front end: run, list-scenarios, validate, replay.

#include "safeplan/errors.hpp"
#include "safeplan/scenario.hpp"
#include "safeplan/sim.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace
{

using safeplan::ErrorCode;
using safeplan::sim::Scenario;

Scenario load_scenario(const std::string & arg)
{
  if (auto s = safeplan::sim::find_builtin(arg)) {
    return *s;
  }
  std::ifstream f(arg);
  if (!f) {
    throw safeplan::Error(ErrorCode::ScenarioInvalid, "no builtin scenario or file named '" + arg + "'");
  }
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception & e) {
    throw safeplan::Error(ErrorCode::ScenarioInvalid, std::string("bad JSON: ") + e.what());
  }
  Scenario s = safeplan::sim::scenario_from_json(j);
  safeplan::sim::validate(s);
  return s;
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"safeplan: tube MPC motion planning harness"};
  app.require_subcommand(1);

  auto * run_cmd = app.add_subcommand("run", "run one closed-loop simulation");
  std::string scenario_arg;
  std::string mode = "tube";
  std::optional<std::uint64_t> seed;
  std::string out_dir = "out";
  double duration = 0.0;
  std::optional<double> wmax_xy;
  std::optional<double> wmax_yaw;
  std::optional<bool> process_noise;
  std::optional<bool> perception_noise;
  run_cmd->add_option("--scenario", scenario_arg, "builtin name or JSON file")->required();
  run_cmd->add_option("--mode", mode, "tube or nominal")->check(CLI::IsMember({"tube", "nominal"}));
  run_cmd->add_option("--seed", seed, "RNG seed (scenario seed when omitted)");
  run_cmd->add_option("--out", out_dir, "output directory");
  run_cmd->add_option("--duration", duration, "run length in s (scenario duration when omitted)")
    ->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--wmax-xy", wmax_xy, "disturbance half width for position and speed")
    ->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--wmax-yaw", wmax_yaw, "disturbance half width for heading")->check(CLI::NonNegativeNumber);
  run_cmd->add_flag("--process-noise,!--no-process-noise", process_noise, "inject w into the true dynamics");
  run_cmd->add_flag(
    "--perception-noise,!--no-perception-noise", perception_noise, "add w to the perceived state");

  app.add_subcommand("list-scenarios", "print the builtin scenarios");

  auto * validate_cmd = app.add_subcommand("validate", "check a scenario file");
  std::string validate_file;
  validate_cmd->add_option("file", validate_file, "scenario JSON")->required();

  auto * replay_cmd = app.add_subcommand("replay", "recompute metrics from a trace");
  std::string trace_file;
  replay_cmd->add_option("trace", trace_file, "trace.jsonl")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      Scenario s = load_scenario(scenario_arg);
      if (seed) {
        s.seed = *seed;
      }
      if (wmax_xy) {
        s.w_max(0) = s.w_max(1) = s.w_max(2) = *wmax_xy;
      }
      if (wmax_yaw) {
        s.w_max(3) = *wmax_yaw;
      }
      if (process_noise) {
        s.process_noise = *process_noise;
      }
      if (perception_noise) {
        s.perception_noise = *perception_noise;
      }
      safeplan::sim::RunConfig cfg = safeplan::sim::default_run_config();
      cfg.mode = mode == "nominal" ? safeplan::mpc::Mode::Nominal : safeplan::mpc::Mode::Tube;
      cfg.duration = duration;
      const auto result = safeplan::sim::run(s, cfg);
      safeplan::sim::write_outputs(result, out_dir);
      std::cout << safeplan::sim::to_json(result.metrics).dump(2) << '\n';
      return 0;
    }
    if (app.got_subcommand("list-scenarios")) {
      for (const auto & s : safeplan::sim::builtin_scenarios()) {
        std::cout << s.name << "\t" << s.description << '\n';
      }
      return 0;
    }
    if (*validate_cmd) {
      const Scenario s = load_scenario(validate_file);
      std::cout << "ok: " << s.name << '\n';
      return 0;
    }
    if (*replay_cmd) {
      const auto m = safeplan::sim::replay(trace_file);
      std::cout << safeplan::sim::to_json(m, false).dump(2) << '\n';
      return 0;
    }
  } catch (const safeplan::Error & e) {
    std::cerr << "error [" << safeplan::to_string(e.code()) << "]: " << e.what() << '\n';
    return e.code() == ErrorCode::ScenarioInvalid ? 2 : 1;
  } catch (const std::exception & e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
