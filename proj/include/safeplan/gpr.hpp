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


#ifndef SAFEPLAN__GPR_HPP_
#define SAFEPLAN__GPR_HPP_

#include "safeplan/dynamics.hpp"
#include "safeplan/polytope.hpp"

#include <json.hpp>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <deque>
#include <vector>

namespace safeplan::gpr
{

using Feature = Eigen::Vector2d;  // [v, theta]
using Label = Eigen::Vector4d;    // residual in (px, py, v, theta)

enum class NoiseMode {
  /// Kernel matrix regularized by the configured noise variance only.
  Fixed,
  /// Per-output noise variance estimated from the window's label spread
  /// (floored at the configured value); bounds include it.
  Adaptive,
};

struct GprConfig
{
  Eigen::Vector2d length_scales{2.0, 0.3};
  double sigma_f{0.15};
  /// Noise variance added to the kernel diagonal.
  double sigma_n{1e-4};
  std::size_t capacity{200};
  NoiseMode noise_mode{NoiseMode::Adaptive};
  /// Adaptive mode: below this many points the noise variance is sigma_f^2
  /// instead of a sample variance that would be meaningless.
  std::size_t min_noise_samples{10};
};

double kernel(const Feature & a, const Feature & b, const Eigen::Vector2d & length_scales, double sigma_f2);

struct Prediction
{
  Label mean{Label::Zero()};
  /// Posterior standard deviation of the latent function.
  Label std{Label::Zero()};
};

struct DisturbanceBound
{
  Label mean{Label::Zero()};
  Label lower{Label::Zero()};
  Label upper{Label::Zero()};

  /// Centered box [-(upper - mean), upper - mean] for the tube; the mean is
  /// applied separately as a known offset.
  polytope::VRep centered_vrep() const;
  Label half_widths() const { return upper - mean; }
  bool contains(const Label & y) const
  {
    return (y.array() >= lower.array()).all() && (y.array() <= upper.array()).all();
  }
};

class GprModel
{
public:
  explicit GprModel(GprConfig config = {});

  /// Residual of an observed transition against the model; heading wrapped.
  static Label residual(
    const dynamics::VehicleState & x_prev, const dynamics::ControlInput & u_prev,
    const dynamics::VehicleState & x_obs, const dynamics::VehicleParams & params);

  void ingest(
    const dynamics::VehicleState & x_prev, const dynamics::ControlInput & u_prev,
    const dynamics::VehicleState & x_obs, const dynamics::VehicleParams & params);
  /// Appends one training pair, evicting the oldest beyond capacity.
  void add(const Feature & x, const Label & y);
  void clear();

  Prediction predict(const Feature & x) const;
  /// Per-output box mean +- c * sqrt(latent variance + noise estimate).
  DisturbanceBound bounds(const Feature & x, double c) const;

  std::size_t size() const { return features_.size(); }
  const GprConfig & config() const { return config_; }
  /// Noise variance used for output d (the configured value in Fixed mode).
  double noise_variance(int d) const { return noise_(d); }
  const std::deque<Feature> & features() const { return features_; }
  const std::deque<Label> & labels() const { return labels_; }

  nlohmann::json to_json() const;

private:
  void refactor();

  GprConfig config_;
  std::deque<Feature> features_;
  std::deque<Label> labels_;
  Eigen::Vector4d noise_;
  // one factorization per output; outputs with equal noise share the result
  std::vector<Eigen::LLT<Eigen::MatrixXd>> factors_;
  std::vector<int> factor_of_output_;
  Eigen::Matrix<double, Eigen::Dynamic, 4> alpha_;
};

}  // namespace safeplan::gpr

#endif  // SAFEPLAN__GPR_HPP_
