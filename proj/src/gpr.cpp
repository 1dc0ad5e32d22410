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


#include "safeplan/gpr.hpp"

#include <algorithm>
#include <cmath>

namespace safeplan::gpr
{

double kernel(const Feature & a, const Feature & b, const Eigen::Vector2d & length_scales, double sigma_f2)
{
  const Eigen::Vector2d r = (a - b).cwiseQuotient(length_scales);
  return sigma_f2 * std::exp(-0.5 * r.squaredNorm());
}

polytope::VRep DisturbanceBound::centered_vrep() const
{
  return polytope::centered_box(half_widths().cwiseMax(0.0)).to_vrep();
}

GprModel::GprModel(GprConfig config) : config_(std::move(config))
{
  noise_.setConstant(config_.sigma_n);
}

Label GprModel::residual(
  const dynamics::VehicleState & x_prev, const dynamics::ControlInput & u_prev, const dynamics::VehicleState & x_obs,
  const dynamics::VehicleParams & params)
{
  const dynamics::VehicleState pred = dynamics::step(x_prev, u_prev, params);
  return {x_obs.px - pred.px, x_obs.py - pred.py, x_obs.v - pred.v, dynamics::wrap_angle(x_obs.theta - pred.theta)};
}

void GprModel::ingest(
  const dynamics::VehicleState & x_prev, const dynamics::ControlInput & u_prev, const dynamics::VehicleState & x_obs,
  const dynamics::VehicleParams & params)
{
  add({x_prev.v, x_prev.theta}, residual(x_prev, u_prev, x_obs, params));
}

void GprModel::add(const Feature & x, const Label & y)
{
  features_.push_back(x);
  labels_.push_back(y);
  while (features_.size() > config_.capacity) {
    features_.pop_front();
    labels_.pop_front();
  }
  refactor();
}

void GprModel::clear()
{
  features_.clear();
  labels_.clear();
  refactor();
}

void GprModel::refactor()
{
  const auto n = static_cast<Eigen::Index>(features_.size());
  noise_.setConstant(config_.sigma_n);
  factors_.clear();
  factor_of_output_.assign(4, -1);
  alpha_.resize(n, 4);
  if (n == 0) {
    return;
  }
  Eigen::MatrixXd Y(n, 4);
  for (Eigen::Index i = 0; i < n; ++i) {
    Y.row(i) = labels_[i].transpose();
  }
  if (config_.noise_mode == NoiseMode::Adaptive && static_cast<std::size_t>(n) < std::max<std::size_t>(config_.min_noise_samples, 2)) {
    noise_.setConstant(std::max(config_.sigma_f * config_.sigma_f, config_.sigma_n));
  } else if (config_.noise_mode == NoiseMode::Adaptive) {
    const Eigen::RowVector4d mean = Y.colwise().mean();
    const Eigen::RowVector4d var = (Y.rowwise() - mean).colwise().squaredNorm() / static_cast<double>(n - 1);
    noise_ = var.transpose().cwiseMax(config_.sigma_n);
  }
  const double sf2 = config_.sigma_f * config_.sigma_f;
  Eigen::MatrixXd K(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      K(i, j) = K(j, i) = kernel(features_[i], features_[j], config_.length_scales, sf2);
    }
  }
  std::vector<double> seen;
  for (int d = 0; d < 4; ++d) {
    const auto it = std::find(seen.begin(), seen.end(), noise_(d));
    if (it != seen.end()) {
      factor_of_output_[d] = static_cast<int>(it - seen.begin());
    } else {
      Eigen::MatrixXd Kn = K;
      Kn.diagonal().array() += noise_(d);
      factors_.emplace_back(Kn);
      seen.push_back(noise_(d));
      factor_of_output_[d] = static_cast<int>(factors_.size()) - 1;
    }
    alpha_.col(d) = factors_[factor_of_output_[d]].solve(Y.col(d));
  }
}

Prediction GprModel::predict(const Feature & x) const
{
  Prediction p;
  const double sf2 = config_.sigma_f * config_.sigma_f;
  const auto n = static_cast<Eigen::Index>(features_.size());
  if (n == 0) {
    p.std.setConstant(config_.sigma_f);
    return p;
  }
  Eigen::VectorXd k(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    k(i) = kernel(x, features_[i], config_.length_scales, sf2);
  }
  p.mean = alpha_.transpose() * k;
  std::vector<double> reduction(factors_.size());
  for (std::size_t f = 0; f < factors_.size(); ++f) {
    const Eigen::VectorXd v = factors_[f].matrixL().solve(k);
    reduction[f] = v.squaredNorm();
  }
  for (int d = 0; d < 4; ++d) {
    p.std(d) = std::sqrt(std::max(0.0, sf2 - reduction[factor_of_output_[d]]));
  }
  return p;
}

DisturbanceBound GprModel::bounds(const Feature & x, double c) const
{
  const Prediction p = predict(x);
  DisturbanceBound b;
  b.mean = p.mean;
  for (int d = 0; d < 4; ++d) {
    double var = p.std(d) * p.std(d);
    if (config_.noise_mode == NoiseMode::Adaptive && !features_.empty()) {
      var += noise_(d);
    }
    const double half = c * std::sqrt(var);
    b.lower(d) = p.mean(d) - half;
    b.upper(d) = p.mean(d) + half;
  }
  return b;
}

nlohmann::json GprModel::to_json() const
{
  nlohmann::json j;
  j["length_scales"] = {config_.length_scales(0), config_.length_scales(1)};
  j["sigma_f"] = config_.sigma_f;
  j["sigma_n"] = config_.sigma_n;
  j["capacity"] = config_.capacity;
  j["noise_mode"] = config_.noise_mode == NoiseMode::Fixed ? "fixed" : "adaptive";
  j["noise_variance"] = {noise_(0), noise_(1), noise_(2), noise_(3)};
  nlohmann::json feats = nlohmann::json::array();
  nlohmann::json labs = nlohmann::json::array();
  for (std::size_t i = 0; i < features_.size(); ++i) {
    feats.push_back({features_[i](0), features_[i](1)});
    labs.push_back({labels_[i](0), labels_[i](1), labels_[i](2), labels_[i](3)});
  }
  j["features"] = feats;
  j["labels"] = labs;
  return j;
}

}  // namespace safeplan::gpr
