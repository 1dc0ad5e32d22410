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


#ifndef SAFEPLAN__QP_HPP_
#define SAFEPLAN__QP_HPP_

#include <Eigen/Core>

#include <string>

namespace safeplan::qp
{

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// minimize 0.5 z'Hz + g'z  subject to  A_eq z = b_eq,  A_in z <= b_in.
struct QuadraticProgram
{
  Matrix H;
  Vector g;
  Matrix A_eq;
  Vector b_eq;
  Matrix A_in;
  Vector b_in;

  Eigen::Index num_vars() const { return g.size(); }
};

enum class Status { Optimal, Infeasible, MaxIter };

std::string to_string(Status s);

struct Settings
{
  /// Primal feasibility and KKT tolerance for an Optimal return.
  double tol{1e-6};
  int max_iter{4000};
  double rho{0.1};
  double sigma{1e-6};
  double alpha{1.6};
  bool scaling{true};
  bool polish{true};
  /// Consecutive iterations the infeasibility certificate must hold.
  int infeasibility_patience{50};
  double eps_infeasible{1e-5};
  int check_interval{5};
  int rho_update_interval{25};
};

struct Solution
{
  Status status{Status::MaxIter};
  Vector z;
  /// Multipliers of the equalities and (non-negative) of the inequalities.
  Vector lambda_eq;
  Vector mu_in;
  double objective{0.0};
  int iterations{0};
  bool polished{false};
};

struct KktResiduals
{
  double stationarity{0.0};
  double primal{0.0};
  double dual{0.0};
  double complementarity{0.0};

  double max() const;
};

/// Operator-splitting (ADMM) solver with diagonal equilibration, step-size
/// adaptation and an active-set polish step. Throws DimensionMismatch.
Solution solve(const QuadraticProgram & qp, const Settings & settings = {}, const Vector * warm_start = nullptr);

KktResiduals kkt_residuals(
  const QuadraticProgram & qp, const Vector & z, const Vector & lambda_eq, const Vector & mu_in);

void validate(const QuadraticProgram & qp);

}  // namespace safeplan::qp

#endif  // SAFEPLAN__QP_HPP_
