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


#include "safeplan/errors.hpp"
#include "safeplan/qp.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace safeplan::qp
{
namespace
{
using test::box_qp;
using test::enumerate_active_sets;
using test::random_pd;
using test::random_vec;
using test::Rng;

TEST(Qp, ScalarLowerBound)
{
  QuadraticProgram qp;
  qp.H = Matrix::Identity(1, 1);
  qp.g = Vector::Zero(1);
  qp.A_in = -Matrix::Identity(1, 1);
  qp.b_in = -Vector::Ones(1);
  const Solution s = solve(qp);
  ASSERT_EQ(s.status, Status::Optimal);
  EXPECT_NEAR(s.z(0), 1.0, 1e-8);
  EXPECT_NEAR(s.mu_in(0), 1.0, 1e-6);
}

TEST(Qp, UnconstrainedClosedForm)
{
  Rng rng(401);
  QuadraticProgram qp;
  qp.H = random_pd(rng, 6);
  qp.g = random_vec(rng, 6, -1, 1);
  const Solution s = solve(qp);
  ASSERT_EQ(s.status, Status::Optimal);
  EXPECT_LT((qp.H * s.z + qp.g).norm(), 1e-8);
}

TEST(Qp, ContradictoryBoundsAreInfeasible)
{
  QuadraticProgram qp;
  qp.H = Matrix::Identity(1, 1);
  qp.g = Vector::Zero(1);
  qp.A_in = Matrix(2, 1);
  qp.A_in << 1.0, -1.0;
  qp.b_in = Vector(2);
  qp.b_in << -1.0, -1.0;
  EXPECT_EQ(solve(qp).status, Status::Infeasible);
}

TEST(Qp, InfeasibleEqualityAndBox)
{
  QuadraticProgram qp;
  qp.H = Matrix::Identity(2, 2);
  qp.g = Vector::Zero(2);
  qp.A_eq = Matrix(1, 2);
  qp.A_eq << 1.0, 1.0;
  qp.b_eq = Vector::Constant(1, 5.0);
  qp.A_in = Matrix(4, 2);
  qp.A_in << 1, 0, -1, 0, 0, 1, 0, -1;
  qp.b_in = Vector::Ones(4);
  EXPECT_EQ(solve(qp).status, Status::Infeasible);
}

TEST(Qp, MatchesActiveSetEnumeration)
{
  Rng rng(409);
  int optimal = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const QuadraticProgram qp = box_qp(rng, 5, 2, trial % 3 == 0 ? 1 : 0);
    const auto oracle = enumerate_active_sets(qp);
    ASSERT_TRUE(oracle.has_value());
    const Solution s = solve(qp);
    ASSERT_EQ(s.status, Status::Optimal) << "trial " << trial;
    ++optimal;
    EXPECT_LT((s.z - *oracle).lpNorm<Eigen::Infinity>(), 1e-6) << "trial " << trial;
    const double obj_ref = 0.5 * oracle->dot(qp.H * *oracle) + qp.g.dot(*oracle);
    EXPECT_LE(std::abs(s.objective - obj_ref), 1e-5 * std::max(1.0, std::abs(obj_ref)));
  }
  EXPECT_EQ(optimal, 100);
}

TEST(Qp, KktResidualsOnEveryOptimalReturn)
{
  Rng rng(419);
  int optimal = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const QuadraticProgram qp = box_qp(rng, 20, 5, trial % 2 == 0 ? 3 : 0);
    const Solution s = solve(qp);
    if (s.status != Status::Optimal) {
      continue;
    }
    ++optimal;
    const KktResiduals r = kkt_residuals(qp, s.z, s.lambda_eq, s.mu_in);
    EXPECT_LT(r.max(), 1e-5) << "trial " << trial;
    EXPECT_LT(r.primal, 1e-6);
  }
  EXPECT_GE(optimal, 95);
}

TEST(Qp, SemidefiniteHessian)
{
  // linear program in disguise: minimize -z0 - z1 over the unit box
  QuadraticProgram qp;
  qp.H = Matrix::Zero(2, 2);
  qp.g = -Vector::Ones(2);
  qp.A_in = Matrix(4, 2);
  qp.A_in << 1, 0, -1, 0, 0, 1, 0, -1;
  qp.b_in = Vector::Ones(4);
  const Solution s = solve(qp);
  ASSERT_EQ(s.status, Status::Optimal);
  EXPECT_NEAR(s.z(0), 1.0, 1e-6);
  EXPECT_NEAR(s.z(1), 1.0, 1e-6);
}

TEST(Qp, DeterministicIterates)
{
  Rng rng(421);
  const QuadraticProgram qp = box_qp(rng, 12, 4, 2);
  const Solution a = solve(qp);
  const Solution b = solve(qp);
  EXPECT_EQ(a.iterations, b.iterations);
  for (Eigen::Index i = 0; i < a.z.size(); ++i) {
    EXPECT_EQ(a.z(i), b.z(i));
  }
}

TEST(Qp, DimensionMismatchRejected)
{
  QuadraticProgram qp;
  qp.H = Matrix::Identity(2, 2);
  qp.g = Vector::Zero(3);
  try {
    solve(qp);
    FAIL();
  } catch (const Error & e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

}  // namespace
}  // namespace safeplan::qp
