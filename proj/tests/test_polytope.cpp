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
#include "safeplan/polytope.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <set>
#include <vector>

namespace safeplan::polytope
{
namespace
{
using test::Rng;

VRep square(double half = 1.0)
{
  return make_box(Vector::Constant(2, -half), Vector::Constant(2, half)).to_vrep();
}

Vector vec2(double x, double y)
{
  Vector v(2);
  v << x, y;
  return v;
}

// Brute force: a point is extreme iff some line through it and another point
// has every remaining point strictly on one side, or it is the only point.
std::set<std::size_t> brute_force_extreme(const std::vector<Eigen::Vector2d> & pts)
{
  std::set<std::size_t> out;
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) {
        continue;
      }
      bool all_left = true;
      for (std::size_t k = 0; k < n && all_left; ++k) {
        if (k == i || k == j) {
          continue;
        }
        const Eigen::Vector2d a = pts[j] - pts[i];
        const Eigen::Vector2d b = pts[k] - pts[i];
        all_left = a.x() * b.y() - a.y() * b.x() > 0.0;
      }
      if (all_left) {
        out.insert(i);
        out.insert(j);
      }
    }
  }
  return out;
}

TEST(ConvexHull, DropsInteriorPoint)
{
  std::vector<Eigen::Vector2d> pts{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}};
  const VRep hull = convex_hull_2d(pts);
  ASSERT_EQ(hull.size(), 4u);
  EXPECT_FALSE(hull.lower_dimensional);
  EXPECT_NEAR(area(hull), 1.0, 1e-15);
  for (const auto & v : hull.vertices) {
    EXPECT_FALSE(v(0) == 0.5 && v(1) == 0.5);
  }
}

TEST(ConvexHull, SinglePointAndCollinear)
{
  std::vector<Eigen::Vector2d> one{{0, 0}};
  const VRep p = convex_hull_2d(one);
  EXPECT_EQ(p.size(), 1u);
  EXPECT_TRUE(p.lower_dimensional);

  std::vector<Eigen::Vector2d> line{{0, 0}, {1, 1}, {2, 2}, {0.5, 0.5}};
  const VRep seg = convex_hull_2d(line);
  EXPECT_EQ(seg.size(), 2u);
  EXPECT_TRUE(seg.lower_dimensional);
}

TEST(ConvexHull, MatchesBruteForceOnRandomDisk)
{
  Rng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Eigen::Vector2d> pts;
    for (int i = 0; i < 100; ++i) {
      pts.push_back(rng.in_disk());
    }
    const auto expected = brute_force_extreme(pts);
    const VRep hull = convex_hull_2d(pts);
    std::set<std::size_t> got;
    for (const auto & v : hull.vertices) {
      for (std::size_t i = 0; i < pts.size(); ++i) {
        if (pts[i] == Eigen::Vector2d(v)) {
          got.insert(i);
        }
      }
    }
    EXPECT_EQ(got, expected);
    EXPECT_GT(area(hull), 0.0);  // counterclockwise
  }
}

TEST(VToH, UnitSquare)
{
  const HRep h = v_to_h(square());
  ASSERT_EQ(h.num_halfspaces(), 4);
  for (Eigen::Index i = 0; i < 4; ++i) {
    EXPECT_NEAR(h.A.row(i).norm(), 1.0, 1e-12);
    EXPECT_NEAR(h.b(i), 1.0, 1e-12);
  }
}

TEST(VToH, TriangleMembershipMatchesBarycentric)
{
  std::vector<Eigen::Vector2d> tri{{0, 0}, {1, 0}, {0, 1}};
  const HRep h = v_to_h(convex_hull_2d(tri));
  EXPECT_EQ(h.num_halfspaces(), 3);
  Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    const Eigen::Vector2d x(rng.uniform(-0.5, 1.5), rng.uniform(-0.5, 1.5));
    // barycentric oracle for this triangle: x >= 0, y >= 0, x + y <= 1
    const bool inside = x.x() >= 0 && x.y() >= 0 && x.x() + x.y() <= 1.0;
    EXPECT_EQ(contains(h, x, 0.0), inside) << x.transpose();
  }
}

TEST(VToH, SegmentIsDegenerate)
{
  std::vector<Eigen::Vector2d> seg{{0, 0}, {1, 1}};
  try {
    v_to_h(convex_hull_2d(seg));
    FAIL() << "expected DegeneratePolytope";
  } catch (const Error & e) {
    EXPECT_EQ(e.code(), ErrorCode::DegeneratePolytope);
  }
}

TEST(HToV, SquareFromHalfspaces)
{
  const VRep v = h_to_v_2d(make_box(vec2(-1, -1), vec2(1, 1)).to_hrep());
  ASSERT_EQ(v.size(), 4u);
  for (const auto & p : v.vertices) {
    EXPECT_NEAR(std::abs(p(0)), 1.0, 1e-12);
    EXPECT_NEAR(std::abs(p(1)), 1.0, 1e-12);
  }
}

TEST(HToV, RandomBoundedHalfspacesHaveTightFeasibleVertices)
{
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    HRep h = HRep::make(2);
    // Six tangent lines of a disk at spread-out angles keep the set bounded.
    for (int i = 0; i < 6; ++i) {
      const double ang = (i + rng.uniform(-0.3, 0.3)) * 2.0 * std::numbers::pi / 6.0;
      h.add(vec2(std::cos(ang), std::sin(ang)), rng.uniform(0.5, 2.0));
    }
    const VRep v = h_to_v_2d(h);
    ASSERT_GE(v.size(), 3u);
    for (const auto & p : v.vertices) {
      const Vector slack = h.A * p - h.b;
      EXPECT_LE(slack.maxCoeff(), 1e-9);
      int tight = 0;
      for (Eigen::Index i = 0; i < slack.size(); ++i) {
        tight += std::abs(slack(i)) < 1e-9 ? 1 : 0;
      }
      EXPECT_GE(tight, 2);
    }
  }
}

TEST(HToV, ContradictoryIsEmpty)
{
  HRep h = HRep::make(2);
  h.add(vec2(1, 0), -1.0);
  h.add(vec2(-1, 0), -1.0);
  try {
    h_to_v_2d(h);
    FAIL() << "expected EmptyPolytope";
  } catch (const Error & e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyPolytope);
  }
  EXPECT_TRUE(is_empty(h));
}

TEST(HToV, StripIsUnbounded)
{
  HRep h = HRep::make(2);
  h.add(vec2(1, 0), 1.0);
  h.add(vec2(-1, 0), 1.0);
  try {
    h_to_v_2d(h);
    FAIL() << "expected UnboundedPolytope";
  } catch (const Error & e) {
    EXPECT_EQ(e.code(), ErrorCode::UnboundedPolytope);
  }
}

TEST(Minkowski, BoxSumAndIdentity)
{
  const VRep sum = minkowski_sum(square(), square());
  EXPECT_LT(test::hausdorff(sum, square(2.0)), 1e-12);

  std::vector<Vector> origin{vec2(0, 0)};
  const VRep zero = VRep::from_points(origin);
  EXPECT_LT(test::hausdorff(minkowski_sum(square(), zero), square()), 1e-15);
}

TEST(Minkowski, DimensionMismatch)
{
  std::vector<Vector> one{Vector::Zero(3)};
  try {
    minkowski_sum(square(), VRep::from_points(one));
    FAIL();
  } catch (const Error & e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(Minkowski, MatchesDenseSampledSums)
{
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const VRep tri = test::random_polygon(rng, 3, 1.0);
    const VRep quad = test::random_polygon(rng, 4, 1.5, {2, 0});
    // Dense boundary samples of each polygon, endpoints included.
    auto boundary = [](const VRep & p) {
      std::vector<Eigen::Vector2d> out;
      for (std::size_t i = 0; i < p.size(); ++i) {
        const Eigen::Vector2d a = p.vertices[i];
        const Eigen::Vector2d b = p.vertices[(i + 1) % p.size()];
        for (int k = 0; k <= 40; ++k) {
          out.push_back(a + (b - a) * (k / 40.0));
        }
      }
      return out;
    };
    std::vector<Eigen::Vector2d> sums;
    for (const auto & a : boundary(tri)) {
      for (const auto & b : boundary(quad)) {
        sums.push_back(a + b);
      }
    }
    const VRep oracle = convex_hull_2d(sums);
    EXPECT_LT(test::hausdorff(minkowski_sum(tri, quad), oracle), 1e-6);
  }
}

TEST(Pontryagin, BoxDifferenceAndIdentity)
{
  const HRep diff = pontryagin_diff(v_to_h(square(2.0)), square(1.0));
  EXPECT_FALSE(diff.empty);
  EXPECT_LT(test::hausdorff(h_to_v_2d(diff), square(1.0)), 1e-12);

  std::vector<Vector> origin{vec2(0, 0)};
  const HRep same = pontryagin_diff(v_to_h(square()), VRep::from_points(origin));
  EXPECT_TRUE(same.b.isApprox(v_to_h(square()).b));
}

TEST(Pontryagin, OverTighteningIsReportedNotThrown)
{
  const HRep diff = pontryagin_diff(v_to_h(square(1.0)), square(2.0));
  EXPECT_TRUE(diff.empty);
  EXPECT_FALSE(contains(diff, vec2(0, 0)));
}

TEST(Pontryagin, AdjunctionBySampling)
{
  Rng rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const VRep p = test::random_polygon(rng, 8, 3.0);
    const VRep q = test::random_polygon(rng, 5, 0.5);
    const HRep p_h = v_to_h(p);

    // (P - Q) + Q is inside P
    const HRep diff = pontryagin_diff(p_h, q);
    if (!diff.empty) {
      const VRep diff_v = h_to_v_2d(diff);
      if (!diff_v.lower_dimensional) {
        for (int i = 0; i < 20; ++i) {
          const Eigen::Vector2d x = test::sample_in(rng, diff_v) + test::sample_in(rng, q);
          EXPECT_TRUE(contains(p_h, x, 1e-9));
        }
      }
    }

    // P is inside (P + Q) - Q
    const HRep back = pontryagin_diff(v_to_h(minkowski_sum(p, q)), q);
    for (int i = 0; i < 20; ++i) {
      EXPECT_TRUE(contains(back, test::sample_in(rng, p), 1e-9));
    }
  }
}

TEST(Project, BoxAndSingleVertex)
{
  const VRep box4 = make_box(Vector::Constant(4, -1), Vector::Constant(4, 1)).to_vrep();
  const int idx[] = {0, 1};
  EXPECT_LT(test::hausdorff(project(box4, idx), square()), 1e-15);

  std::vector<Vector> one{Eigen::Vector4d(1, 2, 3, 4)};
  const int idx2[] = {2, 3};
  const VRep p = project(VRep::from_points(one), idx2);
  ASSERT_EQ(p.size(), 1u);
  EXPECT_EQ(p.vertices[0], vec2(3, 4));

  const int bad[] = {4};
  try {
    project(box4, bad);
    FAIL();
  } catch (const Error & e) {
    EXPECT_EQ(e.code(), ErrorCode::IndexOutOfRange);
  }
}

TEST(Project, ContainsProjectionOfSampledPoints)
{
  Rng rng(17);
  std::vector<Vector> gens;
  for (int i = 0; i < 12; ++i) {
    Vector g(4);
    g << rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1);
    gens.push_back(g);
  }
  const VRep p = VRep::from_points(gens);
  const int idx[] = {1, 3};
  const VRep proj = project(p, idx);
  for (int i = 0; i < 500; ++i) {
    // random convex combination of the generators
    Vector w(static_cast<Eigen::Index>(gens.size()));
    for (Eigen::Index k = 0; k < w.size(); ++k) {
      w(k) = rng.uniform(0, 1);
    }
    w /= w.sum();
    Vector x = Vector::Zero(4);
    for (std::size_t k = 0; k < gens.size(); ++k) {
      x += w(static_cast<Eigen::Index>(k)) * gens[k];
    }
    EXPECT_TRUE(hull_contains_2d(proj, Eigen::Vector2d(x(1), x(3)), 1e-12));
  }
}

TEST(Concat, ProductOfBoxes)
{
  const HRep p = make_box(vec2(-1, -1), vec2(1, 1)).to_hrep();
  const HRep q = make_box(vec2(-2, -2), vec2(2, 2)).to_hrep();
  const HRep pq = concat(p, q);
  EXPECT_EQ(pq.dim, 4);
  EXPECT_EQ(pq.num_halfspaces(), 8);

  Rng rng(19);
  for (int i = 0; i < 1000; ++i) {
    Vector x(4);
    x << rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3);
    const bool expected = contains(p, x.head(2)) && contains(q, x.tail(2));
    EXPECT_EQ(contains(pq, x), expected);
  }

  const HRep free = HRep::make(2);
  const HRep padded = concat(p, free);
  EXPECT_EQ(padded.dim, 4);
  EXPECT_EQ(padded.num_halfspaces(), 4);
  EXPECT_TRUE(padded.A.rightCols(2).isZero());
}

TEST(Support, BasicAndSampled)
{
  EXPECT_DOUBLE_EQ(support(square(), vec2(1, 0)), 1.0);
  EXPECT_DOUBLE_EQ(support(square(), vec2(3, 0)), 1.0);  // normalized internally
  std::vector<Vector> origin{vec2(0, 0)};
  EXPECT_DOUBLE_EQ(support(VRep::from_points(origin), vec2(0.3, -0.4)), 0.0);

  Rng rng(23);
  const VRep p = test::random_polygon(rng, 7, 2.0);
  for (int i = 0; i < 200; ++i) {
    const double ang = rng.uniform(-3.14, 3.14);
    const Vector a = vec2(std::cos(ang), std::sin(ang));
    const Eigen::Vector2d x = test::sample_in(rng, p);
    EXPECT_GE(support(p, a), a.dot(Vector(x)) - 1e-12);
  }
}

TEST(Support, AdditiveOverMinkowskiSum)
{
  Rng rng(29);
  for (int trial = 0; trial < 50; ++trial) {
    const VRep p = test::random_polygon(rng, 6, 2.0);
    const VRep q = test::random_polygon(rng, 6, 1.0, {1, -1});
    const VRep pq = minkowski_sum(p, q);
    for (int k = 0; k < 10; ++k) {
      const double ang = rng.uniform(-3.14, 3.14);
      const Vector a = vec2(std::cos(ang), std::sin(ang));
      EXPECT_NEAR(support(pq, a), support(p, a) + support(q, a), 1e-9);
    }
  }
}

TEST(Contains, ToleranceSemantics)
{
  const HRep h = v_to_h(square());
  EXPECT_TRUE(contains(h, vec2(0, 0)));
  EXPECT_TRUE(contains(h, vec2(1 + 1e-12, 0), 1e-9));
  EXPECT_FALSE(contains(h, vec2(2, 0)));
  try {
    contains(h, Vector::Zero(3));
    FAIL();
  } catch (const Error & e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(DualRoundTrip, MembershipAgreesOnSamples)
{
  Rng rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const VRep p = test::random_polygon(rng, 9, 2.0);
    const HRep h = v_to_h(p);
    const VRep back = h_to_v_2d(h);
    EXPECT_LT(test::hausdorff(p, back), 1e-7);
    for (int i = 0; i < 200; ++i) {
      const Eigen::Vector2d x(rng.uniform(-2.5, 2.5), rng.uniform(-2.5, 2.5));
      EXPECT_EQ(hull_contains_2d(p, x, 0.0), contains(h, Vector(x), 0.0)) << x.transpose();
    }
  }
}

TEST(InvariantSet, ZeroGainKeepsW)
{
  const Vector half = Eigen::Vector4d(0.2, 0.2, 0.2, 0.1);
  const VRep w = centered_box(half).to_vrep();
  const InvariantSet z = compute_z_hrep(Matrix::Zero(4, 4), w, 6);
  for (int i = 0; i < 4; ++i) {
    const Vector e = Vector::Unit(4, i);
    EXPECT_NEAR(support(z.vertices, e), half(i), 1e-15);
    Vector probe = Vector::Zero(4);
    probe(i) = half(i) * (1 + 1e-6);
    EXPECT_FALSE(contains(z.hrep, probe, 1e-9));
    probe(i) = half(i);
    EXPECT_TRUE(contains(z.hrep, probe, 1e-12));
  }
}

TEST(InvariantSet, GeometricSeriesClosedForm)
{
  const VRep w = centered_box(Vector::Constant(4, 0.1)).to_vrep();
  for (const int n : {0, 3, 6, 12}) {
    const InvariantSet z = compute_z_hrep(0.5 * Matrix::Identity(4, 4), w, n);
    const double expected = 0.2 * (1.0 - std::pow(0.5, n + 1));
    for (int i = 0; i < 4; ++i) {
      const double h = support(z.vertices, Vector::Unit(4, i));
      EXPECT_NEAR(h, expected, 1e-12);
      // the truncated tail of the infinite sum is at most rho^(n+1) |W| / (1 - rho)
      EXPECT_LE(0.2 - h, std::pow(0.5, n + 1) * 0.1 / 0.5 + 1e-12);
    }
  }
}

TEST(InvariantSet, UnstableGainRejected)
{
  const VRep w = centered_box(Vector::Constant(4, 0.1)).to_vrep();
  try {
    compute_z_hrep(Matrix::Identity(4, 4), w, 3);
    FAIL();
  } catch (const Error & e) {
    EXPECT_EQ(e.code(), ErrorCode::UnstableGain);
  }
}

TEST(InvariantSet, ContainsEveryExactSumVertex)
{
  Rng rng(37);
  const VRep w = centered_box(Eigen::Vector4d(0.2, 0.2, 0.2, 0.1)).to_vrep();
  for (int trial = 0; trial < 10; ++trial) {
    Matrix a(4, 4);
    for (int i = 0; i < 16; ++i) {
      a(i / 4, i % 4) = rng.uniform(-1, 1);
    }
    a *= 0.9 / spectral_radius(a);
    const int n = 2;
    const InvariantSet z = compute_z_hrep(a, w, n);
    // exhaustive sum over all vertex choices: 16^(n+1) points
    std::vector<Vector> terms[3];
    Matrix power = Matrix::Identity(4, 4);
    for (int i = 0; i <= n; ++i) {
      for (const auto & v : w.vertices) {
        terms[i].push_back(power * v);
      }
      power = a * power;
    }
    for (const auto & t0 : terms[0]) {
      for (const auto & t1 : terms[1]) {
        for (const auto & t2 : terms[2]) {
          ASSERT_TRUE(contains(z.hrep, t0 + t1 + t2, 1e-9));
        }
      }
    }
  }
}

TEST(Json, Shapes)
{
  const auto jv = to_json(square());
  EXPECT_EQ(jv["dim"], 2);
  EXPECT_EQ(jv["vertices"].size(), 4u);
  const auto jh = to_json(v_to_h(square()));
  EXPECT_EQ(jh["halfspaces"].size(), 4u);
  EXPECT_TRUE(jh["halfspaces"][0].contains("a"));
  EXPECT_TRUE(jh["halfspaces"][0].contains("b"));
}

}  // namespace
}  // namespace safeplan::polytope
