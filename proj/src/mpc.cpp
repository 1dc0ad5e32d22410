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


#include "safeplan/mpc.hpp"

#include "safeplan/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace safeplan::mpc
{
namespace
{
constexpr int kRiccatiCap = 500;
constexpr double kRiccatiTol = 1e-9;

polytope::Vector vec4(double a, double b, double c, double d)
{
  polytope::Vector v(4);
  v << a, b, c, d;
  return v;
}

}  // namespace

Eigen::MatrixXd compute_gain(
  const Eigen::MatrixXd & A, const Eigen::MatrixXd & B, const Eigen::MatrixXd & Q, const Eigen::MatrixXd & R)
{
  const auto n = A.rows();
  const auto m = B.cols();
  if (A.cols() != n || B.rows() != n || Q.rows() != n || Q.cols() != n || R.rows() != m || R.cols() != m) {
    throw Error(ErrorCode::DimensionMismatch, "compute_gain: inconsistent matrix sizes");
  }
  const Eigen::LLT<Eigen::MatrixXd> r_llt(R);
  if (r_llt.info() != Eigen::Success) {
    throw Error(ErrorCode::InvalidArgument, "compute_gain: R must be positive definite");
  }
  // structure-preserving doubling; each pass doubles the Riccati horizon
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd Ak = A;
  Eigen::MatrixXd G = B * r_llt.solve(B.transpose());
  Eigen::MatrixXd H = Q;
  bool converged = false;
  for (int it = 0; it < kRiccatiCap; ++it) {
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(I + G * H);
    const Eigen::MatrixXd V1 = lu.solve(Ak);
    const Eigen::MatrixXd V2 = lu.solve(G);
    Eigen::MatrixXd H_next = H + Ak.transpose() * H * V1;
    Eigen::MatrixXd G_next = G + Ak * V2 * Ak.transpose();
    Ak = Ak * V1;
    H_next = 0.5 * (H_next + H_next.transpose()).eval();
    G = 0.5 * (G_next + G_next.transpose());
    if (!H_next.allFinite() || !G.allFinite() || !Ak.allFinite()) {
      throw Error(ErrorCode::UnstabilizablePair, "compute_gain: Riccati recursion diverged");
    }
    const double change = (H_next - H).cwiseAbs().maxCoeff();
    H = H_next;
    if (change <= kRiccatiTol * std::max(1.0, H.cwiseAbs().maxCoeff())) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw Error(ErrorCode::UnstabilizablePair, "compute_gain: Riccati recursion did not converge");
  }
  const Eigen::MatrixXd S = R + B.transpose() * H * B;
  const Eigen::MatrixXd K = -S.ldlt().solve(B.transpose() * H * A);
  if (polytope::spectral_radius(A + B * K) >= 1.0) {
    throw Error(ErrorCode::UnstabilizablePair, "compute_gain: closed loop is not stable");
  }
  return K;
}

GainMatrix compute_gain(
  const Eigen::Matrix4d & A, const Eigen::Matrix<double, 4, 2> & B, const Eigen::Matrix4d & Q,
  const Eigen::Matrix2d & R)
{
  const Eigen::MatrixXd K = compute_gain(
    Eigen::MatrixXd(A), Eigen::MatrixXd(B), Eigen::MatrixXd(Q), Eigen::MatrixXd(R));
  return K;
}

Tube Tube::zero()
{
  polytope::VRep w;
  w.dim = 4;
  w.vertices.push_back(polytope::Vector::Zero(4));
  return make(Eigen::Matrix4d::Zero(), w, 0);
}

Tube Tube::make(const Eigen::Matrix4d & a_k, const polytope::VRep & w, int n)
{
  Tube t;
  t.set = polytope::compute_z_hrep(a_k, w, n);
  t.w = w;
  t.powers.push_back(Eigen::Matrix4d::Identity());
  for (int i = 1; i <= n; ++i) {
    t.powers.push_back(a_k * t.powers.back());
  }
  return t;
}

double Tube::support(const Eigen::Vector4d & direction) const
{
  double h = 0.0;
  for (const auto & P : powers) {
    const Eigen::Vector4d d = P.transpose() * direction;
    double best = -std::numeric_limits<double>::infinity();
    for (const auto & v : w.vertices) {
      best = std::max(best, d.dot(v));
    }
    h += best;
  }
  return h;
}

double Tube::input_support(const GainMatrix & K, const Eigen::Vector2d & direction) const
{
  return support(K.transpose() * direction);
}

bool Tube::contains(const Eigen::Vector4d & e, double tol) const
{
  return polytope::contains(set.hrep, e, tol);
}

Constraints assemble_constraints(
  const polytope::HRep & region, const TubeMpcConfig & cfg, const Tube & z, const GainMatrix & K,
  double heading_ref)
{
  Constraints c;
  c.X = polytope::HRep::make(4);
  c.X_bar = polytope::HRep::make(4);
  auto add = [&](const polytope::Vector & a, double b, bool tighten) {
    c.X.add(a, b);
    const double h = tighten ? z.support(Eigen::Vector4d(a.normalized())) * a.norm() : 0.0;
    c.X_bar.add(a, b - h);
  };
  for (Eigen::Index i = 0; i < region.num_halfspaces(); ++i) {
    add(vec4(region.A(i, 0), region.A(i, 1), 0, 0), region.b(i), true);
  }
  add(vec4(0, 0, 1, 0), cfg.v_max, true);
  add(vec4(0, 0, -1, 0), -cfg.v_min, cfg.tighten_speed_floor);
  add(vec4(0, 0, 0, 1), heading_ref + cfg.heading_band, cfg.tighten_heading);
  add(vec4(0, 0, 0, -1), -(heading_ref - cfg.heading_band), cfg.tighten_heading);

  const double a_max = cfg.vehicle.a_max;
  const double d_max = cfg.vehicle.delta_max;
  c.U = polytope::HRep::make(2);
  c.U_bar = polytope::HRep::make(2);
  const Eigen::Vector2d dirs[4] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  const double bounds[4] = {a_max, a_max, d_max, d_max};
  for (int i = 0; i < 4; ++i) {
    c.U.add(dirs[i], bounds[i]);
    c.U_bar.add(dirs[i], bounds[i] - z.input_support(K, dirs[i]));
  }
  c.state_empty = polytope::is_empty(c.X_bar);
  c.input_empty = polytope::is_empty(c.U_bar);
  return c;
}

Eigen::Vector2d closest_point(const polytope::HRep & polygon, const Eigen::Vector2d & p)
{
  if (polygon.num_halfspaces() == 0 || polytope::contains(polygon, p, 0.0)) {
    return p;
  }
  const polytope::VRep v = polytope::h_to_v_2d(polygon);
  Eigen::Vector2d best = v.vertices.front();
  double best_d = std::numeric_limits<double>::infinity();
  const auto n = v.vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector2d a = v.vertices[i];
    const Eigen::Vector2d b = v.vertices[(i + 1) % n];
    const Eigen::Vector2d ab = b - a;
    const double len2 = ab.squaredNorm();
    const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    const Eigen::Vector2d q = a + t * ab;
    const double d = (q - p).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = q;
    }
  }
  return best;
}

TubeDesign design_tube(
  const Eigen::Vector4d & x_ref, const Eigen::Vector2d & u_ref, const polytope::VRep & w, const TubeMpcConfig & cfg)
{
  dynamics::VehicleParams params = cfg.vehicle;
  params.dt = cfg.dt;
  Eigen::Vector4d xg = x_ref;
  xg(2) = std::max(xg(2), cfg.gain_speed_floor);
  const dynamics::Linearization lg =
    dynamics::linearize(dynamics::VehicleState::from_vec(xg), dynamics::ControlInput::from_vec(u_ref), params);
  TubeDesign d;
  d.K = compute_gain(lg.A, lg.B, cfg.gain_Q.value_or(cfg.Q), cfg.gain_R.value_or(cfg.R));
  d.z = Tube::make(lg.A + lg.B * d.K, w, cfg.z_truncation);
  return d;
}

TubeSolution solve_step(
  const dynamics::VehicleState & x, std::span<const ReferencePoint> ref, const polytope::HRep & region,
  const polytope::VRep & w, const Eigen::Vector4d & w_mean, const TubeMpcConfig & cfg)
{
  const int N = cfg.N;
  if (N < 1 || static_cast<int>(ref.size()) < N + 1) {
    throw Error(ErrorCode::InvalidArgument, "solve_step: reference shorter than the horizon");
  }
  dynamics::VehicleParams params = cfg.vehicle;
  params.dt = cfg.dt;
  const bool tube = cfg.mode == Mode::Tube;

  // headings unwrapped once, relative to the current state
  std::vector<Eigen::Vector4d> r(N + 1);
  std::vector<Eigen::Vector2d> ur(N);
  double prev = x.theta;
  for (int k = 0; k <= N; ++k) {
    r[k] = ref[k].x.vec();
    r[k](3) = prev + dynamics::wrap_angle(r[k](3) - prev);
    prev = r[k](3);
    const Eigen::Vector2d pos = closest_point(region, r[k].head<2>());
    r[k].head<2>() = pos;
    if (k < N) {
      ur[k] = ref[k].u.vec();
    }
  }

  TubeSolution sol;
  if (tube) {
    try {
      TubeDesign d = design_tube(r[0], ur[0], w, cfg);
      sol.K = d.K;
      sol.z = std::move(d.z);
    } catch (const Error & e) {
      throw Error(ErrorCode::InfeasibleMpc, std::string("solve_step: ") + e.what());
    }
  } else {
    sol.z = Tube::zero();
  }

  std::vector<Constraints> cons;
  for (int k = 0; k <= N; ++k) {
    cons.push_back(assemble_constraints(region, cfg, sol.z, sol.K, r[k](3)));
    if (cons.back().state_empty || cons.back().input_empty) {
      throw Error(
        ErrorCode::InfeasibleMpc,
        std::string("solve_step: tightened ") + (cons.back().state_empty ? "state" : "input") + " set is empty");
    }
  }
  sol.constraints = cons.front();

  const int nx = 4 * (N + 1);
  const int nz = nx + 2 * N;
  auto xi = [](int k) { return 4 * k; };
  auto ui = [nx](int k) { return nx + 2 * k; };

  qp::QuadraticProgram prob;
  prob.H = qp::Matrix::Zero(nz, nz);
  prob.g = qp::Vector::Zero(nz);
  const Eigen::Vector4d xv = x.vec();
  for (int k = 0; k <= N; ++k) {
    const Eigen::Matrix4d & W = k < N ? cfg.Q : cfg.Q_f;
    prob.H.block<4, 4>(xi(k), xi(k)) += 2.0 * W;
    prob.g.segment<4>(xi(k)) -= 2.0 * W * r[k];
  }
  if (tube && cfg.initial_deviation_weight > 0.0) {
    prob.H.block<4, 4>(xi(0), xi(0)).diagonal().array() += 2.0 * cfg.initial_deviation_weight;
    prob.g.segment<4>(xi(0)) -= 2.0 * cfg.initial_deviation_weight * xv;
  }
  for (int k = 0; k < N; ++k) {
    prob.H.block<2, 2>(ui(k), ui(k)) += 2.0 * cfg.R;
    prob.g.segment<2>(ui(k)) -= 2.0 * cfg.R * ur[k];
  }

  // x - x_bar_0 in Z; a flat direction of Z (opposing rows with zero gap)
  // becomes an equality so the polish step sees a regular active set
  std::vector<std::pair<Eigen::RowVector4d, double>> z_eq;
  std::vector<std::pair<Eigen::RowVector4d, double>> z_in;
  if (tube) {
    const auto & Z = sol.z.set.hrep;
    std::vector<bool> used(static_cast<std::size_t>(Z.num_halfspaces()), false);
    for (Eigen::Index i = 0; i < Z.num_halfspaces(); ++i) {
      if (used[i]) {
        continue;
      }
      bool flat = false;
      for (Eigen::Index j = i + 1; j < Z.num_halfspaces() && !flat; ++j) {
        if (!used[j] && (Z.A.row(i) + Z.A.row(j)).cwiseAbs().maxCoeff() < 1e-12 && Z.b(i) + Z.b(j) <= 1e-12) {
          used[j] = true;
          flat = true;
        }
      }
      if (flat) {
        z_eq.emplace_back(Z.A.row(i), Z.b(i));
      } else {
        z_in.emplace_back(Z.A.row(i), Z.b(i));
      }
    }
  }

  const int n_eq = 4 * N + (tube ? static_cast<int>(z_eq.size()) : 4);
  prob.A_eq = qp::Matrix::Zero(n_eq, nz);
  prob.b_eq = qp::Vector::Zero(n_eq);
  for (int k = 0; k < N; ++k) {
    const dynamics::Linearization lin = dynamics::linearize(
      dynamics::VehicleState::from_vec(r[k]), dynamics::ControlInput::from_vec(ur[k]), params);
    prob.A_eq.block<4, 4>(4 * k, xi(k + 1)) = Eigen::Matrix4d::Identity();
    prob.A_eq.block<4, 4>(4 * k, xi(k)) = -lin.A;
    prob.A_eq.block<4, 2>(4 * k, ui(k)) = -lin.B;
    prob.b_eq.segment<4>(4 * k) = lin.c + w_mean;
  }
  if (!tube) {
    prob.A_eq.block<4, 4>(4 * N, xi(0)) = Eigen::Matrix4d::Identity();
    prob.b_eq.segment<4>(4 * N) = xv;
  }
  for (std::size_t i = 0; i < z_eq.size(); ++i) {
    // a (x - x_bar_0) = b
    const auto row = static_cast<Eigen::Index>(4 * N + i);
    prob.A_eq.block<1, 4>(row, xi(0)) = z_eq[i].first;
    prob.b_eq(row) = z_eq[i].first.dot(xv) - z_eq[i].second;
  }

  std::vector<std::pair<Eigen::RowVectorXd, double>> rows;
  for (const auto & [az, bz] : z_in) {
    Eigen::RowVectorXd a = Eigen::RowVectorXd::Zero(nz);
    a.segment<4>(xi(0)) = -az;
    const double margin = bz > 0.0 ? std::min(cfg.membership_margin, 0.25 * bz) : 0.0;
    rows.emplace_back(a, bz - margin - az.dot(xv));
  }
  for (int k = tube ? 0 : 1; k <= N; ++k) {
    const auto & Xb = cons[k].X_bar;
    for (Eigen::Index i = 0; i < Xb.num_halfspaces(); ++i) {
      Eigen::RowVectorXd a = Eigen::RowVectorXd::Zero(nz);
      a.segment<4>(xi(k)) = Xb.A.row(i);
      rows.emplace_back(a, Xb.b(i));
    }
  }
  for (int k = 0; k < N; ++k) {
    const auto & Ub = cons.front().U_bar;
    for (Eigen::Index i = 0; i < Ub.num_halfspaces(); ++i) {
      Eigen::RowVectorXd a = Eigen::RowVectorXd::Zero(nz);
      a.segment<2>(ui(k)) = Ub.A.row(i);
      rows.emplace_back(a, Ub.b(i));
    }
  }
  prob.A_in = qp::Matrix(static_cast<Eigen::Index>(rows.size()), nz);
  prob.b_in = qp::Vector(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    prob.A_in.row(static_cast<Eigen::Index>(i)) = rows[i].first;
    prob.b_in(static_cast<Eigen::Index>(i)) = rows[i].second;
  }

  const qp::Solution qs = qp::solve(prob, cfg.qp);
  sol.status = qs.status;
  sol.qp_iterations = qs.iterations;
  if (qs.status != qp::Status::Optimal) {
    throw Error(ErrorCode::InfeasibleMpc, "solve_step: QP returned " + qp::to_string(qs.status));
  }
  for (int k = 0; k <= N; ++k) {
    sol.nominal_states.push_back(qs.z.segment<4>(xi(k)));
  }
  for (int k = 0; k < N; ++k) {
    sol.nominal_inputs.push_back(qs.z.segment<2>(ui(k)));
  }
  double cost = 0.0;
  for (int k = 0; k <= N; ++k) {
    const Eigen::Vector4d e = sol.nominal_states[k] - r[k];
    cost += e.dot((k < N ? cfg.Q : cfg.Q_f) * e);
  }
  for (int k = 0; k < N; ++k) {
    const Eigen::Vector2d e = sol.nominal_inputs[k] - ur[k];
    cost += e.dot(cfg.R * e);
  }
  sol.cost = cost;
  int clamps = 0;
  sol.applied_input = ancillary(x, sol, params, &clamps);
  sol.clamped = clamps > 0;
  return sol;
}

dynamics::ControlInput ancillary(
  const dynamics::VehicleState & x, const TubeSolution & sol, const dynamics::VehicleParams & params,
  int * clamp_events)
{
  Eigen::Vector4d e = x.vec() - sol.nominal_states.front();
  e(3) = dynamics::wrap_angle(e(3));
  dynamics::ControlInput u = dynamics::ControlInput::from_vec(sol.nominal_inputs.front() + sol.K * e);
  if (dynamics::clamp_input(u, params) && clamp_events != nullptr) {
    ++*clamp_events;
  }
  return u;
}

dynamics::ControlInput fallback_input(const dynamics::VehicleParams & params)
{
  return {-params.a_max, 0.0};
}

nlohmann::json to_json(const TubeSolution & sol)
{
  nlohmann::json j;
  nlohmann::json xs = nlohmann::json::array();
  for (const auto & s : sol.nominal_states) {
    xs.push_back({s(0), s(1), s(2), s(3)});
  }
  nlohmann::json us = nlohmann::json::array();
  for (const auto & u : sol.nominal_inputs) {
    us.push_back({u(0), u(1)});
  }
  j["nominal_states"] = xs;
  j["nominal_inputs"] = us;
  j["K"] = {
    {sol.K(0, 0), sol.K(0, 1), sol.K(0, 2), sol.K(0, 3)}, {sol.K(1, 0), sol.K(1, 1), sol.K(1, 2), sol.K(1, 3)}};
  j["z_position"] = polytope::to_json(sol.z.set.position_hull);
  j["z_velocity_heading"] = polytope::to_json(sol.z.set.velocity_heading_hull);
  j["applied_input"] = {sol.applied_input.a, sol.applied_input.delta};
  j["qp_status"] = qp::to_string(sol.status);
  j["qp_iterations"] = sol.qp_iterations;
  j["cost"] = sol.cost;
  return j;
}

}  // namespace safeplan::mpc
