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


#include "safeplan/qp.hpp"

#include "safeplan/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>

namespace safeplan::qp
{
namespace
{
constexpr double kInf = std::numeric_limits<double>::infinity();

double inf_norm(const Vector & v) { return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>(); }

// Combined form l <= A z <= u used internally.
struct Combined
{
  Matrix H;
  Vector g;
  Matrix A;
  Vector l;
  Vector u;
  Eigen::Index m_eq{0};
};

Combined combine(const QuadraticProgram & qp)
{
  Combined c;
  const Eigen::Index n = qp.num_vars();
  const Eigen::Index me = qp.A_eq.rows();
  const Eigen::Index mi = qp.A_in.rows();
  c.H = 0.5 * (qp.H + qp.H.transpose());
  c.g = qp.g;
  c.A.resize(me + mi, n);
  c.l.resize(me + mi);
  c.u.resize(me + mi);
  if (me > 0) {
    c.A.topRows(me) = qp.A_eq;
    c.l.head(me) = qp.b_eq;
    c.u.head(me) = qp.b_eq;
  }
  if (mi > 0) {
    c.A.bottomRows(mi) = qp.A_in;
    c.l.tail(mi).setConstant(-kInf);
    c.u.tail(mi) = qp.b_in;
  }
  c.m_eq = me;
  return c;
}

double objective(const QuadraticProgram & qp, const Vector & z) { return 0.5 * z.dot(qp.H * z) + qp.g.dot(z); }

// Split combined multipliers into equality and inequality parts.
void split(const QuadraticProgram & qp, const Vector & y, Solution & s)
{
  const Eigen::Index me = qp.A_eq.rows();
  s.lambda_eq = y.head(me);
  s.mu_in = y.tail(qp.A_in.rows()).cwiseMax(0.0);
}

// Solves the equality-constrained problem on a guessed active set.
bool polish(const QuadraticProgram & qp, const Combined & c, const Vector & z_admm, const Vector & y_admm, const Settings & st, Solution & out)
{
  const Eigen::Index n = qp.num_vars();
  const Eigen::Index m = c.A.rows();
  std::vector<Eigen::Index> active;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (i < c.m_eq) {
      active.push_back(i);
      continue;
    }
    const double ax = c.A.row(i).dot(z_admm);
    if (c.u(i) - ax < y_admm(i) || std::abs(c.u(i) - ax) < 1e-9 * (1.0 + std::abs(c.u(i)))) {
      active.push_back(i);
    }
  }
  const auto na = static_cast<Eigen::Index>(active.size());
  Matrix Aa(na, n);
  Vector ba(na);
  for (Eigen::Index k = 0; k < na; ++k) {
    Aa.row(k) = c.A.row(active[k]);
    ba(k) = c.u(active[k]);
  }
  const double delta = 1e-9;
  Matrix K = Matrix::Zero(n + na, n + na);
  K.topLeftCorner(n, n) = c.H;
  K.topRightCorner(n, na) = Aa.transpose();
  K.bottomLeftCorner(na, n) = Aa;
  Matrix Kreg = K;
  Kreg.topLeftCorner(n, n).diagonal().array() += delta;
  Kreg.bottomRightCorner(na, na).diagonal().array() -= delta;
  Vector rhs(n + na);
  rhs << -c.g, ba;
  Eigen::PartialPivLU<Matrix> lu(Kreg);
  Vector sol = lu.solve(rhs);
  for (int refine = 0; refine < 5; ++refine) {
    sol += lu.solve(rhs - K * sol);
  }
  if (!sol.allFinite()) {
    return false;
  }
  Vector y = Vector::Zero(m);
  for (Eigen::Index k = 0; k < na; ++k) {
    y(active[k]) = sol(n + k);
  }
  const Vector z = sol.head(n);
  Solution cand;
  cand.z = z;
  cand.lambda_eq = y.head(c.m_eq);
  cand.mu_in = y.tail(m - c.m_eq);
  const KktResiduals r = kkt_residuals(qp, z, cand.lambda_eq, cand.mu_in);
  if (r.primal > st.tol || r.dual > st.tol || r.stationarity > st.tol || r.complementarity > st.tol) {
    return false;
  }
  out.z = z;
  out.lambda_eq = cand.lambda_eq;
  out.mu_in = cand.mu_in.cwiseMax(0.0);
  out.polished = true;
  return true;
}

}  // namespace

std::string to_string(Status s)
{
  switch (s) {
    case Status::Optimal: return "Optimal";
    case Status::Infeasible: return "Infeasible";
    case Status::MaxIter: return "MaxIter";
  }
  return "Unknown";
}

double KktResiduals::max() const { return std::max({stationarity, primal, dual, complementarity}); }

void validate(const QuadraticProgram & qp)
{
  const Eigen::Index n = qp.g.size();
  auto fail = [](const char * what) { throw Error(ErrorCode::DimensionMismatch, std::string("QP: ") + what); };
  if (qp.H.rows() != n || qp.H.cols() != n) fail("H must be n x n");
  if (qp.A_eq.rows() > 0 && qp.A_eq.cols() != n) fail("A_eq column count");
  if (qp.A_eq.rows() != qp.b_eq.size()) fail("A_eq / b_eq rows");
  if (qp.A_in.rows() > 0 && qp.A_in.cols() != n) fail("A_in column count");
  if (qp.A_in.rows() != qp.b_in.size()) fail("A_in / b_in rows");
}

KktResiduals kkt_residuals(const QuadraticProgram & qp, const Vector & z, const Vector & lambda_eq, const Vector & mu_in)
{
  KktResiduals r;
  Vector grad = qp.H * z + qp.g;
  if (qp.A_eq.rows() > 0) {
    grad += qp.A_eq.transpose() * lambda_eq;
    r.primal = std::max(r.primal, inf_norm(qp.A_eq * z - qp.b_eq));
  }
  if (qp.A_in.rows() > 0) {
    grad += qp.A_in.transpose() * mu_in;
    const Vector slack = qp.A_in * z - qp.b_in;
    r.primal = std::max(r.primal, std::max(0.0, slack.maxCoeff()));
    r.dual = std::max(0.0, -mu_in.minCoeff());
    r.complementarity = inf_norm(mu_in.cwiseProduct(slack));
  }
  r.stationarity = inf_norm(grad);
  return r;
}

Solution solve(const QuadraticProgram & qp, const Settings & st, const Vector * warm_start)
{
  validate(qp);
  const Eigen::Index n = qp.num_vars();
  Combined c = combine(qp);
  const Eigen::Index m = c.A.rows();
  Solution out;

  if (m == 0) {
    Eigen::LDLT<Matrix> ldlt(c.H);
    out.z = ldlt.solve(-c.g);
    if (!out.z.allFinite() || ldlt.info() != Eigen::Success) {
      Matrix reg = c.H;
      reg.diagonal().array() += 1e-8;
      out.z = reg.ldlt().solve(-c.g);
    }
    out.lambda_eq.resize(0);
    out.mu_in.resize(0);
    out.status = Status::Optimal;
    out.objective = objective(qp, out.z);
    return out;
  }

  // Ruiz equilibration of [H A'; A 0]
  Vector D = Vector::Ones(n);
  Vector E = Vector::Ones(m);
  double cost_scale = 1.0;
  Matrix Hs = c.H;
  Vector gs = c.g;
  Matrix As = c.A;
  if (st.scaling) {
    for (int it = 0; it < 15; ++it) {
      Vector dcol(n);
      for (Eigen::Index j = 0; j < n; ++j) {
        const double hmax = Hs.col(j).lpNorm<Eigen::Infinity>();
        const double amax = As.col(j).lpNorm<Eigen::Infinity>();
        const double v = std::max(hmax, amax);
        dcol(j) = v > 1e-12 ? 1.0 / std::sqrt(v) : 1.0;
      }
      Vector erow(m);
      for (Eigen::Index i = 0; i < m; ++i) {
        const double v = As.row(i).lpNorm<Eigen::Infinity>();
        erow(i) = v > 1e-12 ? 1.0 / std::sqrt(v) : 1.0;
      }
      Hs = dcol.asDiagonal() * Hs * dcol.asDiagonal();
      As = erow.asDiagonal() * As * dcol.asDiagonal();
      gs = dcol.asDiagonal() * gs;
      D = D.cwiseProduct(dcol);
      E = E.cwiseProduct(erow);
    }
    const double hnorm = Hs.colwise().lpNorm<Eigen::Infinity>().mean();
    const double gnorm = inf_norm(gs);
    const double s = std::max(hnorm, gnorm);
    cost_scale = s > 1e-12 ? 1.0 / s : 1.0;
    Hs *= cost_scale;
    gs *= cost_scale;
  }
  const Vector ls = E.cwiseProduct(c.l);
  const Vector us = E.cwiseProduct(c.u);

  Vector rho_vec(m);
  double rho = st.rho;
  auto set_rho = [&]() {
    for (Eigen::Index i = 0; i < m; ++i) {
      rho_vec(i) = (i < c.m_eq) ? 1e3 * rho : rho;
    }
  };
  set_rho();
  Eigen::LLT<Matrix> llt;
  auto factor = [&]() {
    Matrix K = Hs + As.transpose() * rho_vec.asDiagonal() * As;
    K.diagonal().array() += st.sigma;
    llt.compute(K);
  };
  factor();

  Vector x = Vector::Zero(n);
  if (warm_start != nullptr && warm_start->size() == n) {
    x = warm_start->cwiseQuotient(D);
  }
  Vector z = (As * x).cwiseMax(ls).cwiseMin(us);
  Vector y = Vector::Zero(m);
  Vector y_prev = y;
  int certificate_run = 0;

  auto unscaled_residuals = [&](double & r_prim, double & r_dual, double & e_prim, double & e_dual) {
    const Vector Ax = (As * x).cwiseQuotient(E);
    const Vector zu = z.cwiseQuotient(E);
    r_prim = inf_norm(Ax - zu);
    const Vector Hx = (Hs * x).cwiseQuotient(D) / cost_scale;
    const Vector Aty = (As.transpose() * y).cwiseQuotient(D) / cost_scale;
    const Vector gu = gs.cwiseQuotient(D) / cost_scale;
    r_dual = inf_norm(Hx + gu + Aty);
    e_prim = st.tol + st.tol * std::max(inf_norm(Ax), inf_norm(zu));
    e_dual = st.tol + st.tol * std::max({inf_norm(Hx), inf_norm(Aty), inf_norm(gu)});
  };

  auto finish = [&](Status status, int iters) {
    out.status = status;
    out.iterations = iters;
    const Vector zx = D.cwiseProduct(x);
    const Vector yu = E.cwiseProduct(y) / cost_scale;
    out.z = zx;
    split(qp, yu, out);
    if (status == Status::Infeasible) {
      out.objective = kInf;
      return out;
    }
    out.objective = objective(qp, out.z);
    return out;
  };

  for (int k = 1; k <= st.max_iter; ++k) {
    const Vector rhs = st.sigma * x - gs + As.transpose() * (rho_vec.cwiseProduct(z) - y);
    const Vector x_tilde = llt.solve(rhs);
    const Vector z_tilde = As * x_tilde;
    x = st.alpha * x_tilde + (1.0 - st.alpha) * x;
    const Vector z_relaxed = st.alpha * z_tilde + (1.0 - st.alpha) * z;
    const Vector z_next = (z_relaxed + y.cwiseQuotient(rho_vec)).cwiseMax(ls).cwiseMin(us);
    y_prev = y;
    y += rho_vec.cwiseProduct(z_relaxed - z_next);
    z = z_next;

    // primal infeasibility certificate on the change of y
    const Vector dy = y - y_prev;
    const double dy_norm = inf_norm(dy);
    bool certificate = false;
    if (dy_norm > 1e-12) {
      double support = 0.0;
      bool bounded = true;
      for (Eigen::Index i = 0; i < m; ++i) {
        if (dy(i) > 0.0) {
          if (!std::isfinite(us(i))) {
            bounded = dy(i) <= st.eps_infeasible * dy_norm;
            if (!bounded) break;
            continue;
          }
          support += us(i) * dy(i);
        } else if (dy(i) < 0.0) {
          if (!std::isfinite(ls(i))) {
            bounded = -dy(i) <= st.eps_infeasible * dy_norm;
            if (!bounded) break;
            continue;
          }
          support += ls(i) * dy(i);
        }
      }
      const Vector Atdy = (As.transpose() * dy).cwiseQuotient(D);
      certificate = bounded && inf_norm(Atdy) <= st.eps_infeasible * dy_norm && support < -st.eps_infeasible * dy_norm;
    }
    certificate_run = certificate ? certificate_run + 1 : 0;
    if (certificate_run >= st.infeasibility_patience) {
      return finish(Status::Infeasible, k);
    }

    if (k % st.check_interval == 0 || k == st.max_iter) {
      double r_prim = 0, r_dual = 0, e_prim = 0, e_dual = 0;
      unscaled_residuals(r_prim, r_dual, e_prim, e_dual);
      const bool converged = r_prim <= e_prim && r_dual <= e_dual;
      const bool close = r_prim <= 1e3 * e_prim && r_dual <= 1e3 * e_dual;
      if (st.polish && (converged || close)) {
        Solution trial = out;
        if (polish(qp, c, D.cwiseProduct(x), E.cwiseProduct(y) / cost_scale, st, trial)) {
          out = trial;
          out.status = Status::Optimal;
          out.iterations = k;
          out.objective = objective(qp, out.z);
          return out;
        }
      }
      if (converged) {
        Solution s = finish(Status::Optimal, k);
        const KktResiduals r = kkt_residuals(qp, s.z, s.lambda_eq, s.mu_in);
        if (r.primal < st.tol) {
          return s;
        }
      }
      if (k % st.rho_update_interval == 0) {
        const double prim_scale = std::max(inf_norm(As * x), inf_norm(z));
        const double dual_scale = std::max({inf_norm(Hs * x), inf_norm(As.transpose() * y), inf_norm(gs)});
        const double rp = inf_norm(As * x - z) / std::max(prim_scale, 1e-12);
        const double rd = inf_norm(Hs * x + gs + As.transpose() * y) / std::max(dual_scale, 1e-12);
        const double ratio = std::sqrt(rp / std::max(rd, 1e-12));
        const double rho_new = std::clamp(rho * ratio, 1e-6, 1e6);
        if (rho_new > 5.0 * rho || rho_new < 0.2 * rho) {
          rho = rho_new;
          set_rho();
          factor();
        }
      }
    }
  }
  return finish(Status::MaxIter, st.max_iter);
}

}  // namespace safeplan::qp
