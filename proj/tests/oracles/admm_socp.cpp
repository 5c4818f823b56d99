/*
 Copyright 2026 The quadsafe Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include "admm_socp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace quadsafe::oracle {

Eigen::VectorXd project_soc(const Eigen::VectorXd& v) {
  const double t = v(0);
  const Eigen::VectorXd y = v.tail(v.size() - 1);
  const double ny = y.norm();
  if (ny <= t) return v;
  if (ny <= -t) return Eigen::VectorXd::Zero(v.size());
  Eigen::VectorXd out(v.size());
  const double a = 0.5 * (t + ny);
  out(0) = a;
  out.tail(v.size() - 1) = (a / ny) * y;
  return out;
}

namespace {

// Stack every constraint as y = K x + k with y restricted to a simple set.
struct Stack {
  Eigen::MatrixXd K;
  Eigen::VectorXd k;
  Eigen::VectorXd lo;  // per-row interval for the non-cone part
  Eigen::VectorXd hi;
  Eigen::Index n_interval{0};
  std::vector<std::pair<Eigen::Index, Eigen::Index>> cones;  // (offset, size)
};

Stack build_stack(const ConeProgram& p) {
  const Eigen::Index n = p.n();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<Eigen::VectorXd> rows;
  std::vector<double> off, lo, hi;
  for (Eigen::Index i = 0; i < p.Aeq.rows(); ++i) {
    rows.push_back(p.Aeq.row(i).transpose());
    off.push_back(-p.beq(i));
    lo.push_back(0.0);
    hi.push_back(0.0);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!std::isfinite(p.lb(i)) && !std::isfinite(p.ub(i))) continue;
    rows.push_back(Eigen::VectorXd::Unit(n, i));
    off.push_back(0.0);
    lo.push_back(std::isfinite(p.lb(i)) ? p.lb(i) : -inf);
    hi.push_back(std::isfinite(p.ub(i)) ? p.ub(i) : inf);
  }
  for (const auto& r : p.lin_rows) {
    rows.push_back(r.c);
    off.push_back(-r.d);
    lo.push_back(0.0);
    hi.push_back(inf);
  }
  Stack s;
  s.n_interval = static_cast<Eigen::Index>(rows.size());
  Eigen::Index total = s.n_interval;
  for (const auto& c : p.soc_rows) total += 1 + c.F.rows();
  s.K.resize(total, n);
  s.k.resize(total);
  s.lo.resize(s.n_interval);
  s.hi.resize(s.n_interval);
  for (Eigen::Index i = 0; i < s.n_interval; ++i) {
    s.K.row(i) = rows[static_cast<std::size_t>(i)].transpose();
    s.k(i) = off[static_cast<std::size_t>(i)];
    s.lo(i) = lo[static_cast<std::size_t>(i)];
    s.hi(i) = hi[static_cast<std::size_t>(i)];
  }
  Eigen::Index at = s.n_interval;
  for (const auto& c : p.soc_rows) {
    const Eigen::Index m = c.F.rows();
    s.K.row(at) = c.a.transpose();
    s.k(at) = c.b;
    s.K.block(at + 1, 0, m, n) = c.F;
    s.k.segment(at + 1, m) = c.g;
    s.cones.emplace_back(at, m + 1);
    at += m + 1;
  }
  return s;
}

Eigen::VectorXd project(const Stack& s, const Eigen::VectorXd& v) {
  Eigen::VectorXd out = v;
  for (Eigen::Index i = 0; i < s.n_interval; ++i) out(i) = std::clamp(v(i), s.lo(i), s.hi(i));
  for (const auto& [o, m] : s.cones) out.segment(o, m) = project_soc(v.segment(o, m));
  return out;
}

}  // namespace

AdmmResult admm_solve(const ConeProgram& p, int max_iter, double tol) {
  const Eigen::Index n = p.n();
  const Stack s = build_stack(p);
  const double sigma = 1e-8;
  double rho = 1.0;
  const double relax = 1.6;

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd y = project(s, s.K * x + s.k);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(s.K.rows());  // scaled dual

  const Eigen::MatrixXd KtK = s.K.transpose() * s.K;
  auto factor = [&](double r) {
    return Eigen::LDLT<Eigen::MatrixXd>(p.H + sigma * Eigen::MatrixXd::Identity(n, n) + r * KtK);
  };
  Eigen::LDLT<Eigen::MatrixXd> ldlt = factor(rho);

  AdmmResult res;
  for (int it = 1; it <= max_iter; ++it) {
    const Eigen::VectorXd rhs = sigma * x - p.f - rho * s.K.transpose() * (s.k - y + w);
    x = ldlt.solve(rhs);
    const Eigen::VectorXd Kx = s.K * x + s.k;
    const Eigen::VectorXd Kx_r = relax * Kx + (1.0 - relax) * y;
    const Eigen::VectorXd y_old = y;
    y = project(s, Kx_r + w);
    w += Kx_r - y;

    if (it % 50 != 0) continue;
    const double r_prim = (Kx - y).cwiseAbs().maxCoeff();
    const double r_dual = (rho * s.K.transpose() * (y - y_old)).cwiseAbs().maxCoeff();
    const Eigen::VectorXd grad = p.H * x + p.f;
    const double scale_p = std::max({1.0, Kx.cwiseAbs().maxCoeff(), y.cwiseAbs().maxCoeff()});
    const double scale_d = std::max(1.0, grad.cwiseAbs().maxCoeff());
    res.iterations = it;
    if (r_prim <= tol * scale_p && r_dual <= tol * scale_d) {
      res.converged = true;
      break;
    }
    // Residual balancing keeps ρ in a sensible range.
    if (it % 500 == 0) {
      const double ratio = std::sqrt((r_prim / scale_p) / std::max(r_dual / scale_d, 1e-300));
      if (ratio > 5.0 || ratio < 0.2) {
        const double new_rho = std::clamp(rho * ratio, 1e-6, 1e6);
        w *= rho / new_rho;
        rho = new_rho;
        ldlt = factor(rho);
      }
    }
  }
  res.x = x;
  res.objective = p.objective(x);
  res.primal_residual = (s.K * x + s.k - project(s, s.K * x + s.k)).cwiseAbs().maxCoeff();
  return res;
}

}  // namespace quadsafe::oracle
