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

#pragma once

#include <random>

#include <Eigen/Dense>

#include "quadsafe/cone_solver.hpp"

namespace quadsafe::oracle {

/// Small random cone program that is feasible by construction: every row
/// holds at a hidden point x0 with some slack. A few rows get slacks in the
/// thousands, which is what far-inactive safety rows look like in practice.
inline ConeProgram random_socp(std::mt19937& rng) {
  std::normal_distribution<double> N(0.0, 1.0);
  std::uniform_int_distribution<int> dim(2, 9);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const int n = dim(rng);
  ConeProgram p = ConeProgram::empty(n);

  Eigen::MatrixXd M(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) M(i, j) = N(rng);
  p.H = M.transpose() * M / n + 0.05 * Eigen::MatrixXd::Identity(n, n);
  if (U(rng) < 0.2) p.H.setZero();  // linear objective, bounded by the box
  for (int i = 0; i < n; ++i) p.f(i) = 3.0 * N(rng);
  p.offset = N(rng);

  Eigen::VectorXd x0(n);
  for (int i = 0; i < n; ++i) x0(i) = 0.5 * N(rng);

  const int me = static_cast<int>(U(rng) * (n / 3 + 1));
  p.Aeq.resize(me, n);
  for (int i = 0; i < me; ++i)
    for (int j = 0; j < n; ++j) p.Aeq(i, j) = N(rng);
  p.beq = p.Aeq * x0;

  for (int i = 0; i < n; ++i) {
    p.lb(i) = x0(i) - 0.5 - 2.0 * U(rng);
    p.ub(i) = x0(i) + 0.5 + 2.0 * U(rng);
  }

  auto slack = [&]() { return U(rng) < 0.15 ? 1000.0 + 5000.0 * U(rng) : 0.05 + U(rng); };
  const int n_lin = static_cast<int>(U(rng) * 4);
  for (int k = 0; k < n_lin; ++k) {
    LinRow r;
    r.c.resize(n);
    for (int j = 0; j < n; ++j) r.c(j) = N(rng);
    r.d = r.c.dot(x0) - slack();
    p.lin_rows.push_back(r);
  }
  const int n_soc = static_cast<int>(U(rng) * 4);
  for (int k = 0; k < n_soc; ++k) {
    SocRow r;
    const int m = 1 + static_cast<int>(U(rng) * 3);
    r.F.resize(m, n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) r.F(i, j) = N(rng);
    r.g.resize(m);
    for (int i = 0; i < m; ++i) r.g(i) = N(rng);
    r.a.resize(n);
    for (int j = 0; j < n; ++j) r.a(j) = 0.3 * N(rng);
    r.b = (r.F * x0 + r.g).norm() - r.a.dot(x0) + slack();
    p.soc_rows.push_back(r);
  }
  return p;
}

}  // namespace quadsafe::oracle
