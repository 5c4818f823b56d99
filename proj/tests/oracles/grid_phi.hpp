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

#include <algorithm>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "expm.hpp"
#include "quadsafe/barrier.hpp"

namespace quadsafe::oracle {

/// Flow samples z(t, u) = Φ(t) x + Γ(t) u on a uniform t grid over [0, T],
/// computed with the independent expm oracle.
class FlowGrid {
 public:
  FlowGrid(const Eigen::MatrixXd& A_c, const Eigen::MatrixXd& B_c, double T, int n_t) {
    for (int i = 0; i < n_t; ++i) {
      const double t = T * i / (n_t - 1);
      ZohOracle f = zoh(A_c, B_c, t);
      Phi_.push_back(std::move(f.A));
      Gamma_.push_back(std::move(f.B));
    }
  }
  int size() const { return static_cast<int>(Phi_.size()); }
  Eigen::VectorXd state(int i, const Eigen::VectorXd& x, const Eigen::VectorXd& u) const {
    return Phi_[static_cast<std::size_t>(i)] * x + Gamma_[static_cast<std::size_t>(i)] * u;
  }

 private:
  std::vector<Eigen::MatrixXd> Phi_;
  std::vector<Eigen::MatrixXd> Gamma_;
};

/// min over the grid of H(z(t, u), u) − H(x, u), inputs held constant over
/// [0, t]. Every grid point is a realizable state, so the result is an
/// upper estimate of the true infimum.
inline double grid_phi(const BarrierChain& chain, const Eigen::VectorXd& x, const FlowGrid& flow,
                       const std::vector<Eigen::VectorXd>& inputs) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& u : inputs) {
    const double base = chain.H(x, u);
    for (int i = 0; i < flow.size(); ++i) best = std::min(best, chain.H(flow.state(i, x, u), u) - base);
  }
  return best;
}

/// Tensor grid with n points per axis over the box, vertices included.
inline std::vector<Eigen::VectorXd> input_grid(const InputBox& U, int n) {
  const Eigen::Index m = U.lower.size();
  std::vector<Eigen::VectorXd> out;
  std::vector<int> idx(static_cast<std::size_t>(m), 0);
  while (true) {
    Eigen::VectorXd u(m);
    for (Eigen::Index j = 0; j < m; ++j)
      u(j) = U.lower(j) + (U.upper(j) - U.lower(j)) * idx[static_cast<std::size_t>(j)] / (n - 1);
    out.push_back(u);
    Eigen::Index j = 0;
    for (; j < m; ++j) {
      if (++idx[static_cast<std::size_t>(j)] < n) break;
      idx[static_cast<std::size_t>(j)] = 0;
    }
    if (j == m) break;
  }
  return out;
}

}  // namespace quadsafe::oracle
