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

#include <iosfwd>
#include <memory>
#include <vector>

#include <Eigen/Core>

namespace quadsafe {

/// ‖F x + g‖₂ ≤ aᵀ x + b.
struct SocRow {
  Eigen::MatrixXd F;
  Eigen::VectorXd g;
  Eigen::VectorXd a;
  double b{0.0};
};

/// cᵀ x ≥ d.
struct LinRow {
  Eigen::VectorXd c;
  double d{0.0};
};

/// minimize ½ xᵀ H x + fᵀ x + offset
/// subject to Aeq x = beq, lb ≤ x ≤ ub, linear rows and second-order cone rows.
/// Infinite bounds are allowed and ignored.
struct ConeProgram {
  Eigen::MatrixXd H;
  Eigen::VectorXd f;
  double offset{0.0};
  Eigen::MatrixXd Aeq;
  Eigen::VectorXd beq;
  Eigen::VectorXd lb;
  Eigen::VectorXd ub;
  std::vector<LinRow> lin_rows;
  std::vector<SocRow> soc_rows;

  /// Unconstrained program of dimension n with zero cost.
  static ConeProgram empty(Eigen::Index n);

  Eigen::Index n() const { return f.size(); }
  double objective(const Eigen::VectorXd& x) const;
  /// Throws ConfigError on inconsistent dimensions or a cost that is not
  /// symmetric positive semidefinite (min eigenvalue ≥ −1e−9). The
  /// eigenvalue test can be skipped when the caller already vetted H.
  void validate(bool check_psd = true) const;
};

enum class SolveStatus { kOptimal, kInfeasible, kMaxIter };
const char* to_string(SolveStatus s);

/// Multipliers in the convention
///   H x + f − Aeqᵀ ν − λ_lb + λ_ub − Σ μ_i c_i − Σ (t_j a_j + F_jᵀ y_j) = 0,
/// with λ, μ ≥ 0 and (t_j, y_j) in the second-order cone.
struct Duals {
  Eigen::VectorXd eq;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  Eigen::VectorXd lin;
  std::vector<Eigen::VectorXd> soc;
};

struct KktResiduals {
  double equality{0.0};       // ‖Aeq x − beq‖∞
  double box{0.0};            // largest bound violation
  double cone{0.0};           // max(0, ‖F x + g‖ − aᵀx − b)
  double linear{0.0};         // max(0, d − cᵀ x)
  double stationarity{0.0};   // ‖∇ₓ L‖∞
  double complementarity{0.0};

  double primal() const;
};

/// Without duals the stationarity entry is the gradient norm projected onto
/// the null space of Aeq (inequality multipliers taken as zero) and the
/// complementarity entry is zero.
KktResiduals kkt_residuals(const ConeProgram& p, const Eigen::VectorXd& x, const Duals* duals = nullptr);

struct Solution {
  Eigen::VectorXd x;
  SolveStatus status{SolveStatus::kMaxIter};
  int iterations{0};
  double solve_time{0.0};  // s, wall clock
  double objective{0.0};
  KktResiduals kkt;
  Duals duals;
};

struct SolverConfig {
  int max_iter{100};
  /// Relative tolerances on the reduced residuals and duality gap.
  double feas_tol{1e-10};
  double gap_tol{1e-10};
  double step_fraction{0.99};
};

/// Dense primal-dual interior-point solver. Equalities are eliminated with a
/// column-pivoted QR null-space basis, cached across calls while Aeq is
/// unchanged bit for bit. Deterministic for identical inputs and config.
///
/// One instance per thread; instances share nothing.
class ConeSolver {
 public:
  explicit ConeSolver(SolverConfig cfg = {});
  ~ConeSolver();
  ConeSolver(ConeSolver&&) noexcept;
  ConeSolver& operator=(ConeSolver&&) noexcept;

  Solution solve(const ConeProgram& p);
  const SolverConfig& config() const { return cfg_; }

 private:
  struct Workspace;
  SolverConfig cfg_;
  std::unique_ptr<Workspace> ws_;
};

/// One-shot convenience wrapper.
Solution solve(const ConeProgram& p, const SolverConfig& cfg = {});

/// Plain-text fixture: dimensions then dense row-major matrices, 17 significant digits.
void dump_program(const ConeProgram& p, std::ostream& os);
ConeProgram load_program(std::istream& is);

}  // namespace quadsafe
