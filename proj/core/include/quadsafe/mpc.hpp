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

#include <string>
#include <vector>

#include <Eigen/Core>

#include "quadsafe/augmented_model.hpp"
#include "quadsafe/barrier.hpp"
#include "quadsafe/cone_solver.hpp"
#include "quadsafe/flatness.hpp"
#include "quadsafe/quad_model.hpp"

namespace quadsafe {

struct MpcConfig {
  int N{20};
  double T{0.1};
  AugMatrix Q{default_Q()};
  AugMatrix P{10.0 * default_Q()};
  Eigen::Matrix3d R{0.01 * Eigen::Matrix3d::Identity()};
  Eigen::Vector3d s_min{-40.0, -40.0, -40.0};
  Eigen::Vector3d s_max{40.0, 40.0, 40.0};
  double f_max{12.0};
  /// Replace the thrust cone by the inscribed box |m (a_v − g)_j| ≤ f_max / √3.
  bool relax_to_qp{false};
  /// Shared class-K gain p of every α_i(x) = p x.
  double barrier_gain{5.0};
  ReachOptions reach{};
  SolverConfig solver{};

  /// diag(100 I₃, I₉).
  static AugMatrix default_Q();
  /// Throws ConfigError listing every violated invariant.
  void validate() const;
};

enum class ControllerType { kSdHocbf, kHocbfFilter, kMpcDc, kDcbf, kDhocbf };

struct ControllerKind {
  ControllerType type{ControllerType::kSdHocbf};
  /// Decay rate of the discrete barrier rows, in (0, 1].
  double lambda{0.2};
  /// Prediction indices i of the rows h(z_{i+1}) ≥ (1 − λ) h(z_i) for dhocbf.
  std::vector<int> dhocbf_steps{0, 1, 3, 4};

  std::string name() const;
  /// Throws ConfigError naming the valid controllers.
  static ControllerType parse_type(const std::string& name);
  static const std::vector<std::string>& valid_names();
  void validate(int horizon) const;
};

/// Reference samples z̄_{i|k}, s̄_{i|k} for i = 0 … N.
using ReferenceWindow = std::vector<AugmentedReference>;

/// Index helpers for the stacked decision vector [z_1 … z_N, s_0 … s_{N−1}].
struct MpcLayout {
  int N{0};
  Eigen::Index dim() const { return static_cast<Eigen::Index>(15 * N); }
  /// Offset of z_i, i = 1 … N.
  Eigen::Index z(int i) const { return static_cast<Eigen::Index>(kAugDim * (i - 1)); }
  /// Offset of s_i, i = 0 … N − 1.
  Eigen::Index s(int i) const { return static_cast<Eigen::Index>(kAugDim * N + kInputDim * i); }
};

/// Cost, dynamics, input bounds and thrust-cone rows shared by every
/// controller; the safety rows are added on top.
class MpcAssembler {
 public:
  MpcAssembler(const MpcConfig& cfg, const QuadParams& quad);

  const MpcConfig& config() const { return cfg_; }
  const MpcLayout& layout() const { return layout_; }
  const DiscreteModel& model() const { return model_; }
  const ContinuousModel& continuous() const { return cont_; }
  const QuadParams& quad() const { return quad_; }
  InputBox input_box() const;

  ConeProgram base_program(const AugVector& z_k, const ReferenceWindow& refs) const;
  /// State z_i (i = 0 … N) read from a solution; z_0 is z_k.
  AugVector state(const Eigen::VectorXd& x, const AugVector& z_k, int i) const;
  Eigen::Vector3d input(const Eigen::VectorXd& x, int i) const;

 private:
  MpcConfig cfg_;
  QuadParams quad_;
  MpcLayout layout_;
  ContinuousModel cont_;
  DiscreteModel model_;
  Eigen::MatrixXd H_;
  Eigen::MatrixXd Aeq_;
};

/// The SdHOCBF-MPC: base program plus, per barrier, the sampled-data row
/// L_g h_{ρ−1}(z_k) s_0 ≥ −L_f h_{ρ−1}(z_k) − p h_{ρ−1}(z_k) − φ on the first input.
ConeProgram build_sdhocbf_mpc(const MpcAssembler& assembler, const AugVector& z_k, const ReferenceWindow& refs,
                              const std::vector<BarrierChain>& chains, const std::vector<double>& phis);

/// Same, computing φ from reach tables of the assembler's model.
ConeProgram build_sdhocbf_mpc(const MpcAssembler& assembler, const AugVector& z_k, const ReferenceWindow& refs,
                              const std::vector<BarrierChain>& chains);

/// Safe filter: min ‖s − s_ref‖² subject to the continuous HOCBF rows (φ = 0),
/// the input box and the thrust cone of the next predicted state.
ConeProgram build_hocbf_filter(const MpcAssembler& assembler, const AugVector& z_k, const Eigen::Vector3d& s_ref,
                               const std::vector<BarrierChain>& chains);

/// Halfspace h(p̄) + ∇h(p̄)ᵀ (p − p̄) of a barrier at the linearization point p̄.
/// Points inside the obstacle are first projected radially onto its boundary.
struct BarrierLinearization {
  Eigen::Vector3d grad{Eigen::Vector3d::Zero()};
  double offset{0.0};  // value = gradᵀ p + offset
  double value(const Eigen::Vector3d& p) const { return grad.dot(p) + offset; }
};
BarrierLinearization linearize_barrier(const BarrierSpec& b, const Eigen::Vector3d& p_bar);

struct StepDiagnostics {
  SolveStatus status{SolveStatus::kOptimal};
  double solve_time{0.0};  // s, all solves of the step
  int iterations{0};       // interior-point iterations, summed
  int scp_iterations{0};
  bool scp_converged{true};
  bool fallback{false};  // previous input reused
  std::vector<double> h;    // h₀ of each barrier at z_k
  std::vector<double> phi;  // compensation terms (sdhocbf only, else 0)
  std::vector<bool> active; // safety row of each barrier binding at the applied input
};

struct StepResult {
  Eigen::Vector3d s_star{Eigen::Vector3d::Zero()};
  StepDiagnostics diag;
  /// Full decision vector of the last successful solve (empty for the filter).
  Eigen::VectorXd plan;
};

/// Outer-loop controller instance. Holds the solver workspace, the previous
/// input for the infeasibility fallback and the previous plan used to seed
/// the sequential convex baselines.
class OuterController {
 public:
  OuterController(const ControllerKind& kind, const MpcConfig& cfg, const QuadParams& quad,
                  const std::vector<BarrierSpec>& barriers);

  StepResult solve_step(const AugVector& z_k, const ReferenceWindow& refs);

  const ControllerKind& kind() const { return kind_; }
  const MpcAssembler& assembler() const { return assembler_; }
  const std::vector<BarrierChain>& chains() const { return chains_; }
  int consecutive_infeasible() const { return consecutive_infeasible_; }
  int infeasible_count() const { return infeasible_count_; }

 private:
  StepResult solve_sdhocbf(const AugVector& z_k, const ReferenceWindow& refs);
  StepResult solve_filter(const AugVector& z_k, const ReferenceWindow& refs);
  StepResult solve_scp(const AugVector& z_k, const ReferenceWindow& refs);
  /// Rows of the discrete baselines, linearized about the incumbent plan.
  void add_discrete_rows(ConeProgram& prog, const AugVector& z_k, const Eigen::VectorXd& incumbent) const;
  Eigen::VectorXd seed_plan(const AugVector& z_k, const ReferenceWindow& refs) const;
  Solution run(const ConeProgram& prog, StepDiagnostics& diag);

  ControllerKind kind_;
  QuadParams quad_;
  MpcAssembler assembler_;
  std::vector<BarrierSpec> barriers_;
  std::vector<BarrierChain> chains_;
  ReachTables tables_;
  ConeSolver solver_;
  ConeSolver filter_solver_;
  Eigen::Vector3d previous_input_{Eigen::Vector3d::Zero()};
  Eigen::VectorXd previous_plan_;
  int consecutive_infeasible_{0};
  int infeasible_count_{0};
};

}  // namespace quadsafe
