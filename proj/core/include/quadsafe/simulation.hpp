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

#include "quadsafe/cone_solver.hpp"
#include "quadsafe/quad_model.hpp"
#include "quadsafe/scenario.hpp"

namespace quadsafe {

/// Plant state and applied input at the start of one inner step.
struct InnerSample {
  double t{0.0};
  QuadState x;
  ControlInput u;
};

/// One outer-loop solve.
struct OuterSample {
  double t{0.0};
  AugVector z;      // measured p, v with internal a_v, j_v
  AugVector z_ref;  // reference at t
  Eigen::Vector3d s{Eigen::Vector3d::Zero()};
  Eigen::Vector3d s_ref{Eigen::Vector3d::Zero()};
  std::vector<double> h;
  std::vector<double> phi;
  SolveStatus status{SolveStatus::kOptimal};
  bool fallback{false};
  bool scp_converged{true};
  double solve_time{0.0};  // s
  /// Largest thrust requested by the inner loop over the hold interval, before clamping.
  double max_thrust_request{0.0};
};

struct SimLog {
  std::string controller;
  std::vector<InnerSample> inner;
  std::vector<OuterSample> outer;
  bool ok{true};
  std::string failure;
  int thrust_clamps{0};   // inner steps whose thrust was clamped
  int torque_clamps{0};
  int yaw_singular{0};    // inner steps with an undefined yaw split
  int infeasible{0};      // outer steps that fell back to the previous input
};

/// Two-rate closed loop: every outer_T the controller produces s*, which is
/// held while the inner loop tracks the augmented flow z(τ) = Φ(τ) z_k + Γ(τ) s*
/// through the flatness map and the attitude law at inner_dt, integrating the
/// plant with RK4. Plant blow-up or two consecutive infeasible solves stop
/// the run and return the partial log with ok = false.
SimLog run_simulation(const ScenarioConfig& cfg);

}  // namespace quadsafe
