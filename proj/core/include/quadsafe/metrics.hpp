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

#include "quadsafe/scenario.hpp"
#include "quadsafe/simulation.hpp"

namespace quadsafe {

struct Metrics {
  std::string controller;
  bool success{true};
  std::string failure;
  double simulated_time{0.0};  // s
  /// Minimum of h₀ per barrier over the inner-rate samples.
  std::vector<double> min_h;
  /// Smallest distance from the vehicle to any obstacle surface (negative inside).
  double min_clearance{0.0};
  /// RMS of ‖p − p̄‖ over t ≥ rms_window_start.
  double rms_position_error{0.0};
  double max_solve_time{0.0};   // s
  double mean_solve_time{0.0};  // s
  bool gap_defined{false};
  bool gap_passed{false};
  int infeasible_count{0};
  /// Σ_k (z_k − z̄_k)ᵀ Q (z_k − z̄_k) + (s_k − s̄_k)ᵀ R (s_k − s̄_k) over outer steps.
  double tracking_cost{0.0};
  int thrust_clamps{0};
  /// Largest m ‖a_v − g‖ requested by the inner loop.
  double max_thrust_request{0.0};
  int outer_steps{0};
};

inline constexpr double kRmsWindowStart = 2.0;  // s

Metrics compute_metrics(const SimLog& log, const ScenarioConfig& cfg);

/// True when consecutive positions cross y = 0 at an x inside [x_min, x_max]
/// within the altitude tolerance.
bool crosses_gap(const std::vector<InnerSample>& inner, const GapSpec& gap);

}  // namespace quadsafe
