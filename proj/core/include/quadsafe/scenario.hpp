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

#include <optional>
#include <string>
#include <vector>

#include "quadsafe/attitude.hpp"
#include "quadsafe/barrier.hpp"
#include "quadsafe/mpc.hpp"
#include "quadsafe/quad_model.hpp"
#include "quadsafe/reference.hpp"

namespace quadsafe {

struct SimSettings {
  double duration{20.0};  // s
  double inner_dt{1e-3};  // s
  double outer_T{0.1};    // s, also the MPC step
  double thrust_floor{0.01};  // N, lower clamp on f_z
  /// Optional symmetric torque limit (N m); zero disables it.
  double torque_limit{0.0};

  /// Inner steps per outer step; assumes validate() passed.
  int ratio() const;
  long inner_steps() const;
};

/// Segment the vehicle must cross for a narrow-gap pass: y changes sign at
/// an x inside [x_min, x_max] within altitude_tol of the given altitude.
struct GapSpec {
  double x_min{-2.15};
  double x_max{-1.85};
  double half_width{0.15};
  double altitude{1.0};
  double altitude_tol{0.25};
};

struct ScenarioConfig {
  std::string name{"scenario"};
  QuadParams quad{};
  AttitudeGains attitude{};
  MpcConfig mpc{};
  ControllerKind controller{};
  std::vector<BarrierSpec> barriers;
  ReferenceSpec reference{};
  SimSettings sim{};
  QuadState initial{};
  std::optional<GapSpec> gap;

  /// Augmented initial state: measured p, v and a_v, j_v from the reference at t = 0.
  AugVector initial_augmented() const;
  /// Throws ConfigError whose message lists every violated invariant, one per line.
  void validate() const;
};

/// Parses and validates a TOML scenario. Throws ConfigError on parse errors,
/// missing keys or invariant violations.
ScenarioConfig load_scenario(const std::string& path);
ScenarioConfig parse_scenario(const std::string& toml_text, const std::string& source = "<string>");

/// TOML text that parse_scenario() reads back into an identical config.
std::string scenario_to_toml(const ScenarioConfig& cfg);
void save_scenario(const ScenarioConfig& cfg, const std::string& path);

}  // namespace quadsafe
