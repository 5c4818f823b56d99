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

#include <Eigen/Dense>

#include "quadsafe/quaternion.hpp"

namespace quadsafe {

/// Tilt-prioritized attitude gains. Reduced-attitude (tilt) stiffness must
/// dominate the yaw stiffness.
struct AttitudeGains {
  double kp_xy{24.0};
  double kp_z{0.7};
  Eigen::Vector3d kd{0.8, 0.8, 0.3};

  /// Throws ConfigError on non-positive gains or kp_xy <= kp_z.
  void validate() const;
};

/// Attitude error split into yaw and reduced (tilt) parts, q_e = q_e_yaw ⊙ q_e_red.
///
/// q_e = q⁻¹ ⊙ q_d is the rotation from the current body frame to the desired
/// one, expressed in the current body frame, so positive gains on its vector
/// part are restoring and R(q_e) maps desired-frame vectors to body axes.
struct AttitudeError {
  Quaternion q_e{};
  Quaternion q_e_yaw{};
  Quaternion q_e_red{};
  Eigen::Vector3d omega_e{Eigen::Vector3d::Zero()};
  /// Set when q_e,w² + q_e,z² vanishes and the yaw split is undefined.
  bool yaw_singular{false};
};

/// omega_e is left at zero; torque_command() computes it.
AttitudeError attitude_errors(const Quaternion& q_d, const Quaternion& q);

/// τ = k_xy q̃_e,red + k_z sgn(q_e,w) q̃_e,yaw + K_d ω_e + J ω̇_e − (J ω) × ω
/// with ω_e = R(q_e) ω_d − ω and ω̇_e = R(q_e) ω̇_d. Writes ω_e back into err.
Eigen::Vector3d torque_command(AttitudeError& err, const Eigen::Vector3d& omega,
                               const Eigen::Vector3d& omega_d, const Eigen::Vector3d& domega_d,
                               const AttitudeGains& gains, const Eigen::Vector3d& inertia);

}  // namespace quadsafe
