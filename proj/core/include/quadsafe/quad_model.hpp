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

inline constexpr double kGravity = 9.81;

/// Rigid-body parameters of the vehicle. Defaults are a 0.468 kg quadrotor.
struct QuadParams {
  double mass{0.468};                                   // kg
  Eigen::Vector3d inertia{4.856e-3, 4.856e-3, 8.801e-3};  // kg m^2, diagonal
  Eigen::Vector3d drag{0.25, 0.25, 0.25};               // 1/s, diagonal
  double max_thrust{12.0};                              // N
  double gravity{kGravity};                             // m/s^2, magnitude

  Eigen::Vector3d gravity_vector() const { return {0.0, 0.0, -gravity}; }
  double hover_thrust() const { return mass * gravity; }

  /// Throws ConfigError when the parameters cannot hover.
  void validate() const;
};

struct QuadState {
  Eigen::Vector3d p{Eigen::Vector3d::Zero()};
  Eigen::Vector3d v{Eigen::Vector3d::Zero()};
  Quaternion q{};
  Eigen::Vector3d omega{Eigen::Vector3d::Zero()};

  bool all_finite() const;
};

/// Collective thrust along body z and body torque.
struct ControlInput {
  double f_z{0.0};
  Eigen::Vector3d tau{Eigen::Vector3d::Zero()};
};

struct StateDerivative {
  Eigen::Vector3d p_dot{Eigen::Vector3d::Zero()};
  Eigen::Vector3d v_dot{Eigen::Vector3d::Zero()};
  Eigen::Vector4d q_dot{Eigen::Vector4d::Zero()};  // (w, x, y, z)
  Eigen::Vector3d omega_dot{Eigen::Vector3d::Zero()};
};

/// Full nonlinear rigid-body model with linear drag:
///   ṗ = v
///   v̇ = g + R(q) (0, 0, f_z) / m − D v
///   q̇ = ½ q ⊙ (0, ω)
///   ω̇ = J⁻¹ (τ − ω × J ω)
StateDerivative dynamics_deriv(const QuadState& s, const ControlInput& u, const QuadParams& prm);

/// One classic RK4 step with the quaternion renormalized at the end.
/// Throws SimulationError if the result is not finite.
QuadState integrate_step(const QuadState& s, const ControlInput& u, const QuadParams& prm, double dt);

}  // namespace quadsafe
