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

#include "quadsafe/augmented_model.hpp"
#include "quadsafe/quad_model.hpp"
#include "quadsafe/quaternion.hpp"

namespace quadsafe {

/// Flat output (position, yaw) and the derivatives the conversion needs.
struct FlatOutput {
  Eigen::Vector3d p{Eigen::Vector3d::Zero()};
  Eigen::Vector3d v{Eigen::Vector3d::Zero()};
  Eigen::Vector3d a{Eigen::Vector3d::Zero()};
  Eigen::Vector3d j{Eigen::Vector3d::Zero()};
  Eigen::Vector3d s{Eigen::Vector3d::Zero()};
  double psi{0.0};
  double dpsi{0.0};
  double ddpsi{0.0};
};

struct AugmentedReference {
  AugState z;
  Eigen::Vector3d s_v{Eigen::Vector3d::Zero()};
};

/// Inverse of the virtual-to-real map: a_v = a + D v, j_v = j + D a, s_v = s + D j.
AugmentedReference reference_to_augmented(const FlatOutput& flat, const Eigen::Vector3d& drag);

/// z_d = A z_k + B s*.
AugState propagate_desired(const AugState& z_k, const Eigen::Vector3d& s_star, const DiscreteModel& model);

struct RealDerivatives {
  Eigen::Vector3d a;
  Eigen::Vector3d j;
  Eigen::Vector3d s;
};

/// a = −D v + a_v, j = −D a + j_v, s = −D j + s_v.
RealDerivatives virtual_to_real(const Eigen::Vector3d& v_d, const Eigen::Vector3d& a_v_d,
                                const Eigen::Vector3d& j_v_d, const Eigen::Vector3d& s_v,
                                const Eigen::Vector3d& drag);

struct DesiredAttitude {
  double f_z{0.0};
  Quaternion q_d{};
  /// Tilt part only (yaw excluded); q_d = q_red ⊙ q_yaw.
  Quaternion q_red{};
};

/// Thrust magnitude and attitude that realize the virtual acceleration a_v_d:
/// g + R(q_d) (0, 0, f_z) / m = a_v_d. The tilt is the minimal rotation taking
/// the body z axis onto a_v_d − g; yaw ψ is applied about the body z axis so
/// it never changes the thrust direction.
DesiredAttitude desired_attitude(const Eigen::Vector3d& a_v_d, double psi, const QuadParams& prm);

struct DesiredRates {
  Eigen::Vector3d omega_d{Eigen::Vector3d::Zero()};
  Eigen::Vector3d domega_d{Eigen::Vector3d::Zero()};
};

/// Body rate and body angular acceleration of q_d(t) obtained by
/// differentiating the closed form of desired_attitude() with ȧ_v = j_v,
/// ä_v = s_v and the yaw derivatives.
DesiredRates desired_rates(const Eigen::Vector3d& a_v_d, const Eigen::Vector3d& j_v_d,
                           const Eigen::Vector3d& s_v_d, double psi, double dpsi, double ddpsi,
                           const QuadParams& prm);

/// Everything the inner loop consumes.
struct DesiredCommand {
  double f_z{0.0};
  Quaternion q_d{};
  Eigen::Vector3d omega_d{Eigen::Vector3d::Zero()};
  Eigen::Vector3d domega_d{Eigen::Vector3d::Zero()};
};

DesiredCommand desired_command(const AugState& z_d, const Eigen::Vector3d& s_v, double psi,
                               double dpsi, double ddpsi, const QuadParams& prm);

}  // namespace quadsafe
