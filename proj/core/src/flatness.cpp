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

#include "quadsafe/flatness.hpp"

#include <cmath>

namespace quadsafe {

namespace {

// Below this thrust-acceleration magnitude the attitude is undefined.
constexpr double kMinThrustAccel = 1e-9;

// Unnormalized tilt quaternion (1 + b_z, e3 × b) taking e3 onto the unit vector b.
Quaternion tilt_unnormalized(const Eigen::Vector3d& b) {
  return {1.0 + b.z(), -b.y(), b.x(), 0.0};
}

Quaternion tilt_derivative(const Eigen::Vector3d& b_dot) {
  return {b_dot.z(), -b_dot.y(), b_dot.x(), 0.0};
}

}  // namespace

AugmentedReference reference_to_augmented(const FlatOutput& flat, const Eigen::Vector3d& drag) {
  AugmentedReference r;
  r.z.p = flat.p;
  r.z.v = flat.v;
  r.z.a_v = flat.a + drag.cwiseProduct(flat.v);
  r.z.j_v = flat.j + drag.cwiseProduct(flat.a);
  r.s_v = flat.s + drag.cwiseProduct(flat.j);
  return r;
}

AugState propagate_desired(const AugState& z_k, const Eigen::Vector3d& s_star, const DiscreteModel& model) {
  return AugState::from_vector(model.A * z_k.to_vector() + model.B * s_star);
}

RealDerivatives virtual_to_real(const Eigen::Vector3d& v_d, const Eigen::Vector3d& a_v_d,
                                const Eigen::Vector3d& j_v_d, const Eigen::Vector3d& s_v,
                                const Eigen::Vector3d& drag) {
  RealDerivatives r;
  r.a = -drag.cwiseProduct(v_d) + a_v_d;
  r.j = -drag.cwiseProduct(r.a) + j_v_d;
  r.s = -drag.cwiseProduct(r.j) + s_v;
  return r;
}

DesiredAttitude desired_attitude(const Eigen::Vector3d& a_v_d, double psi, const QuadParams& prm) {
  const Eigen::Vector3d c = a_v_d - prm.gravity_vector();
  const double n = c.norm();
  DesiredAttitude out;
  out.f_z = prm.mass * n;
  if (n < kMinThrustAccel) {
    out.q_red = Quaternion::identity();
  } else {
    const Eigen::Vector3d b = c / n;
    const Quaternion u = tilt_unnormalized(b);
    if (u.norm() < 1e-12) {
      // Thrust pointing straight down: any horizontal axis works.
      out.q_red = {0.0, 1.0, 0.0, 0.0};
    } else {
      out.q_red = u.normalized();
    }
  }
  out.q_d = quat_multiply(out.q_red, yaw_quaternion(psi));
  return out;
}

DesiredRates desired_rates(const Eigen::Vector3d& a_v_d, const Eigen::Vector3d& j_v_d,
                           const Eigen::Vector3d& s_v_d, double psi, double dpsi, double ddpsi,
                           const QuadParams& prm) {
  const Eigen::Vector3d c = a_v_d - prm.gravity_vector();
  const double n = c.norm();

  Eigen::Vector3d omega_red = Eigen::Vector3d::Zero();
  Eigen::Vector3d domega_red = Eigen::Vector3d::Zero();
  if (n >= kMinThrustAccel) {
    const Eigen::Vector3d b = c / n;
    const double n_dot = b.dot(j_v_d);
    const Eigen::Vector3d b_dot = (j_v_d - b * n_dot) / n;
    const Eigen::Vector3d b_ddot =
        (s_v_d - b * b.dot(s_v_d) - b * b_dot.dot(j_v_d) - 2.0 * b_dot * n_dot) / n;

    const Quaternion u = tilt_unnormalized(b);
    const double u2 = u.coeffs().squaredNorm();
    if (u2 > 1e-24) {
      const Quaternion u_dot = tilt_derivative(b_dot);
      const Quaternion u_ddot = tilt_derivative(b_ddot);
      // For q = u / |u| the body rate is 2 vec(u* u̇) / |u|²; the normalization
      // only contributes to the real part.
      omega_red = 2.0 * hamilton_product(u.conjugate(), u_dot).vec() / u2;
      const double u_udot = u.coeffs().dot(u_dot.coeffs());
      domega_red = 2.0 * hamilton_product(u.conjugate(), u_ddot).vec() / u2 -
                   omega_red * (2.0 * u_udot / u2);
    }
  }

  // q_d = q_red ⊙ q_yaw  ⇒  ω = R_yawᵀ ω_red + ψ̇ e3.
  const Eigen::Matrix3d r_yaw_t = quat_to_rotmat(yaw_quaternion(psi)).transpose();
  const Eigen::Vector3d omega_yaw(0.0, 0.0, dpsi);
  const Eigen::Vector3d omega_red_body = r_yaw_t * omega_red;

  DesiredRates out;
  out.omega_d = omega_red_body + omega_yaw;
  out.domega_d = r_yaw_t * domega_red - omega_yaw.cross(omega_red_body) + Eigen::Vector3d(0.0, 0.0, ddpsi);
  return out;
}

DesiredCommand desired_command(const AugState& z_d, const Eigen::Vector3d& s_v, double psi,
                               double dpsi, double ddpsi, const QuadParams& prm) {
  const DesiredAttitude att = desired_attitude(z_d.a_v, psi, prm);
  const DesiredRates rates = desired_rates(z_d.a_v, z_d.j_v, s_v, psi, dpsi, ddpsi, prm);
  return {att.f_z, att.q_d, rates.omega_d, rates.domega_d};
}

}  // namespace quadsafe
