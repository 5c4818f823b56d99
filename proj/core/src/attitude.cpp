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

#include "quadsafe/attitude.hpp"

#include <cmath>
#include <string>

#include "quadsafe/errors.hpp"

namespace quadsafe {

void AttitudeGains::validate() const {
  std::string problems;
  if (!(kp_xy > 0.0) || !(kp_z > 0.0)) problems += " proportional gains must be positive;";
  if (!(kd.array() > 0.0).all()) problems += " damping gains must be positive;";
  if (!(kp_xy > kp_z)) problems += " kp_xy must exceed kp_z (tilt priority);";
  if (!problems.empty()) {
    throw ConfigError("invalid attitude gains:" + problems);
  }
}

AttitudeError attitude_errors(const Quaternion& q_d, const Quaternion& q) {
  AttitudeError err;
  err.q_e = quat_multiply(q.inverse(), q_d);
  const double yaw_norm = std::hypot(err.q_e.w, err.q_e.z);
  if (yaw_norm < 1e-12) {
    err.q_e_yaw = Quaternion::identity();
    err.yaw_singular = true;
  } else {
    err.q_e_yaw = {err.q_e.w / yaw_norm, 0.0, 0.0, err.q_e.z / yaw_norm};
  }
  err.q_e_red = quat_multiply(err.q_e_yaw.inverse(), err.q_e);
  return err;
}

Eigen::Vector3d torque_command(AttitudeError& err, const Eigen::Vector3d& omega,
                               const Eigen::Vector3d& omega_d, const Eigen::Vector3d& domega_d,
                               const AttitudeGains& gains, const Eigen::Vector3d& inertia) {
  const Eigen::Matrix3d r_e = quat_to_rotmat(err.q_e);
  err.omega_e = r_e * omega_d - omega;
  const Eigen::Vector3d domega_e = r_e * domega_d;
  const double sgn = err.q_e.w < 0.0 ? -1.0 : 1.0;

  const Eigen::Vector3d j_omega = inertia.cwiseProduct(omega);
  const Eigen::Vector3d tau_ff = inertia.cwiseProduct(domega_e) - j_omega.cross(omega);
  return gains.kp_xy * err.q_e_red.vec() + gains.kp_z * sgn * err.q_e_yaw.vec() +
         gains.kd.cwiseProduct(err.omega_e) + tau_ff;
}

}  // namespace quadsafe
