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

#include "quadsafe/quad_model.hpp"

#include <string>

#include "quadsafe/errors.hpp"

namespace quadsafe {

void QuadParams::validate() const {
  std::string problems;
  if (!(mass > 0.0)) problems += " mass must be positive;";
  if (!(inertia.array() > 0.0).all()) problems += " inertia entries must be positive;";
  if (!(drag.array() >= 0.0).all()) problems += " drag entries must be non-negative;";
  if (!(gravity > 0.0)) problems += " gravity must be positive;";
  if (!(max_thrust > mass * gravity)) problems += " max thrust must exceed m*g (hover infeasible);";
  if (!problems.empty()) {
    throw ConfigError("invalid quad parameters:" + problems);
  }
}

bool QuadState::all_finite() const {
  return p.allFinite() && v.allFinite() && q.coeffs().allFinite() && omega.allFinite();
}

StateDerivative dynamics_deriv(const QuadState& s, const ControlInput& u, const QuadParams& prm) {
  StateDerivative d;
  d.p_dot = s.v;
  const Eigen::Vector3d thrust_body(0.0, 0.0, u.f_z);
  d.v_dot = prm.gravity_vector() + quat_to_rotmat(s.q) * thrust_body / prm.mass -
            prm.drag.cwiseProduct(s.v);
  const Quaternion omega_quat{0.0, s.omega.x(), s.omega.y(), s.omega.z()};
  d.q_dot = 0.5 * hamilton_product(s.q, omega_quat).coeffs();
  const Eigen::Vector3d j_omega = prm.inertia.cwiseProduct(s.omega);
  d.omega_dot = (u.tau - s.omega.cross(j_omega)).cwiseQuotient(prm.inertia);
  return d;
}

namespace {

// The quaternion is carried as a raw 4-vector inside a step; stage states are
// not renormalized so that RK4 keeps its order.
QuadState advance(const QuadState& s, const StateDerivative& d, double h) {
  QuadState out;
  out.p = s.p + h * d.p_dot;
  out.v = s.v + h * d.v_dot;
  out.q = Quaternion::from_vector(s.q.coeffs() + h * d.q_dot);
  out.omega = s.omega + h * d.omega_dot;
  return out;
}

}  // namespace

QuadState integrate_step(const QuadState& s, const ControlInput& u, const QuadParams& prm, double dt) {
  const StateDerivative k1 = dynamics_deriv(s, u, prm);
  const StateDerivative k2 = dynamics_deriv(advance(s, k1, 0.5 * dt), u, prm);
  const StateDerivative k3 = dynamics_deriv(advance(s, k2, 0.5 * dt), u, prm);
  const StateDerivative k4 = dynamics_deriv(advance(s, k3, dt), u, prm);

  const double w = dt / 6.0;
  QuadState out;
  out.p = s.p + w * (k1.p_dot + 2.0 * k2.p_dot + 2.0 * k3.p_dot + k4.p_dot);
  out.v = s.v + w * (k1.v_dot + 2.0 * k2.v_dot + 2.0 * k3.v_dot + k4.v_dot);
  const Eigen::Vector4d q =
      s.q.coeffs() + w * (k1.q_dot + 2.0 * k2.q_dot + 2.0 * k3.q_dot + k4.q_dot);
  out.q = Quaternion::from_vector(q).normalized();
  out.omega = s.omega + w * (k1.omega_dot + 2.0 * k2.omega_dot + 2.0 * k3.omega_dot + k4.omega_dot);

  if (!out.all_finite()) {
    throw SimulationError("integrate_step: non-finite state (numerical blow-up)");
  }
  return out;
}

}  // namespace quadsafe
