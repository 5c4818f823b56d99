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

#include "quadsafe/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "quadsafe/attitude.hpp"
#include "quadsafe/errors.hpp"
#include "quadsafe/flatness.hpp"
#include "quadsafe/mpc.hpp"

namespace quadsafe {

SimLog run_simulation(const ScenarioConfig& cfg) {
  cfg.validate();
  SimLog log;
  log.controller = cfg.controller.name();

  const QuadParams& quad = cfg.quad;
  const double dt = cfg.sim.inner_dt;
  const int ratio = cfg.sim.ratio();
  const long steps = cfg.sim.inner_steps();
  const int N = cfg.mpc.N;
  const double T = cfg.mpc.T;

  OuterController ctrl(cfg.controller, cfg.mpc, quad, cfg.barriers);
  const DiscreteModel& model = ctrl.assembler().model();

  // Flow of the augmented model over each inner offset of the hold interval.
  std::vector<DiscreteModel> flows;
  flows.reserve(static_cast<std::size_t>(ratio));
  flows.push_back({AugMatrix::Identity(), AugInputMatrix::Zero()});
  for (int j = 1; j < ratio; ++j) flows.push_back(discretize(quad.drag, j * dt));

  log.inner.reserve(static_cast<std::size_t>(steps));
  log.outer.reserve(static_cast<std::size_t>(steps / ratio + 1));

  QuadState x = cfg.initial;
  AugVector z_internal = cfg.initial_augmented();
  AugVector z_hold = z_internal;
  Eigen::Vector3d s_star = Eigen::Vector3d::Zero();

  for (long n = 0; n < steps; ++n) {
    const double t = static_cast<double>(n) * dt;
    const int j = static_cast<int>(n % ratio);
    if (j == 0) {
      AugState zs = AugState::from_vector(z_internal);
      zs.p = x.p;
      zs.v = x.v;
      z_hold = zs.to_vector();
      const ReferenceWindow refs = cfg.reference.window(t, N, T, quad.drag);
      const StepResult res = ctrl.solve_step(z_hold, refs);

      OuterSample o;
      o.t = t;
      o.z = z_hold;
      o.z_ref = refs[0].z.to_vector();
      o.s = res.s_star;
      o.s_ref = refs[0].s_v;
      o.h = res.diag.h;
      o.phi = res.diag.phi;
      o.status = res.diag.status;
      o.fallback = res.diag.fallback;
      o.scp_converged = res.diag.scp_converged;
      o.solve_time = res.diag.solve_time;
      log.outer.push_back(std::move(o));
      if (res.diag.fallback) ++log.infeasible;

      if (ctrl.consecutive_infeasible() >= 2) {
        std::ostringstream os;
        os << "two consecutive infeasible outer solves at t = " << t << " s";
        log.ok = false;
        log.failure = os.str();
        break;
      }
      s_star = res.s_star;
      z_internal = model.A * z_hold + model.B * s_star;
    }

    const AugVector z_d = flows[static_cast<std::size_t>(j)].A * z_hold + flows[static_cast<std::size_t>(j)].B * s_star;
    const FlatOutput ref = cfg.reference.at(t);
    const DesiredCommand cmd =
        desired_command(AugState::from_vector(z_d), s_star, ref.psi, ref.dpsi, ref.ddpsi, quad);

    ControlInput u;
    u.f_z = std::clamp(cmd.f_z, cfg.sim.thrust_floor, quad.max_thrust);
    if (u.f_z != cmd.f_z) ++log.thrust_clamps;
    auto& last = log.outer.back();
    last.max_thrust_request = std::max(last.max_thrust_request, cmd.f_z);

    AttitudeError err = attitude_errors(cmd.q_d, x.q);
    if (err.yaw_singular) ++log.yaw_singular;
    u.tau = torque_command(err, x.omega, cmd.omega_d, cmd.domega_d, cfg.attitude, quad.inertia);
    if (cfg.sim.torque_limit > 0.0) {
      const Eigen::Vector3d lim = Eigen::Vector3d::Constant(cfg.sim.torque_limit);
      const Eigen::Vector3d clamped = u.tau.cwiseMax(-lim).cwiseMin(lim);
      if (clamped != u.tau) ++log.torque_clamps;
      u.tau = clamped;
    }

    log.inner.push_back({t, x, u});
    try {
      x = integrate_step(x, u, quad, dt);
    } catch (const SimulationError& e) {
      log.ok = false;
      log.failure = e.what();
      break;
    }
  }
  return log;
}

}  // namespace quadsafe
