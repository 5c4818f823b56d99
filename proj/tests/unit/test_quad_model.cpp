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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "finite_diff.hpp"
#include "quadsafe/errors.hpp"
#include "quadsafe/quad_model.hpp"

namespace quadsafe {
namespace {

QuadState random_state(std::mt19937& rng) {
  std::normal_distribution<double> N;
  QuadState s;
  s.p = {N(rng), N(rng), N(rng)};
  s.v = {N(rng), N(rng), N(rng)};
  s.q = Quaternion{N(rng), N(rng), N(rng), N(rng)}.normalized();
  s.omega = {N(rng), N(rng), N(rng)};
  return s;
}

TEST(QuadModel, HoverThrustValue) {
  const QuadParams prm;
  EXPECT_NEAR(prm.hover_thrust(), 4.591, 5e-4);
}

TEST(QuadModel, HoverIsEquilibrium) {
  const QuadParams prm;
  QuadState s;
  s.p = {1.0, -2.0, 3.0};
  ControlInput u;
  u.f_z = prm.hover_thrust();
  const StateDerivative d = dynamics_deriv(s, u, prm);
  EXPECT_LE(d.p_dot.norm(), 1e-15);
  EXPECT_LE(d.v_dot.norm(), 1e-14);
  EXPECT_LE(d.q_dot.norm(), 1e-15);
  EXPECT_LE(d.omega_dot.norm(), 1e-15);
}

TEST(QuadModel, PureDrag) {
  const QuadParams prm;
  QuadState s;
  s.v = {1.0, 0.0, 0.0};
  ControlInput u;
  u.f_z = prm.hover_thrust();
  const StateDerivative d = dynamics_deriv(s, u, prm);
  EXPECT_NEAR(d.v_dot.x(), -0.25, 1e-14);
  EXPECT_NEAR(d.v_dot.y(), 0.0, 1e-14);
  EXPECT_NEAR(d.v_dot.z(), 0.0, 1e-14);
}

// Rigid-body field written out longhand, state packed as [p v q(wxyz) ω].
using Vec13 = Eigen::Matrix<double, 13, 1>;
Vec13 longhand_field(const Vec13& x, double f, const Eigen::Vector3d& tau, const QuadParams& prm) {
  const double w = x(6), a = x(7), b = x(8), c = x(9);
  // Third column of the rotation matrix of (w, a, b, c).
  const Eigen::Vector3d ez(2 * (a * c + w * b), 2 * (b * c - w * a), w * w - a * a - b * b + c * c);
  const Eigen::Vector3d om = x.segment<3>(10);
  const Eigen::Vector3d J = prm.inertia;
  Vec13 d;
  d.segment<3>(0) = x.segment<3>(3);
  d.segment<3>(3) = Eigen::Vector3d(0, 0, -prm.gravity) + ez * f / prm.mass -
                    prm.drag.cwiseProduct(x.segment<3>(3));
  d(6) = 0.5 * (-a * om.x() - b * om.y() - c * om.z());
  d(7) = 0.5 * (w * om.x() + b * om.z() - c * om.y());
  d(8) = 0.5 * (w * om.y() + c * om.x() - a * om.z());
  d(9) = 0.5 * (w * om.z() + a * om.y() - b * om.x());
  d(10) = (tau.x() - (J.z() - J.y()) * om.y() * om.z()) / J.x();
  d(11) = (tau.y() - (J.x() - J.z()) * om.z() * om.x()) / J.y();
  d(12) = (tau.z() - (J.y() - J.x()) * om.x() * om.y()) / J.z();
  return d;
}

TEST(QuadModel, VelocityRateMatchesFiniteDifferenceOfTrajectory) {
  const QuadParams prm;
  std::mt19937 rng(11);
  std::normal_distribution<double> N;
  for (int trial = 0; trial < 10; ++trial) {
    const QuadState s = random_state(rng);
    ControlInput u;
    u.f_z = 5.0 + N(rng);
    u.tau = 1e-3 * Eigen::Vector3d(N(rng), N(rng), N(rng));
    Vec13 x0;
    x0 << s.p, s.v, s.q.coeffs(), s.omega;
    auto flow = [&](double t) -> Eigen::VectorXd {
      const int n = 64;
      const double h = t / n;
      Vec13 x = x0;
      for (int i = 0; i < n; ++i) {
        const Vec13 k1 = longhand_field(x, u.f_z, u.tau, prm);
        const Vec13 k2 = longhand_field(x + 0.5 * h * k1, u.f_z, u.tau, prm);
        const Vec13 k3 = longhand_field(x + 0.5 * h * k2, u.f_z, u.tau, prm);
        const Vec13 k4 = longhand_field(x + h * k3, u.f_z, u.tau, prm);
        x += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
      }
      return x.segment<3>(3);
    };
    const Eigen::VectorXd fd = oracle::derivative(std::function<Eigen::VectorXd(double)>(flow), 0.0, 1e-4);
    const Eigen::Vector3d model = dynamics_deriv(s, u, prm).v_dot;
    EXPECT_LE((fd - model).cwiseAbs().maxCoeff(), 1e-6) << "trial " << trial;
  }
}

TEST(QuadModel, HoverStepLeavesStateUnchanged) {
  const QuadParams prm;
  QuadState s;
  s.p = {0.5, 0.5, 1.0};
  ControlInput u;
  u.f_z = prm.hover_thrust();
  for (double dt : {1e-3, 1e-2, 0.1}) {
    const QuadState n = integrate_step(s, u, prm, dt);
    EXPECT_LE((n.p - s.p).norm(), 1e-12);
    EXPECT_LE(n.v.norm(), 1e-12);
    EXPECT_LE(n.omega.norm(), 1e-12);
    EXPECT_NEAR(n.q.w, 1.0, 1e-15);
  }
}

TEST(QuadModel, StepKeepsUnitQuaternion) {
  const QuadParams prm;
  std::mt19937 rng(13);
  QuadState s = random_state(rng);
  ControlInput u;
  u.f_z = 6.0;
  u.tau = {1e-3, -2e-3, 5e-4};
  for (int i = 0; i < 1000; ++i) s = integrate_step(s, u, prm, 1e-3);
  EXPECT_NEAR(s.q.norm(), 1.0, 1e-14);
  EXPECT_TRUE(s.all_finite());
}

TEST(QuadModel, RigidBodyKineticEnergyConservedTorqueFree) {
  QuadParams prm;
  prm.drag.setZero();
  QuadState s;
  s.omega = {2.0, 0.5, -1.0};
  ControlInput u;
  const Eigen::Vector3d J = prm.inertia;
  auto energy = [&](const QuadState& x) { return 0.5 * x.omega.dot(J.cwiseProduct(x.omega)); };
  const double e0 = energy(s);
  for (int i = 0; i < 2000; ++i) s = integrate_step(s, u, prm, 1e-3);
  EXPECT_NEAR(energy(s), e0, 1e-9);
}

TEST(QuadModel, NonFiniteStepThrows) {
  const QuadParams prm;
  QuadState s;
  ControlInput u;
  u.f_z = std::nan("");
  EXPECT_THROW(integrate_step(s, u, prm, 1e-3), SimulationError);
}

TEST(QuadModel, ParamsRejectUnhoverable) {
  QuadParams prm;
  prm.max_thrust = 1.0;
  EXPECT_THROW(prm.validate(), ConfigError);
  prm = QuadParams{};
  prm.mass = -1.0;
  EXPECT_THROW(prm.validate(), ConfigError);
  EXPECT_NO_THROW(QuadParams{}.validate());
}

}  // namespace
}  // namespace quadsafe
