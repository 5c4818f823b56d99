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

#include <random>

#include <gtest/gtest.h>

#include "expm.hpp"
#include "quadsafe/augmented_model.hpp"
#include "quadsafe/errors.hpp"

namespace quadsafe {
namespace {

double inf_norm(const Eigen::MatrixXd& M) { return M.cwiseAbs().maxCoeff(); }

TEST(AugmentedModel, StateRoundTrip) {
  AugState s;
  s.p = {1, 2, 3};
  s.v = {4, 5, 6};
  s.a_v = {7, 8, 9};
  s.j_v = {10, 11, 12};
  const AugVector z = s.to_vector();
  for (int i = 0; i < kAugDim; ++i) EXPECT_EQ(z(i), i + 1);
  EXPECT_EQ(AugState::from_vector(z).to_vector(), z);
}

TEST(AugmentedModel, ContinuousStructure) {
  const ContinuousModel m = augmented_continuous(Eigen::Vector3d(0.1, 0.2, 0.3));
  for (int k = 0; k < 3; ++k) {
    EXPECT_EQ(m.A_c(aug::kP + k, aug::kV + k), 1.0);
    EXPECT_DOUBLE_EQ(m.A_c(aug::kV + k, aug::kV + k), -0.1 * (k + 1));
    EXPECT_EQ(m.A_c(aug::kV + k, aug::kA + k), 1.0);
    EXPECT_EQ(m.A_c(aug::kA + k, aug::kJ + k), 1.0);
    EXPECT_EQ(m.B_c(aug::kJ + k, k), 1.0);
  }
  EXPECT_NEAR(m.A_c.cwiseAbs().sum(), 9.6, 1e-12);
  EXPECT_EQ(m.B_c.cwiseAbs().sum(), 3.0);
}

TEST(AugmentedModel, DragFreeIntegratorChain) {
  const DiscreteModel m = discretize(Eigen::Vector3d::Zero(), 0.1);
  EXPECT_NEAR(m.A(aug::kP, aug::kP), 1.0, 1e-15);
  EXPECT_NEAR(m.A(aug::kP, aug::kV), 0.1, 1e-15);
  EXPECT_NEAR(m.A(aug::kP, aug::kA), 0.005, 1e-15);
  EXPECT_NEAR(m.A(aug::kP, aug::kJ), 1.6667e-4, 1e-8);
  EXPECT_NEAR(m.A(aug::kP, aug::kJ), 1e-3 / 6.0, 1e-16);
  EXPECT_NEAR(m.B(aug::kP, 0), 4.1667e-6, 1e-10);
  EXPECT_NEAR(m.B(aug::kP, 0), 1e-4 / 24.0, 1e-18);
}

TEST(AugmentedModel, MatchesExponentialOracle) {
  for (double d : {0.0, 0.25}) {
    for (double T : {0.1, 0.01}) {
      const Eigen::Vector3d drag = Eigen::Vector3d::Constant(d);
      const ContinuousModel c = augmented_continuous(drag);
      const oracle::ZohOracle ref = oracle::zoh(c.A_c, c.B_c, T);
      const DiscreteModel m = discretize(drag, T);
      EXPECT_LE(inf_norm(m.A - ref.A), 1e-9) << "d=" << d << " T=" << T;
      EXPECT_LE(inf_norm(m.B - ref.B), 1e-9) << "d=" << d << " T=" << T;
    }
  }
}

TEST(AugmentedModel, AnisotropicDragMatchesOracle) {
  const Eigen::Vector3d drag(0.05, 0.7, 2.5);
  const ContinuousModel c = augmented_continuous(drag);
  for (double T : {1e-3, 0.05, 0.1, 1.0}) {
    const oracle::ZohOracle ref = oracle::zoh(c.A_c, c.B_c, T);
    const DiscreteModel m = discretize(drag, T);
    EXPECT_LE(inf_norm(m.A - ref.A), 1e-9) << "T=" << T;
    EXPECT_LE(inf_norm(m.B - ref.B), 1e-9) << "T=" << T;
    const DiscreteModel m2 = discretize(c.A_c, c.B_c, T);
    EXPECT_LE(inf_norm(m2.A - m.A), 1e-15);
    EXPECT_LE(inf_norm(m2.B - m.B), 1e-15);
  }
}

TEST(AugmentedModel, SmallStepLimit) {
  const DiscreteModel m = discretize(Eigen::Vector3d::Constant(0.25), 1e-8);
  EXPECT_LE(inf_norm(m.A - AugMatrix::Identity()), 1e-6);
  EXPECT_LE(inf_norm(m.B), 1e-6);
}

TEST(AugmentedModel, SemigroupProperty) {
  const Eigen::Vector3d drag(0.25, 0.25, 0.25);
  const DiscreteModel h = discretize(drag, 0.05), f = discretize(drag, 0.1);
  EXPECT_LE(inf_norm(h.A * h.A - f.A), 1e-14);
  EXPECT_LE(inf_norm(h.A * h.B + h.B - f.B), 1e-14);
}

TEST(AugmentedModel, RejectsBadInputs) {
  EXPECT_THROW(discretize(Eigen::Vector3d::Zero(), 0.0), ConfigError);
  EXPECT_THROW(discretize(Eigen::Vector3d::Zero(), -0.1), ConfigError);
  ContinuousModel c = augmented_continuous(Eigen::Vector3d::Zero());
  c.A_c(0, 11) = 1.0;
  EXPECT_THROW(discretize(c.A_c, c.B_c, 0.1), ConfigError);
}

TEST(AugmentedModel, GenericFlowMatchesOracle) {
  std::mt19937 rng(21);
  std::normal_distribution<double> N;
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 2 + trial % 5, m = 1 + trial % 3;
    Eigen::MatrixXd A(n, n), B(n, m);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) A(i, j) = N(rng);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j) B(i, j) = N(rng);
    const FlowPair f = zoh_flow(A, B, 0.3);
    const oracle::ZohOracle ref = oracle::zoh(A, B, 0.3);
    EXPECT_LE(inf_norm(f.Phi - ref.A), 1e-10);
    EXPECT_LE(inf_norm(f.Gamma - ref.B), 1e-10);
  }
}

}  // namespace
}  // namespace quadsafe
