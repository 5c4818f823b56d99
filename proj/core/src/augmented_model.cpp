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

#include "quadsafe/augmented_model.hpp"

#include <array>
#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "quadsafe/errors.hpp"

namespace quadsafe {

AugVector AugState::to_vector() const {
  AugVector z;
  z << p, v, a_v, j_v;
  return z;
}

AugState AugState::from_vector(const AugVector& z) {
  AugState s;
  s.p = z.segment<3>(aug::kP);
  s.v = z.segment<3>(aug::kV);
  s.a_v = z.segment<3>(aug::kA);
  s.j_v = z.segment<3>(aug::kJ);
  return s;
}

ContinuousModel augmented_continuous(const Eigen::Vector3d& drag) {
  ContinuousModel m;
  m.A_c.setZero();
  m.B_c.setZero();
  const Eigen::Matrix3d I = Eigen::Matrix3d::Identity();
  m.A_c.block<3, 3>(aug::kP, aug::kV) = I;
  m.A_c.block<3, 3>(aug::kV, aug::kV) = -drag.asDiagonal().toDenseMatrix();
  m.A_c.block<3, 3>(aug::kV, aug::kA) = I;
  m.A_c.block<3, 3>(aug::kA, aug::kJ) = I;
  m.B_c.block<3, 3>(aug::kJ, 0) = I;
  return m;
}

namespace {

// Iterated convolutions of e^{-d t} with t^{k-1}/(k-1)!:
//   c[1] = (1 - e^{-dt}) / d,  c[k+1] = (t^k / k! - c[k]) / d.
// For tiny d t the recursion cancels badly, so the power series is used.
std::array<double, 5> drag_kernels(double d, double t) {
  std::array<double, 5> c{};
  c[0] = std::exp(-d * t);
  if (std::abs(d * t) < 0.5) {
    // c[k] = sum_n (-d)^n t^(n+k) / (n+k)!
    for (int k = 1; k <= 4; ++k) {
      double term = 1.0;
      for (int i = 1; i <= k; ++i) term *= t / i;
      double sum = 0.0;
      for (int n = 0; n < 25; ++n) {
        sum += term;
        term *= -d * t / (n + k + 1);
      }
      c[k] = sum;
    }
    return c;
  }
  c[1] = -std::expm1(-d * t) / d;
  double power = 1.0;  // t^k / k!
  for (int k = 1; k <= 3; ++k) {
    power *= t / k;
    c[k + 1] = (power - c[k]) / d;
  }
  return c;
}

}  // namespace

DiscreteModel discretize(const Eigen::Vector3d& drag, double T) {
  if (!(T > 0.0)) {
    throw ConfigError("discretize: step must be positive");
  }
  DiscreteModel m;
  m.A.setZero();
  m.B.setZero();
  const double t2 = T * T / 2.0;
  for (int ax = 0; ax < 3; ++ax) {
    const auto c = drag_kernels(drag(ax), T);
    const int p = aug::kP + ax, v = aug::kV + ax, a = aug::kA + ax, j = aug::kJ + ax;
    m.A(p, p) = 1.0;
    m.A(p, v) = c[1];
    m.A(p, a) = c[2];
    m.A(p, j) = c[3];
    m.B(p, ax) = c[4];

    m.A(v, v) = c[0];
    m.A(v, a) = c[1];
    m.A(v, j) = c[2];
    m.B(v, ax) = c[3];

    m.A(a, a) = 1.0;
    m.A(a, j) = T;
    m.B(a, ax) = t2;

    m.A(j, j) = 1.0;
    m.B(j, ax) = T;
  }
  return m;
}

DiscreteModel discretize(const AugMatrix& A_c, const AugInputMatrix& B_c, double T) {
  const Eigen::Vector3d drag = -A_c.block<3, 3>(aug::kV, aug::kV).diagonal();
  const ContinuousModel expected = augmented_continuous(drag);
  if (!(expected.A_c - A_c).isZero(0.0) || !(expected.B_c - B_c).isZero(0.0)) {
    throw ConfigError("discretize: continuous pair is not the augmented p/v/a/j chain");
  }
  return discretize(drag, T);
}

FlowPair zoh_flow(const Eigen::MatrixXd& A_c, const Eigen::MatrixXd& B_c, double t) {
  const Eigen::Index n = A_c.rows();
  const Eigen::Index m = B_c.cols();
  Eigen::MatrixXd block = Eigen::MatrixXd::Zero(n + m, n + m);
  block.topLeftCorner(n, n) = A_c * t;
  block.topRightCorner(n, m) = B_c * t;
  const Eigen::MatrixXd e = block.exp();
  return {e.topLeftCorner(n, n), e.topRightCorner(n, m)};
}

}  // namespace quadsafe
