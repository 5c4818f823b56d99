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

#include <Eigen/Core>

namespace quadsafe {

inline constexpr int kAugDim = 12;
inline constexpr int kInputDim = 3;

using AugVector = Eigen::Matrix<double, kAugDim, 1>;
using AugMatrix = Eigen::Matrix<double, kAugDim, kAugDim>;
using AugInputMatrix = Eigen::Matrix<double, kAugDim, kInputDim>;

/// Outer-loop state: position, velocity, virtual acceleration a_v (standing in
/// for g + R(q) f / m) and virtual jerk j_v. The input is the virtual snap s_v.
struct AugState {
  Eigen::Vector3d p{Eigen::Vector3d::Zero()};
  Eigen::Vector3d v{Eigen::Vector3d::Zero()};
  Eigen::Vector3d a_v{Eigen::Vector3d::Zero()};
  Eigen::Vector3d j_v{Eigen::Vector3d::Zero()};

  /// Stacked as [p; v; a_v; j_v].
  AugVector to_vector() const;
  static AugState from_vector(const AugVector& z);
};

/// Slot offsets into the stacked augmented vector.
namespace aug {
inline constexpr int kP = 0;
inline constexpr int kV = 3;
inline constexpr int kA = 6;
inline constexpr int kJ = 9;
}  // namespace aug

/// Continuous-time pair of the augmented model
///   ṗ = v,  v̇ = −D v + a_v,  ȧ_v = j_v,  j̇_v = s_v.
struct ContinuousModel {
  AugMatrix A_c;
  AugInputMatrix B_c;
};

ContinuousModel augmented_continuous(const Eigen::Vector3d& drag);

struct DiscreteModel {
  AugMatrix A;
  AugInputMatrix B;
};

/// Exact zero-order-hold pair over step T, assembled axis by axis in closed form.
DiscreteModel discretize(const Eigen::Vector3d& drag, double T);

/// Same as above but reads the drag off a continuous pair produced by
/// augmented_continuous(). Throws ConfigError if the pair has any other structure.
DiscreteModel discretize(const AugMatrix& A_c, const AugInputMatrix& B_c, double T);

/// Generic ZOH pair (e^{A t}, ∫₀ᵗ e^{A s} ds B) for any dimensions, via the
/// exponential of the block matrix [[A, B], [0, 0]] t.
struct FlowPair {
  Eigen::MatrixXd Phi;
  Eigen::MatrixXd Gamma;
};
FlowPair zoh_flow(const Eigen::MatrixXd& A_c, const Eigen::MatrixXd& B_c, double t);

}  // namespace quadsafe
