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

namespace quadsafe {

/// Unit quaternion stored as (w, x, y, z), Hamilton convention.
/// R(q) maps body-frame vectors into the inertial frame.
struct Quaternion {
  double w{1.0};
  double x{0.0};
  double y{0.0};
  double z{0.0};

  static Quaternion identity() { return {}; }
  static Quaternion from_axis_angle(const Eigen::Vector3d& axis, double angle);
  static Quaternion from_vector(const Eigen::Vector4d& v) { return {v(0), v(1), v(2), v(3)}; }

  Eigen::Vector4d coeffs() const { return {w, x, y, z}; }
  Eigen::Vector3d vec() const { return {x, y, z}; }
  double norm() const;

  Quaternion conjugate() const { return {w, -x, -y, -z}; }
  /// Inverse of a unit quaternion.
  Quaternion inverse() const { return conjugate(); }
  Quaternion normalized() const;
};

/// Raw Hamilton product, no renormalization. Used where the operands are not
/// unit quaternions (e.g. q ⊙ (0, ω) in the attitude kinematics).
Quaternion hamilton_product(const Quaternion& a, const Quaternion& b);

/// Hamilton product of two unit quaternions, renormalized.
Quaternion quat_multiply(const Quaternion& a, const Quaternion& b);

Eigen::Matrix3d quat_to_rotmat(const Quaternion& q);

/// Rotation about the inertial z axis.
Quaternion yaw_quaternion(double yaw);

/// Skew-symmetric matrix such that skew(a) b = a × b.
Eigen::Matrix3d skew(const Eigen::Vector3d& a);

/// Body rate implied by a quaternion rate: ω = 2 vec(q* ⊙ q̇).
Eigen::Vector3d body_rate_from_quaternion_rate(const Quaternion& q, const Eigen::Vector4d& q_dot);

/// Rotation angle in [0, π] of a unit quaternion.
double rotation_angle(const Quaternion& q);

}  // namespace quadsafe
