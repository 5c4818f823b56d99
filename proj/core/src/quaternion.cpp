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

#include "quadsafe/quaternion.hpp"

#include <algorithm>
#include <cmath>

namespace quadsafe {

Quaternion Quaternion::from_axis_angle(const Eigen::Vector3d& axis, double angle) {
  const double n = axis.norm();
  if (n == 0.0) {
    return identity();
  }
  const Eigen::Vector3d u = axis / n;
  const double s = std::sin(0.5 * angle);
  return {std::cos(0.5 * angle), s * u.x(), s * u.y(), s * u.z()};
}

double Quaternion::norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }

Quaternion Quaternion::normalized() const {
  const double n = norm();
  return {w / n, x / n, y / n, z / n};
}

Quaternion hamilton_product(const Quaternion& a, const Quaternion& b) {
  return {
      a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
      a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
      a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
      a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
  };
}

Quaternion quat_multiply(const Quaternion& a, const Quaternion& b) {
  return hamilton_product(a, b).normalized();
}

Eigen::Matrix3d quat_to_rotmat(const Quaternion& q) {
  const double w = q.w, x = q.x, y = q.y, z = q.z;
  Eigen::Matrix3d r;
  r << 1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y),
      2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x),
      2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y);
  return r;
}

Quaternion yaw_quaternion(double yaw) {
  return {std::cos(0.5 * yaw), 0.0, 0.0, std::sin(0.5 * yaw)};
}

Eigen::Matrix3d skew(const Eigen::Vector3d& a) {
  Eigen::Matrix3d s;
  s << 0.0, -a.z(), a.y(),
       a.z(), 0.0, -a.x(),
       -a.y(), a.x(), 0.0;
  return s;
}

Eigen::Vector3d body_rate_from_quaternion_rate(const Quaternion& q, const Eigen::Vector4d& q_dot) {
  const Quaternion p = hamilton_product(q.conjugate(), Quaternion::from_vector(q_dot));
  return 2.0 * p.vec();
}

double rotation_angle(const Quaternion& q) {
  return 2.0 * std::atan2(q.vec().norm(), std::abs(q.w));
}

}  // namespace quadsafe
