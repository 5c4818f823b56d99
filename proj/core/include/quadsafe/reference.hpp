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

#include "quadsafe/flatness.hpp"
#include "quadsafe/mpc.hpp"

namespace quadsafe {

/// Analytic flat reference: a horizontal circle with constant yaw rate, or a
/// fixed hover point.
struct ReferenceSpec {
  enum class Kind { kCircle, kHover };
  Kind kind{Kind::kCircle};
  // circle
  double radius{2.0};        // m
  double angular_rate{0.5};  // rad/s
  double altitude{1.0};      // m
  double yaw_rate{0.5};      // rad/s
  // hover
  Eigen::Vector3d point{0.0, 0.0, 1.0};  // m
  double yaw{0.0};                       // rad

  FlatOutput at(double t) const;
  /// Augmented samples at t0 + i T, i = 0 … N.
  ReferenceWindow window(double t0, int N, double T, const Eigen::Vector3d& drag) const;
};

}  // namespace quadsafe
