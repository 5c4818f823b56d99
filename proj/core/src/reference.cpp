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

#include "quadsafe/reference.hpp"

#include <cmath>

namespace quadsafe {

FlatOutput ReferenceSpec::at(double t) const {
  FlatOutput f;
  if (kind == Kind::kHover) {
    f.p = point;
    f.psi = yaw;
    return f;
  }
  const double w = angular_rate;
  const double c = std::cos(w * t);
  const double s = std::sin(w * t);
  const double r1 = radius * w;
  const double r2 = r1 * w;
  const double r3 = r2 * w;
  const double r4 = r3 * w;
  f.p = {radius * c, radius * s, altitude};
  f.v = {-r1 * s, r1 * c, 0.0};
  f.a = {-r2 * c, -r2 * s, 0.0};
  f.j = {r3 * s, -r3 * c, 0.0};
  f.s = {r4 * c, r4 * s, 0.0};
  f.psi = yaw_rate * t;
  f.dpsi = yaw_rate;
  f.ddpsi = 0.0;
  return f;
}

ReferenceWindow ReferenceSpec::window(double t0, int N, double T, const Eigen::Vector3d& drag) const {
  ReferenceWindow w;
  w.reserve(static_cast<std::size_t>(N) + 1);
  for (int i = 0; i <= N; ++i) w.push_back(reference_to_augmented(at(t0 + i * T), drag));
  return w;
}

}  // namespace quadsafe
