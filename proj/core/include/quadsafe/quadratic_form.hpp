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

/// z ↦ zᵀ Π z + πᵀ z + c with Π symmetric.
struct QuadraticForm {
  Eigen::MatrixXd Pi;
  Eigen::VectorXd pi;
  double c{0.0};

  QuadraticForm() = default;
  QuadraticForm(Eigen::MatrixXd Pi_, Eigen::VectorXd pi_, double c_);
  static QuadraticForm zero(Eigen::Index n);

  Eigen::Index dim() const { return pi.size(); }
  double value(const Eigen::VectorXd& z) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& z) const;

  /// Lie derivative along the linear field ż = A z:
  /// L_f V(z) = zᵀ (Π A + Aᵀ Π) z + (Aᵀ π)ᵀ z.
  QuadraticForm lie_derivative(const Eigen::MatrixXd& A) const;

  QuadraticForm& operator+=(const QuadraticForm& o);
  QuadraticForm& operator*=(double s);
};

QuadraticForm operator+(QuadraticForm a, const QuadraticForm& b);
QuadraticForm operator*(double s, QuadraticForm a);

/// z ↦ G z + g; used for the input gain L_g V(z) = (2 Π z + π)ᵀ B.
struct AffineMap {
  Eigen::MatrixXd G;
  Eigen::VectorXd g;

  Eigen::VectorXd value(const Eigen::VectorXd& z) const { return G * z + g; }
  double max_abs_coeff() const;
};

/// Input gain of a quadratic form along ż = … + B u.
AffineMap input_gain(const QuadraticForm& V, const Eigen::MatrixXd& B);

}  // namespace quadsafe
