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

#include "quadsafe/quadratic_form.hpp"

#include <algorithm>

namespace quadsafe {

QuadraticForm::QuadraticForm(Eigen::MatrixXd Pi_, Eigen::VectorXd pi_, double c_)
    : Pi(0.5 * (Pi_ + Pi_.transpose())), pi(std::move(pi_)), c(c_) {}

QuadraticForm QuadraticForm::zero(Eigen::Index n) {
  return {Eigen::MatrixXd::Zero(n, n), Eigen::VectorXd::Zero(n), 0.0};
}

double QuadraticForm::value(const Eigen::VectorXd& z) const {
  return z.dot(Pi * z) + pi.dot(z) + c;
}

Eigen::VectorXd QuadraticForm::gradient(const Eigen::VectorXd& z) const {
  return 2.0 * Pi * z + pi;
}

QuadraticForm QuadraticForm::lie_derivative(const Eigen::MatrixXd& A) const {
  const Eigen::MatrixXd PA = Pi * A;
  return {PA + PA.transpose(), A.transpose() * pi, 0.0};
}

QuadraticForm& QuadraticForm::operator+=(const QuadraticForm& o) {
  Pi += o.Pi;
  pi += o.pi;
  c += o.c;
  return *this;
}

QuadraticForm& QuadraticForm::operator*=(double s) {
  Pi *= s;
  pi *= s;
  c *= s;
  return *this;
}

QuadraticForm operator+(QuadraticForm a, const QuadraticForm& b) { return a += b; }
QuadraticForm operator*(double s, QuadraticForm a) { return a *= s; }

double AffineMap::max_abs_coeff() const {
  double m = 0.0;
  if (G.size() > 0) m = std::max(m, G.cwiseAbs().maxCoeff());
  if (g.size() > 0) m = std::max(m, g.cwiseAbs().maxCoeff());
  return m;
}

AffineMap input_gain(const QuadraticForm& V, const Eigen::MatrixXd& B) {
  return {2.0 * B.transpose() * V.Pi, B.transpose() * V.pi};
}

}  // namespace quadsafe
