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

#include "quadsafe/barrier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <unsupported/Eigen/MatrixFunctions>

#include "quadsafe/augmented_model.hpp"
#include "quadsafe/errors.hpp"

namespace quadsafe {

double BarrierSpec::value(const Eigen::Vector3d& p) const {
  Eigen::Vector3d d = p - center;
  if (kind == Kind::kCylinderZ) d.z() = 0.0;
  return d.squaredNorm() - radius * radius;
}

QuadraticForm BarrierSpec::quadratic() const {
  QuadraticForm q = QuadraticForm::zero(kAugDim);
  const int axes = kind == Kind::kCylinderZ ? 2 : 3;
  double c = -radius * radius;
  for (int i = 0; i < axes; ++i) {
    q.Pi(aug::kP + i, aug::kP + i) = 1.0;
    q.pi(aug::kP + i) = -2.0 * center(i);
    c += center(i) * center(i);
  }
  q.c = c;
  return q;
}

std::string to_string(BarrierSpec::Kind kind) {
  return kind == BarrierSpec::Kind::kCylinderZ ? "cylinder_z" : "sphere";
}

BarrierSpec::Kind barrier_kind_from_string(const std::string& s) {
  if (s == "cylinder_z") return BarrierSpec::Kind::kCylinderZ;
  if (s == "sphere") return BarrierSpec::Kind::kSphere;
  throw ConfigError("unknown barrier kind '" + s + "' (expected cylinder_z or sphere)");
}

QuadraticForm BarrierChain::h_drift() const {
  return lf + gains.back() * h.back();
}

double BarrierChain::H(const Eigen::VectorXd& z, const Eigen::VectorXd& u) const {
  return lf.value(z) + lg.value(z).dot(u) + gains.back() * h.back().value(z);
}

Eigen::VectorXd BarrierChain::h_values(const Eigen::VectorXd& z) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(h.size()));
  for (std::size_t i = 0; i < h.size(); ++i) out(static_cast<Eigen::Index>(i)) = h[i].value(z);
  return out;
}

namespace {

bool gain_vanishes(const AffineMap& lg, double scale) {
  return lg.max_abs_coeff() <= 1e-12 * std::max(1.0, scale);
}

double form_scale(const QuadraticForm& q) {
  return std::max(q.Pi.cwiseAbs().maxCoeff(), q.pi.size() ? q.pi.cwiseAbs().maxCoeff() : 0.0);
}

}  // namespace

int relative_degree(const QuadraticForm& h0, const Eigen::MatrixXd& A_c, const Eigen::MatrixXd& B_c) {
  const Eigen::Index n = h0.dim();
  if (A_c.rows() != n || A_c.cols() != n || B_c.rows() != n) {
    throw ConfigError("relative_degree: dimension mismatch between h0 and dynamics");
  }
  // L_g h_i = L_g L_f^i h₀ whenever the lower gains vanish, so the class-K
  // terms never change the degree. For a linear system it cannot exceed n + 1.
  QuadraticForm d = h0;
  for (Eigen::Index i = 0; i <= n; ++i) {
    if (!gain_vanishes(input_gain(d, B_c), form_scale(d))) {
      return static_cast<int>(i) + 1;
    }
    d = d.lie_derivative(A_c);
  }
  throw ConfigError("relative_degree: input never appears in the barrier derivatives");
}

BarrierChain build_chain(const QuadraticForm& h0, const std::vector<double>& gains,
                         const Eigen::MatrixXd& A_c, const Eigen::MatrixXd& B_c) {
  const int rho = relative_degree(h0, A_c, B_c);
  if (static_cast<std::size_t>(rho) != gains.size()) {
    throw ConfigError("build_chain: barrier has relative degree " + std::to_string(rho) + " but " +
                      std::to_string(gains.size()) + " class-K gains were given");
  }
  for (double p : gains) {
    if (!(p > 0.0)) throw ConfigError("build_chain: class-K gains must be positive");
  }

  BarrierChain chain;
  chain.A_c = A_c;
  chain.B_c = B_c;
  chain.gains = gains;
  chain.rho = rho;
  chain.h.push_back(h0);
  for (int i = 1; i < rho; ++i) {
    const QuadraticForm& prev = chain.h.back();
    chain.h.push_back(prev.lie_derivative(A_c) + gains[static_cast<std::size_t>(i - 1)] * prev);
  }
  chain.lf = chain.h.back().lie_derivative(A_c);
  chain.lg = input_gain(chain.h.back(), B_c);
  return chain;
}

BarrierChain build_chain_uniform(const QuadraticForm& h0, double p, const Eigen::MatrixXd& A_c,
                                 const Eigen::MatrixXd& B_c) {
  const int rho = relative_degree(h0, A_c, B_c);
  return build_chain(h0, std::vector<double>(static_cast<std::size_t>(rho), p), A_c, B_c);
}

bool IntervalBox::contains(const Eigen::VectorXd& x, double tol) const {
  return ((x - lower).array() >= -tol).all() && ((upper - x).array() >= -tol).all();
}

ReachTables::ReachTables(const Eigen::MatrixXd& A_c, const Eigen::MatrixXd& B_c, double T,
                         const ReachOptions& opts)
    : A_c_(A_c), B_c_(B_c), T_(T) {
  if (!(T >= 0.0)) throw ConfigError("reach_box: horizon must be non-negative");
  const int samples = std::max(2, opts.n_samples);
  const int pieces = std::max(1, opts.subdivisions);
  const Eigen::MatrixXd abs_a = A_c.cwiseAbs();
  for (int k = 0; k < pieces; ++k) {
    const double t0 = T * k / pieces;
    const double t1 = T * (k + 1) / pieces;
    Piece piece;
    for (int j = 0; j < samples; ++j) {
      const double t = t0 + (t1 - t0) * j / (samples - 1);
      FlowPair f = zoh_flow(A_c, B_c, t);
      piece.t.push_back(t);
      piece.Phi.push_back(std::move(f.Phi));
      piece.Gamma.push_back(std::move(f.Gamma));
    }
    piece.half_gap = 0.5 * (t1 - t0) / (samples - 1);
    piece.growth = (abs_a * t1).exp();
    pieces_.push_back(std::move(piece));
  }
}

IntervalBox ReachTables::piece_box(int k, const Eigen::VectorXd& x, const InputBox& U) const {
  const Piece& piece = pieces_.at(static_cast<std::size_t>(k));
  const Eigen::VectorXd u_mid = 0.5 * (U.lower + U.upper);
  const Eigen::VectorXd u_rad = 0.5 * (U.upper - U.lower);

  const Eigen::Index n = x.size();
  IntervalBox box{Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity()),
                  Eigen::VectorXd::Constant(n, -std::numeric_limits<double>::infinity())};
  for (std::size_t j = 0; j < piece.Phi.size(); ++j) {
    const Eigen::VectorXd mid = piece.Phi[j] * x + piece.Gamma[j] * u_mid;
    const Eigen::VectorXd rad = piece.Gamma[j].cwiseAbs() * u_rad;
    box.lower = box.lower.cwiseMin(mid - rad);
    box.upper = box.upper.cwiseMax(mid + rad);
  }

  // ẋ(t) = e^{A t} (A x + B u), so |ẋ(t)| ≤ e^{|A| t} |A x + B u| elementwise.
  const Eigen::VectorXd w = (A_c_ * x + B_c_ * u_mid).cwiseAbs() + B_c_.cwiseAbs() * u_rad;
  const Eigen::VectorXd inflate = piece.half_gap * (piece.growth * w);
  box.lower -= inflate;
  box.upper += inflate;
  return box;
}

double ReachTables::sample_time(int piece, int j) const {
  return pieces_.at(static_cast<std::size_t>(piece)).t.at(static_cast<std::size_t>(j));
}

const Eigen::MatrixXd& ReachTables::sample_Phi(int piece, int j) const {
  return pieces_.at(static_cast<std::size_t>(piece)).Phi.at(static_cast<std::size_t>(j));
}

const Eigen::MatrixXd& ReachTables::sample_Gamma(int piece, int j) const {
  return pieces_.at(static_cast<std::size_t>(piece)).Gamma.at(static_cast<std::size_t>(j));
}

IntervalBox ReachTables::hull(const Eigen::VectorXd& x, const InputBox& U) const {
  IntervalBox out = piece_box(0, x, U);
  for (int k = 1; k < pieces(); ++k) {
    const IntervalBox b = piece_box(k, x, U);
    out.lower = out.lower.cwiseMin(b.lower);
    out.upper = out.upper.cwiseMax(b.upper);
  }
  return out;
}

IntervalBox reach_box(const Eigen::VectorXd& x_k, double T, const InputBox& U, const Eigen::MatrixXd& A_c,
                      const Eigen::MatrixXd& B_c, int n_samples) {
  return ReachTables(A_c, B_c, T, ReachOptions{n_samples, 1}).hull(x_k, U);
}

namespace {

// min of q δ² + l δ over δ ∈ [a, b].
double min_scalar_quadratic(double q, double l, double a, double b) {
  double m = std::min(q * a * a + l * a, q * b * b + l * b);
  if (q > 0.0) {
    const double s = -l / (2.0 * q);
    if (s > a && s < b) m = std::min(m, q * s * s + l * s);
  }
  return m;
}

double min_product(double a0, double a1, double b0, double b1) {
  return std::min({a0 * b0, a0 * b1, a1 * b0, a1 * b1});
}
double max_product(double a0, double a1, double b0, double b1) {
  return std::max({a0 * b0, a0 * b1, a1 * b0, a1 * b1});
}

// Lower bound of q over [lo, hi] in centered form: exact per-coordinate
// minimum of the diagonal part, interval products for the cross terms.
double quadratic_box_lower_bound(const QuadraticForm& q, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  const Eigen::VectorXd mid = 0.5 * (lo + hi);
  const Eigen::VectorXd rad = 0.5 * (hi - lo);
  const Eigen::VectorXd grad = q.gradient(mid);
  double total = q.value(mid);
  const Eigen::Index n = mid.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    total += min_scalar_quadratic(q.Pi(i, i), grad(i), -rad(i), rad(i));
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double w = 2.0 * q.Pi(i, j);
      if (w != 0.0) total -= std::abs(w) * rad(i) * rad(j);
    }
  }
  return total;
}

// H as one quadratic form in w = (z, u), and the field ẇ = (A z + B u, 0) of
// a held input.
QuadraticForm joint_H(const BarrierChain& chain) {
  const QuadraticForm drift = chain.h_drift();
  const Eigen::Index n = drift.dim();
  const Eigen::Index m = chain.lg.G.rows();
  Eigen::MatrixXd Pi = Eigen::MatrixXd::Zero(n + m, n + m);
  Pi.topLeftCorner(n, n) = drift.Pi;
  Pi.bottomLeftCorner(m, n) = 0.5 * chain.lg.G;
  Pi.topRightCorner(n, m) = 0.5 * chain.lg.G.transpose();
  Eigen::VectorXd pi(n + m);
  pi << drift.pi, chain.lg.g;
  return QuadraticForm(Pi, pi, drift.c);
}

// q(L u + w0) as a form in u.
QuadraticForm restrict_affine(const QuadraticForm& q, const Eigen::MatrixXd& L, const Eigen::VectorXd& w0) {
  Eigen::MatrixXd Pi = L.transpose() * q.Pi * L;
  Pi = 0.5 * (Pi + Pi.transpose()).eval();
  return QuadraticForm(Pi, L.transpose() * (2.0 * q.Pi * w0 + q.pi), q.value(w0));
}

Eigen::MatrixXd joint_field(const BarrierChain& chain) {
  const Eigen::Index n = chain.A_c.rows();
  const Eigen::Index m = chain.B_c.cols();
  Eigen::MatrixXd F = Eigen::MatrixXd::Zero(n + m, n + m);
  F.topLeftCorner(n, n) = chain.A_c;
  F.topRightCorner(n, m) = chain.B_c;
  return F;
}

}  // namespace

double phi_lower_bound(const BarrierChain& chain, const Eigen::VectorXd& x_k, const IntervalBox& box,
                       const InputBox& U) {
  if (!box.lower.allFinite() || !box.upper.allFinite()) {
    return -std::numeric_limits<double>::max();
  }
  const QuadraticForm drift = chain.h_drift();
  const Eigen::Index n = x_k.size();
  const Eigen::VectorXd lo = box.lower - x_k;
  const Eigen::VectorXd hi = box.upper - x_k;

  // H(x_k + δ, u) − H(x_k, u) = δᵀ Π δ + (2 Π x_k + π)ᵀ δ + uᵀ G δ.
  const Eigen::VectorXd grad = drift.gradient(x_k);

  double cross = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double w = 2.0 * drift.Pi(i, j);
      if (w == 0.0) continue;
      cross += w > 0.0 ? w * min_product(lo(i), hi(i), lo(j), hi(j))
                       : w * max_product(lo(i), hi(i), lo(j), hi(j));
    }
  }

  const Eigen::Index m = U.lower.size();
  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXd vertex(m);
  for (long mask = 0; mask < (1L << m); ++mask) {
    for (Eigen::Index k = 0; k < m; ++k) vertex(k) = (mask >> k) & 1 ? U.upper(k) : U.lower(k);
    const Eigen::VectorXd lin = grad + chain.lg.G.transpose() * vertex;
    double total = cross;
    for (Eigen::Index i = 0; i < n; ++i) {
      total += min_scalar_quadratic(drift.Pi(i, i), lin(i), lo(i), hi(i));
    }
    best = std::min(best, total);
  }
  return std::min(best, 0.0);
}

double phi_taylor_bound(const BarrierChain& chain, const Eigen::VectorXd& x_k, const ReachTables& tables,
                        const InputBox& U) {
  const Eigen::MatrixXd F = joint_field(chain);
  const QuadraticForm H = joint_H(chain);
  const QuadraticForm d1 = H.lie_derivative(F);
  const QuadraticForm d2 = d1.lie_derivative(F);
  const Eigen::Index n = x_k.size();
  const Eigen::Index m = U.lower.size();

  // H(x_k, u) as a form in u; subtracted at every sample.
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n + m, m);
  L.bottomRows(m).setIdentity();
  Eigen::VectorXd w0 = Eigen::VectorXd::Zero(n + m);
  w0.head(n) = x_k;
  QuadraticForm base = restrict_affine(H, L, w0);
  base *= -1.0;

  double phi = 0.0;
  Eigen::VectorXd lo(n + m), hi(n + m);
  lo.tail(m) = U.lower;
  hi.tail(m) = U.upper;
  for (int k = 0; k < tables.pieces(); ++k) {
    const IntervalBox box = tables.piece_box(k, x_k, U);
    if (!box.lower.allFinite() || !box.upper.allFinite()) return -std::numeric_limits<double>::max();
    lo.head(n) = box.lower;
    hi.head(n) = box.upper;
    const double K = std::min(0.0, quadratic_box_lower_bound(d2, lo, hi));
    for (int j = 0; j + 1 < tables.samples(k); ++j) {
      const double step = tables.sample_time(k, j + 1) - tables.sample_time(k, j);
      L.topRows(n) = tables.sample_Gamma(k, j);
      w0.head(n) = tables.sample_Phi(k, j) * x_k;
      const QuadraticForm D = restrict_affine(H, L, w0) + base;
      QuadraticForm end = restrict_affine(d1, L, w0);
      end *= step;
      end += D;
      end.c += 0.5 * step * step * K;
      phi = std::min({phi, quadratic_box_lower_bound(D, U.lower, U.upper),
                      quadratic_box_lower_bound(end, U.lower, U.upper)});
    }
  }
  return phi;
}

double compensation_phi(const BarrierChain& chain, const Eigen::VectorXd& x_k, const ReachTables& tables,
                        const InputBox& U) {
  double phi = 0.0;
  for (int k = 0; k < tables.pieces(); ++k) {
    phi = std::min(phi, phi_lower_bound(chain, x_k, tables.piece_box(k, x_k, U), U));
  }
  // Both bounds are sound; keep the tighter one.
  return std::max(phi, phi_taylor_bound(chain, x_k, tables, U));
}

double compensation_phi(const BarrierChain& chain, const Eigen::VectorXd& x_k, double T, const InputBox& U,
                        const ReachOptions& opts) {
  return compensation_phi(chain, x_k, ReachTables(chain.A_c, chain.B_c, T, opts), U);
}

ConstraintRow hocbf_constraint_row(const BarrierChain& chain, const Eigen::VectorXd& z_k, double phi) {
  ConstraintRow row;
  row.coeff = chain.lg.value(z_k);
  row.rhs = -chain.lf.value(z_k) - chain.gains.back() * chain.h.back().value(z_k) - phi;
  return row;
}

}  // namespace quadsafe
