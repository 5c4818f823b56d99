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

#include <string>
#include <vector>

#include <Eigen/Core>

#include "quadsafe/augmented_model.hpp"
#include "quadsafe/quadratic_form.hpp"

namespace quadsafe {

/// Obstacle geometry. h₀ = ‖p_sub − c‖² − r² where p_sub is (x, y) for an
/// infinite vertical cylinder and (x, y, z) for a sphere.
struct BarrierSpec {
  enum class Kind { kCylinderZ, kSphere };
  Kind kind{Kind::kCylinderZ};
  Eigen::Vector3d center{Eigen::Vector3d::Zero()};
  double radius{1.0};

  /// h₀ evaluated at a plant position.
  double value(const Eigen::Vector3d& p) const;
  /// h₀ as a quadratic form over the 12-dim augmented state.
  QuadraticForm quadratic() const;
};

std::string to_string(BarrierSpec::Kind kind);
/// Throws ConfigError for anything but "cylinder_z" / "sphere".
BarrierSpec::Kind barrier_kind_from_string(const std::string& s);

/// HOCBF chain h₀ … h_{ρ−1} with linear class-K functions α_i(x) = p_i x:
///   h_i = L_f h_{i−1} + p_i h_{i−1},
/// and the final condition H(z, u) = L_f h_{ρ−1}(z) + L_g h_{ρ−1}(z) u + p_ρ h_{ρ−1}(z) ≥ 0.
struct BarrierChain {
  std::vector<QuadraticForm> h;  // h₀ … h_{ρ−1}
  std::vector<double> gains;     // p₁ … p_ρ
  QuadraticForm lf;              // L_f h_{ρ−1}
  AffineMap lg;                  // L_g h_{ρ−1}
  int rho{0};
  Eigen::MatrixXd A_c;
  Eigen::MatrixXd B_c;

  /// The u-free part of H: L_f h_{ρ−1} + p_ρ h_{ρ−1}.
  QuadraticForm h_drift() const;
  double H(const Eigen::VectorXd& z, const Eigen::VectorXd& u) const;
  Eigen::VectorXd h_values(const Eigen::VectorXd& z) const;
};

/// First index i (plus one) at which the input appears in L_f^i h₀.
/// Throws ConfigError if it never does.
int relative_degree(const QuadraticForm& h0, const Eigen::MatrixXd& A_c, const Eigen::MatrixXd& B_c);

/// Builds the chain symbolically and discovers the relative degree as the
/// first index whose input gain is not identically zero. Throws ConfigError
/// when that degree differs from gains.size() or no input ever appears.
BarrierChain build_chain(const QuadraticForm& h0, const std::vector<double>& gains,
                         const Eigen::MatrixXd& A_c, const Eigen::MatrixXd& B_c);

/// Convenience: every class-K gain equal to p, ρ taken from the structure.
BarrierChain build_chain_uniform(const QuadraticForm& h0, double p, const Eigen::MatrixXd& A_c,
                                 const Eigen::MatrixXd& B_c);

struct IntervalBox {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  bool contains(const Eigen::VectorXd& x, double tol = 0.0) const;
  Eigen::VectorXd width() const { return upper - lower; }
};

struct InputBox {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

struct ReachOptions {
  /// Sample times per (sub)interval, uniformly spaced, endpoints included.
  int n_samples{11};
  /// Split [0, T] into this many pieces and bound each separately. Values
  /// above one tighten φ at proportional cost.
  int subdivisions{1};
};

/// Precomputed flow samples for one (A_c, B_c, T, options) combination.
class ReachTables {
 public:
  ReachTables(const Eigen::MatrixXd& A_c, const Eigen::MatrixXd& B_c, double T,
              const ReachOptions& opts = {});

  int pieces() const { return static_cast<int>(pieces_.size()); }
  double horizon() const { return T_; }
  /// Over-approximation of {e^{A t} x + Γ(t) u : t ∈ piece, u ∈ U}.
  IntervalBox piece_box(int piece, const Eigen::VectorXd& x, const InputBox& U) const;
  /// Hull over all pieces, i.e. the reach box over [0, T].
  IntervalBox hull(const Eigen::VectorXd& x, const InputBox& U) const;
  int samples(int piece) const { return static_cast<int>(pieces_.at(static_cast<std::size_t>(piece)).t.size()); }
  /// Sample j of a piece: time, Φ(t) and Γ(t).
  double sample_time(int piece, int j) const;
  const Eigen::MatrixXd& sample_Phi(int piece, int j) const;
  const Eigen::MatrixXd& sample_Gamma(int piece, int j) const;

 private:
  struct Piece {
    std::vector<double> t;
    std::vector<Eigen::MatrixXd> Phi;
    std::vector<Eigen::MatrixXd> Gamma;
    double half_gap{0.0};
    Eigen::MatrixXd growth;  // e^{|A| t_end}, bounds |Φ(t)| elementwise
  };
  Eigen::MatrixXd A_c_;
  Eigen::MatrixXd B_c_;
  double T_{0.0};
  std::vector<Piece> pieces_;
};

/// Sound box containing every state reachable from x_k within [0, T] under
/// constant inputs in U: interval hull of exact per-time boxes at sample
/// times, inflated by the largest state speed between samples.
IntervalBox reach_box(const Eigen::VectorXd& x_k, double T, const InputBox& U,
                      const Eigen::MatrixXd& A_c, const Eigen::MatrixXd& B_c, int n_samples = 11);

/// Lower bound of inf_{z ∈ box, u ∈ U} [H(z, u) − H(x_k, u)] using
/// per-coordinate exact minimization of the diagonal terms, interval products
/// for the cross terms and enumeration of the vertices of U for the bilinear
/// input term. Always ≤ 0.
double phi_lower_bound(const BarrierChain& chain, const Eigen::VectorXd& x_k, const IntervalBox& box,
                       const InputBox& U);

/// Lower bound of inf_{t ∈ [0, T], u ∈ U} [H(z(t, u), u) − H(x_k, u)] where the
/// held input u both drives the flow and enters H. Between flow samples
/// t_j < t_{j+1} each u gives
///   D(t_j + s, u) ≥ D(t_j, u) + s Ḣ(z(t_j, u), u) + ½ s² K,  K ≤ inf Ḧ,
/// which is concave in s, so only s = 0 and s = t_{j+1} − t_j are checked.
/// Both ends are quadratics in u and are bounded over U. Always ≤ 0.
double phi_taylor_bound(const BarrierChain& chain, const Eigen::VectorXd& x_k, const ReachTables& tables,
                        const InputBox& U);

/// Sampled-data compensation term over one hold interval: the larger of
/// phi_lower_bound over the reach boxes and phi_taylor_bound.
double compensation_phi(const BarrierChain& chain, const Eigen::VectorXd& x_k, const ReachTables& tables,
                        const InputBox& U);
double compensation_phi(const BarrierChain& chain, const Eigen::VectorXd& x_k, double T, const InputBox& U,
                        const ReachOptions& opts = {});

/// coeff · u ≥ rhs, i.e. L_g h_{ρ−1}(z_k) u ≥ −L_f h_{ρ−1}(z_k) − p_ρ h_{ρ−1}(z_k) − φ.
struct ConstraintRow {
  Eigen::VectorXd coeff;
  double rhs{0.0};
};
ConstraintRow hocbf_constraint_row(const BarrierChain& chain, const Eigen::VectorXd& z_k, double phi);

}  // namespace quadsafe
