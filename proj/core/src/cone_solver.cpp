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

#include "quadsafe/cone_solver.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "quadsafe/errors.hpp"

namespace quadsafe {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double inf_norm(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

// ---------------------------------------------------------------------------
// Cone K = R^l_+ × Q^{q_1} × … × Q^{q_k}, vectors stored block after block.

struct Cones {
  int l{0};
  std::vector<int> q;

  int dim() const {
    int d = l;
    for (int k : q) d += k;
    return d;
  }
  int degree() const { return l + static_cast<int>(q.size()); }
};

Eigen::VectorXd identity_element(const Cones& K) {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(K.dim());
  e.head(K.l).setOnes();
  int off = K.l;
  for (int k : K.q) {
    e(off) = 1.0;
    off += k;
  }
  return e;
}

// Smallest "eigenvalue" of x with respect to K; x ∈ int K iff it is positive.
double min_eig(const Cones& K, const Eigen::VectorXd& x) {
  double m = kInf;
  if (K.l > 0) m = x.head(K.l).minCoeff();
  int off = K.l;
  for (int k : K.q) {
    m = std::min(m, x(off) - x.segment(off + 1, k - 1).norm());
    off += k;
  }
  return m;
}

// u ∘ v (Jordan product).
Eigen::VectorXd jordan(const Cones& K, const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  Eigen::VectorXd out(u.size());
  out.head(K.l) = u.head(K.l).cwiseProduct(v.head(K.l));
  int off = K.l;
  for (int k : K.q) {
    const auto u1 = u.segment(off + 1, k - 1);
    const auto v1 = v.segment(off + 1, k - 1);
    out(off) = u.segment(off, k).dot(v.segment(off, k));
    out.segment(off + 1, k - 1) = u(off) * v1 + v(off) * u1;
    off += k;
  }
  return out;
}

// Solves λ ∘ x = d for x.
Eigen::VectorXd jordan_solve(const Cones& K, const Eigen::VectorXd& lambda, const Eigen::VectorXd& d) {
  Eigen::VectorXd x(d.size());
  x.head(K.l) = d.head(K.l).cwiseQuotient(lambda.head(K.l));
  int off = K.l;
  for (int k : K.q) {
    const double l0 = lambda(off);
    const auto l1 = lambda.segment(off + 1, k - 1);
    const double det = l0 * l0 - l1.squaredNorm();
    const double x0 = (l0 * d(off) - l1.dot(d.segment(off + 1, k - 1))) / det;
    x(off) = x0;
    x.segment(off + 1, k - 1) = (d.segment(off + 1, k - 1) - x0 * l1) / l0;
    off += k;
  }
  return x;
}

// Largest α with x + α dx ∈ K (may be +inf).
double max_step(const Cones& K, const Eigen::VectorXd& x, const Eigen::VectorXd& dx) {
  double alpha = kInf;
  for (int i = 0; i < K.l; ++i) {
    if (dx(i) < 0.0) alpha = std::min(alpha, -x(i) / dx(i));
  }
  int off = K.l;
  for (int k : K.q) {
    const double s0 = x(off), d0 = dx(off);
    const auto s1 = x.segment(off + 1, k - 1);
    const auto d1 = dx.segment(off + 1, k - 1);
    const double a = d0 * d0 - d1.squaredNorm();
    const double b = 2.0 * (s0 * d0 - s1.dot(d1));
    const double c = std::max(s0 * s0 - s1.squaredNorm(), 0.0);
    double root = kInf;
    const double scale = std::max({std::abs(a), std::abs(b), c, 1e-300});
    if (std::abs(a) <= 1e-14 * scale) {
      if (b < 0.0) root = -c / b;
    } else {
      const double disc = b * b - 4.0 * a * c;
      if (disc >= 0.0) {
        const double sq = std::sqrt(disc);
        const double qq = -0.5 * (b + (b >= 0.0 ? sq : -sq));
        const double r1 = qq / a;
        const double r2 = qq != 0.0 ? c / qq : kInf;
        for (double r : {r1, r2}) {
          if (r >= 0.0) root = std::min(root, r);
        }
      }
    }
    // A ray that only touches the boundary tangentially at α = 0 is fine
    // as long as the scalar part stays positive.
    if (d0 < 0.0) root = std::min(root, -s0 / d0);
    alpha = std::min(alpha, root);
    off += k;
  }
  return alpha;
}

// Smallest pairwise product: s_i z_i on the orthant, J-norm products on cones.
double centrality(const Cones& K, const Eigen::VectorXd& s, const Eigen::VectorXd& z) {
  double c = kInf;
  for (int i = 0; i < K.l; ++i) c = std::min(c, s(i) * z(i));
  int off = K.l;
  for (int k : K.q) {
    const auto sk = s.segment(off, k);
    const auto zk = z.segment(off, k);
    const double sn = std::sqrt(std::max(sk(0) * sk(0) - sk.tail(k - 1).squaredNorm(), 0.0));
    const double zn = std::sqrt(std::max(zk(0) * zk(0) - zk.tail(k - 1).squaredNorm(), 0.0));
    c = std::min(c, sn * zn);
    off += k;
  }
  return c;
}

constexpr double kNeighbourhood = 1e-3;

// Nesterov–Todd scaling W with W z = W⁻¹ s = λ.
struct Scaling {
  Eigen::VectorXd d;                  // orthant part, sqrt(s / z)
  std::vector<Eigen::VectorXd> wbar;  // SOC parts, J-unit vectors v
  std::vector<double> beta;
  Eigen::VectorXd lambda;
};

double jnorm(const Eigen::VectorXd& v) {
  return std::sqrt(std::max(v(0) * v(0) - v.tail(v.size() - 1).squaredNorm(), 0.0));
}

Eigen::VectorXd apply_j(Eigen::VectorXd v) {
  v.tail(v.size() - 1) *= -1.0;
  return v;
}

Scaling compute_scaling(const Cones& K, const Eigen::VectorXd& s, const Eigen::VectorXd& z) {
  Scaling W;
  W.d = (s.head(K.l).array() / z.head(K.l).array()).sqrt().matrix();
  W.lambda.resize(s.size());
  W.lambda.head(K.l) = (s.head(K.l).array() * z.head(K.l).array()).sqrt().matrix();
  int off = K.l;
  for (int k : K.q) {
    const Eigen::VectorXd sk = s.segment(off, k);
    const Eigen::VectorXd zk = z.segment(off, k);
    const double sn = jnorm(sk), zn = jnorm(zk);
    const Eigen::VectorXd sb = sk / sn;
    const Eigen::VectorXd zb = zk / zn;
    const double gamma = std::sqrt(0.5 * (1.0 + sb.dot(zb)));
    Eigen::VectorXd wb = (sb + apply_j(zb)) / (2.0 * gamma);
    // Reflect w̄ into the J-unit vector v with (2 v vᵀ − J)² z̄ = s̄.
    const double w0 = wb(0);
    wb(0) += 1.0;
    wb /= std::sqrt(2.0 * (w0 + 1.0));
    const double beta = std::sqrt(sn / zn);
    W.wbar.push_back(wb);
    W.beta.push_back(beta);
    // λ = W z = β (2 w̄ (w̄ᵀ z) − J z).
    W.lambda.segment(off, k) = beta * (2.0 * wb * wb.dot(zk) - apply_j(zk));
    off += k;
  }
  return W;
}

// y = W x for a block vector, or W applied to each column of a matrix.
template <typename Mat>
void apply_w(const Cones& K, const Scaling& W, Mat& x, bool inverse) {
  for (int i = 0; i < K.l; ++i) {
    x.row(i) *= inverse ? 1.0 / W.d(i) : W.d(i);
  }
  int off = K.l;
  for (std::size_t b = 0; b < K.q.size(); ++b) {
    const int k = K.q[b];
    auto blk = x.middleRows(off, k);
    const Eigen::VectorXd& w = W.wbar[b];
    if (!inverse) {
      // β (2 w̄ w̄ᵀ − J)
      Eigen::MatrixXd prod = 2.0 * w * (w.transpose() * blk);
      blk.bottomRows(k - 1) *= -1.0;  // J blk
      blk = W.beta[b] * (prod - blk);
    } else {
      // β⁻¹ (2 J w̄ w̄ᵀ J − J)
      const Eigen::VectorXd jw = apply_j(w);
      Eigen::MatrixXd prod = 2.0 * jw * (jw.transpose() * blk);
      blk.bottomRows(k - 1) *= -1.0;  // J blk
      blk = (prod - blk) / W.beta[b];
    }
    off += k;
  }
}

Eigen::VectorXd w_times(const Cones& K, const Scaling& W, Eigen::VectorXd x, bool inverse) {
  apply_w(K, W, x, inverse);
  return x;
}

// ---------------------------------------------------------------------------
// Reduced program: min ½ yᵀ P y + qᵀ y  s.t.  G y + s = h, s ∈ K.

struct Reduced {
  Eigen::MatrixXd P;
  Eigen::VectorXd q;
  Eigen::MatrixXd G;
  Eigen::VectorXd h;
  Cones K;
};

struct IpmResult {
  Eigen::VectorXd y;
  Eigen::VectorXd s;
  Eigen::VectorXd z;
  SolveStatus status{SolveStatus::kMaxIter};
  int iterations{0};
};

class NewtonSystem {
 public:
  bool factor(const Eigen::MatrixXd& M) {
    llt_.compute(M);
    use_ldlt_ = llt_.info() != Eigen::Success;
    if (use_ldlt_) {
      const double reg = 1e-12 * std::max(1.0, M.diagonal().cwiseAbs().maxCoeff());
      ldlt_.compute(M + reg * Eigen::MatrixXd::Identity(M.rows(), M.cols()));
      return ldlt_.info() == Eigen::Success;
    }
    return true;
  }
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const {
    return use_ldlt_ ? Eigen::VectorXd(ldlt_.solve(b)) : Eigen::VectorXd(llt_.solve(b));
  }

 private:
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::LDLT<Eigen::MatrixXd> ldlt_;
  bool use_ldlt_{false};
};

IpmResult run_ipm(const Reduced& R, const SolverConfig& cfg,
                  const std::function<bool(const IpmResult&)>& accept) {
  const Cones& K = R.K;
  IpmResult out;

  if (K.dim() == 0) {
    NewtonSystem sys;
    sys.factor(R.P);
    out.y = sys.solve(-R.q);
    out.s.resize(0);
    out.z.resize(0);
    out.status = out.y.allFinite() ? SolveStatus::kOptimal : SolveStatus::kInfeasible;
    return out;
  }

  const Eigen::VectorXd e = identity_element(K);
  const double qscale = 1.0 + inf_norm(R.q);
  const double hscale = 1.0 + inf_norm(R.h);

  // Start: least-squares primal point, then push s and z into the interior.
  NewtonSystem sys;
  {
    sys.factor(R.P + R.G.transpose() * R.G);
    Eigen::VectorXd y = sys.solve(-R.q + R.G.transpose() * R.h);
    Eigen::VectorXd s = R.h - R.G * y;
    Eigen::VectorXd z = -s;
    const double as = min_eig(K, s);
    if (as <= 0.0) s += (1.0 - as) * e;
    const double az = min_eig(K, z);
    if (az <= 0.0) z += (1.0 - az) * e;
    // Balance the pair so no single product s∘z dominates the gap; without
    // this, far-inactive rows with huge slacks can trap the iteration in a cycle.
    const double sz = s.dot(z);
    const double shift_s = 0.5 * sz / e.dot(z);
    const double shift_z = 0.5 * sz / e.dot(s);
    s += shift_s * e;
    z += shift_z * e;
    out.y = y;
    out.s = s;
    out.z = z;
  }

  for (int it = 0; it < cfg.max_iter; ++it) {
    out.iterations = it;
    Eigen::VectorXd& y = out.y;
    Eigen::VectorXd& s = out.s;
    Eigen::VectorXd& z = out.z;

    const Eigen::VectorXd rx = R.P * y + R.q + R.G.transpose() * z;
    const Eigen::VectorXd rz = R.G * y + s - R.h;
    const double gap = s.dot(z);
    const double mu = gap / K.degree();
    const double pcost = 0.5 * y.dot(R.P * y) + R.q.dot(y);

    if (inf_norm(rx) <= cfg.feas_tol * qscale && inf_norm(rz) <= cfg.feas_tol * hscale &&
        gap <= cfg.gap_tol * std::max(1.0, std::abs(pcost))) {
      out.status = SolveStatus::kOptimal;
      if (accept(out)) return out;
    }

    // Fallback when the iteration cannot proceed: settle for a slightly looser
    // gap if the contract in original coordinates still holds.
    auto settle = [&]() {
      const bool near = inf_norm(rx) <= 1e3 * cfg.feas_tol * qscale && inf_norm(rz) <= 1e3 * cfg.feas_tol * hscale &&
                        gap <= 1e3 * cfg.gap_tol * std::max(1.0, std::abs(pcost));
      out.status = near && accept(out) ? SolveStatus::kOptimal : SolveStatus::kMaxIter;
      return out;
    };

    // Primal infeasibility certificate: Gᵀ z ≈ 0, hᵀ z < 0, z ∈ K.
    const double hz = R.h.dot(z);
    if (hz < 0.0 && inf_norm(R.G.transpose() * z) <= 1e-9 * (-hz) && inf_norm(rz) > cfg.feas_tol * hscale) {
      out.status = SolveStatus::kInfeasible;
      return out;
    }

    const Scaling W = compute_scaling(K, s, z);
    const Eigen::VectorXd& lambda = W.lambda;
    Eigen::MatrixXd Gs = R.G;
    apply_w(K, W, Gs, /*inverse=*/true);
    if (!sys.factor(R.P + Gs.transpose() * Gs)) return settle();
    // Solves  P Δy + Gᵀ Δz = bx,  G Δy + Δs = bz,  W Δz + W⁻¹ Δs = bt
    // through the normal equations, then refines against the full system.
    struct Step {
      Eigen::VectorXd dy, ds, dz;
    };
    auto solve_once = [&](const Eigen::VectorXd& bx, const Eigen::VectorXd& bz, const Eigen::VectorXd& bt) {
      const Eigen::VectorXd v = bt - w_times(K, W, bz, true);
      Step st;
      st.dy = sys.solve(bx - Gs.transpose() * v);
      const Eigen::VectorXd dzs = Gs * st.dy + v;
      st.dz = w_times(K, W, dzs, true);
      st.ds = w_times(K, W, bt - dzs, false);
      return st;
    };
    auto newton = [&](const Eigen::VectorXd& bt, Eigen::VectorXd& dy, Eigen::VectorXd& ds_scaled,
                      Eigen::VectorXd& dz_scaled) {
      const Eigen::VectorXd bx = -rx;
      const Eigen::VectorXd bz = -rz;
      Step st = solve_once(bx, bz, bt);
      for (int r = 0; r < 2; ++r) {
        const Eigen::VectorXd e1 = bx - R.P * st.dy - R.G.transpose() * st.dz;
        const Eigen::VectorXd e2 = bz - R.G * st.dy - st.ds;
        const Eigen::VectorXd e3 = bt - w_times(K, W, st.dz, false) - w_times(K, W, st.ds, true);
        const Step c = solve_once(e1, e2, e3);
        st.dy += c.dy;
        st.ds += c.ds;
        st.dz += c.dz;
      }
      dy = st.dy;
      ds_scaled = w_times(K, W, st.ds, true);
      dz_scaled = w_times(K, W, st.dz, false);
    };

    Eigen::VectorXd dy, dss, dzs;
    newton(-lambda, dy, dss, dzs);
    Eigen::VectorXd ds = w_times(K, W, dss, false);
    Eigen::VectorXd dz = w_times(K, W, dzs, true);
    const double a_aff = std::min({1.0, max_step(K, s, ds), max_step(K, z, dz)});
    const double mu_aff = (s + a_aff * ds).dot(z + a_aff * dz) / K.degree();
    const double sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0);

    const Eigen::VectorXd target = -jordan(K, lambda, lambda) - jordan(K, dss, dzs) + sigma * mu * e;
    newton(jordan_solve(K, lambda, target), dy, dss, dzs);
    ds = w_times(K, W, dss, false);
    dz = w_times(K, W, dzs, true);
    const double a_max = std::min(max_step(K, s, ds), max_step(K, z, dz));
    double alpha = std::min(1.0, cfg.step_fraction * a_max);
    // Keep iterates in a wide neighbourhood of the central path and, once
    // feasible, insist on a decreasing μ; plain Mehrotra steps can cycle.
    const bool feasible = inf_norm(rx) <= 1e-6 * qscale && inf_norm(rz) <= 1e-6 * hscale;
    for (int bt = 0; bt < 40 && alpha > 1e-14; ++bt) {
      const Eigen::VectorXd s2 = s + alpha * ds;
      const Eigen::VectorXd z2 = z + alpha * dz;
      const double mu2 = s2.dot(z2) / K.degree();
      if ((!feasible || mu2 <= (1.0 - 0.01 * alpha) * mu) && centrality(K, s2, z2) >= kNeighbourhood * mu2) break;
      alpha *= 0.7;
    }
    if (!(alpha > 1e-14) || !dy.allFinite() || !ds.allFinite() || !dz.allFinite()) return settle();
    y += alpha * dy;
    s += alpha * ds;
    z += alpha * dz;
  }
  out.iterations = cfg.max_iter;
  out.status = SolveStatus::kMaxIter;
  return out;
}

// Inequalities of the original program as G x + s = h, s ∈ K, ordered
// [linear rows, finite lower bounds, finite upper bounds, cone rows].
struct Inequalities {
  Eigen::MatrixXd G;
  Eigen::VectorXd h;
  Cones K;
  std::vector<Eigen::Index> lower_idx;
  std::vector<Eigen::Index> upper_idx;
};

Inequalities assemble_inequalities(const ConeProgram& p) {
  Inequalities in;
  const Eigen::Index n = p.n();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::isfinite(p.lb(i))) in.lower_idx.push_back(i);
    if (std::isfinite(p.ub(i))) in.upper_idx.push_back(i);
  }
  const int l = static_cast<int>(p.lin_rows.size() + in.lower_idx.size() + in.upper_idx.size());
  in.K.l = l;
  int rows = l;
  for (const SocRow& r : p.soc_rows) {
    in.K.q.push_back(static_cast<int>(r.F.rows()) + 1);
    rows += static_cast<int>(r.F.rows()) + 1;
  }
  in.G = Eigen::MatrixXd::Zero(rows, n);
  in.h = Eigen::VectorXd::Zero(rows);
  int row = 0;
  for (const LinRow& r : p.lin_rows) {
    in.G.row(row) = -r.c.transpose();
    in.h(row) = -r.d;
    ++row;
  }
  for (Eigen::Index i : in.lower_idx) {
    in.G(row, i) = -1.0;
    in.h(row) = -p.lb(i);
    ++row;
  }
  for (Eigen::Index i : in.upper_idx) {
    in.G(row, i) = 1.0;
    in.h(row) = p.ub(i);
    ++row;
  }
  for (const SocRow& r : p.soc_rows) {
    const Eigen::Index m = r.F.rows();
    in.G.row(row) = -r.a.transpose();
    in.h(row) = r.b;
    in.G.middleRows(row + 1, m) = -r.F;
    in.h.segment(row + 1, m) = r.g;
    row += static_cast<int>(m) + 1;
  }
  return in;
}

Duals split_duals(const ConeProgram& p, const Inequalities& in, const Eigen::VectorXd& z) {
  Duals d;
  const Eigen::Index n = p.n();
  d.lower = Eigen::VectorXd::Zero(n);
  d.upper = Eigen::VectorXd::Zero(n);
  d.lin = z.head(static_cast<Eigen::Index>(p.lin_rows.size()));
  Eigen::Index row = d.lin.size();
  for (Eigen::Index i : in.lower_idx) d.lower(i) = z(row++);
  for (Eigen::Index i : in.upper_idx) d.upper(i) = z(row++);
  for (int k : in.K.q) {
    d.soc.push_back(z.segment(row, k));
    row += k;
  }
  return d;
}

}  // namespace

// ---------------------------------------------------------------------------

ConeProgram ConeProgram::empty(Eigen::Index n) {
  ConeProgram p;
  p.H = Eigen::MatrixXd::Zero(n, n);
  p.f = Eigen::VectorXd::Zero(n);
  p.Aeq.resize(0, n);
  p.beq.resize(0);
  p.lb = Eigen::VectorXd::Constant(n, -kInf);
  p.ub = Eigen::VectorXd::Constant(n, kInf);
  return p;
}

double ConeProgram::objective(const Eigen::VectorXd& x) const {
  return 0.5 * x.dot(H * x) + f.dot(x) + offset;
}

void ConeProgram::validate(bool check_psd) const {
  const Eigen::Index nn = n();
  auto fail = [](const std::string& what) { throw ConfigError("ConeProgram: " + what); };
  if (H.rows() != nn || H.cols() != nn) fail("H must be n x n");
  if (Aeq.cols() != nn || Aeq.rows() != beq.size()) fail("Aeq/beq dimensions");
  if (lb.size() != nn || ub.size() != nn) fail("bound dimensions");
  for (const LinRow& r : lin_rows) {
    if (r.c.size() != nn) fail("linear row dimension");
  }
  for (const SocRow& r : soc_rows) {
    if (r.F.cols() != nn || r.F.rows() != r.g.size() || r.a.size() != nn) fail("cone row dimensions");
  }
  if ((lb.array() > ub.array()).any()) fail("lb > ub");
  const double hscale = std::max(1.0, H.cwiseAbs().maxCoeff());
  if (!(H - H.transpose()).isZero(1e-12 * hscale)) fail("H not symmetric");
  if (check_psd && nn > 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(H, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -1e-9 * hscale) fail("H not positive semidefinite");
  }
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kMaxIter: return "max_iter";
  }
  return "unknown";
}

double KktResiduals::primal() const { return std::max({equality, box, cone, linear}); }

KktResiduals kkt_residuals(const ConeProgram& p, const Eigen::VectorXd& x, const Duals* duals) {
  KktResiduals r;
  if (p.Aeq.rows() > 0) r.equality = inf_norm(p.Aeq * x - p.beq);
  for (Eigen::Index i = 0; i < p.n(); ++i) {
    r.box = std::max({r.box, p.lb(i) - x(i), x(i) - p.ub(i)});
  }
  for (const SocRow& row : p.soc_rows) {
    r.cone = std::max(r.cone, (row.F * x + row.g).norm() - row.a.dot(x) - row.b);
  }
  for (const LinRow& row : p.lin_rows) {
    r.linear = std::max(r.linear, row.d - row.c.dot(x));
  }

  Eigen::VectorXd grad = p.H * x + p.f;
  if (duals != nullptr) {
    grad -= duals->lower;
    grad += duals->upper;
    for (std::size_t i = 0; i < p.lin_rows.size(); ++i) {
      grad -= duals->lin(static_cast<Eigen::Index>(i)) * p.lin_rows[i].c;
    }
    for (std::size_t j = 0; j < p.soc_rows.size(); ++j) {
      const SocRow& row = p.soc_rows[j];
      const Eigen::VectorXd& zj = duals->soc[j];
      grad -= zj(0) * row.a + row.F.transpose() * zj.tail(zj.size() - 1);
    }
    if (p.Aeq.rows() > 0) grad -= p.Aeq.transpose() * duals->eq;

    double comp = 0.0;
    for (Eigen::Index i = 0; i < p.n(); ++i) {
      if (std::isfinite(p.lb(i))) comp += std::abs(duals->lower(i) * (x(i) - p.lb(i)));
      if (std::isfinite(p.ub(i))) comp += std::abs(duals->upper(i) * (p.ub(i) - x(i)));
    }
    for (std::size_t i = 0; i < p.lin_rows.size(); ++i) {
      comp += std::abs(duals->lin(static_cast<Eigen::Index>(i)) * (p.lin_rows[i].c.dot(x) - p.lin_rows[i].d));
    }
    for (std::size_t j = 0; j < p.soc_rows.size(); ++j) {
      const SocRow& row = p.soc_rows[j];
      Eigen::VectorXd s(row.F.rows() + 1);
      s(0) = row.a.dot(x) + row.b;
      s.tail(row.F.rows()) = row.F * x + row.g;
      comp += std::abs(s.dot(duals->soc[j]));
    }
    r.complementarity = comp;
  } else if (p.Aeq.rows() > 0) {
    // Remove the component the equality multipliers can absorb.
    const Eigen::VectorXd nu = p.Aeq.transpose().colPivHouseholderQr().solve(grad);
    grad -= p.Aeq.transpose() * nu;
  }
  r.stationarity = inf_norm(grad);
  return r;
}

// ---------------------------------------------------------------------------

struct ConeSolver::Workspace {
  // Null-space cache, keyed on Aeq.
  Eigen::MatrixXd Aeq;
  bool has_basis{false};
  Eigen::MatrixXd Q1;  // range(Aeqᵀ)
  Eigen::MatrixXd Z;   // null(Aeq)
  Eigen::MatrixXd R11;
  Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic> perm;
  Eigen::Index rank{0};
  // Reduced Hessian cache, keyed on H and the basis.
  Eigen::MatrixXd H;
  Eigen::MatrixXd ZtHZ;
  bool has_reduced_h{false};
  // Last cost matrix that passed the semidefiniteness test.
  Eigen::MatrixXd psd_checked;

  void update_basis(const ConeProgram& p) {
    if (has_basis && Aeq.rows() == p.Aeq.rows() && Aeq.cols() == p.Aeq.cols() && Aeq == p.Aeq) return;
    Aeq = p.Aeq;
    has_reduced_h = false;
    const Eigen::Index n = p.n();
    if (p.Aeq.rows() == 0) {
      rank = 0;
      Q1.resize(n, 0);
      Z = Eigen::MatrixXd::Identity(n, n);
      R11.resize(0, 0);
      perm.resize(0);
    } else {
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(p.Aeq.transpose());
      rank = qr.rank();
      const Eigen::MatrixXd Q = qr.householderQ();
      Q1 = Q.leftCols(rank);
      Z = Q.rightCols(n - rank);
      R11 = qr.matrixR().topLeftCorner(rank, rank).triangularView<Eigen::Upper>();
      perm = qr.colsPermutation();
    }
    has_basis = true;
  }

  const Eigen::MatrixXd& reduced_hessian(const Eigen::MatrixXd& H_in) {
    if (has_reduced_h && H.rows() == H_in.rows() && H == H_in) return ZtHZ;
    H = H_in;
    ZtHZ = Z.transpose() * H_in * Z;
    ZtHZ = 0.5 * (ZtHZ + ZtHZ.transpose()).eval();
    has_reduced_h = true;
    return ZtHZ;
  }

  Eigen::VectorXd particular(const Eigen::VectorXd& beq) const {
    if (rank == 0) return Eigen::VectorXd::Zero(Z.rows());
    const Eigen::VectorXd bt = perm.transpose() * beq;
    const Eigen::VectorXd w =
        R11.transpose().triangularView<Eigen::Lower>().solve(bt.head(rank));
    return Q1 * w;
  }

  Eigen::VectorXd eq_multipliers(const Eigen::VectorXd& g, Eigen::Index m) const {
    Eigen::VectorXd nt = Eigen::VectorXd::Zero(m);
    if (rank > 0) nt.head(rank) = R11.triangularView<Eigen::Upper>().solve(Q1.transpose() * g);
    return perm * nt;
  }
};

ConeSolver::ConeSolver(SolverConfig cfg) : cfg_(cfg), ws_(std::make_unique<Workspace>()) {}
ConeSolver::~ConeSolver() = default;
ConeSolver::ConeSolver(ConeSolver&&) noexcept = default;
ConeSolver& ConeSolver::operator=(ConeSolver&&) noexcept = default;

Solution ConeSolver::solve(const ConeProgram& p) {
  const auto t0 = std::chrono::steady_clock::now();
  Workspace& ws = *ws_;
  const bool vetted = ws.psd_checked.rows() == p.H.rows() && ws.psd_checked.cols() == p.H.cols() &&
                      ws.psd_checked == p.H;
  p.validate(!vetted);
  if (!vetted) ws.psd_checked = p.H;
  ws.update_basis(p);

  Solution sol;
  const Eigen::VectorXd x0 = ws.particular(p.beq);
  const double eq_res = p.Aeq.rows() ? inf_norm(p.Aeq * x0 - p.beq) : 0.0;
  auto finish = [&](Solution& s) {
    s.solve_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return s;
  };
  if (eq_res > 1e-9 * (1.0 + inf_norm(p.beq))) {
    sol.x = x0;
    sol.status = SolveStatus::kInfeasible;
    sol.kkt = kkt_residuals(p, x0);
    sol.objective = p.objective(x0);
    return finish(sol);
  }

  const Inequalities in = assemble_inequalities(p);
  Reduced red;
  red.P = ws.reduced_hessian(p.H);
  red.q = ws.Z.transpose() * (p.H * x0 + p.f);
  red.G = in.G * ws.Z;
  red.h = in.h - in.G * x0;
  red.K = in.K;

  auto recover = [&](const IpmResult& r, Solution& s) {
    s.x = x0 + ws.Z * r.y;
    s.duals = split_duals(p, in, r.z);
    const Eigen::VectorXd g = p.H * s.x + p.f + in.G.transpose() * r.z;
    s.duals.eq = ws.eq_multipliers(g, p.Aeq.rows());
    s.kkt = kkt_residuals(p, s.x, &s.duals);
    s.objective = p.objective(s.x);
    s.iterations = r.iterations;
  };

  // The reduced residuals are scaled; insist on the absolute contract in the
  // original coordinates before declaring optimality.
  auto accept = [&](const IpmResult& r) {
    Solution trial;
    recover(r, trial);
    return trial.kkt.primal() <= 1e-7 && trial.kkt.stationarity <= 1e-6;
  };

  const IpmResult r = run_ipm(red, cfg_, accept);
  recover(r, sol);
  sol.status = r.status;
  if (sol.status == SolveStatus::kOptimal && !accept(r)) sol.status = SolveStatus::kMaxIter;
  return finish(sol);
}

Solution solve(const ConeProgram& p, const SolverConfig& cfg) {
  ConeSolver solver(cfg);
  return solver.solve(p);
}

// ---------------------------------------------------------------------------

namespace {

void write_vector(std::ostream& os, const char* tag, const Eigen::VectorXd& v) {
  os << tag << ' ' << v.size() << '\n';
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? " " : "") << v(i);
  os << '\n';
}

void write_matrix(std::ostream& os, const char* tag, const Eigen::MatrixXd& m) {
  os << tag << ' ' << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) os << (j ? " " : "") << m(i, j);
    os << '\n';
  }
}

class Reader {
 public:
  explicit Reader(std::istream& is) : is_(is) {}

  void expect(const std::string& tag) {
    std::string t;
    if (!(is_ >> t) || t != tag) throw ConfigError("program fixture: expected '" + tag + "', got '" + t + "'");
  }
  long integer() {
    std::string t;
    if (!(is_ >> t)) throw ConfigError("program fixture: truncated");
    return std::stol(t);
  }
  double real() {
    std::string t;
    if (!(is_ >> t)) throw ConfigError("program fixture: truncated");
    return std::stod(t);
  }
  Eigen::VectorXd vector(const std::string& tag) {
    expect(tag);
    Eigen::VectorXd v(integer());
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = real();
    return v;
  }
  Eigen::MatrixXd matrix(const std::string& tag) {
    expect(tag);
    const long r = integer();
    const long c = integer();
    Eigen::MatrixXd m(r, c);
    for (long i = 0; i < r; ++i)
      for (long j = 0; j < c; ++j) m(i, j) = real();
    return m;
  }

 private:
  std::istream& is_;
};

}  // namespace

void dump_program(const ConeProgram& p, std::ostream& os) {
  const auto flags = os.flags();
  const auto prec = os.precision();
  os << std::setprecision(17);
  os << "quadsafe_cone_program 1\n";
  write_matrix(os, "H", p.H);
  write_vector(os, "f", p.f);
  os << "offset " << p.offset << '\n';
  write_matrix(os, "Aeq", p.Aeq);
  write_vector(os, "beq", p.beq);
  write_vector(os, "lb", p.lb);
  write_vector(os, "ub", p.ub);
  os << "lin " << p.lin_rows.size() << '\n';
  for (const LinRow& r : p.lin_rows) {
    write_vector(os, "c", r.c);
    os << "d " << r.d << '\n';
  }
  os << "soc " << p.soc_rows.size() << '\n';
  for (const SocRow& r : p.soc_rows) {
    write_matrix(os, "F", r.F);
    write_vector(os, "g", r.g);
    write_vector(os, "a", r.a);
    os << "b " << r.b << '\n';
  }
  os << "end\n";
  os.flags(flags);
  os.precision(prec);
}

ConeProgram load_program(std::istream& is) {
  Reader rd(is);
  rd.expect("quadsafe_cone_program");
  if (rd.integer() != 1) throw ConfigError("program fixture: unsupported version");
  ConeProgram p;
  p.H = rd.matrix("H");
  p.f = rd.vector("f");
  rd.expect("offset");
  p.offset = rd.real();
  p.Aeq = rd.matrix("Aeq");
  p.beq = rd.vector("beq");
  p.lb = rd.vector("lb");
  p.ub = rd.vector("ub");
  rd.expect("lin");
  const long nl = rd.integer();
  for (long i = 0; i < nl; ++i) {
    LinRow r;
    r.c = rd.vector("c");
    rd.expect("d");
    r.d = rd.real();
    p.lin_rows.push_back(std::move(r));
  }
  rd.expect("soc");
  const long ns = rd.integer();
  for (long i = 0; i < ns; ++i) {
    SocRow r;
    r.F = rd.matrix("F");
    r.g = rd.vector("g");
    r.a = rd.vector("a");
    rd.expect("b");
    r.b = rd.real();
    p.soc_rows.push_back(std::move(r));
  }
  rd.expect("end");
  p.validate();
  return p;
}

}  // namespace quadsafe
