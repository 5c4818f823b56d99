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

#include "quadsafe/mpc.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "quadsafe/errors.hpp"

namespace quadsafe {

namespace {

constexpr double kActiveTol = 1e-6;

double inf_norm(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

bool positive_definite(const Eigen::MatrixXd& M) {
  if (!(M - M.transpose()).isZero(1e-12 * std::max(1.0, M.cwiseAbs().maxCoeff()))) return false;
  Eigen::LLT<Eigen::MatrixXd> llt(M);
  return llt.info() == Eigen::Success;
}

}  // namespace

AugMatrix MpcConfig::default_Q() {
  AugVector d = AugVector::Ones();
  d.head<3>().setConstant(100.0);
  return d.asDiagonal();
}

void MpcConfig::validate() const {
  std::vector<std::string> errs;
  if (N < 1) errs.emplace_back("mpc.N must be >= 1");
  if (!(T > 0.0)) errs.emplace_back("mpc.T must be > 0");
  if (!positive_definite(Q)) errs.emplace_back("mpc.Q must be symmetric positive definite");
  if (!positive_definite(P)) errs.emplace_back("mpc.P must be symmetric positive definite");
  if (!positive_definite(R)) errs.emplace_back("mpc.R must be symmetric positive definite");
  if (!(s_min.array() < s_max.array()).all()) errs.emplace_back("mpc input bounds need s_min < s_max");
  if (!(f_max > 0.0)) errs.emplace_back("mpc.f_max must be > 0");
  if (!(barrier_gain > 0.0)) errs.emplace_back("barrier gain p must be > 0");
  if (reach.n_samples < 2) errs.emplace_back("reach n_samples must be >= 2");
  if (reach.subdivisions < 1) errs.emplace_back("reach subdivisions must be >= 1");
  if (!errs.empty()) {
    std::ostringstream os;
    for (std::size_t i = 0; i < errs.size(); ++i) os << (i ? "; " : "") << errs[i];
    throw ConfigError(os.str());
  }
}

// ---------------------------------------------------------------------------

const std::vector<std::string>& ControllerKind::valid_names() {
  static const std::vector<std::string> names{"sdhocbf", "hocbf_filter", "mpc_dc", "dcbf", "dhocbf"};
  return names;
}

std::string ControllerKind::name() const {
  return valid_names()[static_cast<std::size_t>(type)];
}

ControllerType ControllerKind::parse_type(const std::string& name) {
  const auto& names = valid_names();
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return static_cast<ControllerType>(i);
  }
  std::string list;
  for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
  throw ConfigError("unknown controller '" + name + "' (valid: " + list + ")");
}

void ControllerKind::validate(int horizon) const {
  if (type == ControllerType::kDcbf || type == ControllerType::kDhocbf) {
    if (!(lambda > 0.0 && lambda <= 1.0)) throw ConfigError("controller lambda must lie in (0, 1]");
  }
  if (type == ControllerType::kDhocbf) {
    if (dhocbf_steps.empty()) throw ConfigError("dhocbf needs at least one step index");
    for (int i : dhocbf_steps) {
      if (i < 0 || i >= horizon) throw ConfigError("dhocbf step index out of the horizon");
    }
  }
}

// ---------------------------------------------------------------------------

MpcAssembler::MpcAssembler(const MpcConfig& cfg, const QuadParams& quad)
    : cfg_(cfg), quad_(quad), layout_{cfg.N}, cont_(augmented_continuous(quad.drag)),
      model_(discretize(quad.drag, cfg.T)) {
  cfg_.validate();
  const int N = cfg_.N;
  const Eigen::Index n = layout_.dim();

  H_ = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i <= N; ++i) {
    H_.block(layout_.z(i), layout_.z(i), kAugDim, kAugDim) = 2.0 * (i == N ? cfg_.P : cfg_.Q);
  }
  for (int i = 0; i < N; ++i) {
    H_.block(layout_.s(i), layout_.s(i), kInputDim, kInputDim) = 2.0 * cfg_.R;
  }

  // z_{i+1} − A z_i − B s_i = 0 with z_0 = z_k moved to the right-hand side.
  Aeq_ = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(kAugDim) * N, n);
  for (int i = 0; i < N; ++i) {
    const Eigen::Index row = static_cast<Eigen::Index>(kAugDim) * i;
    Aeq_.block(row, layout_.z(i + 1), kAugDim, kAugDim).setIdentity();
    if (i > 0) Aeq_.block(row, layout_.z(i), kAugDim, kAugDim) = -model_.A;
    Aeq_.block(row, layout_.s(i), kAugDim, kInputDim) = -model_.B;
  }
}

InputBox MpcAssembler::input_box() const { return {cfg_.s_min, cfg_.s_max}; }

ConeProgram MpcAssembler::base_program(const AugVector& z_k, const ReferenceWindow& refs) const {
  const int N = cfg_.N;
  if (static_cast<int>(refs.size()) != N + 1) throw ConfigError("reference window must hold N + 1 samples");
  const Eigen::Index n = layout_.dim();

  ConeProgram p;
  p.H = H_;
  Eigen::VectorXd xbar(n);
  for (int i = 1; i <= N; ++i) xbar.segment<kAugDim>(layout_.z(i)) = refs[static_cast<std::size_t>(i)].z.to_vector();
  for (int i = 0; i < N; ++i) xbar.segment<kInputDim>(layout_.s(i)) = refs[static_cast<std::size_t>(i)].s_v;
  p.f = -H_ * xbar;
  const AugVector e0 = z_k - refs[0].z.to_vector();
  p.offset = 0.5 * xbar.dot(H_ * xbar) + e0.dot(cfg_.Q * e0);

  p.Aeq = Aeq_;
  p.beq = Eigen::VectorXd::Zero(Aeq_.rows());
  p.beq.head<kAugDim>() = model_.A * z_k;

  p.lb = Eigen::VectorXd::Constant(n, -std::numeric_limits<double>::infinity());
  p.ub = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
  for (int i = 0; i < N; ++i) {
    p.lb.segment<kInputDim>(layout_.s(i)) = cfg_.s_min;
    p.ub.segment<kInputDim>(layout_.s(i)) = cfg_.s_max;
  }

  // Thrust cone on every predicted state: m ‖a_v,i − g‖ ≤ f_max.
  const double m = quad_.mass;
  const Eigen::Vector3d g = quad_.gravity_vector();
  for (int i = 1; i <= N; ++i) {
    const Eigen::Index col = layout_.z(i) + aug::kA;
    if (!cfg_.relax_to_qp) {
      SocRow r;
      r.F = Eigen::MatrixXd::Zero(3, n);
      r.F.block(0, col, 3, 3) = m * Eigen::Matrix3d::Identity();
      r.g = -m * g;
      r.a = Eigen::VectorXd::Zero(n);
      r.b = cfg_.f_max;
      p.soc_rows.push_back(std::move(r));
    } else {
      const double bound = cfg_.f_max / std::sqrt(3.0);
      for (int j = 0; j < 3; ++j) {
        for (double sign : {1.0, -1.0}) {
          // sign · m (a_v − g)_j ≤ bound
          LinRow r;
          r.c = Eigen::VectorXd::Zero(n);
          r.c(col + j) = -sign * m;
          r.d = -bound - sign * m * g(j);
          p.lin_rows.push_back(std::move(r));
        }
      }
    }
  }
  return p;
}

AugVector MpcAssembler::state(const Eigen::VectorXd& x, const AugVector& z_k, int i) const {
  if (i == 0) return z_k;
  return x.segment<kAugDim>(layout_.z(i));
}

Eigen::Vector3d MpcAssembler::input(const Eigen::VectorXd& x, int i) const {
  return x.segment<kInputDim>(layout_.s(i));
}

// ---------------------------------------------------------------------------

ConeProgram build_sdhocbf_mpc(const MpcAssembler& assembler, const AugVector& z_k, const ReferenceWindow& refs,
                              const std::vector<BarrierChain>& chains, const std::vector<double>& phis) {
  if (phis.size() != chains.size()) throw ConfigError("one compensation term per barrier expected");
  ConeProgram p = assembler.base_program(z_k, refs);
  const Eigen::Index s0 = assembler.layout().s(0);
  for (std::size_t j = 0; j < chains.size(); ++j) {
    const ConstraintRow row = hocbf_constraint_row(chains[j], z_k, phis[j]);
    LinRow r;
    r.c = Eigen::VectorXd::Zero(p.n());
    r.c.segment<kInputDim>(s0) = row.coeff;
    r.d = row.rhs;
    p.lin_rows.push_back(std::move(r));
  }
  return p;
}

ConeProgram build_sdhocbf_mpc(const MpcAssembler& assembler, const AugVector& z_k, const ReferenceWindow& refs,
                              const std::vector<BarrierChain>& chains) {
  const auto& cont = assembler.continuous();
  const ReachTables tables(cont.A_c, cont.B_c, assembler.config().T, assembler.config().reach);
  std::vector<double> phis;
  for (const auto& c : chains) phis.push_back(compensation_phi(c, z_k, tables, assembler.input_box()));
  return build_sdhocbf_mpc(assembler, z_k, refs, chains, phis);
}

ConeProgram build_hocbf_filter(const MpcAssembler& assembler, const AugVector& z_k, const Eigen::Vector3d& s_ref,
                               const std::vector<BarrierChain>& chains) {
  const MpcConfig& cfg = assembler.config();
  ConeProgram p = ConeProgram::empty(kInputDim);
  p.H = 2.0 * Eigen::Matrix3d::Identity();
  p.f = -2.0 * s_ref;
  p.offset = s_ref.squaredNorm();
  p.lb = cfg.s_min;
  p.ub = cfg.s_max;
  for (const auto& c : chains) {
    const ConstraintRow row = hocbf_constraint_row(c, z_k, 0.0);
    p.lin_rows.push_back({row.coeff, row.rhs});
  }
  // Keep the next predicted virtual acceleration inside the thrust cone.
  const QuadParams& quad = assembler.quad();
  const DiscreteModel& model = assembler.model();
  SocRow cone;
  cone.F = quad.mass * model.B.middleRows<3>(aug::kA);
  cone.g = quad.mass * ((model.A * z_k).segment<3>(aug::kA) - quad.gravity_vector());
  cone.a = Eigen::VectorXd::Zero(kInputDim);
  cone.b = cfg.f_max;
  p.soc_rows.push_back(std::move(cone));
  return p;
}

BarrierLinearization linearize_barrier(const BarrierSpec& b, const Eigen::Vector3d& p_bar) {
  const int axes = b.kind == BarrierSpec::Kind::kCylinderZ ? 2 : 3;
  Eigen::Vector3d p = p_bar;
  Eigen::Vector3d d = Eigen::Vector3d::Zero();
  d.head(axes) = (p_bar - b.center).head(axes);
  const double dist = d.norm();
  if (dist < b.radius) {
    const Eigen::Vector3d dir = dist > 1e-9 ? Eigen::Vector3d(d / dist) : Eigen::Vector3d::UnitX();
    p.head(axes) = b.center.head(axes) + b.radius * dir.head(axes);
    d.head(axes) = (p - b.center).head(axes);
  }
  BarrierLinearization lin;
  lin.grad = 2.0 * d;
  lin.offset = b.value(p) - lin.grad.dot(p);
  return lin;
}

// ---------------------------------------------------------------------------

OuterController::OuterController(const ControllerKind& kind, const MpcConfig& cfg, const QuadParams& quad,
                                 const std::vector<BarrierSpec>& barriers)
    : kind_(kind),
      quad_(quad),
      assembler_(cfg, quad),
      barriers_(barriers),
      tables_(assembler_.continuous().A_c, assembler_.continuous().B_c, cfg.T, cfg.reach),
      solver_(cfg.solver),
      filter_solver_(cfg.solver) {
  kind_.validate(cfg.N);
  for (const auto& b : barriers_) {
    chains_.push_back(build_chain_uniform(b.quadratic(), cfg.barrier_gain, assembler_.continuous().A_c,
                                          assembler_.continuous().B_c));
  }
}

Solution OuterController::run(const ConeProgram& prog, StepDiagnostics& diag) {
  Solution sol = solver_.solve(prog);
  diag.solve_time += sol.solve_time;
  diag.iterations += sol.iterations;
  diag.status = sol.status;
  return sol;
}

StepResult OuterController::solve_step(const AugVector& z_k, const ReferenceWindow& refs) {
  StepResult res;
  switch (kind_.type) {
    case ControllerType::kSdHocbf: res = solve_sdhocbf(z_k, refs); break;
    case ControllerType::kHocbfFilter: res = solve_filter(z_k, refs); break;
    default: res = solve_scp(z_k, refs); break;
  }
  res.diag.h.clear();
  for (const auto& b : barriers_) res.diag.h.push_back(b.value(z_k.head<3>()));
  if (res.diag.phi.size() != barriers_.size()) res.diag.phi.assign(barriers_.size(), 0.0);
  if (res.diag.active.size() != barriers_.size()) res.diag.active.assign(barriers_.size(), false);

  if (res.diag.status != SolveStatus::kOptimal) {
    res.s_star = previous_input_;
    res.diag.fallback = true;
    ++consecutive_infeasible_;
    ++infeasible_count_;
  } else {
    consecutive_infeasible_ = 0;
    previous_input_ = res.s_star;
    if (res.plan.size()) previous_plan_ = res.plan;
  }
  return res;
}

StepResult OuterController::solve_sdhocbf(const AugVector& z_k, const ReferenceWindow& refs) {
  StepResult res;
  for (const auto& c : chains_) res.diag.phi.push_back(compensation_phi(c, z_k, tables_, assembler_.input_box()));
  const ConeProgram prog = build_sdhocbf_mpc(assembler_, z_k, refs, chains_, res.diag.phi);
  const Solution sol = run(prog, res.diag);
  if (sol.status != SolveStatus::kOptimal) return res;
  res.plan = sol.x;
  res.s_star = assembler_.input(sol.x, 0);
  const std::size_t first = prog.lin_rows.size() - chains_.size();
  for (std::size_t j = 0; j < chains_.size(); ++j) {
    const LinRow& r = prog.lin_rows[first + j];
    res.diag.active.push_back(r.c.dot(sol.x) - r.d <= kActiveTol * (1.0 + std::abs(r.d)));
  }
  return res;
}

StepResult OuterController::solve_filter(const AugVector& z_k, const ReferenceWindow& refs) {
  StepResult res;
  const Solution nominal = run(assembler_.base_program(z_k, refs), res.diag);
  if (nominal.status != SolveStatus::kOptimal) return res;
  const Eigen::Vector3d s_mpc = assembler_.input(nominal.x, 0);

  const ConeProgram prog = build_hocbf_filter(assembler_, z_k, s_mpc, chains_);
  const Solution sol = filter_solver_.solve(prog);
  res.diag.solve_time += sol.solve_time;
  res.diag.iterations += sol.iterations;
  res.diag.status = sol.status;
  if (sol.status != SolveStatus::kOptimal) return res;
  res.s_star = sol.x;
  for (const LinRow& r : prog.lin_rows) {
    res.diag.active.push_back(r.c.dot(sol.x) - r.d <= kActiveTol * (1.0 + std::abs(r.d)));
  }
  return res;
}

Eigen::VectorXd OuterController::seed_plan(const AugVector& z_k, const ReferenceWindow& refs) const {
  const MpcLayout& L = assembler_.layout();
  const int N = L.N;
  Eigen::VectorXd x(L.dim());
  if (previous_plan_.size() == L.dim()) {
    for (int i = 1; i <= N; ++i) x.segment<kAugDim>(L.z(i)) = previous_plan_.segment<kAugDim>(L.z(std::min(i + 1, N)));
    for (int i = 0; i < N; ++i) x.segment<kInputDim>(L.s(i)) = previous_plan_.segment<kInputDim>(L.s(std::min(i + 1, N - 1)));
  } else {
    for (int i = 1; i <= N; ++i) x.segment<kAugDim>(L.z(i)) = refs[static_cast<std::size_t>(i)].z.to_vector();
    for (int i = 0; i < N; ++i) x.segment<kInputDim>(L.s(i)) = refs[static_cast<std::size_t>(i)].s_v;
  }
  (void)z_k;
  return x;
}

void OuterController::add_discrete_rows(ConeProgram& prog, const AugVector& z_k,
                                        const Eigen::VectorXd& incumbent) const {
  const MpcLayout& L = assembler_.layout();
  const int N = L.N;
  const Eigen::Index n = prog.n();

  auto position = [&](int i) -> Eigen::Vector3d {
    return i == 0 ? Eigen::Vector3d(z_k.head<3>()) : Eigen::Vector3d(incumbent.segment<3>(L.z(i)));
  };

  for (const auto& b : barriers_) {
    std::vector<BarrierLinearization> lin(static_cast<std::size_t>(N) + 1);
    for (int i = 1; i <= N; ++i) lin[static_cast<std::size_t>(i)] = linearize_barrier(b, position(i));

    if (kind_.type == ControllerType::kMpcDc) {
      for (int i = 1; i <= N; ++i) {
        LinRow r;
        r.c = Eigen::VectorXd::Zero(n);
        r.c.segment<3>(L.z(i)) += lin[static_cast<std::size_t>(i)].grad;
        r.d = -lin[static_cast<std::size_t>(i)].offset;
        prog.lin_rows.push_back(std::move(r));
      }
      continue;
    }

    std::vector<int> steps;
    if (kind_.type == ControllerType::kDcbf) {
      for (int i = 0; i < N; ++i) steps.push_back(i);
    } else {
      steps = kind_.dhocbf_steps;
    }
    const double keep = 1.0 - kind_.lambda;
    for (int i : steps) {
      // h(z_{i+1}) ≥ (1 − λ) h(z_i)
      const auto& next = lin[static_cast<std::size_t>(i) + 1];
      LinRow r;
      r.c = Eigen::VectorXd::Zero(n);
      r.c.segment<3>(L.z(i + 1)) += next.grad;
      r.d = -next.offset;
      if (kind_.lambda != 1.0) {
        if (i == 0) {
          r.d += keep * b.value(z_k.head<3>());
        } else {
          const auto& cur = lin[static_cast<std::size_t>(i)];
          r.c.segment<3>(L.z(i)) -= keep * cur.grad;
          r.d += keep * cur.offset;
        }
      }
      prog.lin_rows.push_back(std::move(r));
    }
  }
}

StepResult OuterController::solve_scp(const AugVector& z_k, const ReferenceWindow& refs) {
  constexpr int kMaxScp = 10;
  constexpr double kStepTol = 1e-6;
  StepResult res;
  const ConeProgram base = assembler_.base_program(z_k, refs);
  const std::size_t first_row = base.lin_rows.size();
  Eigen::VectorXd incumbent = seed_plan(z_k, refs);
  Solution best;
  bool have = false;
  res.diag.scp_converged = false;
  std::vector<LinRow> best_rows;
  for (int it = 1; it <= kMaxScp; ++it) {
    ConeProgram prog = base;
    add_discrete_rows(prog, z_k, incumbent);
    Solution sol = run(prog, res.diag);
    res.diag.scp_iterations = it;
    if (sol.status != SolveStatus::kOptimal) break;
    const double step = inf_norm(sol.x - incumbent);
    incumbent = sol.x;
    best = std::move(sol);
    best_rows.assign(prog.lin_rows.begin() + static_cast<std::ptrdiff_t>(first_row), prog.lin_rows.end());
    have = true;
    if (step < kStepTol) {
      res.diag.scp_converged = true;
      break;
    }
  }
  if (!have) return res;
  res.diag.status = SolveStatus::kOptimal;
  res.plan = best.x;
  res.s_star = assembler_.input(best.x, 0);

  const std::size_t rows_per = best_rows.size() / std::max<std::size_t>(1, barriers_.size());
  for (std::size_t j = 0; j < barriers_.size(); ++j) {
    bool act = false;
    for (std::size_t r = 0; r < rows_per; ++r) {
      const LinRow& row = best_rows[j * rows_per + r];
      act = act || row.c.dot(best.x) - row.d <= kActiveTol * (1.0 + std::abs(row.d));
    }
    res.diag.active.push_back(act);
  }
  return res;
}

}  // namespace quadsafe
