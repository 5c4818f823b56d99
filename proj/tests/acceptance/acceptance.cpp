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

// Acceptance report: one PASS/FAIL line per primary criterion. Hard gates
// decide the exit status; soft gates are reported with their numbers only.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "admm_socp.hpp"
#include "attitude_recovery.hpp"
#include "expm.hpp"
#include "grid_phi.hpp"
#include "quadsafe/barrier.hpp"
#include "quadsafe/metrics.hpp"
#include "quadsafe/scenario.hpp"
#include "quadsafe/simulation.hpp"
#include "random_socp.hpp"

namespace {

using namespace quadsafe;

const std::string kDir = QUADSAFE_SCENARIO_DIR;

int hard_failures = 0;

void report(bool hard, bool pass, const std::string& name, const std::string& detail) {
  const char* tag = pass ? "PASS" : (hard ? "FAIL" : "WARN");
  std::printf("[%s] %-28s %s%s\n", tag, name.c_str(), hard ? "" : "(soft) ", detail.c_str());
  std::fflush(stdout);
  if (hard && !pass) ++hard_failures;
}

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

double min_of(const std::vector<double>& v) {
  double m = INFINITY;
  for (double x : v) m = std::min(m, x);
  return v.empty() ? 0.0 : m;
}

struct Run {
  ScenarioConfig cfg;
  SimLog log;
  Metrics m;
  double wall{0.0};
};

Run simulate(ScenarioConfig cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  Run r;
  r.log = run_simulation(cfg);
  r.wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.m = compute_metrics(r.log, cfg);
  r.cfg = std::move(cfg);
  return r;
}

ScenarioConfig with_controller(ScenarioConfig cfg, ControllerType t, double lambda = 0.2) {
  cfg.controller.type = t;
  cfg.controller.lambda = lambda;
  return cfg;
}

std::string run_summary(const Run& r) {
  return fmt("%s%s, %.2f s simulated, min_h %.4g", r.log.ok ? "ok" : "aborted: ", r.log.ok ? "" : r.log.failure.c_str(),
             r.m.simulated_time, min_of(r.m.min_h));
}

// --------------------------------------------------------------------------

void safety_invariance(const Run& r) {
  const bool complete = r.log.ok && r.m.simulated_time >= r.cfg.sim.duration - 1e-9;
  const bool safe = min_of(r.m.min_h) >= -1e-6;
  report(true, complete && safe && r.wall < 60.0, "safety invariance",
         fmt("scenario 1, sdhocbf p=5: %s, h1 %.4g, h2 %.4g, wall %.1f s", run_summary(r).c_str(), r.m.min_h[0],
             r.m.min_h[1], r.wall));
}

void phi_soundness() {
  const ScenarioConfig cfg = load_scenario(kDir + "/circle_two_cylinders.toml");
  const ContinuousModel m = augmented_continuous(cfg.quad.drag);
  std::vector<BarrierChain> chains;
  for (const auto& b : cfg.barriers) chains.push_back(build_chain_uniform(b.quadratic(), 5.0, m.A_c, m.B_c));
  const InputBox U{cfg.mpc.s_min, cfg.mpc.s_max};
  const ReachTables tables(m.A_c, m.B_c, cfg.mpc.T, cfg.mpc.reach);
  const oracle::FlowGrid grid(m.A_c, m.B_c, cfg.mpc.T, 41);
  const std::vector<Eigen::VectorXd> base_inputs = oracle::input_grid(U, 7);

  std::mt19937 rng(1000);
  std::normal_distribution<double> N;
  std::uniform_real_distribution<double> Uu(-40.0, 40.0);
  int violations = 0;
  double worst_margin = INFINITY, ratio_sum = 0.0;
  int negative = 0;
  const int draws = 1000;
  for (int k = 0; k < draws; ++k) {
    const BarrierChain& c = chains[static_cast<std::size_t>(k % 2)];
    AugVector x;
    x << 2.0 * N(rng), (k % 2 ? -2.0 : 2.0) + 2.0 * N(rng), 1.0 + 0.3 * N(rng), 1.5 * N(rng), 1.5 * N(rng),
        0.5 * N(rng), 4.0 * N(rng), 4.0 * N(rng), 2.0 * N(rng), 10.0 * N(rng), 10.0 * N(rng), 5.0 * N(rng);
    std::vector<Eigen::VectorXd> inputs = base_inputs;
    inputs.push_back(Eigen::Vector3d(Uu(rng), Uu(rng), Uu(rng)));
    const double phi = compensation_phi(c, x, tables, U);
    const double inf = oracle::grid_phi(c, x, grid, inputs);
    const double margin = inf - phi;
    worst_margin = std::min(worst_margin, margin);
    if (margin < -1e-9 * std::max(1.0, std::abs(inf))) ++violations;
    if (inf < 0.0) {
      ratio_sum += phi / inf;
      ++negative;
    }
  }
  report(true, violations == 0, "phi soundness",
         fmt("%d draws, %d violations, min (grid inf - phi) %.4g, mean phi/grid-inf %.3f over %d draws with inf < 0",
             draws, violations, worst_margin, negative ? ratio_sum / negative : 1.0, negative));
}

void discretization() {
  double worst = 0.0;
  for (double d : {0.0, 0.25}) {
    for (double T : {0.1, 0.01}) {
      const Eigen::Vector3d drag = Eigen::Vector3d::Constant(d);
      const ContinuousModel c = augmented_continuous(drag);
      const oracle::ZohOracle ref = oracle::zoh(c.A_c, c.B_c, T);
      const DiscreteModel dm = discretize(drag, T);
      worst = std::max({worst, (dm.A - ref.A).cwiseAbs().maxCoeff(), (dm.B - ref.B).cwiseAbs().maxCoeff()});
    }
  }
  report(true, worst <= 1e-9, "discretization exactness", fmt("max |closed form - expm| = %.3g", worst));
}

void relative_degree_check() {
  const ScenarioConfig cfg = load_scenario(kDir + "/circle_two_cylinders.toml");
  const ContinuousModel m = augmented_continuous(cfg.quad.drag);
  bool ok = true;
  double worst_lg = 0.0;
  std::string degrees;
  std::mt19937 rng(4);
  std::normal_distribution<double> N;
  for (const auto& b : cfg.barriers) {
    const int rho = relative_degree(b.quadratic(), m.A_c, m.B_c);
    degrees += std::to_string(rho) + " ";
    ok = ok && rho == 4;
    const BarrierChain c = build_chain_uniform(b.quadratic(), 5.0, m.A_c, m.B_c);
    for (int i = 0; i < 3; ++i) {
      const AffineMap g = input_gain(c.h[static_cast<std::size_t>(i)], m.B_c);
      for (int k = 0; k < 100; ++k) {
        AugVector z;
        for (int j = 0; j < kAugDim; ++j) z(j) = 5.0 * N(rng);
        worst_lg = std::max(worst_lg, g.value(z).cwiseAbs().maxCoeff());
      }
    }
  }
  ok = ok && worst_lg <= 1e-10;
  report(true, ok, "relative degree", fmt("rho = %sfor both barriers, max |Lg h_i|, i<3: %.3g", degrees.c_str(), worst_lg));
}

void thrust_cone(const std::vector<const Run*>& runs) {
  double worst = 0.0;
  int steps = 0;
  std::string names;
  for (const Run* r : runs) {
    names += r->cfg.name + " ";
    for (const auto& o : r->log.outer) {
      const Eigen::Vector3d a_v = o.z.segment<3>(aug::kA);
      worst = std::max(worst, r->cfg.quad.mass * (a_v - r->cfg.quad.gravity_vector()).norm());
      ++steps;
    }
  }
  report(true, worst <= 12.0 + 1e-6, "thrust cone",
         fmt("%d executed steps over %s: max m|a_v - g| = %.6f N", steps, names.c_str(), worst));
}

void solver_correctness(const Run& dcbf1, const Run& mpc_dc) {
  std::mt19937 rng(777);
  int bad = 0;
  double worst_kkt = 0.0, worst_obj = 0.0;
  for (int t = 0; t < 100; ++t) {
    const ConeProgram p = oracle::random_socp(rng);
    const Solution s = solve(p);
    const oracle::AdmmResult ref = oracle::admm_solve(p);
    const double kkt = std::max(s.kkt.primal(), s.kkt.stationarity);
    const double rel = std::abs(s.objective - ref.objective) / std::max(1.0, std::abs(ref.objective));
    worst_kkt = std::max(worst_kkt, kkt);
    worst_obj = std::max(worst_obj, rel);
    if (s.status != SolveStatus::kOptimal || kkt > 1e-6 || rel > 1e-4) ++bad;
  }
  double traj = 0.0;
  bool same_len = dcbf1.log.inner.size() == mpc_dc.log.inner.size();
  if (same_len)
    for (std::size_t i = 0; i < dcbf1.log.inner.size(); ++i)
      traj = std::max(traj, (dcbf1.log.inner[i].x.p - mpc_dc.log.inner[i].x.p).cwiseAbs().maxCoeff());
  const bool ok = bad == 0 && same_len && dcbf1.log.ok && mpc_dc.log.ok && traj <= 1e-9;
  report(true, ok, "solver correctness",
         fmt("100 SOCPs: %d off, worst KKT %.2g, worst rel obj %.2g; dcbf(1) vs mpc_dc max |dp| %.3g over %.1f s",
             bad, worst_kkt, worst_obj, traj, dcbf1.m.simulated_time));
}

void flatness_attitude(const Run& hover) {
  double worst = 0.0;
  for (const auto& s : hover.log.inner)
    if (s.t >= 1.0) worst = std::max(worst, (s.x.p - hover.cfg.reference.point).norm());
  std::mt19937 rng(10);
  double worst_tilt = 0.0;
  for (int k = 0; k < 50; ++k)
    worst_tilt = std::max(worst_tilt, oracle::attitude_recovery(rng, 10.0 * M_PI / 180.0, 2.0).tilt_error);
  report(true, hover.log.ok && worst <= 1e-3 && worst_tilt < 1e-3, "flatness/attitude loop",
         fmt("hover max |p - p_ref| after 1 s %.3g m; 50 x 10 deg recoveries, worst tilt error at 2 s %.3g", worst,
             worst_tilt));
}

void real_time(const Run& r) {
  const double mean = r.m.mean_solve_time;
  report(false, mean < 0.1, "real-time proxy",
         fmt("sdhocbf mean solve %.2f ms, max %.2f ms over %d solves (target < 10 ms: %s)", mean * 1e3,
             r.m.max_solve_time * 1e3, r.m.outer_steps, mean < 0.01 ? "met" : "missed"));
}

void ordering(const std::vector<const Run*>& runs) {
  const Run* sd = runs[0];
  const Run* dcbf = nullptr;
  const Run* filter = nullptr;
  for (const Run* r : runs) {
    if (r->cfg.controller.type == ControllerType::kDcbf) dcbf = r;
    if (r->cfg.controller.type == ControllerType::kHocbfFilter) filter = r;
  }
  const bool earlier = dcbf->m.min_clearance > sd->m.min_clearance;
  bool filter_lowest = true;
  std::string table;
  for (const Run* r : runs) {
    table += fmt("%s%s %.4g/%.3g ", r->m.controller.c_str(), r->log.ok ? "" : "*", min_of(r->m.min_h), r->m.min_clearance);
    if (r != filter && min_of(r->m.min_h) < min_of(filter->m.min_h)) filter_lowest = false;
  }
  report(false, earlier && filter_lowest, "controller ordering",
         fmt("dcbf clearance > sdhocbf: %s; filter lowest min_h: %s; min_h/clearance: %s(* = aborted)",
             earlier ? "yes" : "no", filter_lowest ? "yes" : "no", table.c_str()));
}

void narrow_gap() {
  const ScenarioConfig base = load_scenario(kDir + "/narrow_gap.toml");
  bool all_safe = true, hard_pass = true;
  std::string detail;
  for (double p : {5.0, 6.0, 7.0, 8.0, 9.0}) {
    ScenarioConfig cfg = with_controller(base, ControllerType::kSdHocbf);
    cfg.mpc.barrier_gain = p;
    const Run r = simulate(cfg);
    const bool safe = min_of(r.m.min_h) >= -1e-6;
    all_safe = all_safe && safe;
    if (p >= 8.0) hard_pass = hard_pass && r.m.gap_passed;
    detail += fmt("p=%g %s%s min_h %.3g; ", p, r.m.gap_passed ? "passed" : "no-pass",
                  r.log.ok ? "" : fmt(" (aborted %.1f s)", r.m.simulated_time).c_str(), min_of(r.m.min_h));
  }
  report(true, all_safe && hard_pass, "narrow gap", detail + (all_safe ? "all runs safe" : "SAFETY VIOLATED"));
}

}  // namespace

int main() {
  try {
    std::printf("quadsafe acceptance report\n");
    const ScenarioConfig s1 = load_scenario(kDir + "/circle_two_cylinders.toml");

    const Run sd = simulate(with_controller(s1, ControllerType::kSdHocbf));
    safety_invariance(sd);
    phi_soundness();
    discretization();
    relative_degree_check();

    const Run hover = simulate(load_scenario(kDir + "/hover.toml"));
    const Run gap = simulate(load_scenario(kDir + "/narrow_gap.toml"));
    thrust_cone({&sd, &gap, &hover});

    const Run filter = simulate(with_controller(s1, ControllerType::kHocbfFilter));
    const Run mpc_dc = simulate(with_controller(s1, ControllerType::kMpcDc));
    const Run dcbf = simulate(with_controller(s1, ControllerType::kDcbf, 0.2));
    const Run dcbf1 = simulate(with_controller(s1, ControllerType::kDcbf, 1.0));
    const Run dhocbf = simulate(with_controller(s1, ControllerType::kDhocbf));
    solver_correctness(dcbf1, mpc_dc);
    flatness_attitude(hover);
    real_time(sd);
    ordering({&sd, &filter, &mpc_dc, &dcbf, &dhocbf});
    narrow_gap();
  } catch (const std::exception& e) {
    std::printf("[FAIL] acceptance aborted: %s\n", e.what());
    return 2;
  }
  std::printf("%d hard gate(s) failed\n", hard_failures);
  return hard_failures == 0 ? 0 : 1;
}
