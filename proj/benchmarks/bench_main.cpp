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

#include <benchmark/benchmark.h>

#include "quadsafe/barrier.hpp"
#include "quadsafe/mpc.hpp"
#include "quadsafe/scenario.hpp"

namespace {

using namespace quadsafe;

const ScenarioConfig& scenario() {
  static const ScenarioConfig cfg = load_scenario(std::string(QUADSAFE_SCENARIO_DIR) + "/circle_two_cylinders.toml");
  return cfg;
}

void BM_Discretize(benchmark::State& state) {
  const Eigen::Vector3d drag = Eigen::Vector3d::Constant(0.25);
  for (auto _ : state) benchmark::DoNotOptimize(discretize(drag, 0.1));
}
BENCHMARK(BM_Discretize);

void BM_CompensationPhi(benchmark::State& state) {
  const ScenarioConfig& cfg = scenario();
  const ContinuousModel m = augmented_continuous(cfg.quad.drag);
  const BarrierChain c = build_chain_uniform(cfg.barriers[0].quadratic(), 5.0, m.A_c, m.B_c);
  ReachOptions opts;
  opts.subdivisions = static_cast<int>(state.range(0));
  const ReachTables tables(m.A_c, m.B_c, 0.1, opts);
  const InputBox U{cfg.mpc.s_min, cfg.mpc.s_max};
  const AugVector z = cfg.initial_augmented();
  for (auto _ : state) benchmark::DoNotOptimize(compensation_phi(c, z, tables, U));
}
BENCHMARK(BM_CompensationPhi)->Arg(1)->Arg(4);

void BM_SdHocbfProgramSolve(benchmark::State& state) {
  const ScenarioConfig& cfg = scenario();
  MpcConfig mc = cfg.mpc;
  mc.relax_to_qp = state.range(0) != 0;
  const MpcAssembler a(mc, cfg.quad);
  std::vector<BarrierChain> chains;
  for (const auto& b : cfg.barriers)
    chains.push_back(build_chain_uniform(b.quadratic(), 5.0, a.continuous().A_c, a.continuous().B_c));
  const ReferenceWindow refs = cfg.reference.window(0.0, mc.N, mc.T, cfg.quad.drag);
  const ConeProgram p = build_sdhocbf_mpc(a, cfg.initial_augmented(), refs, chains);
  ConeSolver solver(mc.solver);
  for (auto _ : state) benchmark::DoNotOptimize(solver.solve(p));
}
BENCHMARK(BM_SdHocbfProgramSolve)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_OuterStep(benchmark::State& state) {
  const ScenarioConfig& cfg = scenario();
  ControllerKind k;
  k.type = static_cast<ControllerType>(state.range(0));
  OuterController ctrl(k, cfg.mpc, cfg.quad, cfg.barriers);
  const ReferenceWindow refs = cfg.reference.window(0.0, cfg.mpc.N, cfg.mpc.T, cfg.quad.drag);
  const AugVector z = cfg.initial_augmented();
  for (auto _ : state) benchmark::DoNotOptimize(ctrl.solve_step(z, refs));
  state.SetLabel(k.name());
}
BENCHMARK(BM_OuterStep)->DenseRange(0, 4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
