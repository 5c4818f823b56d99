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

#include "quadsafe/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace quadsafe {

bool crosses_gap(const std::vector<InnerSample>& inner, const GapSpec& gap) {
  for (std::size_t i = 1; i < inner.size(); ++i) {
    const Eigen::Vector3d& a = inner[i - 1].x.p;
    const Eigen::Vector3d& b = inner[i].x.p;
    if (a.y() == b.y() || a.y() * b.y() > 0.0) continue;
    const double w = a.y() / (a.y() - b.y());
    const Eigen::Vector3d c = a + w * (b - a);
    if (c.x() >= gap.x_min && c.x() <= gap.x_max && std::abs(c.z() - gap.altitude) <= gap.altitude_tol) return true;
  }
  return false;
}

Metrics compute_metrics(const SimLog& log, const ScenarioConfig& cfg) {
  Metrics m;
  m.controller = log.controller;
  m.success = log.ok;
  m.failure = log.failure;
  m.thrust_clamps = log.thrust_clamps;
  m.infeasible_count = log.infeasible;
  m.outer_steps = static_cast<int>(log.outer.size());
  if (!log.inner.empty()) m.simulated_time = log.inner.back().t + cfg.sim.inner_dt;

  const std::size_t K = cfg.barriers.size();
  m.min_h.assign(K, std::numeric_limits<double>::infinity());
  m.min_clearance = std::numeric_limits<double>::infinity();
  double sq = 0.0;
  long count = 0;
  for (const InnerSample& s : log.inner) {
    for (std::size_t j = 0; j < K; ++j) {
      const BarrierSpec& b = cfg.barriers[j];
      const double h = b.value(s.x.p);
      m.min_h[j] = std::min(m.min_h[j], h);
      m.min_clearance = std::min(m.min_clearance, std::sqrt(std::max(h + b.radius * b.radius, 0.0)) - b.radius);
    }
    if (s.t >= kRmsWindowStart - 1e-12) {
      sq += (s.x.p - cfg.reference.at(s.t).p).squaredNorm();
      ++count;
    }
  }
  if (K == 0) m.min_clearance = 0.0;
  m.rms_position_error = count ? std::sqrt(sq / static_cast<double>(count)) : 0.0;

  double total = 0.0;
  for (const OuterSample& o : log.outer) {
    m.max_solve_time = std::max(m.max_solve_time, o.solve_time);
    total += o.solve_time;
    m.max_thrust_request = std::max(m.max_thrust_request, o.max_thrust_request);
    const AugVector e = o.z - o.z_ref;
    const Eigen::Vector3d es = o.s - o.s_ref;
    m.tracking_cost += e.dot(cfg.mpc.Q * e) + es.dot(cfg.mpc.R * es);
  }
  if (!log.outer.empty()) m.mean_solve_time = total / static_cast<double>(log.outer.size());

  if (cfg.gap) {
    m.gap_defined = true;
    const bool safe = std::all_of(m.min_h.begin(), m.min_h.end(), [](double h) { return h >= -1e-6; });
    m.gap_passed = safe && crosses_gap(log.inner, *cfg.gap);
  }
  return m;
}

}  // namespace quadsafe
