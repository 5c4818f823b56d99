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

#include "quadsafe/log_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

#include <json.hpp>

#include "quadsafe/errors.hpp"

namespace quadsafe {

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

void write_inner_csv(std::ostream& os, const SimLog& log) {
  os << "t,px,py,pz,vx,vy,vz,qw,qx,qy,qz,wx,wy,wz,fz,taux,tauy,tauz\n";
  for (const InnerSample& s : log.inner) {
    const QuadState& x = s.x;
    const double row[] = {s.t,      x.p.x(),     x.p.y(),     x.p.z(),     x.v.x(),     x.v.y(),
                          x.v.z(),  x.q.w,       x.q.x,       x.q.y,       x.q.z,       x.omega.x(),
                          x.omega.y(), x.omega.z(), s.u.f_z,  s.u.tau.x(), s.u.tau.y(), s.u.tau.z()};
    for (std::size_t i = 0; i < std::size(row); ++i) os << (i ? "," : "") << format_number(row[i]);
    os << '\n';
  }
}

void write_outer_csv(std::ostream& os, const SimLog& log, std::size_t barriers) {
  os << 't';
  for (std::size_t j = 0; j < barriers; ++j) os << ",h" << j + 1;
  for (std::size_t j = 0; j < barriers; ++j) os << ",phi" << j + 1;
  os << ",sx,sy,sz,status,solve_ms\n";
  for (const OuterSample& o : log.outer) {
    os << format_number(o.t);
    for (std::size_t j = 0; j < barriers; ++j) os << ',' << format_number(j < o.h.size() ? o.h[j] : 0.0);
    for (std::size_t j = 0; j < barriers; ++j) os << ',' << format_number(j < o.phi.size() ? o.phi[j] : 0.0);
    os << ',' << format_number(o.s.x()) << ',' << format_number(o.s.y()) << ',' << format_number(o.s.z()) << ','
       << (o.fallback ? "fallback" : to_string(o.status)) << ',' << format_number(o.solve_time * 1e3) << '\n';
  }
}

std::string metrics_json(const Metrics& m) {
  nlohmann::ordered_json j;
  j["controller"] = m.controller;
  j["success"] = m.success;
  j["failure"] = m.failure;
  j["simulated_time_s"] = m.simulated_time;
  double min_all = m.min_h.empty() ? 0.0 : m.min_h.front();
  for (std::size_t i = 0; i < m.min_h.size(); ++i) {
    j["min_h" + std::to_string(i + 1)] = m.min_h[i];
    min_all = std::min(min_all, m.min_h[i]);
  }
  j["min_h"] = min_all;
  j["min_clearance_m"] = m.min_clearance;
  j["rms_position_error_m"] = m.rms_position_error;
  j["max_solve_time_s"] = m.max_solve_time;
  j["mean_solve_time_s"] = m.mean_solve_time;
  j["gap_defined"] = m.gap_defined;
  j["gap_passed"] = m.gap_passed;
  j["infeasible_count"] = m.infeasible_count;
  j["tracking_cost"] = m.tracking_cost;
  j["thrust_clamps"] = m.thrust_clamps;
  j["max_thrust_request_N"] = m.max_thrust_request;
  j["outer_steps"] = m.outer_steps;
  return j.dump(2);
}

void write_metrics_json(std::ostream& os, const Metrics& m) { os << metrics_json(m) << '\n'; }

void write_run(const std::string& dir, const SimLog& log, const Metrics& m, std::size_t barriers) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir + ": " + ec.message());
  auto open = [&](const char* name) {
    std::ofstream f(fs::path(dir) / name);
    if (!f) throw ConfigError("cannot write " + (fs::path(dir) / name).string());
    return f;
  };
  {
    auto f = open("log.csv");
    write_inner_csv(f, log);
  }
  {
    auto f = open("outer.csv");
    write_outer_csv(f, log, barriers);
  }
  {
    auto f = open("metrics.json");
    write_metrics_json(f, m);
  }
}

}  // namespace quadsafe
