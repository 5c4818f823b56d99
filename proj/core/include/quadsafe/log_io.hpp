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

#include <iosfwd>
#include <string>

#include "quadsafe/metrics.hpp"
#include "quadsafe/simulation.hpp"

namespace quadsafe {

/// Header: t,px,py,pz,vx,vy,vz,qw,qx,qy,qz,wx,wy,wz,fz,taux,tauy,tauz
void write_inner_csv(std::ostream& os, const SimLog& log);
/// Header: t,h1..hK,phi1..phiK,sx,sy,sz,status,solve_ms
void write_outer_csv(std::ostream& os, const SimLog& log, std::size_t barriers);
/// Flat JSON object; per-barrier minima appear as min_h1 … min_hK.
void write_metrics_json(std::ostream& os, const Metrics& m);
std::string metrics_json(const Metrics& m);

/// Creates dir if needed and writes log.csv, outer.csv and metrics.json.
void write_run(const std::string& dir, const SimLog& log, const Metrics& m, std::size_t barriers);

/// Numbers in logs use nine significant digits.
std::string format_number(double x);

}  // namespace quadsafe
