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

#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "quadsafe/errors.hpp"
#include "quadsafe/log_io.hpp"
#include "quadsafe/metrics.hpp"
#include "quadsafe/scenario.hpp"
#include "quadsafe/simulation.hpp"

namespace quadsafe::cli {
namespace {

namespace fs = std::filesystem;

struct Job {
  std::string label;
  ScenarioConfig cfg;
  std::string dir;
};

struct Outcome {
  Metrics metrics;
  bool ok{false};
};

std::string join(const std::vector<std::string>& v, const char* sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + v[i];
  return s;
}

unsigned thread_cap(std::size_t jobs) {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("QUADSAFE_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) n = static_cast<unsigned>(v);
  }
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

// Runs every job; each writes its own directory, results are merged in job order.
std::vector<Outcome> run_jobs(const std::vector<Job>& jobs) {
  std::vector<Outcome> out(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < jobs.size();) {
      const Job& j = jobs[i];
      const SimLog log = run_simulation(j.cfg);
      out[i].metrics = compute_metrics(log, j.cfg);
      out[i].ok = log.ok;
      write_run(j.dir, log, out[i].metrics, j.cfg.barriers.size());
    }
  };
  const unsigned n = thread_cap(jobs.size());
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return out;
}

void write_table(const std::string& path, const std::vector<Job>& jobs, const std::vector<Outcome>& res) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write " + path);
  f << "run,controller,success,min_h,min_clearance_m,rms_position_error_m,max_solve_ms,mean_solve_ms,"
       "gap_passed,infeasible_count,tracking_cost,thrust_clamps,max_thrust_request_N\n";
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const Metrics& m = res[i].metrics;
    const double min_h = m.min_h.empty() ? 0.0 : *std::min_element(m.min_h.begin(), m.min_h.end());
    f << jobs[i].label << ',' << m.controller << ',' << (m.success ? 1 : 0) << ',' << format_number(min_h) << ','
      << format_number(m.min_clearance) << ',' << format_number(m.rms_position_error) << ','
      << format_number(m.max_solve_time * 1e3) << ',' << format_number(m.mean_solve_time * 1e3) << ','
      << (m.gap_defined ? (m.gap_passed ? "1" : "0") : "") << ',' << m.infeasible_count << ','
      << format_number(m.tracking_cost) << ',' << m.thrust_clamps << ',' << format_number(m.max_thrust_request)
      << '\n';
  }
}

void summarize(std::ostream& out, const std::string& label, const Outcome& r) {
  const Metrics& m = r.metrics;
  const double min_h = m.min_h.empty() ? 0.0 : *std::min_element(m.min_h.begin(), m.min_h.end());
  out << label << ": " << (m.success ? "ok" : "FAILED (" + m.failure + ")") << "  min_h=" << format_number(min_h)
      << "  rms=" << format_number(m.rms_position_error) << " m  mean_solve=" << format_number(m.mean_solve_time * 1e3)
      << " ms";
  if (m.gap_defined) out << "  gap_passed=" << (m.gap_passed ? "true" : "false");
  out << '\n';
}

struct Overrides {
  std::string controller;
  std::optional<double> p;
  std::optional<double> lambda;
};

ScenarioConfig prepare(const std::string& path, const Overrides& o) {
  ScenarioConfig cfg = load_scenario(path);
  if (!o.controller.empty()) cfg.controller.type = ControllerKind::parse_type(o.controller);
  if (o.p) cfg.mpc.barrier_gain = *o.p;
  if (o.lambda) cfg.controller.lambda = *o.lambda;
  cfg.validate();
  return cfg;
}

std::vector<double> parse_values(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("cannot parse sweep value '" + item + "'");
    }
  }
  if (v.empty()) throw ConfigError("sweep needs at least one value");
  return v;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Safe quadrotor tracking: closed-loop runs, controller comparisons and parameter sweeps."};
  app.require_subcommand(1);

  std::string scenario, out_dir{"results"};
  Overrides ov;
  double p_val = 0.0, lambda_val = 0.0;

  auto* run = app.add_subcommand("run", "Simulate one scenario with one controller");
  run->add_option("--scenario", scenario, "Scenario TOML file")->required();
  run->add_option("--controller", ov.controller, "Controller: " + join(ControllerKind::valid_names(), ", "));
  auto* run_p = run->add_option("--p", p_val, "Class-K gain p for the barrier chains");
  auto* run_l = run->add_option("--lambda", lambda_val, "Decay rate for dcbf / dhocbf");
  run->add_option("--out", out_dir, "Output directory");

  std::string ctrl_list = join(ControllerKind::valid_names(), ",");
  auto* cmp = app.add_subcommand("compare", "Run several controllers on one scenario");
  cmp->add_option("--scenario", scenario, "Scenario TOML file")->required();
  cmp->add_option("--controllers", ctrl_list, "Comma-separated controller names");
  auto* cmp_p = cmp->add_option("--p", p_val, "Class-K gain p");
  auto* cmp_l = cmp->add_option("--lambda", lambda_val, "Decay rate for dcbf / dhocbf");
  cmp->add_option("--out", out_dir, "Output directory");

  std::string param, values;
  auto* swp = app.add_subcommand("sweep", "Run a grid over p or lambda");
  swp->add_option("--scenario", scenario, "Scenario TOML file")->required();
  swp->add_option("--controller", ov.controller, "Controller override");
  swp->add_option("--param", param, "p or lambda")->required()->check(CLI::IsMember({"p", "lambda"}));
  swp->add_option("--values", values, "Comma-separated values, e.g. 5,6,7,8,9")->required();
  swp->add_option("--out", out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    std::vector<Job> jobs;
    if (*run) {
      if (*run_p) ov.p = p_val;
      if (*run_l) ov.lambda = lambda_val;
      ScenarioConfig cfg = prepare(scenario, ov);
      jobs.push_back({cfg.controller.name(), cfg, out_dir});
    } else if (*cmp) {
      if (*cmp_p) ov.p = p_val;
      if (*cmp_l) ov.lambda = lambda_val;
      std::stringstream ss(ctrl_list);
      for (std::string name; std::getline(ss, name, ',');) {
        Overrides o = ov;
        o.controller = name;
        ScenarioConfig cfg = prepare(scenario, o);
        jobs.push_back({name, cfg, (fs::path(out_dir) / name).string()});
      }
      if (jobs.empty()) throw ConfigError("compare needs at least one controller");
    } else {
      for (double v : parse_values(values)) {
        Overrides o = ov;
        (param == "p" ? o.p : o.lambda) = v;
        ScenarioConfig cfg = prepare(scenario, o);
        const std::string label = param + "_" + format_number(v);
        jobs.push_back({label, cfg, (fs::path(out_dir) / label).string()});
      }
    }

    const std::vector<Outcome> res = run_jobs(jobs);
    if (!*run) {
      fs::create_directories(out_dir);
      write_table((fs::path(out_dir) / (*cmp ? "compare.csv" : "sweep.csv")).string(), jobs, res);
    }
    bool all_ok = true;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      summarize(out, jobs[i].label, res[i]);
      all_ok = all_ok && res[i].ok;
    }
    return all_ok ? kExitOk : kExitSimulation;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const SimulationError& e) {
    err << "simulation error: " << e.what() << '\n';
    return kExitSimulation;
  } catch (const fs::filesystem_error& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace quadsafe::cli
