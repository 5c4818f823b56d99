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

#include "quadsafe/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <toml.hpp>

#include "quadsafe/errors.hpp"

namespace quadsafe {

namespace {

std::string join_lines(const std::vector<std::string>& errs) {
  std::string out;
  for (const auto& e : errs) out += (out.empty() ? "" : "\n") + e;
  return out;
}

// Reads typed values out of one TOML table, recording problems instead of
// throwing so that a single load reports everything at once.
class TableReader {
 public:
  TableReader(const toml::table* tbl, std::string path, std::vector<std::string>& errs)
      : tbl_(tbl), path_(std::move(path)), errs_(errs) {}

  bool present() const { return tbl_ != nullptr; }

  void number(const char* key, double& out) {
    const toml::node* n = find(key);
    if (!n) return;
    if (auto v = n->value<double>()) {
      out = *v;
    } else {
      errs_.push_back(where(key) + ": expected a number");
    }
  }

  void integer(const char* key, int& out) {
    const toml::node* n = find(key);
    if (!n) return;
    if (n->is_integer()) {
      out = static_cast<int>(*n->value<int64_t>());
    } else {
      errs_.push_back(where(key) + ": expected an integer");
    }
  }

  void boolean(const char* key, bool& out) {
    const toml::node* n = find(key);
    if (!n) return;
    if (auto v = n->value<bool>()) {
      out = *v;
    } else {
      errs_.push_back(where(key) + ": expected true or false");
    }
  }

  void string(const char* key, std::string& out) {
    const toml::node* n = find(key);
    if (!n) return;
    if (auto v = n->value<std::string>()) {
      out = *v;
    } else {
      errs_.push_back(where(key) + ": expected a string");
    }
  }

  /// Array of numbers with a length in [min_len, max_len]; true when read.
  bool numbers(const char* key, std::vector<double>& out, std::size_t min_len, std::size_t max_len) {
    const toml::node* n = find(key);
    if (!n) return false;
    const toml::array* arr = n->as_array();
    std::vector<double> vals;
    bool ok = arr != nullptr;
    if (arr) {
      for (const auto& el : *arr) {
        auto v = el.value<double>();
        if (!v) {
          ok = false;
          break;
        }
        vals.push_back(*v);
      }
    }
    if (!ok) {
      errs_.push_back(where(key) + ": expected an array of numbers");
      return false;
    }
    if (vals.size() < min_len || vals.size() > max_len) {
      std::ostringstream os;
      os << where(key) << ": expected " << min_len;
      if (max_len != min_len) os << " to " << max_len;
      os << " entries, got " << vals.size();
      errs_.push_back(os.str());
      return false;
    }
    out = std::move(vals);
    return true;
  }

  template <int Rows>
  void vector(const char* key, Eigen::Matrix<double, Rows, 1>& out) {
    std::vector<double> v;
    if (numbers(key, v, Rows, Rows)) out = Eigen::Map<const Eigen::Matrix<double, Rows, 1>>(v.data());
  }

  void integers(const char* key, std::vector<int>& out) {
    const toml::node* n = find(key);
    if (!n) return;
    const toml::array* arr = n->as_array();
    std::vector<int> vals;
    bool ok = arr != nullptr;
    if (arr) {
      for (const auto& el : *arr) {
        if (!el.is_integer()) {
          ok = false;
          break;
        }
        vals.push_back(static_cast<int>(*el.value<int64_t>()));
      }
    }
    if (!ok) {
      errs_.push_back(where(key) + ": expected an array of integers");
      return;
    }
    out = std::move(vals);
  }

  /// Flags keys that were never asked for.
  void finish() {
    if (!tbl_) return;
    for (const auto& [k, v] : *tbl_) {
      (void)v;
      const std::string key(k.str());
      if (!used_.count(key)) errs_.push_back(where(key.c_str()) + ": unknown key");
    }
  }

 private:
  const toml::node* find(const char* key) {
    used_.insert(key);
    return tbl_ ? tbl_->get(key) : nullptr;
  }
  std::string where(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  const toml::table* tbl_;
  std::string path_;
  std::vector<std::string>& errs_;
  std::set<std::string> used_;
};

const toml::table* subtable(const toml::table& root, const char* key, std::vector<std::string>& errs) {
  const toml::node* n = root.get(key);
  if (!n) return nullptr;
  if (const toml::table* t = n->as_table()) return t;
  errs.push_back(std::string(key) + ": expected a table");
  return nullptr;
}

AugMatrix diag12(const std::vector<double>& d) {
  AugVector v;
  for (int i = 0; i < kAugDim; ++i) v(i) = d[static_cast<std::size_t>(i)];
  return v.asDiagonal();
}

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  std::string s(buf);
  if (std::isfinite(x) && s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

template <typename Vec>
std::string nums(const Vec& v) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v(i));
  return s + "]";
}

bool diagonal(const Eigen::MatrixXd& M) {
  Eigen::MatrixXd D = M.diagonal().asDiagonal();
  return M == D;
}

}  // namespace

// ---------------------------------------------------------------------------

int SimSettings::ratio() const { return static_cast<int>(std::llround(outer_T / inner_dt)); }

long SimSettings::inner_steps() const { return std::lround(duration / inner_dt); }

AugVector ScenarioConfig::initial_augmented() const {
  const AugmentedReference r0 = reference_to_augmented(reference.at(0.0), quad.drag);
  AugState z;
  z.p = initial.p;
  z.v = initial.v;
  z.a_v = r0.z.a_v;
  z.j_v = r0.z.j_v;
  return z.to_vector();
}

void ScenarioConfig::validate() const {
  std::vector<std::string> errs;
  auto capture = [&](auto&& fn) {
    try {
      fn();
    } catch (const ConfigError& e) {
      std::istringstream is(e.what());
      std::string line;
      while (std::getline(is, line)) {
        std::size_t pos = 0;
        while (pos != std::string::npos) {
          const std::size_t next = line.find("; ", pos);
          errs.push_back(line.substr(pos, next == std::string::npos ? next : next - pos));
          pos = next == std::string::npos ? next : next + 2;
        }
      }
    }
  };
  capture([&] { quad.validate(); });
  capture([&] { attitude.validate(); });
  capture([&] { mpc.validate(); });
  capture([&] { controller.validate(mpc.N); });

  if (!(sim.duration > 0.0)) errs.emplace_back("sim.duration_s must be > 0");
  if (!(sim.inner_dt > 0.0)) errs.emplace_back("sim.inner_dt_s must be > 0");
  if (!(sim.outer_T > 0.0)) errs.emplace_back("sim.outer_T_s must be > 0");
  if (sim.inner_dt > 0.0 && sim.outer_T > 0.0 && sim.duration > 0.0) {
    const double r = sim.outer_T / sim.inner_dt;
    if (std::llround(r) < 1 || std::abs(r - static_cast<double>(std::llround(r))) > 1e-9 * r) {
      errs.emplace_back("sim.outer_T_s must be an integer multiple of sim.inner_dt_s");
    }
    const double steps = sim.duration / sim.inner_dt;
    if (std::abs(steps - static_cast<double>(std::llround(steps))) > 1e-6 * std::max(1.0, steps)) {
      errs.emplace_back("sim.duration_s must be an integer multiple of sim.inner_dt_s");
    }
  }
  if (mpc.T != sim.outer_T) errs.emplace_back("mpc step must equal sim.outer_T_s");
  if (mpc.f_max != quad.max_thrust) errs.emplace_back("mpc thrust bound must equal quad.max_thrust_N");
  if (!(sim.thrust_floor > 0.0 && sim.thrust_floor < quad.max_thrust)) {
    errs.emplace_back("sim.thrust_floor_N must lie in (0, quad.max_thrust_N)");
  }
  if (!(sim.torque_limit >= 0.0)) errs.emplace_back("sim.torque_limit_Nm must be >= 0");

  if (reference.kind == ReferenceSpec::Kind::kCircle) {
    if (!(reference.radius > 0.0)) errs.emplace_back("reference.radius_m must be > 0");
    if (!std::isfinite(reference.angular_rate) || !std::isfinite(reference.altitude) ||
        !std::isfinite(reference.yaw_rate)) {
      errs.emplace_back("reference parameters must be finite");
    }
  } else if (!reference.point.allFinite() || !std::isfinite(reference.yaw)) {
    errs.emplace_back("reference parameters must be finite");
  }

  for (std::size_t j = 0; j < barriers.size(); ++j) {
    if (!(barriers[j].radius > 0.0)) errs.push_back("barriers[" + std::to_string(j) + "].radius_m must be > 0");
    if (!barriers[j].center.allFinite()) errs.push_back("barriers[" + std::to_string(j) + "].center_m must be finite");
  }
  if (gap && !(gap->x_min < gap->x_max && gap->half_width > 0.0 && gap->altitude_tol > 0.0)) {
    errs.emplace_back("gap needs x_min_m < x_max_m and positive half_width_m, altitude_tol_m");
  }

  const bool finite = initial.p.allFinite() && initial.v.allFinite() && initial.omega.allFinite() &&
                      std::isfinite(initial.q.norm());
  if (!finite) errs.emplace_back("initial state must be finite");
  if (finite && std::abs(initial.q.norm() - 1.0) > 1e-9) errs.emplace_back("initial quaternion must have unit norm");

  // Every function of every barrier chain has to start non-negative.
  if (finite && mpc.barrier_gain > 0.0) {
    const ContinuousModel cont = augmented_continuous(quad.drag);
    const AugVector z0 = initial_augmented();
    for (std::size_t j = 0; j < barriers.size(); ++j) {
      if (!(barriers[j].radius > 0.0)) continue;
      try {
        const BarrierChain chain =
            build_chain_uniform(barriers[j].quadratic(), mpc.barrier_gain, cont.A_c, cont.B_c);
        const Eigen::VectorXd hv = chain.h_values(z0);
        for (Eigen::Index i = 0; i < hv.size(); ++i) {
          if (hv(i) < 0.0) {
            std::ostringstream os;
            os << "initial state violates barrier " << j + 1 << ": h" << i << " = " << hv(i) << " < 0";
            errs.push_back(os.str());
          }
        }
      } catch (const ConfigError& e) {
        errs.push_back("barrier " + std::to_string(j + 1) + ": " + e.what());
      }
    }
  }
  if (!errs.empty()) throw ConfigError(join_lines(errs));
}

// ---------------------------------------------------------------------------

ScenarioConfig parse_scenario(const std::string& toml_text, const std::string& source) {
  toml::table root;
  try {
    root = toml::parse(toml_text, source);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << source << ":" << e.source().begin.line << ": " << e.description();
    throw ConfigError(os.str());
  }

  std::vector<std::string> errs;
  ScenarioConfig cfg;

  static const std::set<std::string> sections{"quad", "attitude", "mpc",     "controller", "barriers",
                                              "reference", "sim",  "initial", "gap"};
  {
    TableReader top(&root, "", errs);
    top.string("name", cfg.name);
    for (const auto& [k, v] : root) {
      (void)v;
      const std::string key(k.str());
      if (key != "name" && !sections.count(key)) errs.push_back(key + ": unknown key");
    }
  }
  {
    TableReader r(subtable(root, "quad", errs), "quad", errs);
    r.number("mass_kg", cfg.quad.mass);
    r.vector("inertia_kg_m2", cfg.quad.inertia);
    r.vector("drag_per_s", cfg.quad.drag);
    r.number("max_thrust_N", cfg.quad.max_thrust);
    r.number("gravity_m_s2", cfg.quad.gravity);
    r.finish();
  }
  {
    TableReader r(subtable(root, "attitude", errs), "attitude", errs);
    r.number("kp_xy", cfg.attitude.kp_xy);
    r.number("kp_z", cfg.attitude.kp_z);
    r.vector("kd", cfg.attitude.kd);
    r.finish();
  }
  {
    TableReader r(subtable(root, "mpc", errs), "mpc", errs);
    r.integer("horizon_steps", cfg.mpc.N);
    std::vector<double> d;
    if (r.numbers("q_diag", d, kAugDim, kAugDim)) cfg.mpc.Q = diag12(d);
    if (r.numbers("p_diag", d, kAugDim, kAugDim)) cfg.mpc.P = diag12(d);
    Eigen::Vector3d rd = cfg.mpc.R.diagonal();
    r.vector("r_diag", rd);
    cfg.mpc.R = rd.asDiagonal();
    r.vector("s_min_m_s4", cfg.mpc.s_min);
    r.vector("s_max_m_s4", cfg.mpc.s_max);
    r.boolean("relax_to_qp", cfg.mpc.relax_to_qp);
    r.number("barrier_gain_p", cfg.mpc.barrier_gain);
    r.integer("reach_samples", cfg.mpc.reach.n_samples);
    r.integer("reach_subdivisions", cfg.mpc.reach.subdivisions);
    r.finish();
  }
  {
    TableReader r(subtable(root, "controller", errs), "controller", errs);
    std::string kind = cfg.controller.name();
    r.string("kind", kind);
    try {
      cfg.controller.type = ControllerKind::parse_type(kind);
    } catch (const ConfigError& e) {
      errs.push_back(std::string("controller.kind: ") + e.what());
    }
    r.number("lambda", cfg.controller.lambda);
    r.integers("dhocbf_steps", cfg.controller.dhocbf_steps);
    r.finish();
  }
  if (const toml::node* n = root.get("barriers")) {
    const toml::array* arr = n->as_array();
    if (!arr) {
      errs.emplace_back("barriers: expected an array of tables");
    } else {
      for (std::size_t j = 0; j < arr->size(); ++j) {
        const std::string path = "barriers[" + std::to_string(j) + "]";
        const toml::table* t = (*arr)[j].as_table();
        if (!t) {
          errs.push_back(path + ": expected a table");
          continue;
        }
        TableReader r(t, path, errs);
        BarrierSpec b;
        std::string kind = "cylinder_z";
        r.string("kind", kind);
        try {
          b.kind = barrier_kind_from_string(kind);
        } catch (const ConfigError& e) {
          errs.push_back(path + ".kind: " + e.what());
        }
        std::vector<double> c;
        if (r.numbers("center_m", c, 2, 3)) {
          b.center = Eigen::Vector3d::Zero();
          for (std::size_t i = 0; i < c.size(); ++i) b.center(static_cast<Eigen::Index>(i)) = c[i];
          const std::size_t want = b.kind == BarrierSpec::Kind::kSphere ? 3 : 2;
          if (c.size() != want) {
            errs.push_back(path + ".center_m: " + kind + " needs " + std::to_string(want) + " coordinates");
          }
        } else if (!t->get("center_m")) {
          errs.push_back(path + ".center_m: missing");
        }
        if (!t->get("radius_m")) errs.push_back(path + ".radius_m: missing");
        r.number("radius_m", b.radius);
        r.finish();
        cfg.barriers.push_back(b);
      }
    }
  }
  {
    TableReader r(subtable(root, "reference", errs), "reference", errs);
    std::string kind = "circle";
    r.string("kind", kind);
    if (kind == "circle") {
      cfg.reference.kind = ReferenceSpec::Kind::kCircle;
      r.number("radius_m", cfg.reference.radius);
      r.number("angular_rate_rad_s", cfg.reference.angular_rate);
      r.number("altitude_m", cfg.reference.altitude);
      r.number("yaw_rate_rad_s", cfg.reference.yaw_rate);
    } else if (kind == "hover") {
      cfg.reference.kind = ReferenceSpec::Kind::kHover;
      r.vector("point_m", cfg.reference.point);
      r.number("yaw_rad", cfg.reference.yaw);
    } else {
      errs.push_back("reference.kind: unknown reference '" + kind + "' (valid: circle, hover)");
    }
    r.finish();
  }
  {
    TableReader r(subtable(root, "sim", errs), "sim", errs);
    r.number("duration_s", cfg.sim.duration);
    r.number("inner_dt_s", cfg.sim.inner_dt);
    r.number("outer_T_s", cfg.sim.outer_T);
    r.number("thrust_floor_N", cfg.sim.thrust_floor);
    r.number("torque_limit_Nm", cfg.sim.torque_limit);
    r.finish();
  }
  {
    TableReader r(subtable(root, "initial", errs), "initial", errs);
    r.vector("position_m", cfg.initial.p);
    r.vector("velocity_m_s", cfg.initial.v);
    // Component order is explicit in the key name: (x, y, z, w).
    Eigen::Vector4d q(0.0, 0.0, 0.0, 1.0);
    r.vector("quaternion_xyzw", q);
    cfg.initial.q = Quaternion{q(3), q(0), q(1), q(2)};
    r.vector("body_rate_rad_s", cfg.initial.omega);
    r.finish();
  }
  if (const toml::table* t = subtable(root, "gap", errs)) {
    TableReader r(t, "gap", errs);
    GapSpec g;
    r.number("x_min_m", g.x_min);
    r.number("x_max_m", g.x_max);
    r.number("half_width_m", g.half_width);
    r.number("altitude_m", g.altitude);
    r.number("altitude_tol_m", g.altitude_tol);
    r.finish();
    cfg.gap = g;
  }

  cfg.mpc.T = cfg.sim.outer_T;
  cfg.mpc.f_max = cfg.quad.max_thrust;

  if (errs.empty()) {
    try {
      cfg.validate();
    } catch (const ConfigError& e) {
      errs.emplace_back(e.what());
    }
  }
  if (!errs.empty()) throw ConfigError(source + ":\n" + join_lines(errs));
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path);
}

std::string scenario_to_toml(const ScenarioConfig& cfg) {
  if (!diagonal(cfg.mpc.Q) || !diagonal(cfg.mpc.P) || !diagonal(cfg.mpc.R)) {
    throw ConfigError("scenario files only store diagonal weight matrices");
  }
  std::ostringstream os;
  os << "name = \"" << cfg.name << "\"\n\n";
  os << "[quad]\n"
     << "mass_kg = " << num(cfg.quad.mass) << "\n"
     << "inertia_kg_m2 = " << nums(cfg.quad.inertia) << "\n"
     << "drag_per_s = " << nums(cfg.quad.drag) << "\n"
     << "max_thrust_N = " << num(cfg.quad.max_thrust) << "\n"
     << "gravity_m_s2 = " << num(cfg.quad.gravity) << "\n\n";
  os << "[attitude]\n"
     << "kp_xy = " << num(cfg.attitude.kp_xy) << "\n"
     << "kp_z = " << num(cfg.attitude.kp_z) << "\n"
     << "kd = " << nums(cfg.attitude.kd) << "\n\n";
  os << "[mpc]\n"
     << "horizon_steps = " << cfg.mpc.N << "\n"
     << "q_diag = " << nums(cfg.mpc.Q.diagonal()) << "\n"
     << "p_diag = " << nums(cfg.mpc.P.diagonal()) << "\n"
     << "r_diag = " << nums(cfg.mpc.R.diagonal()) << "\n"
     << "s_min_m_s4 = " << nums(cfg.mpc.s_min) << "\n"
     << "s_max_m_s4 = " << nums(cfg.mpc.s_max) << "\n"
     << "relax_to_qp = " << (cfg.mpc.relax_to_qp ? "true" : "false") << "\n"
     << "barrier_gain_p = " << num(cfg.mpc.barrier_gain) << "\n"
     << "reach_samples = " << cfg.mpc.reach.n_samples << "\n"
     << "reach_subdivisions = " << cfg.mpc.reach.subdivisions << "\n\n";
  os << "[controller]\n"
     << "kind = \"" << cfg.controller.name() << "\"\n"
     << "lambda = " << num(cfg.controller.lambda) << "\n"
     << "dhocbf_steps = [";
  for (std::size_t i = 0; i < cfg.controller.dhocbf_steps.size(); ++i) {
    os << (i ? ", " : "") << cfg.controller.dhocbf_steps[i];
  }
  os << "]\n\n";
  for (const auto& b : cfg.barriers) {
    os << "[[barriers]]\n"
       << "kind = \"" << to_string(b.kind) << "\"\n"
       << "center_m = "
       << (b.kind == BarrierSpec::Kind::kCylinderZ ? nums(Eigen::Vector2d(b.center.head<2>())) : nums(b.center))
       << "\n"
       << "radius_m = " << num(b.radius) << "\n\n";
  }
  os << "[reference]\n";
  if (cfg.reference.kind == ReferenceSpec::Kind::kCircle) {
    os << "kind = \"circle\"\n"
       << "radius_m = " << num(cfg.reference.radius) << "\n"
       << "angular_rate_rad_s = " << num(cfg.reference.angular_rate) << "\n"
       << "altitude_m = " << num(cfg.reference.altitude) << "\n"
       << "yaw_rate_rad_s = " << num(cfg.reference.yaw_rate) << "\n\n";
  } else {
    os << "kind = \"hover\"\n"
       << "point_m = " << nums(cfg.reference.point) << "\n"
       << "yaw_rad = " << num(cfg.reference.yaw) << "\n\n";
  }
  os << "[sim]\n"
     << "duration_s = " << num(cfg.sim.duration) << "\n"
     << "inner_dt_s = " << num(cfg.sim.inner_dt) << "\n"
     << "outer_T_s = " << num(cfg.sim.outer_T) << "\n"
     << "thrust_floor_N = " << num(cfg.sim.thrust_floor) << "\n"
     << "torque_limit_Nm = " << num(cfg.sim.torque_limit) << "\n\n";
  const Quaternion& q = cfg.initial.q;
  os << "[initial]\n"
     << "position_m = " << nums(cfg.initial.p) << "\n"
     << "velocity_m_s = " << nums(cfg.initial.v) << "\n"
     << "quaternion_xyzw = " << nums(Eigen::Vector4d(q.x, q.y, q.z, q.w)) << "\n"
     << "body_rate_rad_s = " << nums(cfg.initial.omega) << "\n";
  if (cfg.gap) {
    os << "\n[gap]\n"
       << "x_min_m = " << num(cfg.gap->x_min) << "\n"
       << "x_max_m = " << num(cfg.gap->x_max) << "\n"
       << "half_width_m = " << num(cfg.gap->half_width) << "\n"
       << "altitude_m = " << num(cfg.gap->altitude) << "\n"
       << "altitude_tol_m = " << num(cfg.gap->altitude_tol) << "\n";
  }
  return os.str();
}

void save_scenario(const ScenarioConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write scenario file " + path);
  out << scenario_to_toml(cfg);
  if (!out) throw ConfigError("failed writing scenario file " + path);
}

}  // namespace quadsafe
