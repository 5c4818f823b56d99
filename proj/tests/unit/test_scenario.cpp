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

#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "quadsafe/errors.hpp"
#include "quadsafe/scenario.hpp"

namespace quadsafe {
namespace {

const std::string kDir = QUADSAFE_SCENARIO_DIR;

std::string config_error(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST(Scenario, BundledCircle) {
  const ScenarioConfig c = load_scenario(kDir + "/circle_two_cylinders.toml");
  ASSERT_EQ(c.barriers.size(), 2u);
  EXPECT_EQ(c.barriers[0].kind, BarrierSpec::Kind::kCylinderZ);
  EXPECT_EQ(c.barriers[0].center.head<2>(), Eigen::Vector2d(0.0, 2.0));
  EXPECT_EQ(c.barriers[1].center.head<2>(), Eigen::Vector2d(0.0, -2.0));
  EXPECT_EQ(c.barriers[0].radius, 1.0);
  EXPECT_EQ(c.barriers[1].radius, 1.0);
  EXPECT_EQ(c.initial.p, Eigen::Vector3d(2.0, -0.25, 1.0));
  EXPECT_EQ(c.initial.v, Eigen::Vector3d(0.4, 0.82, 0.0));
  EXPECT_EQ(c.initial.q.w, 1.0);
  EXPECT_EQ(c.initial.omega, Eigen::Vector3d(0.5, -0.4, 0.0));
  EXPECT_EQ(c.quad.mass, 0.468);
  EXPECT_EQ(c.quad.max_thrust, 12.0);
  EXPECT_EQ(c.quad.drag, Eigen::Vector3d::Constant(0.25));
  EXPECT_EQ(c.attitude.kp_xy, 24.0);
  EXPECT_EQ(c.attitude.kp_z, 0.7);
  EXPECT_EQ(c.mpc.N, 20);
  EXPECT_EQ(c.mpc.T, 0.1);
  EXPECT_EQ(c.mpc.barrier_gain, 5.0);
  EXPECT_EQ(c.mpc.s_max, Eigen::Vector3d::Constant(40.0));
  EXPECT_EQ(c.mpc.Q(0, 0), 100.0);
  EXPECT_EQ(c.mpc.Q(5, 5), 1.0);
  EXPECT_EQ(c.mpc.P(0, 0), 1000.0);
  EXPECT_EQ(c.mpc.R(2, 2), 0.01);
  EXPECT_EQ(c.controller.type, ControllerType::kSdHocbf);
  EXPECT_EQ(c.sim.duration, 20.0);
  EXPECT_EQ(c.sim.ratio(), 100);
  EXPECT_EQ(c.sim.inner_steps(), 20000);
  EXPECT_FALSE(c.gap.has_value());
}

TEST(Scenario, BundledNarrowGapAndHover) {
  const ScenarioConfig g = load_scenario(kDir + "/narrow_gap.toml");
  ASSERT_EQ(g.barriers.size(), 2u);
  ASSERT_TRUE(g.gap.has_value());
  EXPECT_EQ(g.barriers[0].radius, 0.85);
  EXPECT_EQ(g.gap->x_min, -2.15);
  const ScenarioConfig h = load_scenario(kDir + "/hover.toml");
  EXPECT_TRUE(h.barriers.empty());
  EXPECT_EQ(h.reference.kind, ReferenceSpec::Kind::kHover);
}

TEST(Scenario, RoundTrip) {
  for (const char* name : {"circle_two_cylinders.toml", "narrow_gap.toml", "hover.toml"}) {
    const ScenarioConfig a = load_scenario(kDir + "/" + name);
    const std::string text = scenario_to_toml(a);
    const ScenarioConfig b = parse_scenario(text);
    EXPECT_EQ(scenario_to_toml(b), text) << name;
    EXPECT_EQ(b.initial.p, a.initial.p);
    EXPECT_EQ(b.initial.q.coeffs(), a.initial.q.coeffs());
    EXPECT_EQ(b.mpc.Q, a.mpc.Q);
    EXPECT_EQ(b.mpc.P, a.mpc.P);
    EXPECT_EQ(b.barriers.size(), a.barriers.size());
    EXPECT_EQ(b.reference.kind, a.reference.kind);
    EXPECT_EQ(b.reference.radius, a.reference.radius);
    EXPECT_EQ(b.controller.dhocbf_steps, a.controller.dhocbf_steps);
    EXPECT_EQ(b.gap.has_value(), a.gap.has_value());
  }
}

TEST(Scenario, SaveAndLoadFile) {
  const ScenarioConfig a = load_scenario(kDir + "/narrow_gap.toml");
  const auto path = std::filesystem::temp_directory_path() / "quadsafe_scenario_roundtrip.toml";
  save_scenario(a, path.string());
  const ScenarioConfig b = load_scenario(path.string());
  EXPECT_EQ(scenario_to_toml(a), scenario_to_toml(b));
  std::filesystem::remove(path);
}

TEST(Scenario, RejectsStartInsideObstacle) {
  ScenarioConfig c = load_scenario(kDir + "/circle_two_cylinders.toml");
  c.initial.p = {0.0, 2.0, 1.0};
  c.initial.v.setZero();
  const std::string msg = config_error(scenario_to_toml(c));
  EXPECT_NE(msg.find("h"), std::string::npos);
  EXPECT_FALSE(msg.empty());
}

TEST(Scenario, ListsEveryViolation) {
  ScenarioConfig c = load_scenario(kDir + "/circle_two_cylinders.toml");
  c.initial.p = {0.0, 2.0, 1.0};
  c.sim.outer_T = 0.1005;
  c.quad.mass = -1.0;
  std::string text = scenario_to_toml(c);
  const std::string msg = config_error(text);
  int lines = 0;
  for (char ch : msg) lines += ch == '\n';
  EXPECT_GE(lines + 1, 3) << msg;
}

TEST(Scenario, RejectsMalformedInput) {
  EXPECT_FALSE(config_error("this is = = not toml").empty());
  EXPECT_FALSE(config_error("[quad]\nmass_kg = \"heavy\"\n").empty());
  EXPECT_FALSE(config_error("[mpc]\nhorizon_steps = 0\n").empty());
  EXPECT_THROW(load_scenario(kDir + "/does_not_exist.toml"), ConfigError);

  ScenarioConfig c = load_scenario(kDir + "/hover.toml");
  std::string text = scenario_to_toml(c);
  const auto pos = text.find("kind = \"sdhocbf\"");
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, 16, "kind = \"bogus\"");
  EXPECT_NE(config_error(text).find("sdhocbf"), std::string::npos);
}

TEST(Scenario, InitialAugmentedUsesReference) {
  const ScenarioConfig c = load_scenario(kDir + "/circle_two_cylinders.toml");
  const AugState z = AugState::from_vector(c.initial_augmented());
  EXPECT_EQ(z.p, c.initial.p);
  EXPECT_EQ(z.v, c.initial.v);
  const auto ref = c.reference.window(0.0, 1, 0.1, c.quad.drag)[0];
  EXPECT_EQ(z.a_v, ref.z.a_v);
  EXPECT_EQ(z.j_v, ref.z.j_v);
}

}  // namespace
}  // namespace quadsafe
