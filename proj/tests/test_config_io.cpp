#include <string>

#include <gtest/gtest.h>

#include "cohesive/config_io.hpp"
#include "test_support.hpp"

using namespace cohesive;
namespace ct = cohesive::testing;

namespace {

std::string config_path(const std::string& name) {
  return std::string(COHESIVE_CONFIG_DIR) + "/" + name;
}

std::vector<std::string> issues_of(const std::string& text) {
  try {
    parse_config(text, "test.ini");
  } catch (const ConfigError& e) {
    return e.issues();
  }
  return {};
}

bool mentions(const std::vector<std::string>& issues, const std::string& needle) {
  for (const auto& i : issues) {
    if (i.find(needle) != std::string::npos) return true;
  }
  return false;
}

const char* kValid = R"(
[network]
neighbor_stiffness = 0.05, 0.05, 0.05
leader_stiffness = 0.05, 0, 0, 0
[controller]
kind = dsr
alpha = 0.39
beta = 10.92
dt = 0.03
[trajectory]
kind = filtered_step
amplitude = 50
omega_c = 0.1
[run]
duration = 60
)";

std::string replace(std::string text, const std::string& from, const std::string& to) {
  text.replace(text.find(from), from.size(), to);
  return text;
}

}  // namespace

TEST(Config, BundledFilesMatchPresets) {
  EXPECT_EQ(load_config(config_path("paper_baseline.ini")), baseline_transport_scenario());
  EXPECT_EQ(load_config(config_path("paper_dsr.ini")), dsr_transport_scenario());
}

TEST(Config, MinimalFileUsesDefaults) {
  const auto s = parse_config(kValid);
  EXPECT_EQ(s.name, "scenario");
  EXPECT_EQ(s.controller.delay_multiple, 1u);
  EXPECT_EQ(s.trajectory.start_index, 1u);
  EXPECT_FALSE(s.initial_positions.has_value());
}

TEST(Config, RoundTripsPresetsAndRandomScenarios) {
  for (const auto& s : {baseline_transport_scenario(), dsr_transport_scenario()}) {
    EXPECT_EQ(parse_config(write_config(s)), s);
  }
  auto g = ct::rng(61);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + trial % 7;
    ScenarioConfig s;
    s.name = "random_" + std::to_string(trial);
    s.network = trial % 2 ? StiffnessNetwork(ct::random_chain(g, n)) : ct::random_graph(g, n);
    s.controller = trial % 3 ? ControllerConfig::dsr(ct::uniform(g, 0.1, 1), ct::uniform(g, 0.1, 10),
                                                     ct::uniform(g, 0.001, 0.1), 1 + trial % 4)
                             : ControllerConfig::baseline(ct::uniform(g, 0.1, 5), 0.03);
    s.trajectory = trial % 2 ? TrajectorySpec::filtered_step(ct::uniform(g, -100, 100),
                                                            ct::uniform(g, 0.05, 1))
                             : TrajectorySpec::step(ct::uniform(g, -100, 100), trial % 5);
    s.duration = s.trajectory.horizon(s.controller.dt) + ct::uniform(g, 1, 100);
    if (trial % 4 == 0) s.initial_positions = ct::random_vector(g, n);
    const auto text = write_config(s);
    const auto back = parse_config(text);
    EXPECT_EQ(write_config(back), text);
    EXPECT_EQ(back.network.coupling(), s.network.coupling());
    EXPECT_EQ(back.network.leader_stiffness(), s.network.leader_stiffness());
    EXPECT_EQ(back.controller, s.controller);
    EXPECT_EQ(back.trajectory, s.trajectory);
    EXPECT_EQ(back.duration, s.duration);
    EXPECT_EQ(back.initial_positions.has_value(), s.initial_positions.has_value());
  }
}

TEST(Config, ZeroBetaIsRejected) {
  const auto issues = issues_of(replace(kValid, "beta = 10.92", "beta = 0"));
  ASSERT_EQ(issues.size(), 1u);
  EXPECT_EQ(issues[0], "controller.beta: must be > 0");
}

TEST(Config, ReportsEveryViolationWithFieldPath) {
  std::string text = replace(kValid, "alpha = 0.39", "alpha = -1");
  text = replace(text, "omega_c = 0.1", "omega_c = 0");
  text = replace(text, "duration = 60", "duration = 10");
  text = replace(text, "leader_stiffness = 0.05, 0, 0, 0", "leader_stiffness = 0, 0, 0, 0");
  const auto issues = issues_of(text);
  EXPECT_TRUE(mentions(issues, "controller.alpha"));
  EXPECT_TRUE(mentions(issues, "trajectory.omega_c"));
  EXPECT_TRUE(mentions(issues, "network.leader_stiffness"));
  EXPECT_GE(issues.size(), 3u);
}

TEST(Config, DurationShorterThanHorizon) {
  EXPECT_TRUE(mentions(issues_of(replace(kValid, "duration = 60", "duration = 30")),
                       "run.duration"));
}

TEST(Config, UnknownAndIrrelevantKeys) {
  EXPECT_TRUE(mentions(issues_of(replace(kValid, "dt = 0.03", "dt = 0.03\ngama = 2")),
                       "controller.gama"));
  EXPECT_TRUE(mentions(issues_of(replace(kValid, "dt = 0.03", "dt = 0.03\ngamma = 2")),
                       "not used by a dsr controller"));
  EXPECT_TRUE(mentions(issues_of(std::string(kValid) + "[extra]\nx = 1\n"), "extra"));
}

TEST(Config, MissingAndMalformedValues) {
  EXPECT_TRUE(mentions(issues_of(replace(kValid, "alpha = 0.39\n", "")), "controller.alpha"));
  EXPECT_TRUE(mentions(issues_of(replace(kValid, "amplitude = 50", "amplitude = fifty")),
                       "trajectory.amplitude"));
  EXPECT_TRUE(mentions(issues_of(replace(kValid, "kind = dsr", "kind = pid")), "controller.kind"));
  EXPECT_TRUE(mentions(issues_of(replace(kValid, "0.05, 0.05, 0.05", "0.05, 0.05")),
                       "network"));
}

TEST(Config, GraphTopology) {
  const std::string text = replace(
      kValid, "neighbor_stiffness = 0.05, 0.05, 0.05",
      "topology = graph\nrobots = 4\nedges = 1-2:0.05, 2-3:0.05, 3-4:0.05, 1-3:0.02");
  const auto s = parse_config(text);
  EXPECT_EQ(s.network.edges().size(), 4u);
  EXPECT_DOUBLE_EQ(s.network.stiffness(0, 2), 0.02);
  EXPECT_TRUE(mentions(issues_of(replace(text, "1-3:0.02", "1-3")), "network.edges"));
}

TEST(Config, SyntaxErrorCarriesLocation) {
  try {
    parse_config("[network\nx = 1\n", "broken.ini");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("broken.ini:1"), std::string::npos);
  }
  EXPECT_THROW(load_config("/nonexistent/path.ini"), ConfigError);
}
