#include <algorithm>
#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "cohesive/dynamics.hpp"
#include "cohesive/metrics.hpp"
#include "test_support.hpp"

using namespace cohesive;
namespace ct = cohesive::testing;

namespace {

SimulationTrace trace_of(const Eigen::MatrixXd& positions, double dt = 0.03) {
  SimulationTrace t;
  t.dt = dt;
  t.positions = positions;
  t.forces = Eigen::MatrixXd::Zero(positions.rows(), positions.cols());
  t.speeds = t.forces;
  t.augmented_forces = t.forces;
  for (Eigen::Index m = 0; m < positions.rows(); ++m) {
    t.time.push_back(static_cast<double>(m) * dt);
    t.reference.push_back(1.0);
  }
  return t;
}

double pairwise_spread(const Eigen::RowVectorXd& y) {
  double best = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    for (Eigen::Index j = 0; j < y.size(); ++j) best = std::max(best, std::abs(y(i) - y(j)));
  }
  return best;
}

}  // namespace

TEST(Deformation, Examples) {
  EXPECT_EQ(max_deformation(trace_of(Eigen::MatrixXd::Constant(5, 3, 2.5))), 0.0);
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(3, 4);
  y.row(1) << 1, 0, 0, -1;
  EXPECT_DOUBLE_EQ(deformation_series(trace_of(y))[1], 2.0);
  EXPECT_DOUBLE_EQ(max_deformation(trace_of(y)), 2.0);
}

TEST(Deformation, MatchesPairwiseScan) {
  auto g = ct::rng(51);
  for (int trial = 0; trial < 100; ++trial) {
    const auto n = static_cast<Eigen::Index>(1 + trial % 9);
    Eigen::MatrixXd y(20, n);
    for (Eigen::Index m = 0; m < 20; ++m) y.row(m) = ct::random_vector(g, n).transpose();
    const auto d = deformation_series(trace_of(y));
    for (Eigen::Index m = 0; m < 20; ++m) {
      EXPECT_NEAR(d[static_cast<std::size_t>(m)], pairwise_spread(y.row(m)), 1e-14);
    }
  }
}

TEST(Metrics, InvariantUnderRelabeling) {
  const auto trace = simulate(dsr_transport_scenario());
  std::vector<int> order = {2, 0, 3, 1};
  auto permuted = trace;
  for (int k = 0; k < 4; ++k) {
    permuted.positions.col(k) = trace.positions.col(order[k]);
    permuted.forces.col(k) = trace.forces.col(order[k]);
    permuted.speeds.col(k) = trace.speeds.col(order[k]);
  }
  const auto a = summarize(trace);
  const auto b = summarize(permuted);
  EXPECT_EQ(a.max_deformation, b.max_deformation);
  EXPECT_EQ(a.max_force, b.max_force);
  EXPECT_EQ(a.max_speed, b.max_speed);
  EXPECT_EQ(a.settling_time, b.settling_time);
}

TEST(Metrics, InvariantUnderTranslation) {
  auto s = baseline_transport_scenario();
  s.trajectory = TrajectorySpec::step(5.0, 0);
  s.initial_positions = Eigen::Vector4d(0, 1, 2, 3);
  auto shifted = s;
  shifted.trajectory.amplitude = 5.0 - 40.0;
  shifted.initial_positions = s.initial_positions->array() - 40.0;
  const auto a = simulate(s);
  const auto b = simulate(shifted);
  EXPECT_NEAR(max_deformation(a), max_deformation(b), 1e-10);
  EXPECT_NEAR(max_force(a), max_force(b), 1e-12);
}

TEST(Metrics, ScaleWithAmplitude) {
  for (auto make : {baseline_transport_scenario, dsr_transport_scenario}) {
    auto s = make();
    s.trajectory.amplitude = 1.0;
    const auto unit = summarize(simulate(s));
    for (double a : {10.0, 50.0}) {
      s.trajectory.amplitude = a;
      const auto r = summarize(simulate(s));
      EXPECT_NEAR(r.max_deformation, a * unit.max_deformation, 1e-10 * a);
      EXPECT_NEAR(r.max_force, a * unit.max_force, 1e-12 * a);
      EXPECT_NEAR(r.max_speed, a * unit.max_speed, 1e-10 * a);
      EXPECT_NEAR(r.settling_time, unit.settling_time, 1e-9);
    }
  }
}

TEST(Metrics, ForceOfTransportScenarios) {
  EXPECT_NEAR(max_force(simulate(baseline_transport_scenario())), 0.146, 0.005);
  EXPECT_NEAR(max_force(simulate(dsr_transport_scenario())), 0.014, 0.0007);
  auto s = baseline_transport_scenario();
  s.trajectory.amplitude = 0.0;
  EXPECT_EQ(max_force(simulate(s)), 0.0);
}

TEST(Settling, AlreadyAtFinalValue) {
  EXPECT_EQ(measured_settling_time(trace_of(Eigen::MatrixXd::Constant(10, 4, 1.0)), 1.0), 0.0);
}

TEST(Settling, NeverSettled) {
  Eigen::MatrixXd y = Eigen::MatrixXd::Constant(10, 2, 1.0);
  y(9, 1) = 1.5;
  EXPECT_TRUE(std::isinf(measured_settling_time(trace_of(y), 1.0)));
}

TEST(Settling, SingleRobotMatchesClosedForm) {
  // Baseline on one pinned robot: y[m] = 1 - (1 - g k)^(m - 1) for a unit step at m = 1.
  const double k = 0.05, dt = 0.03;
  for (double gamma : {0.5, 1.5, 5.0, 15.0, 35.0}) {
    ScenarioConfig s;
    s.network = StiffnessNetwork(StiffnessChain({}, {k}));
    s.controller = ControllerConfig::baseline(gamma, dt);
    s.trajectory = TrajectorySpec::step(1.0, 1);
    s.duration = 400.0;
    const auto trace = simulate(s);
    const double r = 1.0 - gamma * k;
    // Last m with |r|^(m-1) > 0.02; sample m is at time m dt.
    std::size_t last = 0;
    for (std::size_t m = 0; m < trace.steps(); ++m) {
      const double err = m == 0 ? 1.0 : std::pow(std::abs(r), static_cast<double>(m - 1));
      if (err > 0.02) last = m;
    }
    EXPECT_NEAR(measured_settling_time(trace, 1.0), static_cast<double>(last) * dt, 1e-9)
        << "gamma " << gamma;
  }
}

TEST(Settling, SummaryUsesFinalReference) {
  const auto summary = summarize(simulate(baseline_transport_scenario()));
  EXPECT_GT(summary.settling_time, 40.0);
  EXPECT_LT(summary.settling_time, 60.0);
}

TEST(Improvement, Examples) {
  RunSummary base{5.824, 0.146, 3.4, 0.0, {}};
  EXPECT_EQ(improvement(base, base).deformation_percent, 0.0);
  EXPECT_EQ(improvement(base, base).force_percent, 0.0);
  RunSummary dsr{0.563, 0.014, 3.3, 0.0, {}};
  EXPECT_EQ(std::lround(improvement(base, dsr).deformation_percent), 90);
  EXPECT_EQ(std::lround(improvement(base, dsr).force_percent), 90);
  RunSummary none{0.0, 0.0, 0.0, 0.0, {}};
  EXPECT_EQ(improvement(base, none).deformation_percent, 100.0);
  EXPECT_THROW(improvement(none, base), std::invalid_argument);
}
