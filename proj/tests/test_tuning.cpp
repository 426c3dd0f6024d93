#include <cmath>

#include <gtest/gtest.h>

#include "cohesive/dynamics.hpp"
#include "cohesive/metrics.hpp"
#include "cohesive/tuning.hpp"

using namespace cohesive;

namespace {

const StiffnessNetwork& prototype_network() {
  static const StiffnessNetwork net(prototype_chain());
  return net;
}

const PinnedLaplacian& prototype_laplacian() {
  static const PinnedLaplacian lap = build_pinned_laplacian(prototype_network());
  return lap;
}

// Unit-step settling by full simulation, as an oracle for the lean probe.
double simulated_settling(const ControllerConfig& c, double duration) {
  ScenarioConfig s;
  s.network = prototype_network();
  s.controller = c;
  s.trajectory = TrajectorySpec::step(1.0, 1);
  s.duration = duration;
  return measured_settling_time(simulate(s), 1.0);
}

TuningSpec coarse_dsr_spec() {
  TuningSpec spec;
  spec.alpha_step = 0.05;
  spec.beta_points = 40;
  return spec;
}

}  // namespace

TEST(SettlingEstimate, ReferenceGain) {
  const auto& lap = prototype_laplacian();
  EXPECT_NEAR(settling_time_estimate(lap, 1.93, 0.03), 10.0, 0.3);
  EXPECT_NEAR(settling_time_estimate(lap, 1.93, 0.03, std::log(50.0)), 10.0, 0.05);
}

TEST(SettlingEstimate, AlgebraicIdentities) {
  const double k = 0.05, dt = 0.03;
  const auto lap = build_pinned_laplacian(StiffnessChain({}, {k}));
  // 1 - gamma k = e^-4 gives T_s = dt.
  EXPECT_NEAR(settling_time_estimate(lap, (1.0 - std::exp(-4.0)) / k, dt), dt, 1e-12);
  // Deadbeat.
  EXPECT_EQ(settling_time_estimate(lap, 1.0 / k, dt), 0.0);
  EXPECT_THROW(settling_time_estimate(lap, 0.0, dt), TuningError);
  EXPECT_THROW(settling_time_estimate(lap, 2.0 / k, dt), TuningError);
}

TEST(SettlingEstimate, TracksSimulationOnSmallGainBranch) {
  const auto& lap = prototype_laplacian();
  const double fast = 2.0 / (lap.lambda_min() + lap.lambda_max());
  for (int i = 1; i <= 12; ++i) {
    const double gamma = fast * i / 13.0;
    const double estimate = settling_time_estimate(lap, gamma, 0.03, std::log(50.0));
    const double measured =
        simulated_settling(ControllerConfig::baseline(gamma, 0.03), 3.0 * estimate);
    EXPECT_NEAR(measured, estimate, 0.1 * estimate) << "gamma " << gamma;
  }
}

TEST(Probe, MatchesFullSimulation) {
  const auto& lap = prototype_laplacian();
  for (const auto& c : {ControllerConfig::baseline(1.93, 0.03),
                        ControllerConfig::baseline(7.0, 0.03),
                        ControllerConfig::dsr(0.39, 10.92, 0.03),
                        ControllerConfig::dsr(0.8, 3.0, 0.03)}) {
    const auto probe = probe_step_response(lap, c, 40.0, 0.02);
    EXPECT_FALSE(probe.diverged);
    EXPECT_NEAR(probe.settling_time, simulated_settling(c, 40.0), 1e-9);
    ScenarioConfig s;
    s.network = prototype_network();
    s.controller = c;
    s.trajectory = TrajectorySpec::step(1.0, 1);
    s.duration = 40.0;
    EXPECT_NEAR(probe.max_speed, max_speed(simulate(s)), 1e-12);
  }
}

TEST(TuneGamma, TenSecondTarget) {
  const auto r = tune_gamma(prototype_network(), prototype_laplacian(), TuningSpec{});
  EXPECT_NEAR(r.controller.gamma, 1.93, 0.02 * 1.93);
  EXPECT_NEAR(r.predicted_ts, 10.0, 1e-9);
  EXPECT_TRUE(r.feasible);
  EXPECT_LE(r.max_speed, 5.0);
  EXPECT_EQ(r.gamma_curve.size(), 2000u);
}

TEST(TuneGamma, SingleModeExactInverse) {
  const double k = 0.08, dt = 0.03, target = 7.0, decay = std::log(50.0);
  const StiffnessNetwork net(StiffnessChain({}, {k}));
  const auto lap = build_pinned_laplacian(net);
  TuningSpec spec;
  spec.target_ts = target;
  const auto r = tune_gamma(net, lap, spec);
  EXPECT_NEAR(r.controller.gamma, (1.0 - std::exp(-decay * dt / target)) / k, 1e-12);
}

TEST(TuneGamma, LongerTargetGivesSmallerGain) {
  double previous = INFINITY;
  for (double target : {5.0, 8.0, 10.0, 15.0, 25.0, 40.0}) {
    TuningSpec spec;
    spec.target_ts = target;
    spec.v_max = 100.0;
    const double gamma = tune_gamma(prototype_network(), prototype_laplacian(), spec).controller.gamma;
    EXPECT_LT(gamma, previous);
    previous = gamma;
  }
}

TEST(TuneGamma, DeterministicAndSelfConsistent) {
  TuningSpec spec;
  const auto a = tune_gamma(prototype_network(), prototype_laplacian(), spec);
  const auto b = tune_gamma(prototype_network(), prototype_laplacian(), spec);
  EXPECT_EQ(a.controller, b.controller);
  spec.target_ts = settling_time_estimate(prototype_laplacian(), a.controller.gamma, 0.03, spec.decay());
  const auto c = tune_gamma(prototype_network(), prototype_laplacian(), spec);
  EXPECT_NEAR(c.controller.gamma, a.controller.gamma, 1e-12);
}

TEST(TuneGamma, UnreachableTargets) {
  TuningSpec spec;
  spec.target_ts = INFINITY;
  EXPECT_THROW(tune_gamma(prototype_network(), prototype_laplacian(), spec), TuningError);
  spec.target_ts = 0.1;
  try {
    tune_gamma(prototype_network(), prototype_laplacian(), spec);
    FAIL();
  } catch (const TuningError& e) {
    EXPECT_NE(std::string(e.what()).find("achievable interval"), std::string::npos);
  }
  spec.target_ts = -1.0;
  EXPECT_THROW(tune_gamma(prototype_network(), prototype_laplacian(), spec), std::invalid_argument);
}

TEST(TuneDsr, FeasibleResultSurvivesResimulation) {
  const auto spec = coarse_dsr_spec();
  const auto base = tune_gamma(prototype_network(), prototype_laplacian(), spec);
  const auto r = tune_dsr(prototype_network(), prototype_laplacian(), spec, base.max_speed);
  ASSERT_TRUE(r.feasible);
  const auto& c = r.controller;
  EXPECT_TRUE(lemma1_stable(prototype_laplacian(), c.alpha, c.beta, c.dt));
  ScenarioConfig s;
  s.network = prototype_network();
  s.controller = c;
  s.trajectory = TrajectorySpec::step(1.0, 1);
  s.duration = spec.simulation_length();
  const auto trace = simulate(s);
  EXPECT_LE(max_speed(trace), base.max_speed);
  EXPECT_NEAR(measured_settling_time(trace, 1.0), spec.target_ts, spec.ts_tolerance);
  EXPECT_NEAR(r.sigma, spectral_radius(prototype_laplacian(), c.alpha, c.beta, c.dt).spectral_radius,
              1e-15);
  // Every grid point flagged feasible is no better than the choice.
  for (const auto& p : r.dsr_grid) {
    if (p.feasible) {
      EXPECT_GE(p.sigma, r.sigma - spec.sigma_tie);
    }
  }
}

TEST(TuneDsr, IndependentOfThreadCount) {
  auto spec = coarse_dsr_spec();
  spec.threads = 1;
  const auto a = tune_dsr(prototype_network(), prototype_laplacian(), spec, 5.0);
  spec.threads = 3;
  const auto b = tune_dsr(prototype_network(), prototype_laplacian(), spec, 5.0);
  EXPECT_EQ(a.controller, b.controller);
  EXPECT_EQ(a.sigma, b.sigma);
}

TEST(TuneDsr, ReportsInfeasibility) {
  const auto spec = coarse_dsr_spec();
  try {
    tune_dsr(prototype_network(), prototype_laplacian(), spec, 1e-6);
    FAIL();
  } catch (const TuningError& e) {
    EXPECT_NE(std::string(e.what()).find("no feasible"), std::string::npos);
  }
  EXPECT_THROW(tune_dsr(prototype_network(), prototype_laplacian(), spec, 0.0), std::invalid_argument);
}

TEST(TuningSpec, Validation) {
  TuningSpec spec;
  EXPECT_TRUE(spec.violations().empty());
  spec.band = 1.5;
  spec.alpha_step = 0.0;
  spec.settling_decay = -1.0;
  EXPECT_EQ(spec.violations().size(), 3u);
  EXPECT_NEAR(TuningSpec{}.decay(), std::log(50.0), 1e-15);
}
