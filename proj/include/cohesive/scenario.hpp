#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cohesive/controller.hpp"
#include "cohesive/network_model.hpp"
#include "cohesive/trajectory.hpp"

namespace cohesive {

/// Everything needed for one run.
struct ScenarioConfig {
  std::string name = "scenario";
  StiffnessNetwork network{StiffnessChain({}, {1.0})};
  ControllerConfig controller;
  TrajectorySpec trajectory;
  double duration = 60.0;  // s
  std::optional<Eigen::VectorXd> initial_positions;  // zeros when absent
  std::string trace_csv;   // optional output paths, relative to --out
  std::string report;

  Eigen::VectorXd initial_state() const {
    if (initial_positions) return *initial_positions;
    return Eigen::VectorXd::Zero(static_cast<Eigen::Index>(network.size()));
  }

  /// Field-path messages, e.g. "controller.beta: must be > 0".
  std::vector<std::string> violations() const {
    std::vector<std::string> out;
    for (const auto& v : controller.violations()) out.push_back("controller." + v);
    for (const auto& v : trajectory.violations(controller.dt)) {
      out.push_back("trajectory." + v);
    }
    const auto& leader = network.leader_stiffness();
    bool pinned = false;
    for (double k : leader) pinned = pinned || k > 0.0;
    if (!pinned) {
      out.push_back("network.leader_stiffness: at least one robot must be a leader");
    }
    if (!(duration > 0.0) || !std::isfinite(duration)) {
      out.push_back("run.duration: must be > 0");
    } else if (trajectory.violations(controller.dt).empty() && controller.dt > 0.0 &&
               duration < trajectory.horizon(controller.dt)) {
      out.push_back("run.duration: shorter than the trajectory horizon (" +
                    std::to_string(trajectory.horizon(controller.dt)) + " s)");
    }
    if (initial_positions &&
        static_cast<std::size_t>(initial_positions->size()) != network.size()) {
      out.push_back("run.initial_positions: expected " +
                    std::to_string(network.size()) + " values");
    }
    return out;
  }

  friend bool operator==(const ScenarioConfig& l, const ScenarioConfig& r) {
    const bool same_init =
        l.initial_positions.has_value() == r.initial_positions.has_value() &&
        (!l.initial_positions || *l.initial_positions == *r.initial_positions);
    return l.name == r.name && l.network == r.network && l.controller == r.controller &&
           l.trajectory == r.trajectory && l.duration == r.duration && same_init &&
           l.trace_csv == r.trace_csv && l.report == r.report;
  }
};

/// Four robots on a coil spring, 0.05 N/cm between neighbors, robot 1
/// pinned to the virtual source with 0.05 N/cm.
inline StiffnessChain prototype_chain() {
  return StiffnessChain({0.05, 0.05, 0.05}, {0.05, 0.0, 0.0, 0.0});
}

inline constexpr double kPrototypeDt = 0.03;
inline constexpr double kPrototypeGamma = 1.93;
inline constexpr double kPrototypeAlpha = 0.39;
inline constexpr double kPrototypeBeta = 10.92;

/// 50 cm filtered step (omega_c = 0.1 rad/s), local-force update, 60 s.
inline ScenarioConfig baseline_transport_scenario() {
  ScenarioConfig s;
  s.name = "paper_baseline";
  s.network = StiffnessNetwork(prototype_chain());
  s.controller = ControllerConfig::baseline(kPrototypeGamma, kPrototypeDt);
  s.trajectory = TrajectorySpec::filtered_step(50.0, 0.1);
  s.duration = 60.0;
  s.trace_csv = "paper_baseline_trace.csv";
  s.report = "paper_baseline_report.json";
  return s;
}

/// Same transport with delayed self reinforcement.
inline ScenarioConfig dsr_transport_scenario() {
  ScenarioConfig s = baseline_transport_scenario();
  s.name = "paper_dsr";
  s.controller = ControllerConfig::dsr(kPrototypeAlpha, kPrototypeBeta, kPrototypeDt, 1);
  s.trace_csv = "paper_dsr_trace.csv";
  s.report = "paper_dsr_report.json";
  return s;
}

/// Simulated maxima reported for the two transports above.
struct ReportedTransportResults {
  double baseline_force = 0.146;       // N
  double baseline_deformation = 5.824; // cm
  double dsr_force = 0.014;            // N
  double dsr_deformation = 0.563;      // cm
  double improvement_percent = 90.0;
  double speed_limit = 5.0;            // cm/s
};

}  // namespace cohesive
