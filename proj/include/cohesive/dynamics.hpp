#pragma once

// Discrete-time robot position updates.
//
// Baseline (local force):  Y+ = (I - gamma K) Y + gamma B y_d
// DSR (N-sample delay):    Y+ = Y - a b dt K Y + a b dt B y_d
//                               + (1/N) [I - b K] (Y - Y[m-N])
//
// Each update also has a per-robot form that uses only that robot's own
// force reading, its own position, their delayed copies, and y_d when the
// robot is a leader. With COHESIVE_CROSS_CHECK enabled (the default outside
// NDEBUG builds) every step evaluates both forms and throws on disagreement.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cohesive/controller.hpp"
#include "cohesive/network_model.hpp"
#include "cohesive/scenario.hpp"
#include "cohesive/stability.hpp"
#include "cohesive/trajectory.hpp"

#if !defined(COHESIVE_CROSS_CHECK) && !defined(NDEBUG)
#define COHESIVE_CROSS_CHECK 1
#endif

namespace cohesive {

/// |y_k| beyond this (cm), or a non-finite value, aborts a simulation.
inline constexpr double kDivergenceLimit = 1e9;
/// Tolerance of the matrix/per-robot agreement check, relative to max(1, |Y|).
inline constexpr double kCrossCheckTolerance = 1e-12;

class DivergenceError : public std::runtime_error {
 public:
  explicit DivergenceError(std::size_t step)
      : std::runtime_error("diverged at step " + std::to_string(step)), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

// ---------------------------------------------------------------------------
// Single-step updates

inline Eigen::VectorXd step_baseline(const PinnedLaplacian& laplacian,
                                     const Eigen::VectorXd& positions, double gamma,
                                     double reference) {
  return positions - gamma * (laplacian.matrix() * positions) +
         gamma * reference * laplacian.leader_vector();
}

/// y_k+ = y_k - gamma (f_k + k_{k,d} (y_k - y_d)).
inline Eigen::VectorXd step_baseline_local(const StiffnessNetwork& network,
                                           const Eigen::VectorXd& positions,
                                           double gamma, double reference) {
  Eigen::VectorXd next(positions.size());
  for (std::size_t k = 0; k < network.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    const double f = measured_force(network, positions, k);
    const double virtual_force =
        network.leader_stiffness(k) * (positions(i) - reference);
    next(i) = positions(i) - gamma * (f + virtual_force);
  }
  return next;
}

inline Eigen::VectorXd step_dsr(const PinnedLaplacian& laplacian,
                                const Eigen::VectorXd& positions,
                                const Eigen::VectorXd& delayed, double alpha,
                                double beta, double dt, double reference,
                                std::size_t delay_multiple = 1) {
  const double gain = alpha * beta * dt;
  const double inv_n = 1.0 / static_cast<double>(delay_multiple);
  const Eigen::VectorXd change = positions - delayed;
  const auto& k = laplacian.matrix();
  return positions - gain * (k * positions) + gain * reference * laplacian.leader_vector() +
         inv_n * (change - beta * (k * change));
}

/// Per-robot DSR update. `delayed` is Y[m-N]; the delayed force f_k[m-N] is
/// what robot k read N samples ago.
inline Eigen::VectorXd step_dsr_local(const StiffnessNetwork& network,
                                      const Eigen::VectorXd& positions,
                                      const Eigen::VectorXd& delayed, double alpha,
                                      double beta, double dt, double reference,
                                      std::size_t delay_multiple = 1) {
  const double gain = alpha * beta * dt;
  const double inv_n = 1.0 / static_cast<double>(delay_multiple);
  Eigen::VectorXd next(positions.size());
  for (std::size_t k = 0; k < network.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    const double kd = network.leader_stiffness(k);
    const double f_now = measured_force(network, positions, k);
    const double f_then = measured_force(network, delayed, k);
    next(i) = positions(i) - gain * f_now + gain * kd * (reference - positions(i)) +
              inv_n * ((1.0 - beta * kd) * (positions(i) - delayed(i)) -
                       beta * (f_now - f_then));
  }
  return next;
}

// ---------------------------------------------------------------------------
// State

/// Current positions Y[m] plus the N most recent past vectors.
class NetworkState {
 public:
  /// History starts filled with the initial positions (network at rest).
  NetworkState(Eigen::VectorXd initial, std::size_t delay_multiple)
      : positions_(std::move(initial)),
        history_(std::max<std::size_t>(delay_multiple, 1), positions_) {}

  const Eigen::VectorXd& positions() const { return positions_; }
  /// Y[m-N].
  const Eigen::VectorXd& delayed() const { return history_.back(); }
  std::size_t step() const { return step_; }
  std::size_t delay_multiple() const { return history_.size(); }

  void advance(Eigen::VectorXd next) {
    history_.push_front(std::move(positions_));
    history_.pop_back();
    positions_ = std::move(next);
    ++step_;
  }

 private:
  Eigen::VectorXd positions_;
  std::deque<Eigen::VectorXd> history_;  // front = Y[m-1], back = Y[m-N]
  std::size_t step_ = 0;
};

/// Advances one network under one controller.
class Stepper {
 public:
  Stepper(const StiffnessNetwork& network, const PinnedLaplacian& laplacian,
          ControllerConfig config, Eigen::VectorXd initial)
      : network_(&network),
        laplacian_(&laplacian),
        config_(config),
        state_(std::move(initial), config.is_dsr() ? config.delay_multiple : 1) {
    config_.validate();
    if (static_cast<std::size_t>(state_.positions().size()) != network.size() ||
        laplacian.size() != network.size()) {
      throw std::invalid_argument("stepper: size mismatch between network and state");
    }
  }

  const NetworkState& state() const { return state_; }
  const Eigen::VectorXd& positions() const { return state_.positions(); }

  /// Y[m+1] for reference y_d[m], without advancing.
  Eigen::VectorXd peek(double reference) const {
    const auto& y = state_.positions();
    Eigen::VectorXd next;
    if (config_.is_dsr()) {
      next = step_dsr(*laplacian_, y, state_.delayed(), config_.alpha, config_.beta,
                      config_.dt, reference, config_.delay_multiple);
    } else {
      next = step_baseline(*laplacian_, y, config_.gamma, reference);
    }
#if COHESIVE_CROSS_CHECK
    const Eigen::VectorXd local =
        config_.is_dsr()
            ? step_dsr_local(*network_, y, state_.delayed(), config_.alpha, config_.beta,
                             config_.dt, reference, config_.delay_multiple)
            : step_baseline_local(*network_, y, config_.gamma, reference);
    const double scale = std::max({1.0, y.cwiseAbs().maxCoeff(), std::abs(reference)});
    if (next.allFinite() && (next - local).cwiseAbs().maxCoeff() > kCrossCheckTolerance * scale) {
      throw std::logic_error("per-robot and matrix updates disagree at step " +
                             std::to_string(state_.step()));
    }
#endif
    return next;
  }

  void commit(Eigen::VectorXd next) { state_.advance(std::move(next)); }

 private:
  const StiffnessNetwork* network_;
  const PinnedLaplacian* laplacian_;
  ControllerConfig config_;
  NetworkState state_;
};

inline bool diverged(const Eigen::VectorXd& y) {
  return !y.allFinite() || y.cwiseAbs().maxCoeff() > kDivergenceLimit;
}

// ---------------------------------------------------------------------------
// Simulation

/// Row m holds sample m: time m*dt, positions Y[m], object forces f[m],
/// augmented forces f_hat[m] (object + virtual source), y_d[m], and the
/// commanded speeds (Y[m+1] - Y[m]) / dt.
struct SimulationTrace {
  double dt = 0.0;
  std::vector<double> time;
  Eigen::MatrixXd positions;
  Eigen::MatrixXd forces;
  Eigen::MatrixXd augmented_forces;
  std::vector<double> reference;
  Eigen::MatrixXd speeds;
  std::vector<std::string> warnings;

  std::size_t steps() const { return time.size(); }
  std::size_t robots() const { return static_cast<std::size_t>(positions.cols()); }
};

/// Number of updates for a duration: ceil(duration / dt), guarding against
/// round-off in the division.
inline std::size_t step_count(double duration, double dt) {
  return static_cast<std::size_t>(std::ceil(duration / dt - 1e-9));
}

/// Runs the scenario for m = 0 .. ceil(duration/dt). Deterministic.
/// Unstable controllers run anyway with a warning; divergence throws.
inline SimulationTrace simulate(const ScenarioConfig& scenario) {
  const auto issues = scenario.violations();
  if (!issues.empty()) throw std::invalid_argument("invalid scenario: " + issues.front());

  const auto& network = scenario.network;
  const auto& config = scenario.controller;
  const PinnedLaplacian laplacian = build_pinned_laplacian(network);

  SimulationTrace trace;
  trace.dt = config.dt;
  const auto report = analyze(laplacian, config);
  if (!report.stable) {
    trace.warnings.push_back(
        std::string(report.marginal ? "marginally stable" : "unstable") + " " +
        to_string(config.kind) + " controller: spectral radius " +
        std::to_string(report.spectral_radius));
  }

  const std::size_t last = step_count(scenario.duration, config.dt);
  const auto rows = static_cast<Eigen::Index>(last + 1);
  const auto n = static_cast<Eigen::Index>(network.size());
  trace.time.resize(last + 1);
  trace.reference.resize(last + 1);
  trace.positions.resize(rows, n);
  trace.forces.resize(rows, n);
  trace.augmented_forces.resize(rows, n);
  trace.speeds.resize(rows, n);

  ReferenceGenerator reference(scenario.trajectory, config.dt);
  Stepper stepper(network, laplacian, config, scenario.initial_state());
  const Eigen::VectorXd leader = laplacian.leader_vector();

  for (std::size_t m = 0; m <= last; ++m) {
    const auto row = static_cast<Eigen::Index>(m);
    const double yd = reference.next();
    const Eigen::VectorXd& y = stepper.positions();
    const Eigen::VectorXd f = neighbor_forces(network, y);
    Eigen::VectorXd next = stepper.peek(yd);
    if (diverged(next)) throw DivergenceError(m + 1);

    trace.time[m] = static_cast<double>(m) * config.dt;
    trace.reference[m] = yd;
    trace.positions.row(row) = y.transpose();
    trace.forces.row(row) = f.transpose();
    trace.augmented_forces.row(row) =
        (f + leader.cwiseProduct(y - Eigen::VectorXd::Constant(n, yd))).transpose();
    trace.speeds.row(row) = ((next - y) / config.dt).transpose();
    stepper.commit(std::move(next));
  }
  return trace;
}

}  // namespace cohesive
