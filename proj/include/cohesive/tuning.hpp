#pragma once

// Controller selection for a target settling time.
//
// Baseline: gamma is read off the settling-time estimate
//   T_s(gamma) = -c dt / ln(lambda*),  lambda* = max_j |1 - gamma lambda_j|,
// on its small-gamma branch, where lambda_min's mode dominates.
//
// DSR: grid search over (alpha, beta) below the closed-form stability bound.
// A point is feasible when its simulated unit-step response settles within
// target +- tolerance and its peak commanded speed stays at or below the
// baseline's. Among feasible points the spectral radius is minimized.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "cohesive/controller.hpp"
#include "cohesive/dynamics.hpp"
#include "cohesive/metrics.hpp"
#include "cohesive/network_model.hpp"
#include "cohesive/stability.hpp"
#include "cohesive/trajectory.hpp"

namespace cohesive {

/// Decay constant of the settling-time estimate as usually written.
inline constexpr double kLiteralSettlingDecay = 4.0;

class TuningError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// -decay dt / ln(lambda*). Throws for gains outside (0, 2/lambda_max).
inline double settling_time_estimate(const PinnedLaplacian& laplacian, double gamma,
                                     double dt, double decay = kLiteralSettlingDecay) {
  if (!(gamma > 0.0) || !(gamma < baseline_gamma_bound(laplacian))) {
    throw TuningError("unstable gain: gamma = " + std::to_string(gamma) +
                      " outside (0, " + std::to_string(baseline_gamma_bound(laplacian)) +
                      ")");
  }
  const double dominant = baseline_stability(laplacian, gamma).spectral_radius;
  if (dominant >= 1.0) return std::numeric_limits<double>::infinity();
  if (dominant == 0.0) return 0.0;
  return -decay * dt / std::log(dominant);
}

/// Same estimate with the DSR spectral radius in place of lambda*.
inline double dsr_settling_time_estimate(double sigma, double dt, double decay) {
  if (sigma >= 1.0) return std::numeric_limits<double>::infinity();
  if (sigma == 0.0) return 0.0;
  return -decay * dt / std::log(sigma);
}

// ---------------------------------------------------------------------------
// Step-response probe

struct StepProbe {
  double settling_time = kNeverSettled;
  double max_speed = 0.0;
  bool diverged = false;
};

/// Unit-amplitude step (y_d = 1 for m >= 1) from rest, run for `duration`
/// seconds. Samples and settling convention match simulate() followed by
/// measured_settling_time(); this path just avoids storing the trace.
inline StepProbe probe_step_response(const PinnedLaplacian& laplacian,
                                     const ControllerConfig& config, double duration,
                                     double band = 0.02) {
  const auto n = static_cast<Eigen::Index>(laplacian.size());
  const auto& k = laplacian.matrix();
  const auto& b = laplacian.leader_vector();
  const std::size_t last = step_count(duration, config.dt);
  const bool dsr = config.is_dsr();
  const double gain = dsr ? config.alpha * config.beta * config.dt : config.gamma;
  const std::size_t delay = dsr ? std::max<std::size_t>(config.delay_multiple, 1) : 1;
  const double inv_n = 1.0 / static_cast<double>(delay);

  // Ring buffer of the last `delay` position vectors.
  std::vector<Eigen::VectorXd> history(delay, Eigen::VectorXd::Zero(n));
  std::size_t head = 0;
  Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd next(n), change(n), ky(n), kc(n);

  StepProbe out;
  SettlingDetector detector(1.0, band);
  for (std::size_t m = 0; m <= last; ++m) {
    const double yd = m >= 1 ? 1.0 : 0.0;
    ky.noalias() = k * y;
    if (dsr) {
      const Eigen::VectorXd& delayed = history[(head + delay - 1) % delay];
      change = y - delayed;
      kc.noalias() = k * change;
      next = y - gain * ky + (gain * yd) * b + inv_n * (change - config.beta * kc);
    } else {
      next = y - gain * ky + (gain * yd) * b;
    }
    if (diverged(next)) {
      out.diverged = true;
      out.settling_time = kNeverSettled;
      return out;
    }
    detector.observe(static_cast<double>(m) * config.dt, y);
    out.max_speed = std::max(out.max_speed, (next - y).cwiseAbs().maxCoeff() / config.dt);
    if (dsr) {
      head = (head + delay - 1) % delay;  // new front slot
      history[head] = y;
    }
    y.swap(next);
  }
  out.settling_time = detector.settling_time();
  return out;
}

// ---------------------------------------------------------------------------
// Specs and results

struct TuningSpec {
  double target_ts = 10.0;  // s
  double v_max = 5.0;       // cm/s, acceptable baseline speed
  double dt = 0.03;         // s
  double band = 0.02;       // settling band, fraction of the final value
  /// Decay constant c of the settling estimate; ln(1/band) when unset.
  std::optional<double> settling_decay;
  /// Length of the unit-step simulations; 3 * target_ts when unset.
  std::optional<double> step_duration;

  std::size_t gamma_samples = 2000;

  double alpha_min = 0.05;
  double alpha_max = 2.0;
  double alpha_step = 0.01;
  std::size_t beta_points = 200;
  double ts_tolerance = 0.25;  // s
  double sigma_tie = 1e-9;

  /// Optional transport reference on which peak speeds are re-checked.
  std::optional<TrajectorySpec> transport;
  double transport_duration = 60.0;

  unsigned threads = 0;  // 0: hardware concurrency

  double decay() const { return settling_decay.value_or(-std::log(band)); }
  double simulation_length() const { return step_duration.value_or(3.0 * target_ts); }

  std::vector<std::string> violations() const {
    std::vector<std::string> out;
    if (!(target_ts > 0.0)) out.push_back("target_ts: must be > 0");
    if (!(v_max > 0.0)) out.push_back("v_max: must be > 0");
    if (!(dt > 0.0)) out.push_back("dt: must be > 0");
    if (!(band > 0.0 && band < 1.0)) out.push_back("band: must be in (0, 1)");
    if (settling_decay && !(*settling_decay > 0.0)) {
      out.push_back("settling_decay: must be > 0");
    }
    if (gamma_samples < 2) out.push_back("gamma_samples: must be >= 2");
    if (!(alpha_min > 0.0) || !(alpha_max >= alpha_min) || !(alpha_step > 0.0)) {
      out.push_back("alpha range: need 0 < alpha_min <= alpha_max and alpha_step > 0");
    }
    if (beta_points < 1) out.push_back("beta_points: must be >= 1");
    if (!(ts_tolerance > 0.0)) out.push_back("ts_tolerance: must be > 0");
    return out;
  }
};

struct GammaSample {
  double gamma = 0.0;
  double predicted_ts = 0.0;
};

struct DsrSample {
  double alpha = 0.0;
  double beta = 0.0;
  double sigma = 0.0;
  double measured_ts = 0.0;
  double max_speed = 0.0;
  bool stable = false;
  bool feasible = false;
};

struct TuningResult {
  ControllerConfig controller;
  double predicted_ts = 0.0;
  double measured_ts = 0.0;
  double max_speed = 0.0;
  double sigma = 0.0;
  bool feasible = false;
  std::optional<double> transport_max_speed;
  std::vector<GammaSample> gamma_curve;  // T_s vs gamma table
  std::vector<DsrSample> dsr_grid;       // T_s vs (alpha, beta) table
};

namespace detail {

inline void check_spec(const TuningSpec& spec) {
  const auto v = spec.violations();
  if (!v.empty()) throw std::invalid_argument("tuning spec " + v.front());
}

inline std::optional<double> transport_speed(const StiffnessNetwork& network,
                                             const ControllerConfig& controller,
                                             const TuningSpec& spec) {
  if (!spec.transport) return std::nullopt;
  ScenarioConfig scenario;
  scenario.name = "transport_check";
  scenario.network = network;
  scenario.controller = controller;
  scenario.trajectory = *spec.transport;
  scenario.duration = std::max(spec.transport_duration,
                               spec.transport->horizon(controller.dt));
  return max_speed(simulate(scenario));
}

// a is better than b: strictly smaller sigma, or a tie won by the smaller beta.
inline bool better(const DsrSample& a, const DsrSample& b, double tie) {
  if (a.sigma < b.sigma - tie) return true;
  if (std::abs(a.sigma - b.sigma) <= tie) return a.beta < b.beta;
  return false;
}

}  // namespace detail

/// Smallest gamma whose settling estimate equals the target, plus a unit-step
/// simulation of it.
inline TuningResult tune_gamma(const StiffnessNetwork& network,
                               const PinnedLaplacian& laplacian, const TuningSpec& spec) {
  detail::check_spec(spec);
  const double decay = spec.decay();
  const double gamma_bar = baseline_gamma_bound(laplacian);
  // lambda* is smallest where |1 - g lambda_min| = |1 - g lambda_max|.
  const double gamma_fast =
      std::min(2.0 / (laplacian.lambda_min() + laplacian.lambda_max()),
               gamma_bar * (1.0 - 1e-12));
  const double ts_min = settling_time_estimate(laplacian, gamma_fast, spec.dt, decay);
  const auto estimate = [&](double g) {
    return settling_time_estimate(laplacian, g, spec.dt, decay);
  };

  if (!std::isfinite(spec.target_ts) || spec.target_ts < ts_min) {
    std::ostringstream msg;
    msg << "target T_s = " << spec.target_ts << " s is unreachable; achievable interval is ["
        << ts_min << ", inf) s";
    throw TuningError(msg.str());
  }

  TuningResult result;
  result.gamma_curve.reserve(spec.gamma_samples);
  for (std::size_t i = 1; i <= spec.gamma_samples; ++i) {
    const double g = gamma_bar * static_cast<double>(i) /
                     static_cast<double>(spec.gamma_samples + 1);
    result.gamma_curve.push_back({g, estimate(g)});
  }

  // First sample on the decreasing branch that reaches the target.
  double lo = 0.0;
  double hi = gamma_fast;
  for (const auto& s : result.gamma_curve) {
    if (s.gamma >= gamma_fast) break;
    if (s.predicted_ts <= spec.target_ts) {
      hi = s.gamma;
      break;
    }
    lo = s.gamma;
  }
  // T_s is strictly decreasing on (lo, hi]; bisect to machine precision.
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (estimate(mid) > spec.target_ts) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double gamma = hi;

  result.controller = ControllerConfig::baseline(gamma, spec.dt);
  result.predicted_ts = estimate(gamma);
  result.sigma = baseline_stability(laplacian, gamma).spectral_radius;
  const auto probe = probe_step_response(laplacian, result.controller,
                                         spec.simulation_length(), spec.band);
  result.measured_ts = probe.settling_time;
  result.max_speed = probe.max_speed;
  result.feasible = !probe.diverged && result.sigma < 1.0 && probe.max_speed <= spec.v_max;
  result.transport_max_speed = detail::transport_speed(network, result.controller, spec);
  return result;
}

/// Minimum-spectral-radius (alpha, beta) meeting the settling window and the
/// speed ceiling `v_nodsr` (the tuned baseline's peak unit-step speed).
inline TuningResult tune_dsr(const StiffnessNetwork& network,
                             const PinnedLaplacian& laplacian, const TuningSpec& spec,
                             double v_nodsr) {
  detail::check_spec(spec);
  if (!(v_nodsr > 0.0)) throw std::invalid_argument("tune_dsr: v_nodsr must be > 0");

  const double duration = spec.simulation_length();
  const auto evaluate = [&](double alpha, double beta) {
    DsrSample s;
    s.alpha = alpha;
    s.beta = beta;
    s.stable = lemma1_stable(laplacian, alpha, beta, spec.dt);
    s.sigma = spectral_radius(laplacian, alpha, beta, spec.dt).spectral_radius;
    const auto probe = probe_step_response(
        laplacian, ControllerConfig::dsr(alpha, beta, spec.dt, 1), duration, spec.band);
    s.measured_ts = probe.settling_time;
    s.max_speed = probe.diverged ? std::numeric_limits<double>::infinity() : probe.max_speed;
    s.feasible = s.stable && s.sigma < 1.0 - kMarginalBand &&
                 std::abs(s.measured_ts - spec.target_ts) <= spec.ts_tolerance &&
                 s.max_speed <= v_nodsr;
    return s;
  };
  const auto beta_step = [&](double alpha) {
    return lemma1_beta_bound(laplacian, alpha, spec.dt) /
           static_cast<double>(spec.beta_points + 1);
  };

  const auto alpha_count = static_cast<std::size_t>(
      std::floor((spec.alpha_max - spec.alpha_min) / spec.alpha_step + 1e-9)) + 1;
  const std::size_t row = spec.beta_points;
  TuningResult result;
  result.dsr_grid.resize(alpha_count * row);

  const auto fill_rows = [&](std::size_t first, std::size_t stride) {
    for (std::size_t i = first; i < alpha_count; i += stride) {
      const double alpha = spec.alpha_min + static_cast<double>(i) * spec.alpha_step;
      const double db = beta_step(alpha);
      for (std::size_t j = 0; j < row; ++j) {
        result.dsr_grid[i * row + j] = evaluate(alpha, db * static_cast<double>(j + 1));
      }
    }
  };
  unsigned workers = spec.threads ? spec.threads : std::thread::hardware_concurrency();
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(alpha_count)));
  if (workers == 1) {
    fill_rows(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(fill_rows, w, workers);
  }

  // Reduction in grid order keeps the choice independent of thread count.
  std::optional<DsrSample> best;
  std::size_t stable = 0, in_band = 0, slow_enough = 0;
  double ts_lo = std::numeric_limits<double>::infinity(), ts_hi = 0.0;
  for (const auto& s : result.dsr_grid) {
    stable += s.stable;
    if (std::abs(s.measured_ts - spec.target_ts) <= spec.ts_tolerance) ++in_band;
    if (s.max_speed <= v_nodsr) ++slow_enough;
    if (std::isfinite(s.measured_ts)) {
      ts_lo = std::min(ts_lo, s.measured_ts);
      ts_hi = std::max(ts_hi, s.measured_ts);
    }
    if (s.feasible && (!best || detail::better(s, *best, spec.sigma_tie))) best = s;
  }
  if (!best) {
    std::ostringstream msg;
    msg << "no feasible (alpha, beta): " << result.dsr_grid.size() << " grid points, "
        << stable << " stable, " << in_band << " with T_s in " << spec.target_ts << " +- "
        << spec.ts_tolerance << " s, " << slow_enough << " with speed <= " << v_nodsr
        << " cm/s; measured T_s range [" << ts_lo << ", " << ts_hi << "] s";
    throw TuningError(msg.str());
  }

  // One bisection pass per axis around the best grid point.
  for (double da : {-0.5 * spec.alpha_step, 0.5 * spec.alpha_step}) {
    const double alpha = best->alpha + da;
    if (alpha <= 0.0 || best->beta >= lemma1_beta_bound(laplacian, alpha, spec.dt)) continue;
    const auto s = evaluate(alpha, best->beta);
    if (s.feasible && detail::better(s, *best, spec.sigma_tie)) best = s;
  }
  const double db = beta_step(best->alpha);
  const DsrSample anchor = *best;
  for (double delta : {-0.5 * db, 0.5 * db}) {
    const double beta = anchor.beta + delta;
    if (beta <= 0.0) continue;
    const auto s = evaluate(anchor.alpha, beta);
    if (s.feasible && detail::better(s, *best, spec.sigma_tie)) best = s;
  }

  result.controller = ControllerConfig::dsr(best->alpha, best->beta, spec.dt, 1);
  result.sigma = best->sigma;
  result.predicted_ts = dsr_settling_time_estimate(best->sigma, spec.dt, spec.decay());
  result.measured_ts = best->measured_ts;
  result.max_speed = best->max_speed;
  result.feasible = true;
  result.transport_max_speed = detail::transport_speed(network, result.controller, spec);
  return result;
}

}  // namespace cohesive
