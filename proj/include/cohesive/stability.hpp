#pragma once

// Stability of the baseline update Y+ = (I - gamma K) Y + ... and of the DSR
// update, decided per eigenmode of the pinned Laplacian.
//
// For DSR with a one-sample delay every mode lambda obeys
//   D(z) = z^2 - (1 - a b dt lambda + [1 - b lambda]) z + [1 - b lambda].
// With an N-sample delay the mode polynomial becomes
//   z^{N+1} - (1 - a b dt lambda + c/N) z^N + c/N,   c = 1 - b lambda.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cohesive/controller.hpp"
#include "cohesive/network_model.hpp"

namespace cohesive {

using Complex = std::complex<double>;

/// |sigma - 1| within this band is reported as marginal (and unstable).
inline constexpr double kMarginalBand = 1e-9;

struct ModeRoots {
  double lambda = 0.0;
  std::vector<Complex> roots;

  double magnitude() const {
    double m = 0.0;
    for (const auto& z : roots) m = std::max(m, std::abs(z));
    return m;
  }
};

struct StabilityReport {
  ControllerKind kind = ControllerKind::kBaseline;
  bool stable = false;
  bool marginal = false;
  double spectral_radius = 0.0;
  std::vector<ModeRoots> modes;  // one per eigenvalue, ascending lambda
  std::size_t binding_mode = 0;  // index into modes achieving the radius
};

namespace detail {

inline StabilityReport finish_report(ControllerKind kind, std::vector<ModeRoots> modes) {
  StabilityReport r;
  r.kind = kind;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const double m = modes[i].magnitude();
    if (i == 0 || m > r.spectral_radius) {
      r.spectral_radius = m;
      r.binding_mode = i;
    }
  }
  r.modes = std::move(modes);
  r.marginal = std::abs(r.spectral_radius - 1.0) <= kMarginalBand;
  r.stable = r.spectral_radius < 1.0 - kMarginalBand;
  return r;
}

// Coefficients of z^2 + b z + c for one DSR mode.
struct Quadratic {
  double b;
  double c;
};

inline Quadratic dsr_quadratic(double lambda, double alpha, double beta, double dt) {
  const double c = 1.0 - beta * lambda;
  const double b = -(1.0 - alpha * beta * dt * lambda + c);
  return {b, c};
}

}  // namespace detail

/// gamma_bar = 2 / lambda_max; the baseline is stable for 0 < gamma < gamma_bar.
inline double baseline_gamma_bound(const PinnedLaplacian& laplacian) {
  return 2.0 / laplacian.lambda_max();
}

/// Modes of I - gamma K are 1 - gamma lambda.
inline StabilityReport baseline_stability(const PinnedLaplacian& laplacian, double gamma) {
  std::vector<ModeRoots> modes;
  for (Eigen::Index j = 0; j < laplacian.eigenvalues().size(); ++j) {
    const double lambda = laplacian.eigenvalues()(j);
    modes.push_back({lambda, {Complex(1.0 - gamma * lambda, 0.0)}});
  }
  return detail::finish_report(ControllerKind::kBaseline, std::move(modes));
}

/// Both roots of one DSR mode quadratic. Real roots use
/// q = -(b + sign(b) sqrt(b^2 - 4c)) / 2, z1 = q, z2 = c / q.
inline std::pair<Complex, Complex> dsr_mode_roots(double lambda, double alpha,
                                                  double beta, double dt) {
  const auto [b, c] = detail::dsr_quadratic(lambda, alpha, beta, dt);
  const double disc = b * b - 4.0 * c;
  if (disc >= 0.0) {
    const double root = std::sqrt(disc);
    const double q = -0.5 * (b + (b >= 0.0 ? root : -root));
    if (q == 0.0) return {Complex(0.0, 0.0), Complex(0.0, 0.0)};
    return {Complex(q, 0.0), Complex(c / q, 0.0)};
  }
  const double re = -0.5 * b;
  const double im = 0.5 * std::sqrt(-disc);
  return {Complex(re, im), Complex(re, -im)};
}

/// Roots of the N-sample-delay mode polynomial (N + 1 of them), from the
/// eigenvalues of its companion matrix.
inline std::vector<Complex> delayed_mode_roots(double lambda, double alpha, double beta,
                                               double dt, std::size_t delay_multiple) {
  if (delay_multiple <= 1) {
    const auto [z1, z2] = dsr_mode_roots(lambda, alpha, beta, dt);
    return {z1, z2};
  }
  const double n = static_cast<double>(delay_multiple);
  const double c = (1.0 - beta * lambda) / n;
  const double p = -(1.0 - alpha * beta * dt * lambda + c);
  const auto order = static_cast<Eigen::Index>(delay_multiple + 1);
  // Monic z^{N+1} + p z^N + 0 ... + c.
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(order, order);
  for (Eigen::Index i = 1; i < order; ++i) companion(i, i - 1) = 1.0;
  companion(0, 0) = -p;
  companion(0, order - 1) = -c;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
  std::vector<Complex> roots;
  for (Eigen::Index i = 0; i < order; ++i) roots.push_back(solver.eigenvalues()(i));
  return roots;
}

/// Second-order Jury test on the mode quadratic: D(1) > 0, D(-1) > 0, |c| < 1.
inline bool jury_stable(double lambda, double alpha, double beta, double dt) {
  const auto [b, c] = detail::dsr_quadratic(lambda, alpha, beta, dt);
  return (1.0 + b + c > 0.0) && (1.0 - b + c > 0.0) && (std::abs(c) < 1.0);
}

/// 4 / (lambda_max (alpha dt + 2)).
inline double lemma1_beta_bound(const PinnedLaplacian& laplacian, double alpha, double dt) {
  return 4.0 / (laplacian.lambda_max() * (alpha * dt + 2.0));
}

/// Closed-form condition: alpha > 0 and 0 < beta < 4 / (lambda_max (alpha dt + 2)).
inline bool lemma1_stable(const PinnedLaplacian& laplacian, double alpha, double beta,
                          double dt) {
  return alpha > 0.0 && beta > 0.0 && beta < lemma1_beta_bound(laplacian, alpha, dt);
}

/// sigma = max over modes and roots of |z|, for a one-sample delay.
inline StabilityReport spectral_radius(const PinnedLaplacian& laplacian, double alpha,
                                       double beta, double dt) {
  std::vector<ModeRoots> modes;
  for (Eigen::Index j = 0; j < laplacian.eigenvalues().size(); ++j) {
    const double lambda = laplacian.eigenvalues()(j);
    const auto [z1, z2] = dsr_mode_roots(lambda, alpha, beta, dt);
    modes.push_back({lambda, {z1, z2}});
  }
  return detail::finish_report(ControllerKind::kDsr, std::move(modes));
}

/// Stability of whichever controller `config` describes.
inline StabilityReport analyze(const PinnedLaplacian& laplacian,
                               const ControllerConfig& config) {
  if (!config.is_dsr()) return baseline_stability(laplacian, config.gamma);
  if (config.delay_multiple <= 1) {
    return spectral_radius(laplacian, config.alpha, config.beta, config.dt);
  }
  std::vector<ModeRoots> modes;
  for (Eigen::Index j = 0; j < laplacian.eigenvalues().size(); ++j) {
    const double lambda = laplacian.eigenvalues()(j);
    modes.push_back({lambda, delayed_mode_roots(lambda, config.alpha, config.beta,
                                                config.dt, config.delay_multiple)});
  }
  return detail::finish_report(ControllerKind::kDsr, std::move(modes));
}

}  // namespace cohesive
