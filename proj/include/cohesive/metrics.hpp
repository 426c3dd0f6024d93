#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "cohesive/dynamics.hpp"

namespace cohesive {

inline constexpr double kNeverSettled = std::numeric_limits<double>::infinity();

/// D[m] = max_k y_k[m] - min_k y_k[m], the largest pairwise spread.
inline std::vector<double> deformation_series(const SimulationTrace& trace) {
  if (trace.steps() == 0) throw std::invalid_argument("deformation_series: empty trace");
  std::vector<double> out(trace.steps());
  for (Eigen::Index m = 0; m < trace.positions.rows(); ++m) {
    const auto row = trace.positions.row(m);
    out[static_cast<std::size_t>(m)] = row.maxCoeff() - row.minCoeff();
  }
  return out;
}

inline double max_deformation(const SimulationTrace& trace) {
  const auto d = deformation_series(trace);
  return *std::max_element(d.begin(), d.end());
}

/// max over robots and samples of |f_k[m]| (object forces only).
inline double max_force(const SimulationTrace& trace) {
  return trace.steps() == 0 ? 0.0 : trace.forces.cwiseAbs().maxCoeff();
}

/// max over robots and samples of the commanded speed |v_{d,k}[m]|.
inline double max_speed(const SimulationTrace& trace) {
  return trace.steps() == 0 ? 0.0 : trace.speeds.cwiseAbs().maxCoeff();
}

/// Per-sample max_k |v_{d,k}[m]|.
inline std::vector<double> speed_series(const SimulationTrace& trace) {
  std::vector<double> out(trace.steps());
  for (Eigen::Index m = 0; m < trace.speeds.rows(); ++m) {
    out[static_cast<std::size_t>(m)] = trace.speeds.row(m).cwiseAbs().maxCoeff();
  }
  return out;
}

/// Incremental settling detector: feed one sample at a time.
class SettlingDetector {
 public:
  SettlingDetector(double final_value, double band)
      : center_(final_value), half_width_(band * std::abs(final_value)) {
    if (final_value == 0.0) {
      throw std::invalid_argument("settling time needs a non-zero final value");
    }
  }

  void observe(double time, const Eigen::VectorXd& positions) {
    if ((positions.array() - center_).abs().maxCoeff() > half_width_) {
      outside_ = time;
      ever_outside_ = true;
      last_was_outside_ = true;
    } else {
      last_was_outside_ = false;
    }
  }

  /// Time stamp of the last sample with any robot outside the band; 0 if none;
  /// +inf if the final sample is still outside.
  double settling_time() const {
    if (!ever_outside_) return 0.0;
    if (last_was_outside_) return kNeverSettled;
    return outside_;
  }

 private:
  double center_;
  double half_width_;
  double outside_ = 0.0;
  bool ever_outside_ = false;
  bool last_was_outside_ = false;
};

/// Last time any robot is outside final_value * (1 +- band).
inline double measured_settling_time(const SimulationTrace& trace, double final_value,
                                     double band = 0.02) {
  SettlingDetector detector(final_value, band);
  for (std::size_t m = 0; m < trace.steps(); ++m) {
    detector.observe(trace.time[m],
                     trace.positions.row(static_cast<Eigen::Index>(m)).transpose());
  }
  return detector.settling_time();
}

struct RunSummary {
  double max_deformation = 0.0;  // cm
  double max_force = 0.0;        // N
  double max_speed = 0.0;        // cm/s
  double settling_time = 0.0;    // s, +inf if never settled
  std::vector<double> deformation;
};

/// Settling is measured against the last reference sample, or skipped
/// (reported as 0) when that value is zero.
inline RunSummary summarize(const SimulationTrace& trace, double band = 0.02) {
  RunSummary s;
  s.deformation = deformation_series(trace);
  s.max_deformation = *std::max_element(s.deformation.begin(), s.deformation.end());
  s.max_force = max_force(trace);
  s.max_speed = max_speed(trace);
  const double final_value = trace.reference.back();
  s.settling_time =
      final_value == 0.0 ? 0.0 : measured_settling_time(trace, final_value, band);
  return s;
}

struct Improvement {
  double deformation_percent = 0.0;
  double force_percent = 0.0;
};

/// 100 (1 - dsr / baseline) for maximum deformation and maximum force.
inline Improvement improvement(const RunSummary& baseline, const RunSummary& dsr) {
  if (!(baseline.max_deformation > 0.0) || !(baseline.max_force > 0.0)) {
    throw std::invalid_argument("improvement: baseline metrics must be positive");
  }
  return {100.0 * (1.0 - dsr.max_deformation / baseline.max_deformation),
          100.0 * (1.0 - dsr.max_force / baseline.max_force)};
}

}  // namespace cohesive
