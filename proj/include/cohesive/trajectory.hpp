#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace cohesive {

enum class TrajectoryKind { kStep, kFilteredStep };

/// Desired position of the virtual source, y_d[m].
///
/// The raw step is y_ds[m] = amplitude for m >= start_index, else 0. A
/// filtered step passes y_ds through a first-order low-pass filter with
/// cutoff omega_c, discretized with Tustin's rule.
struct TrajectorySpec {
  TrajectoryKind kind = TrajectoryKind::kFilteredStep;
  double amplitude = 0.0;   // cm
  double omega_c = 0.1;     // rad/s, filtered step only
  std::size_t start_index = 1;

  static TrajectorySpec step(double amplitude, std::size_t start_index = 1) {
    return {TrajectoryKind::kStep, amplitude, 0.0, start_index};
  }
  static TrajectorySpec filtered_step(double amplitude, double omega_c,
                                      std::size_t start_index = 1) {
    return {TrajectoryKind::kFilteredStep, amplitude, omega_c, start_index};
  }

  /// Empty when valid; otherwise one message per violated field.
  std::vector<std::string> violations(double dt) const {
    std::vector<std::string> out;
    if (!std::isfinite(amplitude)) out.push_back("amplitude: must be finite");
    if (kind == TrajectoryKind::kFilteredStep) {
      if (!(omega_c > 0.0) || !std::isfinite(omega_c)) {
        out.push_back("omega_c: must be > 0");
      } else if (dt > 0.0 && !(omega_c * dt < 2.0)) {
        out.push_back("omega_c: omega_c * dt must be < 2 for the Tustin filter");
      }
    }
    return out;
  }

  void validate(double dt) const {
    const auto v = violations(dt);
    if (!v.empty()) throw std::invalid_argument("trajectory " + v.front());
  }

  /// Time by which the reference has essentially reached its final value.
  /// For a filtered step this is start + 4/omega_c.
  double horizon(double dt) const {
    const double start = static_cast<double>(start_index) * dt;
    return kind == TrajectoryKind::kFilteredStep ? start + 4.0 / omega_c : start;
  }

  friend bool operator==(const TrajectorySpec&, const TrajectorySpec&) = default;
};

/// Streams y_d[0], y_d[1], ... for one spec.
class ReferenceGenerator {
 public:
  ReferenceGenerator(const TrajectorySpec& spec, double dt) : spec_(spec) {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
    spec.validate(dt);
    const double wdt = spec.omega_c * dt;
    pole_ = (2.0 - wdt) / (2.0 + wdt);
    gain_ = wdt / (2.0 + wdt);
  }

  double raw(std::size_t m) const {
    return m >= spec_.start_index ? spec_.amplitude : 0.0;
  }

  double next() {
    const std::size_t m = index_++;
    if (spec_.kind == TrajectoryKind::kStep) return raw(m);
    if (m == 0) {
      // Filter starts in steady state with its input.
      last_ = raw(0);
    } else {
      last_ = pole_ * last_ + gain_ * (raw(m) + raw(m - 1));
    }
    return last_;
  }

  std::size_t index() const { return index_; }

 private:
  TrajectorySpec spec_;
  double pole_ = 0.0;
  double gain_ = 0.0;
  double last_ = 0.0;
  std::size_t index_ = 0;
};

/// y_d[0 .. count-1].
inline std::vector<double> reference_series(const TrajectorySpec& spec, double dt,
                                            std::size_t count) {
  ReferenceGenerator gen(spec, dt);
  std::vector<double> out(count);
  for (auto& v : out) v = gen.next();
  return out;
}

/// y_d[m] for a single index.
inline double filtered_step(const TrajectorySpec& spec, double dt, std::size_t m) {
  ReferenceGenerator gen(spec, dt);
  double y = 0.0;
  for (std::size_t i = 0; i <= m; ++i) y = gen.next();
  return y;
}

}  // namespace cohesive
