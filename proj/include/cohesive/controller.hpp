#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace cohesive {

enum class ControllerKind { kBaseline, kDsr };

inline const char* to_string(ControllerKind kind) {
  return kind == ControllerKind::kBaseline ? "baseline" : "dsr";
}

/// Either the local-force update (gain gamma) or the delayed self
/// reinforcement update (alpha in 1/s, beta in cm/N, delay of N samples).
struct ControllerConfig {
  ControllerKind kind = ControllerKind::kBaseline;
  double gamma = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  std::size_t delay_multiple = 1;
  double dt = 0.03;  // s

  static ControllerConfig baseline(double gamma, double dt) {
    return {ControllerKind::kBaseline, gamma, 0.0, 0.0, 1, dt};
  }
  static ControllerConfig dsr(double alpha, double beta, double dt,
                              std::size_t delay_multiple = 1) {
    return {ControllerKind::kDsr, 0.0, alpha, beta, delay_multiple, dt};
  }

  bool is_dsr() const { return kind == ControllerKind::kDsr; }

  std::vector<std::string> violations() const {
    std::vector<std::string> out;
    if (!(dt > 0.0) || !std::isfinite(dt)) out.push_back("dt: must be > 0");
    if (kind == ControllerKind::kBaseline) {
      if (!(gamma > 0.0) || !std::isfinite(gamma)) out.push_back("gamma: must be > 0");
    } else {
      if (!(alpha > 0.0) || !std::isfinite(alpha)) out.push_back("alpha: must be > 0");
      if (!(beta > 0.0) || !std::isfinite(beta)) out.push_back("beta: must be > 0");
      if (delay_multiple < 1) out.push_back("delay_multiple: must be >= 1");
    }
    return out;
  }

  void validate() const {
    const auto v = violations();
    if (!v.empty()) throw std::invalid_argument("controller " + v.front());
  }

  friend bool operator==(const ControllerConfig&, const ControllerConfig&) = default;
};

}  // namespace cohesive
