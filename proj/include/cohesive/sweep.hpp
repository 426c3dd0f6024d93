#pragma once

#include <algorithm>
#include <vector>

#include "cohesive/dynamics.hpp"
#include "cohesive/metrics.hpp"
#include "cohesive/scenario.hpp"

namespace cohesive {

struct SweepRow {
  double omega_c = 0.0;          // rad/s
  double max_deformation = 0.0;  // cm
  double max_speed = 0.0;        // cm/s
};

/// 0.02, 0.04, ..., 0.5 rad/s.
inline std::vector<double> default_cutoff_list() {
  std::vector<double> out;
  for (int i = 1; i <= 25; ++i) out.push_back(0.02 * i);
  return out;
}

/// One filtered-step transport per cutoff; everything else comes from the
/// template. Runs are lengthened to 1.5x the filter horizon when the
/// template is too short for a slow cutoff. Rows are sorted by omega_c.
inline std::vector<SweepRow> cutoff_sweep(const ScenarioConfig& base,
                                          std::vector<double> cutoffs) {
  std::sort(cutoffs.begin(), cutoffs.end());
  std::vector<SweepRow> rows;
  rows.reserve(cutoffs.size());
  for (double omega : cutoffs) {
    ScenarioConfig s = base;
    s.trajectory.kind = TrajectoryKind::kFilteredStep;
    s.trajectory.omega_c = omega;
    s.trajectory.validate(s.controller.dt);
    s.duration = std::max(base.duration, 1.5 * s.trajectory.horizon(s.controller.dt));
    const auto trace = simulate(s);
    rows.push_back({omega, max_deformation(trace), max_speed(trace)});
  }
  return rows;
}

}  // namespace cohesive
