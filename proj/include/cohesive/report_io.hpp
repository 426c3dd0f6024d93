#pragma once

// CSV tables and JSON reports.

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cohesive/controller.hpp"
#include "cohesive/dynamics.hpp"
#include "cohesive/metrics.hpp"
#include "cohesive/stability.hpp"
#include "cohesive/sweep.hpp"
#include "cohesive/tuning.hpp"

namespace cohesive {

/// Nine significant digits, printf %.9g.
inline std::string csv_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

/// Header t,y_1..y_n,f_1..f_n,yd,D,vmax_step; one row per sample.
inline void write_trace_csv(std::ostream& out, const SimulationTrace& trace) {
  const std::size_t n = trace.robots();
  out << "t";
  for (std::size_t k = 1; k <= n; ++k) out << ",y_" << k;
  for (std::size_t k = 1; k <= n; ++k) out << ",f_" << k;
  out << ",yd,D,vmax_step\n";
  const auto deformation = deformation_series(trace);
  const auto speed = speed_series(trace);
  for (std::size_t m = 0; m < trace.steps(); ++m) {
    const auto row = static_cast<Eigen::Index>(m);
    out << csv_number(trace.time[m]);
    for (Eigen::Index k = 0; k < trace.positions.cols(); ++k) {
      out << ',' << csv_number(trace.positions(row, k));
    }
    for (Eigen::Index k = 0; k < trace.forces.cols(); ++k) {
      out << ',' << csv_number(trace.forces(row, k));
    }
    out << ',' << csv_number(trace.reference[m]) << ',' << csv_number(deformation[m]) << ','
        << csv_number(speed[m]) << '\n';
  }
}

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "omega_c,D_bar_cm,v_max_cmps\n";
  for (const auto& r : rows) {
    out << csv_number(r.omega_c) << ',' << csv_number(r.max_deformation) << ','
        << csv_number(r.max_speed) << '\n';
  }
}

inline void write_gamma_curve_csv(std::ostream& out, const std::vector<GammaSample>& rows) {
  out << "gamma,Ts_estimate_s\n";
  for (const auto& r : rows) {
    out << csv_number(r.gamma) << ',' << csv_number(r.predicted_ts) << '\n';
  }
}

inline void write_dsr_grid_csv(std::ostream& out, const std::vector<DsrSample>& rows) {
  out << "alpha,beta,sigma,Ts_measured_s,vmax_cmps,stable,feasible\n";
  for (const auto& r : rows) {
    out << csv_number(r.alpha) << ',' << csv_number(r.beta) << ',' << csv_number(r.sigma)
        << ',' << csv_number(r.measured_ts) << ',' << csv_number(r.max_speed) << ','
        << (r.stable ? 1 : 0) << ',' << (r.feasible ? 1 : 0) << '\n';
  }
}

// JSON has no infinity; unbounded values become null.
inline nlohmann::json json_number(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

inline nlohmann::json to_json(const ControllerConfig& c) {
  nlohmann::json j{{"kind", to_string(c.kind)}, {"dt", c.dt}};
  if (c.is_dsr()) {
    j["alpha"] = c.alpha;
    j["beta"] = c.beta;
    j["delay_multiple"] = c.delay_multiple;
  } else {
    j["gamma"] = c.gamma;
  }
  return j;
}

inline nlohmann::json to_json(const RunSummary& s) {
  return {{"max_deformation_cm", s.max_deformation},
          {"max_force_N", s.max_force},
          {"max_speed_cmps", s.max_speed},
          {"settling_time_s", json_number(s.settling_time)}};
}

inline nlohmann::json to_json(const StabilityReport& r) {
  nlohmann::json modes = nlohmann::json::array();
  for (const auto& m : r.modes) {
    nlohmann::json roots = nlohmann::json::array();
    for (const auto& z : m.roots) {
      roots.push_back({{"re", z.real()}, {"im", z.imag()}, {"abs", std::abs(z)}});
    }
    modes.push_back({{"lambda", m.lambda}, {"roots", roots}, {"magnitude", m.magnitude()}});
  }
  return {{"controller", to_string(r.kind)},
          {"stable", r.stable},
          {"marginal", r.marginal},
          {"spectral_radius", r.spectral_radius},
          {"binding_mode", r.binding_mode},
          {"modes", modes}};
}

inline nlohmann::json to_json(const TuningResult& r) {
  nlohmann::json j{{"controller", to_json(r.controller)},
                   {"predicted_ts_s", json_number(r.predicted_ts)},
                   {"measured_ts_s", json_number(r.measured_ts)},
                   {"max_speed_cmps", json_number(r.max_speed)},
                   {"spectral_radius", r.sigma},
                   {"feasible", r.feasible}};
  if (r.transport_max_speed) j["transport_max_speed_cmps"] = *r.transport_max_speed;
  return j;
}

}  // namespace cohesive
