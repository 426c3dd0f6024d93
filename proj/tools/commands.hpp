#pragma once

// Subcommand bodies for the cohesive CLI. Each returns a process exit code
// and writes human-readable output to `out`; files go under options.out_dir.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "cohesive/cohesive.hpp"
#include "cohesive/config_io.hpp"
#include "cohesive/report_io.hpp"

namespace cohesive::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitDiverged = 3;
inline constexpr int kExitAcceptance = 4;

inline constexpr double kMinImprovementPercent = 88.0;

struct Options {
  std::string config;
  std::string out_dir = ".";
  std::vector<double> omega_list;
  double target_ts = 10.0;
  double tolerance = 0.05;
  std::string config_dir;  // reproduce: directory with paper_baseline.ini / paper_dsr.ini
};

namespace detail {

inline std::filesystem::path output_path(const Options& o, const std::string& name) {
  std::filesystem::create_directories(o.out_dir);
  return std::filesystem::path(o.out_dir) / name;
}

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error(path.string() + ": cannot write");
  f << j.dump(2) << '\n';
}

inline std::string or_default(const std::string& value, const std::string& fallback) {
  return value.empty() ? fallback : value;
}

// Maps exceptions to exit codes.
template <typename Body>
int guarded(Body&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    spdlog::error("{}", e.what());
    return kExitConfig;
  } catch (const DivergenceError& e) {
    spdlog::error("{}", e.what());
    return kExitDiverged;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitFailure;
  }
}

struct Run {
  ScenarioConfig scenario;
  SimulationTrace trace;
  RunSummary summary;
};

inline Run run_and_save(const ScenarioConfig& scenario, const Options& o) {
  Run run{scenario, simulate(scenario), {}};
  for (const auto& w : run.trace.warnings) spdlog::warn("{}: {}", scenario.name, w);
  run.summary = summarize(run.trace);

  const auto csv = output_path(o, or_default(scenario.trace_csv, scenario.name + "_trace.csv"));
  std::ofstream f(csv);
  if (!f) throw std::runtime_error(csv.string() + ": cannot write");
  write_trace_csv(f, run.trace);

  const auto laplacian = build_pinned_laplacian(scenario.network);
  nlohmann::json report{{"scenario", scenario.name},
                        {"controller", to_json(scenario.controller)},
                        {"stability", to_json(analyze(laplacian, scenario.controller))},
                        {"summary", to_json(run.summary)},
                        {"steps", run.trace.steps()},
                        {"warnings", run.trace.warnings}};
  write_json(output_path(o, or_default(scenario.report, scenario.name + "_report.json")),
             report);
  spdlog::info("{}: wrote {}", scenario.name, csv.string());
  return run;
}

inline void print_summary(std::ostream& out, const std::string& name, const RunSummary& s) {
  out << name << ": D_bar = " << csv_number(s.max_deformation)
      << " cm, f_bar = " << csv_number(s.max_force)
      << " N, v_max = " << csv_number(s.max_speed) << " cm/s, T_s = "
      << (std::isfinite(s.settling_time) ? csv_number(s.settling_time) + " s" : "not settled")
      << '\n';
}

inline bool within(double value, double expected, double tolerance) {
  return std::abs(value - expected) <= tolerance * std::abs(expected);
}

}  // namespace detail

inline int cmd_simulate(const Options& o, std::ostream& out) {
  return detail::guarded([&] {
    const auto scenario = load_config(o.config);
    const auto run = detail::run_and_save(scenario, o);
    detail::print_summary(out, scenario.name, run.summary);
    return kExitOk;
  });
}

inline int cmd_stability(const Options& o, std::ostream& out) {
  return detail::guarded([&] {
    const auto scenario = load_config(o.config);
    const auto laplacian = build_pinned_laplacian(scenario.network);
    const auto report = analyze(laplacian, scenario.controller);
    nlohmann::json j = to_json(report);
    j["scenario"] = scenario.name;
    j["eigenvalues"] = std::vector<double>(laplacian.eigenvalues().data(),
                                           laplacian.eigenvalues().data() +
                                               laplacian.eigenvalues().size());
    if (scenario.controller.is_dsr()) {
      const auto& c = scenario.controller;
      j["lemma1_beta_bound"] = lemma1_beta_bound(laplacian, c.alpha, c.dt);
      j["lemma1_stable"] = lemma1_stable(laplacian, c.alpha, c.beta, c.dt);
    } else {
      j["gamma_bound"] = baseline_gamma_bound(laplacian);
    }
    detail::write_json(detail::output_path(o, scenario.name + "_stability.json"), j);

    out << scenario.name << ": " << to_string(report.kind) << " controller "
        << (report.stable ? "stable" : report.marginal ? "marginal (unstable)" : "unstable")
        << ", spectral radius " << csv_number(report.spectral_radius) << '\n';
    for (std::size_t i = 0; i < report.modes.size(); ++i) {
      const auto& m = report.modes[i];
      out << "  lambda = " << csv_number(m.lambda) << "  roots:";
      for (const auto& z : m.roots) {
        out << ' ' << csv_number(z.real()) << (z.imag() < 0 ? "-" : "+")
            << csv_number(std::abs(z.imag())) << 'i';
      }
      out << "  |z|max = " << csv_number(m.magnitude())
          << (i == report.binding_mode ? "  <- binding" : "") << '\n';
    }
    return kExitOk;
  });
}

inline int cmd_sweep(const Options& o, std::ostream& out) {
  return detail::guarded([&] {
    const auto scenario = load_config(o.config);
    const auto omegas = o.omega_list.empty() ? default_cutoff_list() : o.omega_list;
    const auto rows = cutoff_sweep(scenario, omegas);
    const auto path = detail::output_path(o, scenario.name + "_cutoff_sweep.csv");
    std::ofstream f(path);
    write_sweep_csv(f, rows);
    write_sweep_csv(out, rows);
    spdlog::info("wrote {}", path.string());
    return kExitOk;
  });
}

inline int cmd_tune(const Options& o, std::ostream& out) {
  return detail::guarded([&] {
    const auto scenario = load_config(o.config);
    const auto laplacian = build_pinned_laplacian(scenario.network);
    TuningSpec spec;
    spec.target_ts = o.target_ts;
    spec.dt = scenario.controller.dt;
    if (scenario.trajectory.kind == TrajectoryKind::kFilteredStep &&
        scenario.trajectory.amplitude != 0.0) {
      spec.transport = scenario.trajectory;
      spec.transport_duration = scenario.duration;
    }

    const auto baseline = tune_gamma(scenario.network, laplacian, spec);
    out << "baseline: gamma = " << csv_number(baseline.controller.gamma)
        << ", predicted T_s = " << csv_number(baseline.predicted_ts)
        << " s, measured T_s = " << csv_number(baseline.measured_ts)
        << " s, unit-step v_max = " << csv_number(baseline.max_speed) << " cm/s"
        << (baseline.feasible ? "" : " (exceeds speed limit)") << '\n';
    {
      std::ofstream f(detail::output_path(o, "ts_vs_gamma.csv"));
      write_gamma_curve_csv(f, baseline.gamma_curve);
    }
    nlohmann::json report{{"target_ts_s", spec.target_ts},
                          {"settling_decay", spec.decay()},
                          {"baseline", to_json(baseline)}};

    int code = kExitOk;
    try {
      const auto dsr = tune_dsr(scenario.network, laplacian, spec, baseline.max_speed);
      out << "dsr: alpha = " << csv_number(dsr.controller.alpha)
          << ", beta = " << csv_number(dsr.controller.beta)
          << ", sigma = " << csv_number(dsr.sigma)
          << ", measured T_s = " << csv_number(dsr.measured_ts)
          << " s, unit-step v_max = " << csv_number(dsr.max_speed) << " cm/s\n";
      std::ofstream f(detail::output_path(o, "ts_vs_alpha_beta.csv"));
      write_dsr_grid_csv(f, dsr.dsr_grid);
      report["dsr"] = to_json(dsr);
      if (dsr.transport_max_speed && baseline.transport_max_speed) {
        const bool ok = *dsr.transport_max_speed <= *baseline.transport_max_speed;
        report["transport_speed_ok"] = ok;
        out << "transport v_max: baseline " << csv_number(*baseline.transport_max_speed)
            << " cm/s, dsr " << csv_number(*dsr.transport_max_speed) << " cm/s"
            << (ok ? "" : " (dsr exceeds baseline)") << '\n';
      }
    } catch (const TuningError& e) {
      spdlog::error("dsr tuning: {}", e.what());
      report["dsr_error"] = e.what();
      code = kExitFailure;
    }
    detail::write_json(detail::output_path(o, "tune_report.json"), report);
    return code;
  });
}

inline int cmd_reproduce(const Options& o, std::ostream& out) {
  return detail::guarded([&] {
    const auto start = std::chrono::steady_clock::now();
    ScenarioConfig base_cfg = baseline_transport_scenario();
    ScenarioConfig dsr_cfg = dsr_transport_scenario();
    if (!o.config_dir.empty()) {
      base_cfg = load_config((std::filesystem::path(o.config_dir) / "paper_baseline.ini").string());
      dsr_cfg = load_config((std::filesystem::path(o.config_dir) / "paper_dsr.ini").string());
    }
    const auto base = detail::run_and_save(base_cfg, o);
    const auto dsr = detail::run_and_save(dsr_cfg, o);
    const auto gain = improvement(base.summary, dsr.summary);
    const ReportedTransportResults reported;
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    struct Check {
      std::string label;
      bool pass;
    };
    const double tol = o.tolerance;
    const std::vector<Check> checks = {
        {"f_bar without DSR", detail::within(base.summary.max_force, reported.baseline_force, tol)},
        {"D_bar without DSR",
         detail::within(base.summary.max_deformation, reported.baseline_deformation, tol)},
        {"f_bar with DSR", detail::within(dsr.summary.max_force, reported.dsr_force, tol)},
        {"D_bar with DSR", detail::within(dsr.summary.max_deformation, reported.dsr_deformation, tol)},
        {"improvement D_bar", gain.deformation_percent >= kMinImprovementPercent},
        {"improvement f_bar", gain.force_percent >= kMinImprovementPercent},
        {"speed DSR <= baseline <= limit",
         dsr.summary.max_speed <= base.summary.max_speed &&
             base.summary.max_speed <= reported.speed_limit},
    };

    const auto pct = [](double v) {
      char buf[16];
      std::snprintf(buf, sizeof(buf), "%.1f%%", v);
      return std::string(buf);
    };
    const auto fixed = [](double v) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.3f", v);
      return std::string(buf);
    };
    out << "Simulation        Without DSR   Cohesive DSR   Improvement   (reported)\n";
    out << "f_bar (N)         " << std::left << std::setw(14) << fixed(base.summary.max_force)
        << std::setw(15) << fixed(dsr.summary.max_force) << std::setw(14)
        << pct(gain.force_percent) << "(0.146, 0.014, 90%)\n";
    out << "D_bar (cm)        " << std::setw(14) << fixed(base.summary.max_deformation)
        << std::setw(15) << fixed(dsr.summary.max_deformation) << std::setw(14)
        << pct(gain.deformation_percent) << "(5.824, 0.563, 90%)\n";
    out << "v_max (cm/s)      " << std::setw(14) << fixed(base.summary.max_speed)
        << std::setw(15) << fixed(dsr.summary.max_speed) << std::right << '\n';

    bool all = true;
    nlohmann::json checks_json = nlohmann::json::array();
    for (const auto& c : checks) {
      out << (c.pass ? "  PASS  " : "  FAIL  ") << c.label << '\n';
      checks_json.push_back({{"check", c.label}, {"pass", c.pass}});
      all = all && c.pass;
    }
    out << "elapsed " << fixed(elapsed) << " s\n";
    detail::write_json(detail::output_path(o, "reproduce_report.json"),
                       {{"baseline", to_json(base.summary)},
                        {"dsr", to_json(dsr.summary)},
                        {"improvement_deformation_percent", gain.deformation_percent},
                        {"improvement_force_percent", gain.force_percent},
                        {"tolerance", tol},
                        {"checks", checks_json},
                        {"elapsed_s", elapsed}});
    return all ? kExitOk : kExitAcceptance;
  });
}

}  // namespace cohesive::cli
