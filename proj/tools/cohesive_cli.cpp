#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "commands.hpp"

namespace {

// COHESIVE_LOG_LEVEL: trace, debug, info, warn, error, critical, off.
void configure_logging() {
  auto logger = spdlog::stderr_color_mt("cohesive");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::warn);
  if (const char* level = std::getenv("COHESIVE_LOG_LEVEL")) {
    spdlog::set_level(spdlog::level::from_str(level));
  }
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();
  namespace cli = cohesive::cli;
  cli::Options opts;

  CLI::App app{"Cohesive transport of flexible objects by robot networks"};
  app.require_subcommand(1);

  auto* simulate = app.add_subcommand("simulate", "Run one scenario and write its trace CSV");
  simulate->add_option("--config", opts.config, "Scenario file")->required()->check(CLI::ExistingFile);
  simulate->add_option("--out", opts.out_dir, "Output directory");

  auto* stability = app.add_subcommand("stability", "Per-mode roots and spectral radius");
  stability->add_option("--config", opts.config, "Scenario file")->required()->check(CLI::ExistingFile);
  stability->add_option("--out", opts.out_dir, "Output directory");

  auto* sweep = app.add_subcommand("sweep", "Maximum deformation versus reference cutoff");
  sweep->add_option("--config", opts.config, "Template scenario")->required()->check(CLI::ExistingFile);
  sweep->add_option("--out", opts.out_dir, "Output directory");
  sweep->add_option("--omega-c-list", opts.omega_list, "Cutoffs in rad/s, comma separated")
      ->delimiter(',');

  auto* tune = app.add_subcommand("tune", "Select gamma and (alpha, beta) for a settling time");
  tune->add_option("--config", opts.config, "Scenario file (network and dt)")
      ->required()
      ->check(CLI::ExistingFile);
  tune->add_option("--out", opts.out_dir, "Output directory");
  tune->add_option("--target-ts", opts.target_ts, "Target settling time in s")
      ->check(CLI::PositiveNumber);

  auto* reproduce = app.add_subcommand("reproduce", "Run both transport scenarios and compare");
  reproduce->add_option("--out", opts.out_dir, "Output directory");
  reproduce->add_option("--tolerance", opts.tolerance, "Relative tolerance on reported maxima")
      ->check(CLI::PositiveNumber);
  reproduce->add_option("--config-dir", opts.config_dir,
                        "Directory holding paper_baseline.ini and paper_dsr.ini")
      ->check(CLI::ExistingDirectory);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kExitConfig;
  }

  if (*simulate) return cli::cmd_simulate(opts, std::cout);
  if (*stability) return cli::cmd_stability(opts, std::cout);
  if (*sweep) return cli::cmd_sweep(opts, std::cout);
  if (*tune) return cli::cmd_tune(opts, std::cout);
  if (*reproduce) return cli::cmd_reproduce(opts, std::cout);
  return cli::kExitFailure;
}
