#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <spdlog/spdlog.h>

#include "commands.hpp"

using namespace cohesive;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("cohesive_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string config(const std::string& name) {
  return std::string(COHESIVE_CONFIG_DIR) + "/" + name;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override { spdlog::set_level(spdlog::level::off); }
};

}  // namespace

TEST_F(Cli, ReproducePassesAndWritesArtifacts) {
  cli::Options o;
  o.out_dir = fresh_dir("reproduce").string();
  o.config_dir = COHESIVE_CONFIG_DIR;
  std::ostringstream out;
  EXPECT_EQ(cli::cmd_reproduce(o, out), cli::kExitOk) << out.str();
  EXPECT_EQ(out.str().find("FAIL"), std::string::npos);
  for (const char* f : {"paper_baseline_trace.csv", "paper_dsr_trace.csv",
                        "paper_baseline_report.json", "reproduce_report.json"}) {
    EXPECT_TRUE(fs::exists(fs::path(o.out_dir) / f)) << f;
  }
  const auto report = nlohmann::json::parse(slurp(fs::path(o.out_dir) / "reproduce_report.json"));
  EXPECT_GE(report["improvement_deformation_percent"].get<double>(), 88.0);
}

TEST_F(Cli, ReproduceFailsUnderImpossibleTolerance) {
  cli::Options o;
  o.out_dir = fresh_dir("reproduce_tight").string();
  o.tolerance = 1e-9;
  std::ostringstream out;
  EXPECT_EQ(cli::cmd_reproduce(o, out), cli::kExitAcceptance);
}

TEST_F(Cli, SimulateTraceIsByteIdenticalAcrossRuns) {
  cli::Options o;
  o.config = config("paper_dsr.ini");
  std::ostringstream out;
  o.out_dir = fresh_dir("sim_a").string();
  ASSERT_EQ(cli::cmd_simulate(o, out), cli::kExitOk);
  const auto a = slurp(fs::path(o.out_dir) / "paper_dsr_trace.csv");
  o.out_dir = fresh_dir("sim_b").string();
  ASSERT_EQ(cli::cmd_simulate(o, out), cli::kExitOk);
  const auto b = slurp(fs::path(o.out_dir) / "paper_dsr_trace.csv");
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.substr(0, a.find('\n')), "t,y_1,y_2,y_3,y_4,f_1,f_2,f_3,f_4,yd,D,vmax_step");
  EXPECT_EQ(std::count(a.begin(), a.end(), '\n'), 2002);
}

TEST_F(Cli, SimulateZeroAmplitudeGivesZeroTrace) {
  const auto dir = fresh_dir("zero");
  auto s = baseline_transport_scenario();
  s.trajectory.amplitude = 0.0;
  s.trace_csv = "zero.csv";
  s.report = "zero.json";
  save_config(s, (dir / "zero.ini").string());
  cli::Options o;
  o.config = (dir / "zero.ini").string();
  o.out_dir = dir.string();
  std::ostringstream out;
  ASSERT_EQ(cli::cmd_simulate(o, out), cli::kExitOk);
  const auto report = nlohmann::json::parse(slurp(dir / "zero.json"));
  EXPECT_EQ(report["summary"]["max_deformation_cm"].get<double>(), 0.0);
  std::istringstream csv(slurp(dir / "zero.csv"));
  std::string line;
  std::getline(csv, line);
  while (std::getline(csv, line)) {
    std::istringstream cells(line);
    std::string cell;
    std::getline(cells, cell, ',');  // time
    while (std::getline(cells, cell, ',')) EXPECT_EQ(std::stod(cell), 0.0) << line;
  }
}

TEST_F(Cli, ConfigErrorsMapToExitTwo) {
  const auto dir = fresh_dir("bad");
  std::ofstream(dir / "bad.ini") << "[controller]\nkind = dsr\nbeta = 0\n";
  cli::Options o;
  o.config = (dir / "bad.ini").string();
  o.out_dir = dir.string();
  std::ostringstream out;
  EXPECT_EQ(cli::cmd_simulate(o, out), cli::kExitConfig);
  EXPECT_EQ(cli::cmd_stability(o, out), cli::kExitConfig);
}

TEST_F(Cli, DivergenceMapsToExitThree) {
  const auto dir = fresh_dir("diverge");
  auto s = baseline_transport_scenario();
  s.controller.gamma = 30.0;
  s.duration = 600.0;
  save_config(s, (dir / "d.ini").string());
  cli::Options o;
  o.config = (dir / "d.ini").string();
  o.out_dir = dir.string();
  std::ostringstream out;
  EXPECT_EQ(cli::cmd_simulate(o, out), cli::kExitDiverged);
}

TEST_F(Cli, StabilityReport) {
  cli::Options o;
  o.config = config("paper_dsr.ini");
  o.out_dir = fresh_dir("stability").string();
  std::ostringstream out;
  ASSERT_EQ(cli::cmd_stability(o, out), cli::kExitOk);
  const auto j = nlohmann::json::parse(slurp(fs::path(o.out_dir) / "paper_dsr_stability.json"));
  EXPECT_TRUE(j["stable"].get<bool>());
  EXPECT_TRUE(j["lemma1_stable"].get<bool>());
  EXPECT_EQ(j["modes"].size(), 4u);
  EXPECT_NE(out.str().find("binding"), std::string::npos);
}

TEST_F(Cli, SweepWritesTable) {
  cli::Options o;
  o.config = config("paper_baseline.ini");
  o.out_dir = fresh_dir("sweep").string();
  o.omega_list = {0.2, 0.1};
  std::ostringstream out;
  ASSERT_EQ(cli::cmd_sweep(o, out), cli::kExitOk);
  const auto csv = slurp(fs::path(o.out_dir) / "paper_baseline_cutoff_sweep.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "omega_c,D_bar_cm,v_max_cmps");
  EXPECT_EQ(csv.find("0.1,"), csv.find('\n') + 1);
}

TEST_F(Cli, TuneWritesTables) {
  cli::Options o;
  o.config = config("paper_baseline.ini");
  o.out_dir = fresh_dir("tune").string();
  std::ostringstream out;
  ASSERT_EQ(cli::cmd_tune(o, out), cli::kExitOk) << out.str();
  const fs::path dir(o.out_dir);
  const auto report = nlohmann::json::parse(slurp(dir / "tune_report.json"));
  EXPECT_NEAR(report["baseline"]["controller"]["gamma"].get<double>(), 1.93, 0.02 * 1.93);
  EXPECT_TRUE(report.contains("dsr"));
  EXPECT_TRUE(fs::exists(dir / "ts_vs_gamma.csv"));
  EXPECT_TRUE(fs::exists(dir / "ts_vs_alpha_beta.csv"));
}
