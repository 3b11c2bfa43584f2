#include <gtest/gtest.h>
#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "gsee/io.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kCli = GSEE_CLI_PATH;
const fs::path kConfigs = GSEE_CONFIG_DIR;

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "gsee_test_cli" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run(const std::string& args) {
  const std::string cmd = kCli.string() + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t count_lines(const std::string& text) { return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')); }

std::string config_arg(const std::string& name) { return "--config " + (kConfigs / name).string(); }

}  // namespace

TEST(Cli, PlanWritesPlanFields) {
  const auto out = scratch("plan");
  ASSERT_EQ(run(config_arg("plan.json") + " --out " + out.string() + " --alpha-list 0"), 0);
  const std::string text = slurp(out / "plan.txt");
  for (const char* key : {"M0=", "q=", "sigma_tilde=", "K=", "M="}) EXPECT_NE(text.find(key), std::string::npos) << key;
  const auto j = gsee::json::parse(slurp(out / "plan.json"));
  ASSERT_EQ(j["plans"].size(), 1u);
  EXPECT_EQ(j["plans"][0]["q"], 12);
  EXPECT_EQ(j["plans"][0]["M"], 830);
  EXPECT_EQ(j["plans"][0]["M0"], 7238);
  EXPECT_EQ(j["plans"][0]["K"], 204);
  EXPECT_TRUE(fs::exists(out / "config-echo.json"));
}

TEST(Cli, AlphaListGivesOneRowPerAlpha) {
  const auto out = scratch("alpha");
  ASSERT_EQ(run(config_arg("plan.json") + " --out " + out.string() + " --alpha-list 0,0.25,0.5,1"), 0);
  EXPECT_EQ(count_lines(slurp(out / "plans.csv")), 5u);
  EXPECT_EQ(gsee::json::parse(slurp(out / "plan.json"))["plans"].size(), 4u);
}

TEST(Cli, ErrorLargerThanGapIsInfeasible) {
  const auto out = scratch("infeasible");
  const auto cfg = out / "cfg.json";
  gsee::write_text_file(cfg, R"({"mode": "plan",
    "inputs": {"delta": 0.1, "eta": 0.5, "Delta_true": 0.01, "epsilon": 0.05}})");
  EXPECT_EQ(run("--config " + cfg.string() + " --out " + out.string()), 2);
}

TEST(Cli, SchemaAndIoErrorsExitOne) {
  const auto out = scratch("bad");
  const auto cfg = out / "cfg.json";
  gsee::write_text_file(cfg, R"({"mode": "plan", "inputs": {"delta": 0.1}})");
  EXPECT_EQ(run("--config " + cfg.string() + " --out " + out.string()), 1);
  gsee::write_text_file(cfg, "not json");
  EXPECT_EQ(run("--config " + cfg.string() + " --out " + out.string()), 1);
  EXPECT_EQ(run("--config " + (out / "missing.json").string()), 1);
  EXPECT_EQ(run("--mode plan"), 1);
  EXPECT_EQ(run(config_arg("plan.json") + " --out " + out.string() + " --alpha-list 0,x"), 1);
}

TEST(Cli, ProbeGridReportsViolations) {
  const auto out = scratch("probe");
  EXPECT_EQ(run(config_arg("bounds_probe.json") + " --out " + out.string()), 3);
  const auto summary = gsee::json::parse(slurp(out / "summary.json"));
  EXPECT_GT(summary["failures"].get<int>(), 0);
  EXPECT_NE(slurp(out / "bounds.csv").find(",fail,"), std::string::npos);
}

TEST(Cli, SpectrumModeOutputs) {
  const auto out = scratch("spectrum");
  ASSERT_EQ(run(config_arg("spectrum.json") + " --out " + out.string()), 0);
  const auto summary = gsee::json::parse(slurp(out / "summary.json"));
  EXPECT_EQ(summary["N"], 4096);
  EXPECT_GE(summary["ground_window_mass"].get<double>(), summary["three_eighths_eta"].get<double>());
  EXPECT_EQ(count_lines(slurp(out / "distribution.csv")), 4097u);
}

TEST(Cli, RerunsAreByteIdentical) {
  const auto a = scratch("rerun_a");
  const auto b = scratch("rerun_b");
  const std::string common = config_arg("gsee.json") + " --runs 3 --seed 99 --threads 2 --out ";
  ASSERT_EQ(run(common + a.string()), 0);
  ASSERT_EQ(run(common + b.string()), 0);
  for (const char* f : {"estimates.csv", "plans.csv", "summary.json"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
    EXPECT_FALSE(slurp(a / f).empty()) << f;
  }
  EXPECT_EQ(count_lines(slurp(a / "estimates.csv")), 4u);
  // Thread count does not enter the results.
  const auto c = scratch("rerun_c");
  ASSERT_EQ(run(config_arg("gsee.json") + " --runs 3 --seed 99 --threads 1 --out " + c.string()), 0);
  EXPECT_EQ(slurp(a / "estimates.csv"), slurp(c / "estimates.csv"));
}
