// Runs the built `sqz` binary and checks exit codes and outputs.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("sqz_cli_test_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  CliResult sqz(const std::string& args) const {
    const auto out = dir_ / "stdout.txt", err = dir_ / "stderr.txt";
    const std::string cmd = std::string("env -u SQZ_OUT_DIR ") + SQZ_CLI_PATH + " " + args + " >" +
                            out.string() + " 2>" + err.string();
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, SimulateText) {
  const auto r = sqz("simulate --gain 63 --loss 0.086");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("-10.4513"), std::string::npos) << r.out;
}

TEST_F(Cli, SimulateJson) {
  const auto r = sqz("simulate --gain 63 --eta 1 --format json");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j.at("v_minus").get<double>(), 0.004519753904426493, 1e-15);
}

TEST_F(Cli, SimulateUsageErrors) {
  EXPECT_EQ(sqz("simulate --gain 63").code, 1);
  EXPECT_EQ(sqz("simulate --gain 63 --eta 0.9 --loss 0.1").code, 1);
  EXPECT_EQ(sqz("simulate --gain 63 --eta 0.9 --bogus 1").code, 1);
  EXPECT_EQ(sqz("").code, 1);
}

TEST_F(Cli, DomainErrorExitsTwo) {
  EXPECT_EQ(sqz("simulate --gain 0.5 --eta 0.9").code, 2);
  EXPECT_EQ(sqz("fit loss-bounds --gain 63 --sq-db 1 --phi-max-deg 1.2").code, 2);
}

TEST_F(Cli, InfeasibleExitsThreeWithFloor) {
  const auto r = sqz("fit phase-jitter --sq-db -30 --anti-db 23.3");
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("-23.3000 dB"), std::string::npos) << r.err;
}

TEST_F(Cli, PhaseJitterFit) {
  const auto r = sqz("fit phase-jitter --sq-db -10 --anti-db 23.3");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j.at("phi_deg").get<double>(), 1.21, 0.02);
}

TEST_F(Cli, LossBoundsFit) {
  const auto r = sqz("fit loss-bounds --gain 63 --sq-db -10.12 --phi-max-deg 1.2");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j.at("min_loss").get<double>(), 0.0578, 0.0001);
  EXPECT_NEAR(j.at("max_loss").get<double>(), 0.0932, 0.0001);
}

TEST_F(Cli, SynthRequiresSeed) {
  EXPECT_EQ(sqz("synth trace --mean-db -10").code, 1);
  EXPECT_EQ(sqz("synth loss-sweep").code, 1);
}

TEST_F(Cli, SynthThenFit) {
  const auto sweep = dir_ / "sweep.csv";
  ASSERT_EQ(sqz("synth loss-sweep --seed 4 --noise-db 0 --eta0 0.91 --out " + sweep.string()).code, 0);
  const auto r = sqz("fit loss-sweep --gain 63 --input " + sweep.string());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(nlohmann::json::parse(r.out).at("eta0").get<double>(), 0.91, 1e-6);

  const auto sn = dir_ / "sn.csv";
  ASSERT_EQ(sqz("synth shotnoise --seed 4 --out " + sn.string()).code, 0);
  const auto f = sqz("fit shotnoise --input " + sn.string());
  ASSERT_EQ(f.code, 0) << f.err;
  EXPECT_GT(nlohmann::json::parse(f.out).at("r_squared").get<double>(), 0.999);
}

TEST_F(Cli, FitBadInputCitesRow) {
  const auto bad = dir_ / "bad.csv";
  std::ofstream(bad) << "added_loss,sq_db,anti_db,sq_err_db,anti_err_db,lo_power_mw,pump_mw\n"
                        "1.2,-3,5,0.1,0.1,,\n";
  const auto r = sqz("fit loss-sweep --gain 63 --input " + bad.string());
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("row 2"), std::string::npos) << r.err;
  EXPECT_EQ(sqz("fit shotnoise --input " + (dir_ / "missing.csv").string()).code, 1);
}

TEST_F(Cli, DegenerateFitExitsTwo) {
  const auto same = dir_ / "same.csv";
  std::ofstream(same) << "lo_power_mw,power_linear\n5,1\n5,1.1\n";
  EXPECT_EQ(sqz("fit shotnoise --input " + same.string()).code, 2);
}

TEST_F(Cli, SweepRowCount) {
  const auto r = sqz("sweep --gain 63 --loss-from 0 --loss-to 0.5 --loss-step 0.1");
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(r.out);
  std::string line;
  int n = 0;
  std::getline(lines, line);
  EXPECT_EQ(line, "loss,sq_db,anti_db");
  while (std::getline(lines, line)) ++n;
  EXPECT_EQ(n, 6);
  const auto odd = sqz("sweep --gain 63 --loss-from 0 --loss-to 0.25 --loss-step 0.1");
  EXPECT_EQ(std::count(odd.out.begin(), odd.out.end(), '\n'), 1 + 3);
}

TEST_F(Cli, ReproducePassAndFail) {
  const auto pass = sqz("reproduce bounds --out " + (dir_ / "b").string());
  EXPECT_EQ(pass.code, 0) << pass.out << pass.err;
  EXPECT_TRUE(fs::exists(dir_ / "b" / "report.json"));
  EXPECT_TRUE(fs::exists(dir_ / "b" / "report.txt"));

  const auto fail =
      sqz("reproduce fig4 --target loss_limited_loss_pct=8.6:0.1 --out " + (dir_ / "f").string());
  EXPECT_EQ(fail.code, 4);
  EXPECT_NE(fail.out.find("[FAIL] loss_limited_loss_pct"), std::string::npos);
  const auto report = nlohmann::json::parse(slurp(dir_ / "f" / "report.json"));
  EXPECT_FALSE(report.at("passed").get<bool>());
}

TEST_F(Cli, ReproduceOverridesAndErrors) {
  EXPECT_EQ(sqz("reproduce fig2").code, 1);  // no output directory
  EXPECT_EQ(sqz("reproduce fig9 --out " + dir_.string()).code, 1);
  EXPECT_EQ(sqz("reproduce fig2 --set nope=1 --out " + dir_.string()).code, 1);
  EXPECT_EQ(sqz("reproduce fig2 --target trace_dark_db=-26:0 --out " + dir_.string()).code, 1);
  const auto r = sqz("reproduce fig2 --set squeezed_db=0 --out " + (dir_ / "z").string());
  EXPECT_EQ(r.code, 4);  // targets still expect -10.12 dB
}

TEST_F(Cli, ReproduceFromEnvironment) {
  const auto out = dir_ / "env";
  const std::string cmd = "SQZ_OUT_DIR=" + out.string() + " " + SQZ_CLI_PATH +
                          " reproduce qe >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  EXPECT_EQ(WEXITSTATUS(status), 0);
  EXPECT_TRUE(fs::exists(out / "report.json"));
}

TEST_F(Cli, ScenarioConfigFile) {
  const auto cfg = dir_ / "cfg.json";
  std::ofstream(cfg) << R"({"scenario": "fig4", "targets": [{"name": "loss_limited_loss_pct", "value": 9.3, "tolerance": 0.1}]})";
  EXPECT_EQ(sqz("reproduce fig4 --scenario-config " + cfg.string() + " --out " + (dir_ / "c").string()).code, 0);
  std::ofstream(dir_ / "broken.json") << "{";
  EXPECT_EQ(sqz("reproduce fig4 --scenario-config " + (dir_ / "broken.json").string() + " --out " +
                (dir_ / "d").string())
                .code,
            1);
}

TEST_F(Cli, ReproduceIsDeterministic) {
  for (const std::string fig : {"fig2", "fig3", "fig4", "bounds", "qe"}) {
    const auto a = dir_ / (fig + "_a"), b = dir_ / (fig + "_b");
    ASSERT_EQ(sqz("reproduce " + fig + " --seed 7 --svg --out " + a.string()).code, 0) << fig;
    ASSERT_EQ(sqz("reproduce " + fig + " --seed 7 --svg --out " + b.string()).code, 0) << fig;
    for (const auto& entry : fs::directory_iterator(a)) {
      const auto other = b / entry.path().filename();
      ASSERT_TRUE(fs::exists(other)) << other;
      EXPECT_EQ(slurp(entry.path()), slurp(other)) << entry.path();
    }
  }
}

TEST_F(Cli, SynthIsDeterministic) {
  for (const std::string cmd : {"synth trace --mean-db -10.12 --seed 3",
                                "synth loss-sweep --seed 3", "synth shotnoise --seed 3"}) {
    const auto a = sqz(cmd), b = sqz(cmd);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out) << cmd;
    EXPECT_FALSE(a.out.empty());
  }
}
