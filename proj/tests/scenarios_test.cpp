#include "sqz/scenarios.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace sqz;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("sqz_scenarios_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

const ScenarioId kAll[] = {ScenarioId::fig2_traces, ScenarioId::fig3_linearity,
                           ScenarioId::fig4_loss_sweep, ScenarioId::bounds_analysis,
                           ScenarioId::qe_budget};

}  // namespace

TEST(ScenarioIds, NamesAndAliases) {
  for (auto id : kAll) EXPECT_EQ(parse_scenario_id(scenario_name(id)), id);
  EXPECT_EQ(parse_scenario_id("fig4"), ScenarioId::fig4_loss_sweep);
  EXPECT_EQ(parse_scenario_id("qe"), ScenarioId::qe_budget);
  EXPECT_THROW(parse_scenario_id("fig9"), ConfigError);
}

TEST(Defaults, AllScenariosPass) {
  for (auto id : kAll) {
    const auto r = run_scenario(default_config(id));
    EXPECT_TRUE(r.all_passed()) << scenario_name(id) << "\n" << to_text(r);
    EXPECT_FALSE(r.target_checks.empty());
  }
}

TEST(Fig2, DefaultCorrection) {
  const auto r = run_fig2(default_config(ScenarioId::fig2_traces));
  EXPECT_NEAR(r.value("corrected_squeezing_db"), -10.22, 0.03);
  EXPECT_NEAR(r.value("corrected_squeezing_db"), -10.222696798994718, 1e-12);
  EXPECT_NE(r.file("trace_b_squeezed.csv"), nullptr);
}

TEST(Fig2, VacuumLevelSqueezing) {
  auto c = default_config(ScenarioId::fig2_traces);
  c.set("squeezed_db", 0.0);
  EXPECT_NEAR(run_fig2(c).value("corrected_squeezing_db"), 0.0, 1e-12);
}

TEST(Fig2, NegligibleDark) {
  auto c = default_config(ScenarioId::fig2_traces);
  c.set("dark_db", -60.0);
  const auto r = run_fig2(c);
  EXPECT_LT(std::abs(r.value("correction_shift_db")), 0.005);
}

TEST(Fig2, InvalidSettings) {
  auto c = default_config(ScenarioId::fig2_traces);
  c.set("vbw_hz", -1.0);
  EXPECT_THROW(run_fig2(c), ConfigError);
  c = default_config(ScenarioId::fig2_traces);
  c.set("dark_db", -5.0);
  EXPECT_THROW(run_fig2(c), ConfigError);
}

TEST(Fig3, Defaults) {
  const auto r = run_fig3(default_config(ScenarioId::fig3_linearity));
  EXPECT_GT(r.value("r_squared"), 0.999);
  EXPECT_NEAR(r.value("shot_noise_ratio_db"), 10.0, 0.05);
}

TEST(Fig3, Noiseless) {
  auto c = default_config(ScenarioId::fig3_linearity);
  c.set("rel_noise", 0.0);
  const auto r = run_fig3(c);
  EXPECT_EQ(r.value("r_squared"), 1.0);
  EXPECT_NEAR(r.value("shot_noise_ratio_db"), 10.0, 1e-12);
}

TEST(Fig3, DegenerateLoList) {
  auto c = default_config(ScenarioId::fig3_linearity);
  c.set("lo_powers_mw", std::string("5,5,5"));
  EXPECT_THROW(run_fig3(c), ConfigError);
  c.set("lo_powers_mw", std::string("5"));
  EXPECT_THROW(run_fig3(c), ConfigError);
}

TEST(Fig4, ModelAtMaxAddedLoss) {
  const auto r = run_fig4(default_config(ScenarioId::fig4_loss_sweep));
  const double sq = r.value("sq_abs_db_at_max_added_loss");
  EXPECT_GT(sq, 3.2);
  EXPECT_LT(sq, 4.2);
  EXPECT_NEAR(sq, 3.5210671817880823, 1e-12);
  EXPECT_EQ(r.value("monotone_degradation"), 1.0);
  EXPECT_NEAR(r.value("loss_limited_loss_pct"), 9.317610152192302, 1e-9);
}

TEST(Fig4, FullLossIsVacuum) {
  auto c = default_config(ScenarioId::fig4_loss_sweep);
  c.set("curve_loss_max", 1.0);
  const auto r = run_fig4(c);
  EXPECT_NEAR(r.value("sq_db_at_full_loss"), 0.0, 1e-12);
  EXPECT_NEAR(r.value("anti_db_at_full_loss"), 0.0, 1e-12);
}

TEST(Fig4, IngestedRecords) {
  const std::vector<double> added{0.0, 0.1, 0.2, 0.3, 0.4};
  const auto recs =
      synth_loss_sweep({Efficiency(0.9), 63.0, JitterAngle{}, SidebandRatio{}}, added, 0.0, 1);
  const auto r = run_fig4(default_config(ScenarioId::fig4_loss_sweep), recs);
  EXPECT_NEAR(r.value("fitted_eta0"), 0.9, 1e-6);
  EXPECT_EQ(r.find("fitted_eta0_error"), nullptr);
  // The synthetic-data target is skipped, not failed.
  EXPECT_TRUE(r.all_passed());
}

TEST(Bounds, Defaults) {
  const auto r = run_bounds_analysis(default_config(ScenarioId::bounds_analysis));
  EXPECT_NEAR(r.value("phi_deg"), 1.21, 0.02);
  EXPECT_NEAR(r.value("min_loss_pct_raw"), 5.7820332886978965, 1e-7);
  EXPECT_NEAR(r.value("max_loss_pct_raw"), 9.317610152192302, 1e-7);
  EXPECT_NEAR(r.value("min_loss_pct_corrected"), 5.550931446782836, 1e-7);
  EXPECT_NEAR(r.value("max_loss_pct_corrected"), 9.095180523804092, 1e-7);
  EXPECT_NEAR(r.value("floor_db_at_gain_and_phi_upper"), -9.933, 0.001);
  EXPECT_TRUE(r.all_passed());
  bool documents_zero_jitter = false;
  for (const auto& n : r.notes)
    if (n.find("zero-jitter") != std::string::npos) documents_zero_jitter = true;
  EXPECT_TRUE(documents_zero_jitter);
}

TEST(Bounds, MinimumUncertaintyInput) {
  auto c = default_config(ScenarioId::bounds_analysis);
  c.set("sq_950_db", -10.0);
  c.set("anti_950_db", 10.0);
  EXPECT_EQ(run_bounds_analysis(c).value("phi_deg"), 0.0);
}

TEST(Qe, Defaults) {
  const auto r = run_qe_budget(default_config(ScenarioId::qe_budget));
  EXPECT_NEAR(r.value("escape_efficiency"), 0.9942004971, 1e-9);
  EXPECT_NEAR(r.value("visibility_loss_pct"), 0.3996, 1e-9);
  EXPECT_NEAR(r.value("qe_mid_pct"), 94.86, 0.01);
  EXPECT_GE(r.value("qe_min_pct"), 93.0);
  EXPECT_LE(r.value("qe_max_pct"), 97.0);
}

TEST(Targets, FailingTargetIsReported) {
  auto c = default_config(ScenarioId::fig4_loss_sweep);
  c.set_target({"loss_limited_loss_pct", 8.6, 0.1});
  const auto r = run_fig4(c);
  EXPECT_FALSE(r.all_passed());
  EXPECT_NE(to_text(r).find("[FAIL] loss_limited_loss_pct"), std::string::npos);
}

TEST(Targets, UnknownOutputIsSkipped) {
  auto c = default_config(ScenarioId::qe_budget);
  c.set_target({"no_such_output", 1.0, 0.1});
  const auto r = run_qe_budget(c);
  EXPECT_TRUE(r.all_passed());
  EXPECT_FALSE(r.notes.empty());
}

TEST(Config, Validation) {
  auto c = default_config(ScenarioId::qe_budget);
  c.set_target({"x", 1.0, 0.0});
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_THROW(c.number("missing"), ConfigError);
  c.set("seed", 0.5);
  EXPECT_THROW(c.seed(), ConfigError);
}

TEST(Config, JsonRoundTrip) {
  for (auto id : kAll) {
    const auto c = default_config(id);
    const auto back = config_from_json(config_to_json(c));
    EXPECT_EQ(config_to_json(back).dump(), config_to_json(c).dump());
  }
}

TEST(Config, JsonOverridesAndRejectsUnknown) {
  auto c = default_config(ScenarioId::fig2_traces);
  apply_config_json(c, nlohmann::json::parse(
                           R"({"parameters": {"seed": 9}, "targets": [{"name": "trace_dark_db", "value": -25, "tolerance": 2}]})"));
  EXPECT_EQ(c.seed(), 9u);
  EXPECT_EQ(c.targets.size(), 4u);
  auto bad = default_config(ScenarioId::fig2_traces);
  EXPECT_THROW(apply_config_json(bad, nlohmann::json::parse(R"({"parameters": {"sede": 9}})")),
               ConfigError);
  EXPECT_THROW(apply_config_json(bad, nlohmann::json::parse(R"({"scenario": "qe"})")), ConfigError);
}

TEST(Reports, SelfContained) {
  for (auto id : kAll) {
    const auto first = run_scenario(default_config(id));
    const auto rerun = run_scenario(config_from_json(first.inputs));
    EXPECT_EQ(to_json(rerun).dump(), to_json(first).dump()) << scenario_name(id);
  }
}

TEST(Reports, EmitIsByteIdentical) {
  for (auto id : kAll) {
    const auto a = scratch_dir(std::string(scenario_name(id)) + "_a");
    const auto b = scratch_dir(std::string(scenario_name(id)) + "_b");
    const auto written_a = emit_report(run_scenario(default_config(id)), a, true);
    const auto written_b = emit_report(run_scenario(default_config(id)), b, true);
    ASSERT_EQ(written_a.size(), written_b.size());
    for (std::size_t i = 0; i < written_a.size(); ++i) {
      EXPECT_EQ(written_a[i].filename(), written_b[i].filename());
      EXPECT_EQ(slurp(written_a[i]), slurp(written_b[i])) << written_a[i];
    }
    EXPECT_TRUE(std::filesystem::exists(a / "report.json"));
    EXPECT_TRUE(std::filesystem::exists(a / "report.txt"));
    std::filesystem::remove_all(a);
    std::filesystem::remove_all(b);
  }
}

TEST(Reports, SvgOnlyOnRequest) {
  const auto dir = scratch_dir("svg");
  emit_report(run_scenario(default_config(ScenarioId::fig3_linearity)), dir, false);
  EXPECT_FALSE(std::filesystem::exists(dir / "fig3.svg"));
  emit_report(run_scenario(default_config(ScenarioId::fig3_linearity)), dir, true);
  EXPECT_TRUE(std::filesystem::exists(dir / "fig3.svg"));
  EXPECT_NE(slurp(dir / "fig3.svg").find("<svg"), std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST(Ingest, WellFormedLossSweep) {
  std::stringstream ss;
  const std::vector<double> added{0.0, 0.1, 0.2, 0.3, 0.4};
  write_loss_sweep_csv(
      ss, synth_loss_sweep({Efficiency(0.93), 63.0, JitterAngle{}, SidebandRatio{}}, added, 0.15, 2));
  EXPECT_EQ(read_loss_sweep_csv(ss).data.size(), 5u);
}

TEST(Ingest, AddedLossOutOfRangeCitesRow) {
  std::stringstream ss(
      "added_loss,sq_db,anti_db,sq_err_db,anti_err_db,lo_power_mw,pump_mw\n"
      "0,-10,20,0.1,0.1,,\n"
      "1.2,-3,5,0.1,0.1,,\n");
  try {
    read_loss_sweep_csv(ss);
    FAIL() << "expected IngestError";
  } catch (const IngestError& e) {
    EXPECT_EQ(e.row(), 3u);
    EXPECT_EQ(e.column(), "added_loss");
    EXPECT_NE(std::string(e.what()).find("row 3"), std::string::npos);
  }
}

TEST(Ingest, HeaderAndCellErrors) {
  std::stringstream missing("added_loss,sq_db\n0,-3\n");
  EXPECT_THROW(read_loss_sweep_csv(missing), IngestError);
  std::stringstream text("lo_power_mw,power_linear\n1,abc\n");
  try {
    read_shotnoise_csv(text);
    FAIL();
  } catch (const IngestError& e) {
    EXPECT_EQ(e.row(), 2u);
    EXPECT_EQ(e.column(), "power_linear");
  }
  std::stringstream order("time_s,level_db\n0,1\n0,2\n");
  EXPECT_THROW(read_trace_csv(order), IngestError);
  EXPECT_THROW(ingest_csv("/nonexistent/file.csv", CsvKind::trace), IngestError);
}

TEST(Ingest, ExtraColumnsWarn) {
  std::stringstream ss("lo_power_mw,power_linear,comment\n1,2,x\n3,4,y\n");
  const auto got = read_shotnoise_csv(ss);
  EXPECT_EQ(got.data.size(), 2u);
  EXPECT_FALSE(got.warnings.empty());
}

TEST(Ingest, WriteReadIdentity) {
  const std::vector<double> added{0.0, 0.13, 0.37};
  const auto recs =
      synth_loss_sweep({Efficiency(0.93), 63.0, JitterAngle{}, SidebandRatio{}}, added, 0.15, 8, 12.5);
  std::stringstream a;
  write_loss_sweep_csv(a, recs);
  EXPECT_EQ(read_loss_sweep_csv(a).data, recs);

  const std::vector<double> lo{2.69, 7.1, 26.9};
  const auto pts = synth_shotnoise_points(0.37, 0.01, lo, 0.01, 8);
  std::stringstream b;
  write_shotnoise_csv(b, pts);
  EXPECT_EQ(read_shotnoise_csv(b).data, pts);
}
