// sqz: command-line front end for the squeezing model, inference and
// reproduction scenarios.
//
// Exit codes: 0 success, 1 usage / IO, 2 domain violation, 3 numerical
// infeasibility, 4 reproduction target failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sqz/csv.hpp"
#include "sqz/error.hpp"
#include "sqz/inference.hpp"
#include "sqz/measurement.hpp"
#include "sqz/noise_model.hpp"
#include "sqz/report.hpp"
#include "sqz/scenarios.hpp"

namespace {

enum ExitCode : int { kOk = 0, kUsage = 1, kDomain = 2, kInfeasible = 3, kTargetFailed = 4 };

using json = nlohmann::ordered_json;

/// Writes to `path`, or stdout when empty.
void emit(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  sqz::write_file_atomic(p, content);
}

std::vector<double> parse_list(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    auto v = sqz::parse_number(cell);
    if (!v) throw CLI::ValidationError(flag, "'" + cell + "' is not a number");
    out.push_back(*v);
  }
  if (out.empty()) throw CLI::ValidationError(flag, "empty list");
  return out;
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  double gain = 1.0;
  std::optional<double> eta;
  std::optional<double> loss;
  double phi_deg = 0.0;
  double omega_rel = 0.0;
  std::string format = "text";
};

int run_simulate(const SimulateArgs& a) {
  if (!a.eta && !a.loss) throw CLI::ValidationError("--eta/--loss", "exactly one is required");
  const sqz::Efficiency eta = a.eta ? sqz::Efficiency(*a.eta) : sqz::Efficiency::from_loss(*a.loss);
  const auto pair = sqz::observed_pair(sqz::x_from_gain(a.gain), sqz::SidebandRatio(a.omega_rel),
                                       eta, sqz::JitterAngle::from_degrees(a.phi_deg));
  const double sq_db = sqz::to_db(pair.v_minus), anti_db = sqz::to_db(pair.v_plus);
  if (a.format == "json") {
    json j{{"gain", a.gain},       {"eta", eta.value()},         {"phi_deg", a.phi_deg},
           {"omega_rel", a.omega_rel}, {"sq_db", sq_db},         {"anti_db", anti_db},
           {"v_minus", pair.v_minus},  {"v_plus", pair.v_plus}};
    std::cout << j.dump(2) << '\n';
  } else if (a.format == "csv") {
    std::cout << "gain,eta,phi_deg,omega_rel,sq_db,anti_db,v_minus,v_plus\n"
              << sqz::format_number(a.gain) << ',' << sqz::format_number(eta.value()) << ','
              << sqz::format_number(a.phi_deg) << ',' << sqz::format_number(a.omega_rel) << ','
              << sqz::format_number(sq_db) << ',' << sqz::format_number(anti_db) << ','
              << sqz::format_number(pair.v_minus) << ',' << sqz::format_number(pair.v_plus)
              << '\n';
  } else {
    std::cout << "sq_db [dB]:        " << sqz::format_fixed(sq_db, 4) << '\n'
              << "anti_db [dB]:      " << sqz::format_fixed(anti_db, 4) << '\n'
              << "v_minus [linear]:  " << sqz::format_number(pair.v_minus) << '\n'
              << "v_plus [linear]:   " << sqz::format_number(pair.v_plus) << '\n';
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct FitArgs {
  double sq_db = 0.0;
  double anti_db = 0.0;
  std::optional<double> sq_err_db;
  std::optional<double> anti_err_db;
  double gain = 63.0;
  double phi_deg = 0.0;
  double phi_max_deg = 0.0;
  double omega_rel = 0.0;
  std::string input;
  std::string out;
};

int run_fit_phase_jitter(const FitArgs& a) {
  sqz::SqueezePairDb pair{a.sq_db, a.anti_db, a.sq_err_db, a.anti_err_db};
  const auto est = sqz::infer_phase_jitter_interval(pair);
  json j{{"fit", "phase-jitter"},
         {"phi_deg", sqz::rad_to_deg(est.central)},
         {"phi_deg_lo", sqz::rad_to_deg(est.lo)},
         {"phi_deg_hi", sqz::rad_to_deg(est.hi)}};
  emit(a.out, j.dump(2) + "\n");
  return kOk;
}

int run_fit_loss_bounds(const FitArgs& a) {
  const auto b = sqz::loss_bounds(a.gain, a.sq_db, sqz::JitterAngle::from_degrees(a.phi_max_deg),
                                  sqz::SidebandRatio(a.omega_rel));
  json j{{"fit", "loss-bounds"},
         {"gain", a.gain},
         {"sq_db", a.sq_db},
         {"phi_max_deg", a.phi_max_deg},
         {"min_loss", b.min_loss},
         {"max_loss", b.max_loss},
         {"gain_at_min_loss", sqz::gain_from_x(sqz::PumpParam(b.pump_at_min_loss))}};
  emit(a.out, j.dump(2) + "\n");
  return kOk;
}

int run_fit_shotnoise(const FitArgs& a) {
  auto data = std::get<sqz::Ingested<std::vector<sqz::ShotNoisePoint>>>(
      sqz::ingest_csv(a.input, sqz::CsvKind::shotnoise));
  for (const auto& w : data.warnings) std::cerr << "warning: " << w << '\n';
  const auto fit = sqz::fit_linear_shotnoise(data.data);
  json j{{"fit", "shotnoise"},          {"points", data.data.size()},
         {"slope", fit.slope},          {"intercept", fit.intercept},
         {"rms_residual", fit.rms_residual}, {"r_squared", fit.r_squared}};
  emit(a.out, j.dump(2) + "\n");
  return kOk;
}

int run_fit_loss_sweep(const FitArgs& a) {
  auto data = std::get<sqz::Ingested<std::vector<sqz::MeasurementRecord>>>(
      sqz::ingest_csv(a.input, sqz::CsvKind::loss_sweep));
  for (const auto& w : data.warnings) std::cerr << "warning: " << w << '\n';
  const auto fit = sqz::fit_loss_sweep(data.data, a.gain, sqz::JitterAngle::from_degrees(a.phi_deg),
                                       sqz::SidebandRatio(a.omega_rel));
  json residuals = json::array();
  for (std::size_t i = 0; i < fit.residuals.size(); ++i)
    residuals.push_back({{"added_loss", data.data[i].added_loss},
                         {"sq_residual_db", fit.residuals[i].sq_db},
                         {"anti_residual_db", fit.residuals[i].anti_db}});
  json j{{"fit", "loss-sweep"},
         {"gain", a.gain},
         {"eta0", fit.eta0.value()},
         {"loss0", fit.eta0.loss()},
         {"rms_residual_db", fit.rms_residual_db},
         {"residuals", residuals}};
  emit(a.out, j.dump(2) + "\n");
  return kOk;
}

// ---------------------------------------------------------------------------

struct SweepArgs {
  double gain = 63.0;
  double loss_from = 0.0;
  double loss_to = 0.5;
  double loss_step = 0.01;
  double phi_deg = 0.0;
  double omega_rel = 0.0;
  std::string out;
};

int run_sweep(const SweepArgs& a) {
  if (!(a.loss_step > 0.0) || !(a.loss_from <= a.loss_to))
    throw CLI::ValidationError("--loss-step", "need loss-from <= loss-to and loss-step > 0");
  const auto x = sqz::x_from_gain(a.gain);
  const sqz::SidebandRatio w(a.omega_rel);
  const auto phi = sqz::JitterAngle::from_degrees(a.phi_deg);
  // Tolerate representation error in (to - from) / step.
  const auto n = static_cast<long>(std::floor((a.loss_to - a.loss_from) / a.loss_step + 1e-9)) + 1;
  std::ostringstream csv;
  csv << "loss,sq_db,anti_db\n";
  for (long i = 0; i < n; ++i) {
    const double loss = std::min(a.loss_from + a.loss_step * static_cast<double>(i), a.loss_to);
    const auto pair = sqz::observed_pair(x, w, sqz::Efficiency::from_loss(loss), phi);
    csv << sqz::format_number(loss) << ',' << sqz::format_number(sqz::to_db(pair.v_minus)) << ','
        << sqz::format_number(sqz::to_db(pair.v_plus)) << '\n';
  }
  emit(a.out, csv.str());
  return kOk;
}

// ---------------------------------------------------------------------------

struct SynthArgs {
  std::optional<std::uint64_t> seed;
  std::string out;
  // loss-sweep
  double eta0 = 0.93;
  double gain = 63.0;
  double phi_deg = 0.0;
  double omega_rel = 0.0;
  std::string added_losses = "0,0.1,0.2,0.3,0.4";
  double noise_db = 0.15;
  std::optional<double> lo_power_mw;
  std::optional<double> pump_mw;
  // trace
  double mean_db = 0.0;
  sqz::AnalyzerSettings analyzer;
  // shotnoise
  double slope = 1.0;
  double dark = 0.0;
  std::string lo_powers = "2.69,5,10,15,20,26.9,30";
  double rel_noise = 0.01;
};

int run_synth_loss_sweep(const SynthArgs& a) {
  const auto losses = parse_list(a.added_losses, "--added-losses");
  const auto recs = sqz::synth_loss_sweep(
      {sqz::Efficiency(a.eta0), a.gain, sqz::JitterAngle::from_degrees(a.phi_deg),
       sqz::SidebandRatio(a.omega_rel)},
      losses, a.noise_db, *a.seed, a.lo_power_mw, a.pump_mw);
  std::ostringstream csv;
  sqz::write_loss_sweep_csv(csv, recs);
  emit(a.out, csv.str());
  return kOk;
}

int run_synth_trace(const SynthArgs& a) {
  const auto trace = sqz::synth_trace(a.mean_db, a.analyzer, *a.seed, "synthetic");
  std::ostringstream csv;
  sqz::write_trace_csv(csv, trace);
  emit(a.out, csv.str());
  std::cerr << "mean " << sqz::format_fixed(sqz::trace_mean_db(trace), 4) << " dB, std dev "
            << sqz::format_fixed(sqz::trace_stddev_db(trace), 4) << " dB\n";
  return kOk;
}

int run_synth_shotnoise(const SynthArgs& a) {
  const auto powers = parse_list(a.lo_powers, "--lo-powers");
  const auto pts = sqz::synth_shotnoise_points(a.slope, a.dark, powers, a.rel_noise, *a.seed);
  std::ostringstream csv;
  sqz::write_shotnoise_csv(csv, pts);
  emit(a.out, csv.str());
  return kOk;
}

// ---------------------------------------------------------------------------

struct ReproduceArgs {
  std::string figure;
  std::string out;
  std::optional<std::uint64_t> seed;
  bool svg = false;
  std::string scenario_config;
  std::string records;
  std::vector<std::string> sets;
  std::vector<std::string> targets;
};

int run_reproduce(const ReproduceArgs& a) {
  auto config = sqz::default_config(sqz::parse_scenario_id(a.figure));
  if (!a.scenario_config.empty()) {
    std::ifstream in(a.scenario_config);
    if (!in) throw sqz::ConfigError("cannot open scenario config '" + a.scenario_config + "'");
    sqz::apply_config_json(config, json::parse(in));
  }
  for (const auto& kv : a.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw sqz::ConfigError("--set expects key=value");
    const auto key = kv.substr(0, eq), value = kv.substr(eq + 1);
    if (!config.parameters.contains(key)) throw sqz::ConfigError("unknown parameter '" + key + "'");
    if (auto v = sqz::parse_number(value))
      config.set(key, *v);
    else
      config.set(key, value);
  }
  for (const auto& t : a.targets) {
    // name=value:tolerance
    const auto eq = t.find('='), colon = t.rfind(':');
    if (eq == std::string::npos || colon == std::string::npos || colon < eq)
      throw sqz::ConfigError("--target expects name=value:tolerance");
    auto value = sqz::parse_number(t.substr(eq + 1, colon - eq - 1));
    auto tol = sqz::parse_number(t.substr(colon + 1));
    if (!value || !tol) throw sqz::ConfigError("--target value and tolerance must be numbers");
    config.set_target({t.substr(0, eq), *value, *tol});
  }
  if (a.seed) {
    if (!config.parameters.contains("seed"))
      std::cerr << "note: scenario " << sqz::scenario_name(config.id) << " is not seeded\n";
    else
      config.set("seed", static_cast<double>(*a.seed));
  }
  config.validate();

  std::optional<std::vector<sqz::MeasurementRecord>> records;
  if (!a.records.empty()) {
    if (config.id != sqz::ScenarioId::fig4_loss_sweep)
      throw sqz::ConfigError("--records applies to fig4 only");
    auto data = std::get<sqz::Ingested<std::vector<sqz::MeasurementRecord>>>(
        sqz::ingest_csv(a.records, sqz::CsvKind::loss_sweep));
    for (const auto& w : data.warnings) std::cerr << "warning: " << w << '\n';
    records = std::move(data.data);
  }

  const auto report = sqz::run_scenario(config, records);
  try {
    sqz::emit_report(report, a.out, a.svg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  std::cout << sqz::to_text(report);
  return report.all_passed() ? kOk : kTargetFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Squeezed-light noise model, inference and reproduction tool", "sqz"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Key-value config file supplying any flag");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Forward model: squeezing and anti-squeezing");
  simulate->add_option("--gain", sim.gain, "Parametric gain (>= 1)")->required();
  auto* eta_opt = simulate->add_option("--eta", sim.eta, "Total detection efficiency");
  auto* loss_opt = simulate->add_option("--loss", sim.loss, "Total optical loss (1 - eta)");
  eta_opt->excludes(loss_opt);
  loss_opt->excludes(eta_opt);
  simulate->add_option("--phi-deg", sim.phi_deg, "Phase jitter [deg]");
  simulate->add_option("--omega-rel", sim.omega_rel, "Sideband frequency / cavity half-linewidth");
  simulate->add_option("--format", sim.format, "Output format")
      ->check(CLI::IsMember({"text", "csv", "json"}));

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Inverse problems and calibration fits");
  fit_cmd->require_subcommand(1);
  auto* fit_pj = fit_cmd->add_subcommand("phase-jitter", "Jitter bound from a lossless pair");
  fit_pj->add_option("--sq-db", fit.sq_db, "Squeezing level [dB]")->required();
  fit_pj->add_option("--anti-db", fit.anti_db, "Anti-squeezing level [dB]")->required();
  fit_pj->add_option("--sq-err-db", fit.sq_err_db, "1 sigma on squeezing [dB]");
  fit_pj->add_option("--anti-err-db", fit.anti_err_db, "1 sigma on anti-squeezing [dB]");
  fit_pj->add_option("--out", fit.out, "Output file (default stdout)");
  auto* fit_lb = fit_cmd->add_subcommand("loss-bounds", "Total optical loss bracket");
  fit_lb->add_option("--gain", fit.gain, "Parametric gain")->required();
  fit_lb->add_option("--sq-db", fit.sq_db, "Observed squeezing [dB]")->required();
  fit_lb->add_option("--phi-max-deg", fit.phi_max_deg, "Upper bound on phase jitter [deg]")
      ->required();
  fit_lb->add_option("--omega-rel", fit.omega_rel, "Sideband ratio");
  fit_lb->add_option("--out", fit.out, "Output file (default stdout)");
  auto* fit_sn = fit_cmd->add_subcommand("shotnoise", "Linear fit of shot noise vs LO power");
  fit_sn->add_option("--input", fit.input, "shotnoise CSV")->required();
  fit_sn->add_option("--out", fit.out, "Output file (default stdout)");
  auto* fit_ls = fit_cmd->add_subcommand("loss-sweep", "Fit setup efficiency to an added-loss sweep");
  fit_ls->add_option("--input", fit.input, "loss_sweep CSV")->required();
  fit_ls->add_option("--gain", fit.gain, "Parametric gain")->required();
  fit_ls->add_option("--phi-deg", fit.phi_deg, "Phase jitter [deg]");
  fit_ls->add_option("--omega-rel", fit.omega_rel, "Sideband ratio");
  fit_ls->add_option("--out", fit.out, "Output file (default stdout)");

  SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep", "Squeezing / anti-squeezing versus total loss");
  sweep->add_option("--gain", sw.gain, "Parametric gain")->required();
  sweep->add_option("--loss-from", sw.loss_from, "First loss value");
  sweep->add_option("--loss-to", sw.loss_to, "Last loss value");
  sweep->add_option("--loss-step", sw.loss_step, "Loss increment");
  sweep->add_option("--phi-deg", sw.phi_deg, "Phase jitter [deg]");
  sweep->add_option("--omega-rel", sw.omega_rel, "Sideband ratio");
  sweep->add_option("--out", sw.out, "Output CSV (default stdout)");

  ReproduceArgs rep;
  auto* reproduce = app.add_subcommand("reproduce", "Run a reproduction scenario");
  reproduce->add_option("figure", rep.figure, "fig2 | fig3 | fig4 | bounds | qe")
      ->required()
      ->check(CLI::IsMember({"fig2", "fig3", "fig4", "bounds", "qe", "fig2_traces",
                             "fig3_linearity", "fig4_loss_sweep", "bounds_analysis", "qe_budget"}));
  reproduce->add_option("--out", rep.out, "Output directory")->envname("SQZ_OUT_DIR")->required();
  reproduce->add_option("--seed", rep.seed, "Seed override");
  reproduce->add_flag("--svg", rep.svg, "Also write SVG plots");
  reproduce->add_option("--scenario-config", rep.scenario_config, "Scenario config (JSON)");
  reproduce->add_option("--records", rep.records, "loss_sweep CSV to fit (fig4)");
  reproduce->add_option("--set", rep.sets, "Parameter override key=value");
  reproduce->add_option("--target", rep.targets, "Target override name=value:tolerance");

  SynthArgs syn;
  auto* synth = app.add_subcommand("synth", "Seeded synthetic measurement data");
  synth->require_subcommand(1);
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--seed", syn.seed, "Random seed")->required();
    cmd->add_option("--out", syn.out, "Output CSV (default stdout)");
  };
  auto* syn_ls = synth->add_subcommand("loss-sweep", "Added-loss sweep records");
  add_common(syn_ls);
  syn_ls->add_option("--eta0", syn.eta0, "Setup efficiency before added loss");
  syn_ls->add_option("--gain", syn.gain, "Parametric gain");
  syn_ls->add_option("--phi-deg", syn.phi_deg, "Phase jitter [deg]");
  syn_ls->add_option("--omega-rel", syn.omega_rel, "Sideband ratio");
  syn_ls->add_option("--added-losses", syn.added_losses, "Comma-separated added losses");
  syn_ls->add_option("--noise-db", syn.noise_db, "Gaussian noise per level [dB]");
  syn_ls->add_option("--lo-power-mw", syn.lo_power_mw, "LO power metadata [mW]");
  syn_ls->add_option("--pump-mw", syn.pump_mw, "Pump power metadata [mW]");
  auto* syn_tr = synth->add_subcommand("trace", "Zero-span analyzer trace");
  add_common(syn_tr);
  syn_tr->add_option("--mean-db", syn.mean_db, "Mean level [dB]")->required();
  syn_tr->add_option("--rbw-hz", syn.analyzer.rbw_hz, "Resolution bandwidth [Hz]");
  syn_tr->add_option("--vbw-hz", syn.analyzer.vbw_hz, "Video bandwidth [Hz]");
  syn_tr->add_option("--n-traces", syn.analyzer.n_traces, "Averaged traces");
  syn_tr->add_option("--n-points", syn.analyzer.n_points, "Points per trace");
  syn_tr->add_option("--span-s", syn.analyzer.span_s, "Sweep time [s]");
  auto* syn_sn = synth->add_subcommand("shotnoise", "Shot-noise calibration points");
  add_common(syn_sn);
  syn_sn->add_option("--slope", syn.slope, "Power per mW");
  syn_sn->add_option("--dark", syn.dark, "Dark power");
  syn_sn->add_option("--lo-powers", syn.lo_powers, "Comma-separated LO powers [mW]");
  syn_sn->add_option("--rel-noise", syn.rel_noise, "Relative Gaussian noise");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*simulate) return run_simulate(sim);
    if (*fit_pj) return run_fit_phase_jitter(fit);
    if (*fit_lb) return run_fit_loss_bounds(fit);
    if (*fit_sn) return run_fit_shotnoise(fit);
    if (*fit_ls) return run_fit_loss_sweep(fit);
    if (*sweep) return run_sweep(sw);
    if (*reproduce) return run_reproduce(rep);
    if (*syn_ls) return run_synth_loss_sweep(syn);
    if (*syn_tr) return run_synth_trace(syn);
    if (*syn_sn) return run_synth_shotnoise(syn);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const sqz::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\nfeasibility floor: "
              << sqz::format_fixed(sqz::to_db(e.floor()), 4) << " dB ("
              << sqz::format_number(e.floor()) << " linear)\n";
    return kInfeasible;
  } catch (const sqz::DomainError& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return kDomain;
  } catch (const sqz::DegenerateFitError& e) {
    std::cerr << "degenerate fit: " << e.what() << '\n';
    return kDomain;
  } catch (const sqz::IngestError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kUsage;
  } catch (const sqz::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
