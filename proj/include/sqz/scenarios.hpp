#pragma once

// Named reproduction runs. Each scenario takes a config (parameters plus
// targets), runs the model / inference / synthesis chain, and returns a
// self-contained report whose `inputs` re-create the run exactly.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "sqz/csv.hpp"
#include "sqz/error.hpp"
#include "sqz/inference.hpp"
#include "sqz/measurement.hpp"
#include "sqz/noise_model.hpp"
#include "sqz/report.hpp"
#include "sqz/svg.hpp"

namespace sqz {

enum class ScenarioId { fig2_traces, fig3_linearity, fig4_loss_sweep, bounds_analysis, qe_budget };

inline std::string_view scenario_name(ScenarioId id) {
  switch (id) {
    case ScenarioId::fig2_traces: return "fig2_traces";
    case ScenarioId::fig3_linearity: return "fig3_linearity";
    case ScenarioId::fig4_loss_sweep: return "fig4_loss_sweep";
    case ScenarioId::bounds_analysis: return "bounds_analysis";
    case ScenarioId::qe_budget: return "qe_budget";
  }
  return "unknown";
}

/// Accepts the full scenario names and the short figure aliases.
inline ScenarioId parse_scenario_id(std::string_view name) {
  if (name == "fig2_traces" || name == "fig2") return ScenarioId::fig2_traces;
  if (name == "fig3_linearity" || name == "fig3") return ScenarioId::fig3_linearity;
  if (name == "fig4_loss_sweep" || name == "fig4") return ScenarioId::fig4_loss_sweep;
  if (name == "bounds_analysis" || name == "bounds") return ScenarioId::bounds_analysis;
  if (name == "qe_budget" || name == "qe") return ScenarioId::qe_budget;
  throw ConfigError("unknown scenario '" + std::string(name) + "'");
}

struct ScenarioConfig {
  ScenarioId id = ScenarioId::fig2_traces;
  ParamMap parameters;
  std::vector<Target> targets;

  double number(const std::string& key) const {
    const auto it = parameters.find(key);
    if (it == parameters.end()) throw ConfigError("missing parameter '" + key + "'");
    if (const auto* d = std::get_if<double>(&it->second)) return *d;
    if (auto v = parse_number(std::get<std::string>(it->second))) return *v;
    throw ConfigError("parameter '" + key + "' is not a number");
  }

  std::uint64_t seed(const std::string& key = "seed") const {
    const double s = number(key);
    if (!(s >= 0.0 && s < 9007199254740992.0 && std::floor(s) == s))
      throw ConfigError("seed must be a non-negative integer below 2^53");
    return static_cast<std::uint64_t>(s);
  }

  /// Comma-separated list of numbers (or a single number).
  std::vector<double> list(const std::string& key) const {
    const auto it = parameters.find(key);
    if (it == parameters.end()) throw ConfigError("missing parameter '" + key + "'");
    if (const auto* d = std::get_if<double>(&it->second)) return {*d};
    std::vector<double> out;
    std::string_view text = std::get<std::string>(it->second);
    while (!text.empty()) {
      const auto pos = text.find(',');
      const auto cell = text.substr(0, pos);
      auto v = parse_number(cell);
      if (!v) throw ConfigError("parameter '" + key + "' has a non-numeric entry");
      out.push_back(*v);
      if (pos == std::string_view::npos) break;
      text.remove_prefix(pos + 1);
    }
    return out;
  }

  void set(const std::string& key, ParamValue v) { parameters[key] = std::move(v); }

  /// Replaces the target of the same name or appends a new one.
  void set_target(const Target& t) {
    for (auto& existing : targets) {
      if (existing.name == t.name) {
        existing = t;
        return;
      }
    }
    targets.push_back(t);
  }

  void validate() const {
    for (const auto& t : targets) {
      if (!(std::isfinite(t.tolerance) && t.tolerance > 0.0))
        throw ConfigError("target '" + t.name + "' needs a finite tolerance > 0");
      if (!std::isfinite(t.value))
        throw ConfigError("target '" + t.name + "' has a non-finite value");
    }
  }
};

/// Defaults for each scenario: the experiment's parameters and the values
/// the run is expected to reproduce.
inline ScenarioConfig default_config(ScenarioId id) {
  ScenarioConfig c;
  c.id = id;
  auto& p = c.parameters;
  switch (id) {
    case ScenarioId::fig2_traces:
      p = {{"vacuum_db", 0.0},   {"squeezed_db", -10.12}, {"dark_db", -26.0},
           {"rbw_hz", 100e3},    {"vbw_hz", 100.0},       {"n_traces", 3.0},
           {"n_points", 601.0},  {"span_s", 1.0},         {"seed", 7.0}};
      c.targets = {{"trace_squeezing_db", -10.12, 0.03},
                   {"corrected_squeezing_db", -10.22, 0.03},
                   {"trace_dark_db", -26.0, 0.03},
                   {"trace_sigma_db", 0.125, 0.075}};
      break;
    case ScenarioId::fig3_linearity:
      p = {{"slope", 1.0},
           {"dark", 0.0},
           {"lo_powers_mw", std::string("2.69,5,10,15,20,26.9,30")},
           {"rel_noise", 0.01},
           {"seed", 3.0},
           {"ratio_low_mw", 2.69},
           {"ratio_high_mw", 26.9}};
      c.targets = {{"r_squared", 1.0, 0.001}, {"shot_noise_ratio_db", 10.0, 0.05}};
      break;
    case ScenarioId::fig4_loss_sweep:
      p = {{"gain", 63.0},
           {"eta0", 0.93},
           {"phi_deg", 0.0},
           {"omega_rel", 0.0},
           {"curve_loss_max", 0.5},
           {"curve_points", 51.0},
           {"added_losses", std::string("0,0.1,0.2,0.3,0.4")},
           {"synth_noise_db", 0.15},
           {"seed", 11.0},
           {"sq_obs_db", -10.12}};
      c.targets = {{"sq_abs_db_at_max_added_loss", 3.7, 0.5},
                   {"monotone_degradation", 1.0, 0.5},
                   {"loss_limited_loss_pct", 8.6, 1.0},
                   {"fitted_eta0_error", 0.0, 0.01}};
      break;
    case ScenarioId::bounds_analysis:
      p = {{"sq_950_db", -10.0},        {"anti_950_db", 23.3},
           {"sq_950_err_db", 0.15},     {"anti_950_err_db", 0.0},
           {"gain_950", 200.0},         {"gain", 63.0},
           {"sq_raw_db", -10.12},       {"sq_raw_err_db", 0.15},
           {"sq_corrected_db", -10.22}, {"sq_corrected_err_db", 0.16},
           {"phi_upper_deg", 1.2},      {"omega_rel", 0.0},
           {"t_out", 0.12},             {"l_rt", 0.0007},
           {"propagation_eta", 0.989},  {"visibility", 0.998}};
      c.targets = {{"phi_deg", 1.2, 0.1},
                   {"min_loss_pct_raw", 5.6, 1.0},
                   {"max_loss_pct_raw", 8.6, 1.0},
                   {"min_loss_pct_corrected", 5.6, 1.0},
                   {"max_loss_pct_corrected", 8.6, 1.0},
                   {"qe_mid_pct", 95.0, 2.0},
                   {"qe_mid_pct_corrected", 95.0, 2.0}};
      break;
    case ScenarioId::qe_budget:
      p = {{"t_out", 0.12},           {"l_rt", 0.0007},       {"propagation_eta", 0.989},
           {"visibility", 0.998},     {"total_min_loss", 0.056}, {"total_max_loss", 0.086}};
      c.targets = {{"escape_efficiency", 0.9942, 0.0002},
                   {"visibility_loss_pct", 0.40, 0.05},
                   {"qe_mid_pct", 95.0, 2.0},
                   {"qe_min_pct", 95.0, 2.0},
                   {"qe_max_pct", 95.0, 2.0}};
      break;
  }
  return c;
}

// ---------------------------------------------------------------------------
// Config documents

inline nlohmann::ordered_json config_to_json(const ScenarioConfig& c) {
  nlohmann::ordered_json j;
  j["scenario"] = std::string(scenario_name(c.id));
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  for (const auto& [k, v] : c.parameters) {
    if (const auto* d = std::get_if<double>(&v))
      params[k] = *d;
    else
      params[k] = std::get<std::string>(v);
  }
  j["parameters"] = params;
  nlohmann::ordered_json targets = nlohmann::ordered_json::array();
  for (const auto& t : c.targets)
    targets.push_back({{"name", t.name}, {"value", t.value}, {"tolerance", t.tolerance}});
  j["targets"] = targets;
  return j;
}

/// Applies a config document on top of `base`. Unknown parameter keys are
/// rejected; targets replace defaults by name.
template <typename Json>
void apply_config_json(ScenarioConfig& base, const Json& j) {
  if (!j.is_object()) throw ConfigError("scenario config must be a JSON object");
  if (j.contains("scenario") && parse_scenario_id(j.at("scenario").template get<std::string>()) != base.id)
    throw ConfigError("config is for a different scenario");
  if (j.contains("parameters")) {
    for (const auto& [key, value] : j.at("parameters").items()) {
      if (!base.parameters.contains(key))
        throw ConfigError("unknown parameter '" + key + "' for scenario " +
                          std::string(scenario_name(base.id)));
      if (value.is_number())
        base.parameters[key] = value.template get<double>();
      else if (value.is_string())
        base.parameters[key] = value.template get<std::string>();
      else
        throw ConfigError("parameter '" + key + "' must be a number or a string");
    }
  }
  if (j.contains("targets")) {
    for (const auto& t : j.at("targets")) {
      if (!t.contains("name") || !t.contains("value") || !t.contains("tolerance"))
        throw ConfigError("targets need name, value and tolerance");
      base.set_target({t.at("name").template get<std::string>(), t.at("value").template get<double>(),
                       t.at("tolerance").template get<double>()});
    }
  }
  base.validate();
}

inline ScenarioConfig config_from_json(const nlohmann::ordered_json& j) {
  if (!j.contains("scenario")) throw ConfigError("config document needs a 'scenario' key");
  auto c = default_config(parse_scenario_id(j.at("scenario").get<std::string>()));
  apply_config_json(c, j);
  return c;
}

// ---------------------------------------------------------------------------

namespace detail {

inline std::string table_csv(const std::vector<std::string>& columns,
                             const std::vector<std::vector<double>>& rows) {
  std::ostringstream out;
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_number(row[i]);
    out << '\n';
  }
  return out.str();
}

inline double nan() { return std::numeric_limits<double>::quiet_NaN(); }

inline std::string pct(double fraction) { return format_fixed(100.0 * fraction, 2) + " %"; }

inline ScenarioReport start_report(const ScenarioConfig& c) {
  c.validate();
  ScenarioReport r;
  r.scenario_id = std::string(scenario_name(c.id));
  r.inputs = config_to_json(c);
  return r;
}

inline int positive_int(const ScenarioConfig& c, const std::string& key) {
  const double v = c.number(key);
  if (!(v >= 1.0 && v < 1e9 && std::floor(v) == v))
    throw ConfigError("parameter '" + key + "' must be a positive integer");
  return static_cast<int>(v);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Zero-span traces: vacuum, squeezed, dark

inline ScenarioReport run_fig2(const ScenarioConfig& c) {
  auto r = detail::start_report(c);
  AnalyzerSettings s;
  s.rbw_hz = c.number("rbw_hz");
  s.vbw_hz = c.number("vbw_hz");
  s.n_traces = detail::positive_int(c, "n_traces");
  s.n_points = detail::positive_int(c, "n_points");
  s.span_s = c.number("span_s");
  try {
    s.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  const auto seed = c.seed();
  const double vac = c.number("vacuum_db"), sq = c.number("squeezed_db"),
               dark = c.number("dark_db");

  const Trace a = synth_trace(vac, s, stream_seed(seed, 1), "a: vacuum");
  const Trace b = synth_trace(sq, s, stream_seed(seed, 2), "b: squeezed");
  const Trace d = synth_trace(dark, s, stream_seed(seed, 3), "c: dark");

  const double mean_a = trace_mean_db(a), mean_b = trace_mean_db(b), mean_d = trace_mean_db(d);
  r.add("vacuum_trace_mean_db", mean_a, "dB");
  r.add("squeezed_trace_mean_db", mean_b, "dB");
  r.add("dark_trace_mean_db", mean_d, "dB");
  r.add("trace_squeezing_db", mean_b - mean_a, "dB");
  r.add("trace_dark_db", mean_d - mean_a, "dB");
  try {
    r.add("trace_corrected_squeezing_db", dark_noise_correct(mean_b - mean_a, mean_d - mean_a), "dB");
  } catch (const DomainError& e) {
    r.add("trace_corrected_squeezing_db", detail::nan(), "dB");
    r.notes.push_back(std::string("trace-based dark correction undefined: ") + e.what());
  }

  r.add("raw_squeezing_db", sq - vac, "dB");
  r.add("dark_level_db", dark - vac, "dB");
  try {
    const double corrected = dark_noise_correct(sq - vac, dark - vac);
    r.add("corrected_squeezing_db", corrected, "dB");
    r.add("correction_shift_db", corrected - (sq - vac), "dB");
  } catch (const DomainError& e) {
    throw ConfigError(std::string("dark-noise correction: ") + e.what());
  }
  r.add("averaging_shape", averaging_shape(s));
  r.add("expected_trace_sigma_db", expected_trace_sigma_db(s), "dB");
  r.add("trace_sigma_db", trace_stddev_db(b), "dB");

  for (const auto* t : {&a, &b, &d}) {
    std::ostringstream csv;
    write_trace_csv(csv, *t);
    const std::string name = t == &a ? "trace_a_vacuum.csv" : t == &b ? "trace_b_squeezed.csv"
                                                                      : "trace_c_dark.csv";
    r.files.push_back({name, csv.str()});
  }
  svg::Plot plot{"Zero-span noise power", "time [s]", "noise power [dB rel. vacuum]", {}};
  for (const auto* t : {&a, &b, &d}) plot.series.push_back({t->label, t->times, t->levels_db});
  r.files.push_back({"fig2.svg", svg::render(plot)});

  r.check_targets(c.targets);
  return r;
}

// ---------------------------------------------------------------------------
// Shot noise versus LO power

inline ScenarioReport run_fig3(const ScenarioConfig& c) {
  auto r = detail::start_report(c);
  const auto lo_powers = c.list("lo_powers_mw");
  {
    auto sorted = lo_powers;
    std::sort(sorted.begin(), sorted.end());
    if (std::unique(sorted.begin(), sorted.end()) - sorted.begin() < 2)
      throw ConfigError("fig3 needs at least two distinct LO powers");
  }
  const double slope = c.number("slope"), dark = c.number("dark");
  if (!(slope > 0.0) || !(dark >= 0.0)) throw ConfigError("fig3 needs slope > 0 and dark >= 0");

  const auto points =
      synth_shotnoise_points(slope, dark, lo_powers, c.number("rel_noise"), c.seed());
  const auto fit = fit_linear_shotnoise(points);
  r.add("slope", fit.slope, "power/mW");
  r.add("intercept", fit.intercept, "power");
  r.add("r_squared", fit.r_squared);
  r.add("rms_residual", fit.rms_residual, "power");
  r.add("slope_rel_error", fit.slope / slope - 1.0);

  // Noiseless, dark-free ratio between the two reference LO powers.
  const double p_lo = shot_noise_power(c.number("ratio_low_mw"), slope, 0.0);
  const double p_hi = shot_noise_power(c.number("ratio_high_mw"), slope, 0.0);
  r.add("shot_noise_ratio", p_hi / p_lo);
  r.add("shot_noise_ratio_db", to_db(p_hi / p_lo), "dB");

  std::ostringstream csv;
  write_shotnoise_csv(csv, points);
  r.files.push_back({"shotnoise.csv", csv.str()});
  std::vector<std::vector<double>> line;
  const auto [lo_it, hi_it] = std::minmax_element(lo_powers.begin(), lo_powers.end());
  std::vector<double> xs, ys, px, py;
  for (int i = 0; i <= 20; ++i) {
    const double p = *lo_it + (*hi_it - *lo_it) * i / 20.0;
    line.push_back({p, fit.slope * p + fit.intercept});
    xs.push_back(p);
    ys.push_back(line.back()[1]);
  }
  r.files.push_back({"fit_line.csv", detail::table_csv({"lo_power_mw", "power_fit"}, line)});
  for (const auto& pt : points) {
    px.push_back(pt.lo_power_mw);
    py.push_back(pt.power);
  }
  r.files.push_back({"fig3.svg", svg::render({"Shot noise vs LO power", "LO power [mW]",
                                              "noise power [linear]",
                                              {{"measured", px, py, true}, {"linear fit", xs, ys}}})});
  r.check_targets(c.targets);
  return r;
}

// ---------------------------------------------------------------------------
// Squeezing / anti-squeezing versus optical loss

inline ScenarioReport run_fig4(const ScenarioConfig& c,
                               const std::optional<std::vector<MeasurementRecord>>& records = {}) {
  auto r = detail::start_report(c);
  const double g = c.number("gain");
  const double eta0 = c.number("eta0");
  const JitterAngle phi = JitterAngle::from_degrees(c.number("phi_deg"));
  const SidebandRatio w(c.number("omega_rel"));
  const PumpParam x = x_from_gain(g);
  const double loss_max = c.number("curve_loss_max");
  const int n_curve = detail::positive_int(c, "curve_points");
  if (!(loss_max > 0.0 && loss_max <= 1.0)) throw ConfigError("curve_loss_max must lie in (0, 1]");
  if (n_curve < 2) throw ConfigError("curve_points must be >= 2");
  const auto added = c.list("added_losses");
  if (added.empty()) throw ConfigError("added_losses must not be empty");
  const Efficiency setup(eta0);

  r.add("pump_parameter", x.value());

  // Model versus total loss.
  std::vector<std::vector<double>> total_rows;
  std::vector<double> tl, tsq, tanti;
  for (int i = 0; i < n_curve; ++i) {
    const double loss = loss_max * i / (n_curve - 1);
    const auto pair = observed_pair(x, w, Efficiency::from_loss(loss), phi);
    total_rows.push_back({loss, to_db(pair.v_minus), to_db(pair.v_plus)});
    tl.push_back(loss);
    tsq.push_back(total_rows.back()[1]);
    tanti.push_back(total_rows.back()[2]);
  }
  r.files.push_back(
      {"model_vs_total_loss.csv", detail::table_csv({"total_loss", "sq_db", "anti_db"}, total_rows)});

  // Model versus added loss at the setup efficiency, 0 .. 1 inclusive.
  std::vector<std::vector<double>> added_rows;
  bool monotone = true;
  for (int i = 0; i <= 100; ++i) {
    const double a = i / 100.0;
    const auto pair = observed_pair(x, w, Efficiency(eta0 * (1.0 - a)), phi);
    const double sq = to_db(pair.v_minus), anti = to_db(pair.v_plus);
    if (!added_rows.empty()) {
      monotone = monotone && sq > added_rows.back()[1] && anti < added_rows.back()[2];
    }
    added_rows.push_back({a, sq, anti});
  }
  r.files.push_back(
      {"model_vs_added_loss.csv", detail::table_csv({"added_loss", "sq_db", "anti_db"}, added_rows)});
  r.add("monotone_degradation", monotone ? 1.0 : 0.0);
  r.add("sq_db_at_full_loss", added_rows.back()[1], "dB");
  r.add("anti_db_at_full_loss", added_rows.back()[2], "dB");

  const double a_max = *std::max_element(added.begin(), added.end());
  {
    const auto pair = observed_pair(x, w, Efficiency(eta0 * (1.0 - a_max)), phi);
    r.add("sq_db_at_max_added_loss", to_db(pair.v_minus), "dB");
    r.add("sq_abs_db_at_max_added_loss", std::abs(to_db(pair.v_minus)), "dB");
    r.add("anti_db_at_max_added_loss", to_db(pair.v_plus), "dB");
  }
  {
    const auto pair = observed_pair(x, w, setup, phi);
    r.add("sq_db_at_setup", to_db(pair.v_minus), "dB");
    r.add("anti_db_at_setup", to_db(pair.v_plus), "dB");
  }

  // Measured (or synthetic) sweep and the single-parameter fit.
  std::vector<MeasurementRecord> data;
  if (records) {
    data = *records;
    r.notes.push_back("fit uses " + std::to_string(data.size()) + " ingested records");
  } else {
    data = synth_loss_sweep({setup, g, phi, w}, added, c.number("synth_noise_db"), c.seed());
    r.notes.push_back("no records supplied; fit uses a synthetic sweep generated at eta0 with "
                      "synth_noise_db Gaussian noise");
  }
  if (!data.empty()) {
    const auto fit = fit_loss_sweep(data, g, phi, w);
    r.add("fitted_eta0", fit.eta0.value());
    r.add("fit_rms_residual_db", fit.rms_residual_db, "dB");
    if (!records) r.add("fitted_eta0_error", fit.eta0.value() - eta0);
    std::vector<std::vector<double>> res_rows;
    for (std::size_t i = 0; i < data.size(); ++i)
      res_rows.push_back({data[i].added_loss, data[i].sq_db, data[i].anti_db,
                          fit.residuals[i].sq_db, fit.residuals[i].anti_db});
    r.files.push_back({"fit_residuals.csv",
                       detail::table_csv({"added_loss", "sq_db", "anti_db", "sq_residual_db",
                                          "anti_residual_db"},
                                         res_rows)});
    std::ostringstream csv;
    write_loss_sweep_csv(csv, data);
    r.files.push_back({"records.csv", csv.str()});
  }

  // Loss-limited reading of the observed squeezing at this gain.
  const double sq_obs = c.number("sq_obs_db");
  try {
    const auto eta = infer_loss_given_phi(g, sq_obs, JitterAngle{}, w);
    r.add("loss_limited_loss_pct", 100.0 * eta.loss(), "%");
    r.notes.push_back("loss-limited inversion of " + format_fixed(sq_obs, 2) + " dB at gain " +
                      format_fixed(g, 1) + " gives " + detail::pct(eta.loss()) +
                      " total loss; the reference upper bound is 8.6 %. The gap reflects model "
                      "inputs that are not pinned down (which squeezing level, measured "
                      "anti-squeezing, sideband ratio), not a fitted constant.");
  } catch (const InfeasibleError& e) {
    r.add("loss_limited_loss_pct", detail::nan(), "%");
    r.notes.push_back(std::string("loss-limited inversion infeasible: ") + e.what());
  }

  std::vector<double> ax, asq, aanti, px, psq, panti;
  for (const auto& row : added_rows) {
    ax.push_back(1.0 - eta0 * (1.0 - row[0]));
    asq.push_back(row[1]);
    aanti.push_back(row[2]);
  }
  for (const auto& rec : data) {
    px.push_back(1.0 - eta0 * (1.0 - rec.added_loss));
    psq.push_back(rec.sq_db);
    panti.push_back(rec.anti_db);
  }
  r.files.push_back({"fig4.svg", svg::render({"Squeezing and anti-squeezing vs optical loss",
                                              "total optical loss", "noise power [dB rel. vacuum]",
                                              {{"squeezing (model)", ax, asq},
                                               {"anti-squeezing (model)", ax, aanti},
                                               {"squeezing (data)", px, psq, true},
                                               {"anti-squeezing (data)", px, panti, true}}})});
  r.check_targets(c.targets);
  return r;
}

// ---------------------------------------------------------------------------
// Jitter bound, loss bracket and quantum efficiency

inline LossBudget upstream_budget(const ScenarioConfig& c) {
  CavityGeometry geom;
  geom.t_out = c.number("t_out");
  geom.l_rt = c.number("l_rt");
  return {{"escape", escape_efficiency(geom)},
          {"propagation", Efficiency(c.number("propagation_eta"))},
          {"visibility", visibility_efficiency(c.number("visibility"))}};
}

inline ScenarioReport run_bounds_analysis(const ScenarioConfig& c) {
  auto r = detail::start_report(c);
  const double g = c.number("gain");
  const SidebandRatio w(c.number("omega_rel"));
  const JitterAngle phi_upper = JitterAngle::from_degrees(c.number("phi_upper_deg"));

  SqueezePairDb high_pump{c.number("sq_950_db"), c.number("anti_950_db"),
                          c.number("sq_950_err_db"), c.number("anti_950_err_db")};
  const auto phi = infer_phase_jitter_interval(high_pump);
  r.add("phi_deg", rad_to_deg(phi.central), "deg");
  r.add("phi_deg_lo", rad_to_deg(phi.lo), "deg");
  r.add("phi_deg_hi", rad_to_deg(phi.hi), "deg");

  const auto budget = upstream_budget(c);
  r.add("upstream_efficiency", compose_efficiencies(budget).value());

  struct Variant {
    std::string suffix;
    double sq_db;
    double err_db;
  };
  const Variant variants[] = {{"raw", c.number("sq_raw_db"), c.number("sq_raw_err_db")},
                              {"corrected", c.number("sq_corrected_db"),
                               c.number("sq_corrected_err_db")}};

  const double floor = observed_pair(x_from_gain(g), w, Efficiency(1.0), phi_upper).v_minus;
  r.add("floor_db_at_gain_and_phi_upper", to_db(floor), "dB");

  for (const auto& v : variants) {
    try {
      const auto bounds = loss_bounds(g, v.sq_db, phi_upper, w);
      r.add("min_loss_pct_" + v.suffix, 100.0 * bounds.min_loss, "%");
      r.add("max_loss_pct_" + v.suffix, 100.0 * bounds.max_loss, "%");
      r.add("gain_at_min_loss_" + v.suffix, gain_from_x(PumpParam(bounds.pump_at_min_loss)));

      // +-1 sigma on the squeezing level; deeper squeezing means less loss.
      double min_lo = bounds.min_loss, min_hi = bounds.min_loss;
      double max_lo = bounds.max_loss, max_hi = bounds.max_loss;
      for (double s : {-v.err_db, v.err_db}) {
        try {
          const auto b = loss_bounds(g, v.sq_db + s, phi_upper, w);
          min_lo = std::min(min_lo, b.min_loss);
          min_hi = std::max(min_hi, b.min_loss);
          max_lo = std::min(max_lo, b.max_loss);
          max_hi = std::max(max_hi, b.max_loss);
        } catch (const InfeasibleError&) {
        }
      }
      r.add("min_loss_pct_" + v.suffix + "_lo", 100.0 * min_lo, "%");
      r.add("min_loss_pct_" + v.suffix + "_hi", 100.0 * min_hi, "%");
      r.add("max_loss_pct_" + v.suffix + "_lo", 100.0 * max_lo, "%");
      r.add("max_loss_pct_" + v.suffix + "_hi", 100.0 * max_hi, "%");

      const auto qe = infer_qe(bounds, budget);
      const std::string tag = v.suffix == "raw" ? "" : "_" + v.suffix;
      r.add("qe_min_pct" + tag, 100.0 * qe.qe_min, "%");
      r.add("qe_max_pct" + tag, 100.0 * qe.qe_max, "%");
      r.add("qe_mid_pct" + tag, 100.0 * qe.midpoint(), "%");
      r.add("qe_clamped" + tag, qe.clamped ? 1.0 : 0.0);

      r.notes.push_back("zero-jitter (loss-limited) total loss for the " + v.suffix + " level " +
                        format_fixed(v.sq_db, 2) + " dB at gain " + format_fixed(g, 1) + ": " +
                        detail::pct(bounds.max_loss) +
                        " under this model, against a reference of 8.6 %; which squeezing level, "
                        "anti-squeezing and sideband ratio produced the reference is ambiguous.");
    } catch (const InfeasibleError& e) {
      r.add("min_loss_pct_" + v.suffix, detail::nan(), "%");
      r.add("max_loss_pct_" + v.suffix, detail::nan(), "%");
      r.notes.push_back("loss bracket for the " + v.suffix + " level infeasible: " + e.what());
    }

    // The fixed-gain reading at the jitter bound, for comparison.
    try {
      const auto eta = infer_loss_given_phi(g, v.sq_db, phi_upper, w);
      r.add("fixed_gain_loss_pct_at_phi_upper_" + v.suffix, 100.0 * eta.loss(), "%");
    } catch (const InfeasibleError&) {
      r.add("fixed_gain_loss_pct_at_phi_upper_" + v.suffix, detail::nan(), "%");
      r.notes.push_back("at gain " + format_fixed(g, 1) + " with " +
                        format_fixed(phi_upper.degrees(), 2) + " deg jitter the squeezing floor is " +
                        format_fixed(to_db(floor), 3) + " dB, above the " + v.suffix + " level " +
                        format_fixed(v.sq_db, 2) +
                        " dB; the minimum-loss end therefore lets the pump level range up to that "
                        "gain (largest loss compatible with the jitter bound)");
    }
  }
  // Higher pump level variant.
  try {
    const auto b950 = loss_bounds(c.number("gain_950"), high_pump.sq_db, phi_upper, w);
    r.add("min_loss_pct_950", 100.0 * b950.min_loss, "%");
    r.add("max_loss_pct_950", 100.0 * b950.max_loss, "%");
  } catch (const InfeasibleError& e) {
    r.notes.push_back(std::string("high-pump loss bracket infeasible: ") + e.what());
  }

  // Jitter-limited loss as the jitter bound varies.
  std::vector<std::vector<double>> rows;
  std::vector<double> px, lraw, lcor;
  const double phi_max_deg = std::max(phi_upper.degrees(), 1e-9);
  for (int i = 0; i <= 40; ++i) {
    const double deg = phi_max_deg * 1.5 * i / 40.0;
    if (deg >= 45.0) break;
    std::vector<double> row{deg};
    for (const auto& v : variants) {
      try {
        row.push_back(100.0 * jitter_limited_loss(g, v.sq_db, JitterAngle::from_degrees(deg), w)
                                  .eta.loss());
      } catch (const InfeasibleError&) {
        row.push_back(detail::nan());
      }
    }
    px.push_back(row[0]);
    lraw.push_back(row[1]);
    lcor.push_back(row[2]);
    rows.push_back(row);
  }
  r.files.push_back({"loss_vs_jitter.csv",
                     detail::table_csv({"phi_deg", "loss_pct_raw", "loss_pct_corrected"}, rows)});
  r.files.push_back({"bounds.svg", svg::render({"Jitter-limited total loss", "phase jitter [deg]",
                                                "total optical loss [%]",
                                                {{"raw level", px, lraw}, {"corrected level", px, lcor}}})});
  r.check_targets(c.targets);
  return r;
}

inline ScenarioReport run_qe_budget(const ScenarioConfig& c) {
  auto r = detail::start_report(c);
  CavityGeometry geom;
  geom.t_out = c.number("t_out");
  geom.l_rt = c.number("l_rt");
  const auto escape = escape_efficiency(geom);
  const auto vis = visibility_efficiency(c.number("visibility"));
  const auto budget = upstream_budget(c);
  const auto upstream = compose_efficiencies(budget);
  r.add("escape_efficiency", escape.value());
  r.add("visibility_efficiency", vis.value());
  r.add("visibility_loss_pct", 100.0 * vis.loss(), "%");
  r.add("propagation_efficiency", c.number("propagation_eta"));
  r.add("upstream_efficiency", upstream.value());

  LossBounds total{c.number("total_min_loss"), c.number("total_max_loss"), 0.0};
  const auto qe = infer_qe(total, budget);
  r.add("qe_min_pct", 100.0 * qe.qe_min, "%");
  r.add("qe_max_pct", 100.0 * qe.qe_max, "%");
  r.add("qe_mid_pct", 100.0 * qe.midpoint(), "%");
  r.add("qe_clamped", qe.clamped ? 1.0 : 0.0);
  if (qe.clamped) r.notes.push_back("quantum efficiency exceeded 1 and was clamped");

  std::ostringstream csv;
  csv << "label,efficiency\n";
  for (const auto& e : budget) csv << e.label << ',' << format_number(e.eta.value()) << '\n';
  csv << "upstream_total," << format_number(upstream.value()) << '\n';
  r.files.push_back({"budget.csv", csv.str()});
  r.check_targets(c.targets);
  return r;
}

/// Dispatches on the config's scenario. `records` is only used by fig4.
inline ScenarioReport run_scenario(const ScenarioConfig& c,
                                   const std::optional<std::vector<MeasurementRecord>>& records = {}) {
  switch (c.id) {
    case ScenarioId::fig2_traces: return run_fig2(c);
    case ScenarioId::fig3_linearity: return run_fig3(c);
    case ScenarioId::fig4_loss_sweep: return run_fig4(c, records);
    case ScenarioId::bounds_analysis: return run_bounds_analysis(c);
    case ScenarioId::qe_budget: return run_qe_budget(c);
  }
  throw ConfigError("unknown scenario");
}

}  // namespace sqz
