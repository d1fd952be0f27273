#pragma once

// Seeded synthetic measurements: zero-span analyzer traces, added-loss
// sweeps and shot-noise calibration points. Every output is a pure function
// of its arguments; each trace / record / point draws from its own stream.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sqz/error.hpp"
#include "sqz/noise_model.hpp"
#include "sqz/random.hpp"
#include "sqz/records.hpp"

namespace sqz {

struct AnalyzerSettings {
  double rbw_hz = 100e3;
  double vbw_hz = 100.0;
  int n_traces = 3;
  int n_points = 601;
  double span_s = 1.0;

  void validate() const {
    if (!(rbw_hz > 0.0)) throw DomainError("RBW must be positive");
    if (!(vbw_hz > 0.0)) throw DomainError("VBW must be positive");
    if (n_traces < 1) throw DomainError("at least one averaged trace is required");
    if (n_points < 2) throw DomainError("a trace needs at least two points");
    if (!(span_s > 0.0)) throw DomainError("sweep span must be positive");
  }
};

/// Cap on the number of independent power estimates averaged per sample.
inline constexpr double kMaxAveragingShape = 1e15;

/// Effective number of averaged exponential power estimates per displayed
/// sample: n_traces * RBW / (2 VBW), at least 1.
inline double averaging_shape(const AnalyzerSettings& s) {
  s.validate();
  const double k = static_cast<double>(s.n_traces) * s.rbw_hz / (2.0 * s.vbw_hz);
  return std::clamp(std::round(k), 1.0, kMaxAveragingShape);
}

/// Standard deviation in dB of a displayed sample, small-fluctuation limit.
inline double expected_trace_sigma_db(const AnalyzerSettings& s) {
  return 10.0 / std::log(10.0) / std::sqrt(averaging_shape(s));
}

/// Zero-span trace around a mean level. Samples are the mean power scaled by
/// Gamma(k, 1/k), the distribution of an average of k exponential estimates.
inline Trace synth_trace(double mean_db, const AnalyzerSettings& settings, std::uint64_t seed,
                         std::string label = {}) {
  const double k = averaging_shape(settings);
  const double mean = from_db(mean_db);
  auto rng = make_engine(seed, 0);

  Trace out;
  out.label = std::move(label);
  const auto n = static_cast<std::size_t>(settings.n_points);
  out.times.reserve(n);
  out.levels_db.reserve(n);
  const double dt = settings.span_s / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    out.times.push_back(dt * static_cast<double>(i));
    out.levels_db.push_back(to_db(mean * gamma_variate(rng, k) / k));
  }
  return out;
}

/// Arithmetic mean of a trace in linear power, returned in dB.
inline double trace_mean_db(const Trace& trace) {
  if (trace.levels_db.empty()) throw DomainError("empty trace");
  double acc = 0.0;
  for (double db : trace.levels_db) acc += from_db(db);
  return to_db(acc / static_cast<double>(trace.levels_db.size()));
}

/// Sample standard deviation of the dB levels.
inline double trace_stddev_db(const Trace& trace) {
  const auto n = trace.levels_db.size();
  if (n < 2) throw DomainError("standard deviation needs at least two samples");
  double mean = 0.0;
  for (double db : trace.levels_db) mean += db;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double db : trace.levels_db) ss += (db - mean) * (db - mean);
  return std::sqrt(ss / static_cast<double>(n - 1));
}

struct SweepTruth {
  Efficiency eta0;
  double gain = 63.0;
  JitterAngle phi;
  SidebandRatio omega_rel;
};

/// Forward-model records at each added loss, perturbed by independent
/// Gaussian noise of `noise_db` in both quadratures.
inline std::vector<MeasurementRecord> synth_loss_sweep(const SweepTruth& truth,
                                                       std::span<const double> added_losses,
                                                       double noise_db, std::uint64_t seed,
                                                       std::optional<double> lo_power_mw = {},
                                                       std::optional<double> pump_mw = {}) {
  if (!(noise_db >= 0.0)) throw DomainError("noise scale must be >= 0");
  const PumpParam x = x_from_gain(truth.gain);
  std::vector<MeasurementRecord> out;
  out.reserve(added_losses.size());
  for (std::size_t i = 0; i < added_losses.size(); ++i) {
    const double a = added_losses[i];
    if (!(a >= 0.0 && a < 1.0)) throw DomainError("added loss must lie in [0, 1)");
    const auto pair =
        observed_pair(x, truth.omega_rel, Efficiency(truth.eta0.value() * (1.0 - a)), truth.phi);
    MeasurementRecord rec;
    rec.added_loss = a;
    rec.sq_db = to_db(pair.v_minus);
    rec.anti_db = to_db(pair.v_plus);
    if (noise_db > 0.0) {
      auto rng = make_engine(seed, i);
      rec.sq_db += noise_db * standard_normal(rng);
      rec.anti_db += noise_db * standard_normal(rng);
    }
    rec.sq_err_db = noise_db;
    rec.anti_err_db = noise_db;
    rec.lo_power_mw = lo_power_mw;
    rec.pump_mw = pump_mw;
    out.push_back(rec);
  }
  return out;
}

/// Shot-noise calibration points with relative Gaussian scatter.
inline std::vector<ShotNoisePoint> synth_shotnoise_points(double slope, double dark,
                                                          std::span<const double> lo_powers_mw,
                                                          double rel_noise, std::uint64_t seed) {
  if (!(rel_noise >= 0.0)) throw DomainError("relative noise must be >= 0");
  std::vector<ShotNoisePoint> out;
  out.reserve(lo_powers_mw.size());
  for (std::size_t i = 0; i < lo_powers_mw.size(); ++i) {
    const double p = lo_powers_mw[i];
    double power = shot_noise_power(p, slope, dark);
    if (rel_noise > 0.0) {
      auto rng = make_engine(seed, i);
      power *= 1.0 + rel_noise * standard_normal(rng);
    }
    out.push_back({p, power});
  }
  return out;
}

}  // namespace sqz
