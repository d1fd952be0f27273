#pragma once

// Inverse problems on the forward model: phase-jitter bound, loss bracket,
// photodiode quantum efficiency, and the two calibration fits.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sqz/error.hpp"
#include "sqz/noise_model.hpp"
#include "sqz/records.hpp"
#include "sqz/solvers.hpp"

namespace sqz {

/// Measured squeezing / anti-squeezing levels in dB relative to vacuum.
struct SqueezePairDb {
  double sq_db;
  double anti_db;
  std::optional<double> sq_err_db;
  std::optional<double> anti_err_db;

  void validate() const {
    if (!(sq_db < 0.0 && anti_db > 0.0))
      throw DomainError("squeezing pair requires sq_db < 0 < anti_db");
    if (sq_err_db && !(*sq_err_db >= 0.0)) throw DomainError("sq_err_db must be >= 0");
    if (anti_err_db && !(*anti_err_db >= 0.0)) throw DomainError("anti_err_db must be >= 0");
  }
};

struct LossBounds {
  double min_loss = 0.0;
  double max_loss = 0.0;
  /// Pump level at which the jitter-limited (minimum) loss is attained.
  double pump_at_min_loss = 0.0;
};

/// Central value with an interval from +-1 sigma input endpoints.
struct Estimate {
  double central;
  double lo;
  double hi;
};

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;
  double r_squared = 0.0;
};

struct QeEstimate {
  double qe_min = 0.0;
  double qe_max = 0.0;
  bool clamped = false;  ///< at least one endpoint exceeded 1 and was clamped

  double midpoint() const noexcept { return 0.5 * (qe_min + qe_max); }
};

struct SweepResidual {
  double sq_db;    ///< model - measured
  double anti_db;  ///< model - measured
};

struct LossSweepFit {
  Efficiency eta0;
  std::vector<SweepResidual> residuals;
  double rms_residual_db = 0.0;
};

// ---------------------------------------------------------------------------
// Phase jitter

/// Jitter that would turn a lossless, minimum-uncertainty state with the
/// measured anti-squeezing into the measured squeezing.
inline JitterAngle infer_phase_jitter_lossless(const SqueezePairDb& pair) {
  pair.validate();
  const double v_plus = from_db(pair.anti_db);
  const double v_minus = 1.0 / v_plus;
  const double v_obs = from_db(pair.sq_db);
  double frac = (v_obs - v_minus) / (v_plus - v_minus);
  if (frac < 0.0) {
    // dB round-off on an exact minimum-uncertainty pair.
    if (v_minus - v_obs <= 1e-12 * v_minus) {
      frac = 0.0;
    } else {
      throw InfeasibleError(
          "observed squeezing is deeper than the minimum-uncertainty partner of the "
          "anti-squeezing; no phase jitter reproduces it",
          v_minus);
    }
  }
  return JitterAngle(std::asin(std::sqrt(frac)));
}

/// Jitter estimate with an interval over the +-1 sigma corners of the inputs.
/// Corners that are infeasible are skipped.
inline Estimate infer_phase_jitter_interval(const SqueezePairDb& pair) {
  const double central = infer_phase_jitter_lossless(pair).radians();
  const double ds = pair.sq_err_db.value_or(0.0);
  const double da = pair.anti_err_db.value_or(0.0);
  Estimate out{central, central, central};
  for (double s : {-ds, ds}) {
    for (double a : {-da, da}) {
      SqueezePairDb corner{pair.sq_db + s, pair.anti_db + a, {}, {}};
      if (!(corner.sq_db < 0.0 && corner.anti_db > 0.0)) continue;
      try {
        const double phi = infer_phase_jitter_lossless(corner).radians();
        out.lo = std::min(out.lo, phi);
        out.hi = std::max(out.hi, phi);
      } catch (const InfeasibleError&) {
        out.lo = 0.0;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Optical loss

namespace detail {

inline void check_loss_inputs(double g, double sq_obs_db) {
  if (!(g > 1.0 && std::isfinite(g))) throw DomainError("parametric gain must exceed 1");
  if (!(sq_obs_db < 0.0)) throw DomainError("observed squeezing must be below 0 dB");
}

/// Net squeezing coefficient D with v_minus' = 1 - eta D at jitter phi.
inline double jittered_squeezing_strength(PumpParam x, SidebandRatio w, JitterAngle phi) {
  const double s = std::sin(phi.radians());
  const double s2 = s * s;
  return (1.0 - s2) * squeezing_strength(x, w) - s2 * antisqueezing_strength(x, w);
}

/// Net anti-squeezing coefficient A with v_plus' = 1 + eta A at jitter phi.
inline double jittered_antisqueezing_strength(PumpParam x, SidebandRatio w, JitterAngle phi) {
  const double s = std::sin(phi.radians());
  const double s2 = s * s;
  return (1.0 - s2) * antisqueezing_strength(x, w) - s2 * squeezing_strength(x, w);
}

}  // namespace detail

/// Efficiency at a given pump level that reproduces the observed squeezing.
inline Efficiency infer_efficiency_at_pump(PumpParam x, double sq_obs_db, JitterAngle phi,
                                           SidebandRatio w) {
  if (!(sq_obs_db < 0.0)) throw DomainError("observed squeezing must be below 0 dB");
  const double target = from_db(sq_obs_db);
  auto residual = [&](double eta) {
    return observed_pair(x, w, Efficiency(eta), phi).v_minus - target;
  };
  const double at_full = residual(1.0);
  if (at_full > 0.0) {
    const double floor = at_full + target;
    throw InfeasibleError("observed squeezing " + std::to_string(sq_obs_db) +
                              " dB is deeper than the model floor " +
                              std::to_string(to_db(floor)) + " dB at unit efficiency",
                          floor);
  }
  // residual(0) = 1 - target > 0, so [0, 1] brackets the root.
  return Efficiency(bisect(residual, 0.0, 1.0, 1e-12));
}

/// Total efficiency reproducing `sq_obs_db` at parametric gain `g` with a
/// fixed homodyne phase error `phi`. Loss is 1 - result.
inline Efficiency infer_loss_given_phi(double g, double sq_obs_db, JitterAngle phi,
                                       SidebandRatio w = SidebandRatio{}) {
  detail::check_loss_inputs(g, sq_obs_db);
  return infer_efficiency_at_pump(x_from_gain(g), sq_obs_db, phi, w);
}

struct PumpLossEstimate {
  Efficiency eta;
  PumpParam x;
};

/// Largest total loss compatible with the observed squeezing when the phase
/// error is `phi` and the OPO may run at any gain up to `g_max`.
///
/// With v_minus' = 1 - eta D(x), the loss is largest where D peaks. D is
/// concave on [0, 1) so the peak is found by golden section; at phi = 0, D is
/// increasing and the peak sits at g_max, which reduces this to
/// infer_loss_given_phi(g_max, ...).
inline PumpLossEstimate jitter_limited_loss(double g_max, double sq_obs_db, JitterAngle phi,
                                            SidebandRatio w = SidebandRatio{}) {
  detail::check_loss_inputs(g_max, sq_obs_db);
  const double x_max = x_from_gain(g_max).value();
  const double x_best = golden_section_max(
      [&](double x) { return detail::jittered_squeezing_strength(PumpParam(x), w, phi); }, 0.0,
      x_max, 1e-13);
  const PumpParam x(x_best);
  return {infer_efficiency_at_pump(x, sq_obs_db, phi, w), x};
}

/// Loss bracket: the lower end lets phase jitter up to `phi_upper` explain part
/// of the degradation, the upper end attributes it all to loss at gain g.
inline LossBounds loss_bounds(double g, double sq_obs_db, JitterAngle phi_upper,
                              SidebandRatio w = SidebandRatio{}) {
  const Efficiency lossless_jitter = infer_loss_given_phi(g, sq_obs_db, JitterAngle{}, w);
  const PumpLossEstimate jittered = jitter_limited_loss(g, sq_obs_db, phi_upper, w);
  LossBounds out;
  out.max_loss = lossless_jitter.loss();
  out.min_loss = std::min(jittered.eta.loss(), out.max_loss);
  out.pump_at_min_loss = jittered.x.value();
  return out;
}

// ---------------------------------------------------------------------------
// Quantum efficiency

inline QeEstimate infer_qe(const LossBounds& total, std::span<const LossEntry> upstream) {
  if (!(total.min_loss >= 0.0 && total.min_loss <= total.max_loss && total.max_loss <= 1.0))
    throw DomainError("loss bounds must satisfy 0 <= min <= max <= 1");
  const double upstream_eta = compose_efficiencies(upstream).value();
  if (!(upstream_eta > 0.0)) throw DomainError("upstream efficiency is zero");
  QeEstimate out;
  out.qe_min = (1.0 - total.max_loss) / upstream_eta;
  out.qe_max = (1.0 - total.min_loss) / upstream_eta;
  if (out.qe_max > 1.0) {
    out.clamped = true;
    out.qe_max = 1.0;
    out.qe_min = std::min(out.qe_min, 1.0);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Calibration fits

/// Ordinary least squares of power against LO power.
inline LinearFit fit_linear_shotnoise(std::span<const ShotNoisePoint> points) {
  const auto n = static_cast<double>(points.size());
  if (points.size() < 2) throw DegenerateFitError("linear fit needs at least two points");

  double mean_x = 0.0, mean_y = 0.0;
  for (const auto& p : points) {
    mean_x += p.lo_power_mw;
    mean_y += p.power;
  }
  mean_x /= n;
  mean_y /= n;

  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& p : points) {
    const double dx = p.lo_power_mw - mean_x, dy = p.power - mean_y;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0))
    throw DegenerateFitError("linear fit needs at least two distinct LO powers");

  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = mean_y - fit.slope * mean_x;
  double ss_res = 0.0;
  for (const auto& p : points) {
    const double r = p.power - (fit.slope * p.lo_power_mw + fit.intercept);
    ss_res += r * r;
  }
  fit.rms_residual = std::sqrt(ss_res / n);
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  return fit;
}

namespace detail {

struct SweepModel {
  PumpParam x;
  SidebandRatio w;
  JitterAngle phi;
  double sq_strength;    // D
  double anti_strength;  // A

  SweepModel(PumpParam x_, SidebandRatio w_, JitterAngle phi_)
      : x(x_),
        w(w_),
        phi(phi_),
        sq_strength(jittered_squeezing_strength(x_, w_, phi_)),
        anti_strength(jittered_antisqueezing_strength(x_, w_, phi_)) {}

  QuadraturePair at(double eta0, double added_loss) const {
    return observed_pair(x, w, Efficiency(eta0 * (1.0 - added_loss)), phi);
  }
};

// Sum of squared dB residuals and its derivative in eta0.
inline std::pair<double, double> sweep_objective(const SweepModel& model,
                                                 std::span<const MeasurementRecord> records,
                                                 double eta0) {
  constexpr double db_per_neper = 10.0 / std::numbers::ln10;
  double s = 0.0, ds = 0.0;
  for (const auto& rec : records) {
    const auto pair = model.at(eta0, rec.added_loss);
    const double keep = 1.0 - rec.added_loss;
    const double r_sq = to_db(pair.v_minus) - rec.sq_db;
    const double r_anti = to_db(pair.v_plus) - rec.anti_db;
    const double d_sq = db_per_neper * (-keep * model.sq_strength) / pair.v_minus;
    const double d_anti = db_per_neper * (keep * model.anti_strength) / pair.v_plus;
    s += r_sq * r_sq + r_anti * r_anti;
    ds += 2.0 * (r_sq * d_sq + r_anti * d_anti);
  }
  return {s, ds};
}

}  // namespace detail

/// Fits the setup efficiency eta0 in front of the added loss, so that each
/// record sees eta0 (1 - added_loss). Minimizes squared dB residuals of both
/// quadratures.
inline LossSweepFit fit_loss_sweep(std::span<const MeasurementRecord> records, double g,
                                   JitterAngle phi = JitterAngle{},
                                   SidebandRatio w = SidebandRatio{}) {
  if (records.empty()) throw DomainError("loss-sweep fit needs at least one record");
  for (const auto& rec : records)
    if (!(rec.added_loss >= 0.0 && rec.added_loss < 1.0))
      throw DomainError("added loss must lie in [0, 1)");
  const detail::SweepModel model(x_from_gain(g), w, phi);
  auto objective = [&](double eta0) { return detail::sweep_objective(model, records, eta0); };

  // Coarse scan for the global basin, then bisection on the derivative.
  constexpr int n_grid = 1000;
  int best = 0;
  double best_s = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= n_grid; ++i) {
    const double s = objective(static_cast<double>(i) / n_grid).first;
    if (s < best_s) {
      best_s = s;
      best = i;
    }
  }
  const double lo = static_cast<double>(std::max(best - 1, 0)) / n_grid;
  const double hi = static_cast<double>(std::min(best + 1, n_grid)) / n_grid;
  const double d_lo = objective(lo).second, d_hi = objective(hi).second;

  double eta0 = static_cast<double>(best) / n_grid;
  if (d_lo < 0.0 && d_hi > 0.0) {
    eta0 = bisect([&](double e) { return objective(e).second; }, lo, hi, 1e-15);
  } else if (best == n_grid && d_hi < 0.0) {
    eta0 = 1.0;
  } else if (best == 0 && d_lo > 0.0) {
    eta0 = 0.0;
  }

  LossSweepFit fit{Efficiency(eta0), {}, 0.0};
  double ss = 0.0;
  for (const auto& rec : records) {
    const auto pair = model.at(eta0, rec.added_loss);
    SweepResidual r{to_db(pair.v_minus) - rec.sq_db, to_db(pair.v_plus) - rec.anti_db};
    ss += r.sq_db * r.sq_db + r.anti_db * r.anti_db;
    fit.residuals.push_back(r);
  }
  fit.rms_residual_db = std::sqrt(ss / (2.0 * static_cast<double>(records.size())));
  return fit;
}

}  // namespace sqz
