#pragma once

// Forward model of a below-threshold degenerate OPO observed by a homodyne
// detector. All variances are linear and normalized to vacuum = 1; decibels
// appear only through to_db / from_db.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sqz/error.hpp"

namespace sqz {

inline constexpr double deg_to_rad(double deg) noexcept {
  return deg * std::numbers::pi / 180.0;
}

inline constexpr double rad_to_deg(double rad) noexcept {
  return rad * 180.0 / std::numbers::pi;
}

/// Normalized pump amplitude sqrt(P / P_threshold), below threshold only.
class PumpParam {
public:
  explicit PumpParam(double x) : x_(x) {
    if (!(x >= 0.0 && x < 1.0))
      throw DomainError("pump parameter must lie in [0, 1), got " + std::to_string(x));
  }
  double value() const noexcept { return x_; }

private:
  double x_;
};

/// Analysis sideband frequency over the OPO cavity half-linewidth.
class SidebandRatio {
public:
  SidebandRatio() = default;
  explicit SidebandRatio(double omega_rel) : w_(omega_rel) {
    if (!(omega_rel >= 0.0 && std::isfinite(omega_rel)))
      throw DomainError("sideband ratio must be finite and >= 0, got " +
                        std::to_string(omega_rel));
  }
  double value() const noexcept { return w_; }

private:
  double w_ = 0.0;
};

class Efficiency {
public:
  Efficiency() = default;
  explicit Efficiency(double eta) : eta_(eta) {
    if (!(eta >= 0.0 && eta <= 1.0))
      throw DomainError("efficiency must lie in [0, 1], got " + std::to_string(eta));
  }
  static Efficiency from_loss(double loss) {
    if (!(loss >= 0.0 && loss <= 1.0))
      throw DomainError("loss must lie in [0, 1], got " + std::to_string(loss));
    return Efficiency(1.0 - loss);
  }
  double value() const noexcept { return eta_; }
  double loss() const noexcept { return 1.0 - eta_; }

private:
  double eta_ = 1.0;
};

/// Deterministic homodyne phase error, radians in [0, pi/4).
class JitterAngle {
public:
  JitterAngle() = default;
  explicit JitterAngle(double radians) : phi_(radians) {
    if (!(radians >= 0.0 && radians < std::numbers::pi / 4))
      throw DomainError("jitter angle must lie in [0, 45) degrees, got " +
                        std::to_string(rad_to_deg(radians)) + " deg");
  }
  static JitterAngle from_degrees(double deg) { return JitterAngle(deg_to_rad(deg)); }
  double radians() const noexcept { return phi_; }
  double degrees() const noexcept { return rad_to_deg(phi_); }

private:
  double phi_ = 0.0;
};

/// Squeezed / anti-squeezed quadrature variances.
struct QuadraturePair {
  double v_minus = 1.0;
  double v_plus = 1.0;

  QuadraturePair() = default;
  QuadraturePair(double minus, double plus) : v_minus(minus), v_plus(plus) {
    if (!(minus > 0.0 && plus > 0.0 && minus <= plus))
      throw DomainError("quadrature pair requires 0 < v_minus <= v_plus");
  }
  double product() const noexcept { return v_minus * v_plus; }
};

struct LossEntry {
  std::string label;
  Efficiency eta;
};

using LossBudget = std::vector<LossEntry>;

struct CavityGeometry {
  double t_out = 0.0;  ///< output coupler power transmission
  double l_rt = 0.0;   ///< round-trip loss excluding the coupler
  std::optional<double> finesse;
  std::optional<double> linewidth_hz;

  void validate() const {
    if (!(t_out >= 0.0 && t_out <= 1.0))
      throw DomainError("output coupler transmission must lie in [0, 1]");
    if (!(l_rt >= 0.0 && l_rt < 1.0))
      throw DomainError("round-trip loss must lie in [0, 1)");
    if (finesse && !(*finesse > 0.0)) throw DomainError("finesse must be positive");
    if (linewidth_hz && !(*linewidth_hz > 0.0))
      throw DomainError("linewidth must be positive");
  }

  /// FSR = finesse x linewidth, when both are known.
  std::optional<double> free_spectral_range_hz() const {
    if (finesse && linewidth_hz) return *finesse * *linewidth_hz;
    return std::nullopt;
  }
};

// ---------------------------------------------------------------------------
// Pump / gain

inline PumpParam x_from_gain(double g) {
  if (!(g >= 1.0 && std::isfinite(g)))
    throw DomainError("parametric gain must be finite and >= 1, got " + std::to_string(g));
  return PumpParam(1.0 - 1.0 / std::sqrt(g));
}

inline double gain_from_x(PumpParam x) {
  const double d = 1.0 - x.value();
  return 1.0 / (d * d);
}

// ---------------------------------------------------------------------------
// Quadrature variances

/// Fraction of vacuum noise removed from the squeezed quadrature at unit
/// efficiency: 4x / ((1+x)^2 + w^2).
inline double squeezing_strength(PumpParam x, SidebandRatio w) noexcept {
  const double xv = x.value(), wv = w.value();
  return 4.0 * xv / ((1.0 + xv) * (1.0 + xv) + wv * wv);
}

/// Excess noise added to the anti-squeezed quadrature at unit efficiency:
/// 4x / ((1-x)^2 + w^2).
inline double antisqueezing_strength(PumpParam x, SidebandRatio w) noexcept {
  const double xv = x.value(), wv = w.value();
  return 4.0 * xv / ((1.0 - xv) * (1.0 - xv) + wv * wv);
}

/// v_minus = 1 - eta 4x/((1+x)^2 + w^2), v_plus = 1 + eta 4x/((1-x)^2 + w^2).
/// v_minus is evaluated as ((1-x)^2 + w^2 + 4x(1-eta)) / ((1+x)^2 + w^2),
/// which stays accurate near threshold where the direct form cancels. It is
/// capped at 1 so that rounding at eta ~ 0 cannot push it past v_plus.
inline QuadraturePair variance_pair(PumpParam x, SidebandRatio w, Efficiency eta) {
  const double xv = x.value(), w2 = w.value() * w.value();
  const double e = eta.value();
  const double lo = (1.0 - xv) * (1.0 - xv) + w2;
  const double hi = (1.0 + xv) * (1.0 + xv) + w2;
  const double v_minus = std::min((lo + 4.0 * xv * eta.loss()) / hi, 1.0);
  const double v_plus = 1.0 + e * 4.0 * xv / lo;
  return QuadraturePair(v_minus, v_plus);
}

/// Beam-splitter loss: mixes in (1 - eta) of vacuum.
inline double apply_loss(double v, Efficiency eta) {
  if (!(v > 0.0)) throw DomainError("variance must be positive");
  const double e = eta.value();
  return e * v + (1.0 - e);
}

inline Efficiency compose_efficiencies(std::span<const LossEntry> budget) noexcept {
  double eta = 1.0;
  for (const auto& entry : budget) eta *= entry.eta.value();
  return Efficiency(eta);
}

inline Efficiency escape_efficiency(const CavityGeometry& geom) {
  geom.validate();
  const double total = geom.t_out + geom.l_rt;
  if (!(total > 0.0))
    throw DomainError("escape efficiency undefined for a cavity with no coupling and no loss");
  return Efficiency(geom.t_out / total);
}

/// Mode-matching efficiency of a homodyne detector with fringe visibility `vis`.
inline Efficiency visibility_efficiency(double vis) {
  if (!(vis >= 0.0 && vis <= 1.0)) throw DomainError("visibility must lie in [0, 1]");
  return Efficiency(vis * vis);
}

inline double quadrature_variance_at_angle(const QuadraturePair& pair, double theta) noexcept {
  const double c = std::cos(theta), s = std::sin(theta);
  return pair.v_minus * c * c + pair.v_plus * s * s;
}

/// Fixed homodyne phase error `phi` leaks anti-squeezing into the squeezed
/// quadrature and vice versa. Preserves v_minus + v_plus.
inline QuadraturePair apply_phase_jitter(const QuadraturePair& pair, JitterAngle phi) {
  const double s = std::sin(phi.radians());
  const double s2 = s * s;
  const double c2 = 1.0 - s2;
  return QuadraturePair(pair.v_minus * c2 + pair.v_plus * s2,
                        pair.v_plus * c2 + pair.v_minus * s2);
}

// ---------------------------------------------------------------------------
// Decibels relative to vacuum

inline double to_db(double v) {
  if (!(v > 0.0)) throw DomainError("decibel conversion requires a positive level");
  return 10.0 * std::log10(v);
}

inline double from_db(double db) noexcept { return std::pow(10.0, db / 10.0); }

/// Removes electronic dark noise from a level measured relative to the
/// uncorrected vacuum trace. Both arguments in dB relative to that trace.
inline double dark_noise_correct(double meas_db, double dark_db) {
  const double meas = from_db(meas_db);
  const double dark = from_db(dark_db);
  if (!(dark < 1.0))
    throw DomainError("dark noise must lie below the vacuum level");
  if (!(meas > dark))
    throw DomainError("dark-noise correction undefined: measured level at or below dark level");
  return to_db((meas - dark) / (1.0 - dark));
}

/// Balanced-homodyne shot noise is linear in LO power.
inline double shot_noise_power(double p_lo_mw, double slope, double dark) {
  if (!(p_lo_mw >= 0.0)) throw DomainError("LO power must be >= 0");
  if (!(slope > 0.0)) throw DomainError("shot-noise slope must be positive");
  if (!(dark >= 0.0)) throw DomainError("dark power must be >= 0");
  return slope * p_lo_mw + dark;
}

// ---------------------------------------------------------------------------

/// Full forward chain: OPO output, total efficiency, phase jitter.
inline QuadraturePair observed_pair(PumpParam x, SidebandRatio w, Efficiency eta,
                                    JitterAngle phi) {
  return apply_phase_jitter(variance_pair(x, w, eta), phi);
}

}  // namespace sqz
