#pragma once

#include <optional>
#include <string>
#include <vector>

namespace sqz {

/// One point of a shot-noise-versus-LO-power calibration.
struct ShotNoisePoint {
  double lo_power_mw = 0.0;
  double power = 0.0;  ///< linear noise power, arbitrary units

  bool operator==(const ShotNoisePoint&) const = default;
};

/// One squeezing / anti-squeezing observation with an optional
/// deliberately introduced loss in front of the detector.
struct MeasurementRecord {
  double added_loss = 0.0;
  double sq_db = 0.0;
  double anti_db = 0.0;
  double sq_err_db = 0.0;
  double anti_err_db = 0.0;
  std::optional<double> lo_power_mw;
  std::optional<double> pump_mw;  ///< metadata only, never a model input

  bool operator==(const MeasurementRecord&) const = default;
};

/// Zero-span analyzer trace.
struct Trace {
  std::vector<double> times;      ///< seconds, strictly increasing
  std::vector<double> levels_db;  ///< dB relative to vacuum
  std::string label;

  bool operator==(const Trace&) const = default;
};

}  // namespace sqz
