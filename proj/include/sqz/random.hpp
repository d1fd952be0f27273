#pragma once

// Portable seeded sampling. std::mt19937_64 output is fixed by the standard;
// the library distributions are not, so normal and gamma variates are drawn
// here to keep datasets bit-identical across standard libraries.

#include <cmath>
#include <cstdint>
#include <random>

namespace sqz {

using RandomEngine = std::mt19937_64;

/// SplitMix64 finalizer.
inline constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Independent stream `index` derived from a user seed.
inline constexpr std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return mix64(mix64(seed) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

inline RandomEngine make_engine(std::uint64_t seed, std::uint64_t stream) {
  return RandomEngine(stream_seed(seed, stream));
}

/// Uniform in [0, 1) with 53 random bits.
inline double uniform01(RandomEngine& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Standard normal, Marsaglia polar method (second variate discarded so each
/// call consumes a self-contained run of engine outputs).
inline double standard_normal(RandomEngine& rng) {
  for (;;) {
    const double u = 2.0 * uniform01(rng) - 1.0;
    const double v = 2.0 * uniform01(rng) - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
  }
}

/// Gamma(shape, 1), Marsaglia-Tsang. Shapes below 1 use the boost
/// Gamma(shape + 1) * U^(1/shape).
inline double gamma_variate(RandomEngine& rng, double shape) {
  if (shape < 1.0) {
    double u;
    do u = uniform01(rng);
    while (u == 0.0);
    return gamma_variate(rng, shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = standard_normal(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform01(rng);
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (u > 0.0 && std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

}  // namespace sqz
