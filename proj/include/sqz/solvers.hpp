#pragma once

// Small one-dimensional solvers used by the inference routines.

#include <cmath>
#include <concepts>
#include <stdexcept>

namespace sqz {

struct Bracket {
  double lo;
  double hi;
};

/// Bisection for f(x) = 0 on [lo, hi]. The caller guarantees a sign change;
/// this is checked and std::invalid_argument thrown otherwise. Stops when the
/// interval is narrower than `width` or f hits zero exactly.
template <std::invocable<double> F>
double bisect(F&& f, double lo, double hi, double width = 1e-12) {
  double f_lo = f(lo);
  const double f_hi = f(hi);
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if (std::signbit(f_lo) == std::signbit(f_hi))
    throw std::invalid_argument("bisect: interval does not bracket a root");

  // 200 halvings take any finite double interval below one ulp.
  for (int iter = 0; iter < 200 && hi - lo > width; ++iter) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    const double f_mid = f(mid);
    if (f_mid == 0.0) return mid;
    if (std::signbit(f_mid) == std::signbit(f_lo)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return lo + 0.5 * (hi - lo);
}

/// Golden-section search for the maximum of a unimodal function on [lo, hi].
template <std::invocable<double> F>
double golden_section_max(F&& f, double lo, double hi, double width = 1e-12) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int iter = 0; iter < 300 && b - a > width; ++iter) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  const double mid = 0.5 * (a + b);
  // Endpoints can win for monotone functions.
  const double f_mid = f(mid), f_lo = f(lo), f_hi = f(hi);
  if (f_lo > f_mid && f_lo >= f_hi) return lo;
  if (f_hi > f_mid) return hi;
  return mid;
}

}  // namespace sqz
