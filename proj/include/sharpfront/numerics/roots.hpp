#pragma once

#include <cmath>
#include <optional>
#include <utility>

namespace sharpfront::numerics {

/// Bisection on a bracket [lo, hi] with f(lo) and f(hi) of opposite sign.
/// Stops when the bracket width is below rel_tol * max(1, |mid|) or after
/// max_iter halvings; returns the midpoint of the final bracket.
template <typename F>
double bisect(F&& f, double lo, double hi, double rel_tol = 1e-14,
              int max_iter = 200) {
  double f_lo = f(lo);
  if (f_lo == 0.0) return lo;
  for (int i = 0; i < max_iter; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= rel_tol * std::max(1.0, std::abs(mid))) return mid;
    const double f_mid = f(mid);
    if (f_mid == 0.0) return mid;
    if ((f_mid < 0.0) == (f_lo < 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Searches for a sign change of f starting from [lo, hi] by doubling the
/// right end, up to `max_hi`. Returns the bracket when found.
template <typename F>
std::optional<std::pair<double, double>> expand_right(F&& f, double lo, double hi,
                                                      double max_hi) {
  const bool neg_lo = f(lo) < 0.0;
  while (hi <= max_hi) {
    if ((f(hi) < 0.0) != neg_lo) return std::make_pair(lo, hi);
    lo = hi;
    hi *= 2.0;
  }
  return std::nullopt;
}

/// Positive root of a function that is negative at 0+ and increasing;
/// bracket starts at [1e-12, 1] and doubles the right end up to 2^60.
template <typename F>
std::optional<double> positive_root(F&& f) {
  auto bracket = expand_right(f, 1e-12, 1.0, std::ldexp(1.0, 60));
  if (!bracket) return std::nullopt;
  return bisect(f, bracket->first, bracket->second, 1e-15);
}

}  // namespace sharpfront::numerics
