#pragma once

#include <sstream>

#include "sharpfront/errors.hpp"

namespace sharpfront {

/// Exponents of the doubly nonlinear flux |(u^m)_x|^{p-2}(u^m)_x and the
/// birth delay r. Valid instances satisfy the slow-diffusion constraint
/// m(p-1) > 1.
struct ModelParams {
  double m = 2.0;
  double p = 2.0;
  double r = 0.0;

  static ModelParams make(double m, double p, double r = 0.0) {
    ModelParams mp = unchecked(m, p, r);
    mp.validate();
    return mp;
  }

  /// Skips the regime check; for probing error paths.
  static ModelParams unchecked(double m, double p, double r = 0.0) {
    ModelParams mp;
    mp.m = m;
    mp.p = p;
    mp.r = r;
    return mp;
  }

  double mp1() const { return m * (p - 1.0); }
  /// Exponent 1/(p-1) relating flux to (phi^m)'.
  double q() const { return 1.0 / (p - 1.0); }
  ModelParams with_delay(double delay) const { return unchecked(m, p, delay); }

  void validate() const {
    if (!(m > 0.0) || !(p > 1.0) || !(r >= 0.0)) {
      std::ostringstream os;
      os << "invalid model parameters m=" << m << " p=" << p << " r=" << r
         << " (need m>0, p>1, r>=0)";
      throw InvalidRegime(os.str());
    }
    if (!(mp1() > 1.0)) {
      std::ostringstream os;
      os << "slow-diffusion regime violated: m(p-1) = " << mp1() << " must exceed 1";
      throw InvalidRegime(os.str());
    }
  }
};

}  // namespace sharpfront
