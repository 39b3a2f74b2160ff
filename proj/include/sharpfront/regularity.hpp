#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "sharpfront/delay_stepper.hpp"
#include "sharpfront/errors.hpp"
#include "sharpfront/numerics/interp.hpp"
#include "sharpfront/params.hpp"
#include "sharpfront/phase_plane.hpp"

namespace sharpfront {

/// Smoothness class C^{gamma, alpha} of the sharp front at its edge.
struct RegularityClass {
  double ratio = 0.0;  // (p-1)/(m(p-1)-1)
  int gamma = 0;
  double alpha = 0.0;
  bool is_C1 = false;
  bool is_integer_case = false;
};

inline RegularityClass regularity_class(const ModelParams& mp) {
  mp.validate();
  RegularityClass rc;
  rc.ratio = (mp.p - 1.0) / (mp.mp1() - 1.0);
  const double nearest = std::round(rc.ratio);
  rc.is_integer_case = std::abs(rc.ratio - nearest) < 1e-9;
  rc.gamma = rc.is_integer_case ? static_cast<int>(nearest) - 1 : static_cast<int>(std::floor(rc.ratio));
  rc.alpha = rc.is_integer_case ? 1.0 : rc.ratio - rc.gamma;
  rc.is_C1 = rc.ratio > 1.0 && !(rc.is_integer_case && nearest == 1.0);
  return rc;
}

struct EdgeFit {
  double exponent = 0.0;
  double coefficient = 0.0;
  double r2 = 0.0;
  int samples = 0;
  double phi_min = 0.0, phi_max = 0.0;
};

/// Log-log fit of phi against edge distance t over phi in [phi_min, phi_max].
/// Window bounds <= 0 select [1e-6 K, 1e-3 K].
inline EdgeFit fit_edge_exponent(const WaveProfile& profile, double K, double phi_min = 0.0,
                                 double phi_max = 0.0) {
  if (!(phi_min > 0.0)) phi_min = 1e-6 * K;
  if (!(phi_max > 0.0)) phi_max = 1e-3 * K;
  std::vector<double> x, y;
  for (std::size_t i = 0; i < profile.size(); ++i) {
    const double phi = profile.phi[i], t = profile.t[i];
    if (phi < phi_min || phi > phi_max || !(t > 0.0)) continue;
    x.push_back(std::log(t));
    y.push_back(std::log(phi));
  }
  if (x.size() < 16)
    throw WindowTooSparse("edge window holds " + std::to_string(x.size()) + " samples (need 16)");
  const numerics::LineFit f = numerics::fit_line(x, y);
  EdgeFit e;
  e.exponent = f.slope;
  e.coefficient = std::exp(f.intercept);
  e.r2 = f.r2;
  e.samples = static_cast<int>(x.size());
  e.phi_min = phi_min;
  e.phi_max = phi_max;
  return e;
}

struct DecayFit {
  double rate = 0.0;
  DecayKind fitted_kind = DecayKind::Exponential;
  bool kind_match = false;
  double r2_exponential = 0.0;
  double r2_algebraic = 0.0;
  double t_shift = 0.0;  // algebraic model origin
  int samples = 0;
};

/// Tail fit over K - phi in [lo, hi] (defaults [1e-5 K, 1e-2 K]): semilog for
/// exponential decay, log-log in t - t0 for algebraic decay, with t0 from the
/// linear growth of (K - phi)/phi'.
inline DecayFit fit_equilibrium_decay(const WaveProfile& profile, const ModelParams& mp, double K,
                                      const EquilibriumAsymptotics& asym, double lo = 0.0,
                                      double hi = 0.0) {
  if (!(lo > 0.0)) lo = 1e-5 * K;
  if (!(hi > 0.0)) hi = 1e-2 * K;
  std::vector<double> t, gap, ratio;
  double gap_min = K;
  for (std::size_t i = 0; i < profile.size(); ++i) {
    const double g = K - profile.phi[i];
    gap_min = std::min(gap_min, g);
    if (g < lo || g > hi || !(profile.psi[i] > 0.0)) continue;
    const double dphi = std::pow(profile.psi[i], mp.q()) / (mp.m * std::pow(profile.phi[i], mp.m - 1.0));
    t.push_back(profile.t[i]);
    gap.push_back(g);
    ratio.push_back(g / dphi);
  }
  if (t.size() < 16 || gap_min > 2.0 * lo)
    throw TailTooShort("profile does not resolve the tail window K - phi in [" +
                       std::to_string(lo) + ", " + std::to_string(hi) + "]");
  std::vector<double> log_gap(gap.size());
  for (std::size_t i = 0; i < gap.size(); ++i) log_gap[i] = std::log(gap[i]);

  const numerics::LineFit semilog = numerics::fit_line(t, log_gap);
  const numerics::LineFit shift_fit = numerics::fit_line(t, ratio);
  DecayFit d;
  d.samples = static_cast<int>(t.size());
  d.r2_exponential = semilog.r2;
  double alg_rate = 0.0;
  if (shift_fit.slope > 0.0) {
    d.t_shift = -shift_fit.intercept / shift_fit.slope;
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t[i] - d.t_shift <= 0.0) continue;
      lx.push_back(std::log(t[i] - d.t_shift));
      ly.push_back(log_gap[i]);
    }
    if (lx.size() >= 16) {
      const numerics::LineFit loglog = numerics::fit_line(lx, ly);
      d.r2_algebraic = loglog.r2;
      alg_rate = -loglog.slope;
    }
  }
  d.fitted_kind = d.r2_algebraic > d.r2_exponential ? DecayKind::Algebraic : DecayKind::Exponential;
  d.rate = d.fitted_kind == DecayKind::Algebraic ? alg_rate : -semilog.slope;
  d.kind_match = d.fitted_kind == asym.decay_kind;
  return d;
}

}  // namespace sharpfront
