#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sharpfront/errors.hpp"
#include "sharpfront/kinetics.hpp"
#include "sharpfront/numerics/dopri.hpp"
#include "sharpfront/numerics/interp.hpp"
#include "sharpfront/numerics/quadrature.hpp"
#include "sharpfront/params.hpp"
#include "sharpfront/phase_plane.hpp"

namespace sharpfront {

enum class ClassKind { ExceedsK, DecaysToZero, ConvergesMonotone };

inline const char* to_string(ClassKind k) {
  switch (k) {
    case ClassKind::ExceedsK: return "ExceedsK";
    case ClassKind::DecaysToZero: return "DecaysToZero";
    case ClassKind::ConvergesMonotone: return "ConvergesMonotone";
  }
  return "?";
}

struct Classification {
  ClassKind kind = ClassKind::ConvergesMonotone;
  double event_time = 0.0;
  double terminal_phi = 0.0;
  bool growth_guard = false;  // ExceedsK decided by the sustained-growth guard
};

/// Candidate wave (t, phi(t), psi(t)) with the edge at t = 0.
struct WaveProfile {
  double c = 0.0;
  std::vector<double> t;
  std::vector<double> phi;
  std::vector<double> psi;
  Classification classification;
  int steps_completed = 0;

  bool empty() const { return t.empty(); }
  std::size_t size() const { return t.size(); }
};

// ---------------------------------------------------------------------------
// Travel time along a phase curve: T(phi) = int_0^phi m s^{m-1} / psi(s)^{1/(p-1)} ds.

class TravelTime {
 public:
  TravelTime(const ModelParams& mp, const PhaseCurve& curve)
      : mp_(mp), psi_(curve), phi_(curve.phi), gl_(numerics::gauss_legendre(8)) {
    const std::size_t n = curve.size();
    if (n < 2 || curve.phi.front() != 0.0) throw InvalidArgument("TravelTime: curve must start at phi = 0");
    cum_.assign(n, 0.0);
    // first interval: psi ~ slope * s
    const double s0 = curve.slope.size() == n && std::isfinite(curve.slope[0]) && curve.slope[0] > 0
                          ? curve.slope[0]
                          : curve.psi[1] / curve.phi[1];
    const double e = mp.m - mp.q();
    cum_[1] = mp.m / std::pow(s0, mp.q()) * std::pow(curve.phi[1], e) / e;
    for (std::size_t i = 2; i < n; ++i) cum_[i] = cum_[i - 1] + partial(i - 1, curve.phi[i]);
  }

  double total() const { return cum_.back(); }
  double phi_max() const { return phi_.back(); }

  double operator()(double phi) const {
    if (phi <= 0.0) return 0.0;
    if (phi >= phi_.back()) return cum_.back();
    const std::size_t i = numerics::locate(phi_, phi);
    if (i == 0) {
      const double e = mp_.m - mp_.q();
      return cum_[1] * std::pow(phi / phi_[1], e);
    }
    return cum_[i] + partial(i, phi);
  }

  /// Inverse of T on [0, phi_max].
  double inverse(double t) const {
    if (t <= 0.0) return 0.0;
    if (t >= cum_.back()) return phi_.back();
    const auto it = std::upper_bound(cum_.begin(), cum_.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - cum_.begin()) - 1;
    return numerics::bisect([&](double ph) { return (*this)(ph) - t; }, phi_[i], phi_[i + 1], 1e-15);
  }

 private:
  double integrand(double s) const {
    return mp_.m * std::pow(s, mp_.m - 1.0) / std::pow(std::max(psi_(s), 1e-300), mp_.q());
  }
  double partial(std::size_t i, double hi) const {
    const double lo = phi_[i];
    const double mid = 0.5 * (lo + hi), rad = 0.5 * (hi - lo);
    double sum = 0.0;
    for (std::size_t j = 0; j < gl_.nodes.size(); ++j)
      sum += gl_.weights[j] * integrand(mid + rad * gl_.nodes[j]);
    return rad * sum;
  }

  ModelParams mp_;
  PhaseCurveInterpolant psi_;
  std::vector<double> phi_;
  numerics::QuadratureRule gl_;
  std::vector<double> cum_;
};

/// Profile value one delay time upstream, expressed in phase variables.
inline double delayed_phase_value(const TravelTime& T, const ModelParams& mp, double phi, double c) {
  const double cr = c * mp.r;
  if (cr <= 0.0) return phi;
  const double t = T(phi) - cr;
  if (t <= 0.0) return 0.0;
  return T.inverse(t);
}

inline double delayed_phase_value(const PhaseCurve& curve, const ModelParams& mp, double phi,
                                  double c) {
  if (c * mp.r <= 0.0) return phi;
  return delayed_phase_value(TravelTime(mp, curve), mp, phi, c);
}

// ---------------------------------------------------------------------------
// Method of steps

struct ProfileOptions {
  double t_max = 0.0;    // 0 selects 50 c r + 100 / lambda_est
  double delta_K = 0.0;  // 0 selects 1e-6 K
  double delta_0 = 0.0;  // unused for sharp launches
  double rtol = 1e-10;
  double atol = 1e-12;
  double phi_switch = 1e-3;  // r = 0: phase launch up to phi_switch * K, then t-domain
  int growth_window = 10;
  LadderOptions ladder{};
};

namespace detail {

/// Cubic Hermite history phi(t) on accepted knots, with the edge expansion
/// before the first knot and zero for t < 0.
class History {
 public:
  explicit History(EdgeExpansion edge) : edge_(edge) {}

  void push(double t, double phi, double dphi) {
    if (!t_.empty() && t <= t_.back()) return;
    t_.push_back(t);
    phi_.push_back(phi);
    dphi_.push_back(dphi);
  }

  double operator()(double t) const {
    if (t <= 0.0) return 0.0;
    if (t_.empty() || t <= t_.front()) return edge_.phi_at(t);
    if (t >= t_.back()) return phi_.back();
    const std::size_t i = numerics::locate(t_, t);
    const double h = t_[i + 1] - t_[i];
    const double s = (t - t_[i]) / h;
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * phi_[i] + (s3 - 2 * s2 + s) * h * dphi_[i] +
           (-2 * s3 + 3 * s2) * phi_[i + 1] + (s3 - s2) * h * dphi_[i + 1];
  }

  double t_last() const { return t_.empty() ? 0.0 : t_.back(); }

 private:
  EdgeExpansion edge_;
  std::vector<double> t_, phi_, dphi_;
};

inline double signed_pow(double x, double e) {
  return x >= 0.0 ? std::pow(x, e) : -std::pow(-x, e);
}

}  // namespace detail

/// Default horizon 50 c r + 100 / lambda_est.
inline double default_t_max(const ModelParams& mp, const Kinetics& kin, double c) {
  double lam = 0.5;
  try {
    lam = asymptotics_at_K(mp, kin, c).lambda;
  } catch (const Error&) {
  }
  return 50.0 * c * mp.r + 100.0 / std::max(lam, 1e-3);
}

inline WaveProfile construct_profile(const ModelParams& mp, const Kinetics& kin, double c,
                                     const ProfileOptions& opt = {}) {
  mp.validate();
  if (!(c > 0.0)) throw InvalidArgument("construct_profile: c must be positive");
  const double K = kin.K(), m = mp.m, q = mp.q();
  const double dK = opt.delta_K > 0.0 ? opt.delta_K : 1e-6 * K;
  const double t_max = opt.t_max > 0.0 ? opt.t_max : default_t_max(mp, kin, c);
  const double cr = c * mp.r;
  const EdgeExpansion edge = sharp_edge_expansion(mp, c);

  WaveProfile prof;
  prof.c = c;
  auto classify_end = [&](ClassKind k, double t, double phi) {
    prof.classification = {k, t, phi, false};
  };
  auto dphi_of = [&](double phi, double psi) {
    return detail::signed_pow(psi, q) / (m * std::pow(std::max(phi, 1e-300), m - 1.0));
  };

  detail::History hist(edge);
  auto append = [&](double t, double phi, double psi) {
    prof.t.push_back(t);
    prof.phi.push_back(phi);
    prof.psi.push_back(psi);
    if (phi > 0.0) hist.push(t, phi, dphi_of(phi, psi));
  };

  // ---- first piece: sharp launch off the edge
  double t0 = 0.0;
  if (cr > 0.0) {
    DelaySegment seg;
    try {
      seg = initial_delay_segment(mp, kin, c, opt.ladder);
    } catch (const SegmentDiesOut&) {
      // the flux dies inside the first delay interval: decays within one step
      auto src = [&](double phi) { return -kin.d(phi); };
      const PhaseShot s = shoot_sharp(mp, c, 1e-8 * K, 1e6 * std::max(K, 1.0), src, {}, cr);
      for (std::size_t i = 0; i < s.curve.size(); ++i) append(s.t[i], s.curve.phi[i], s.curve.psi[i]);
      classify_end(ClassKind::DecaysToZero, s.t_end, s.phi_end);
      return prof;
    }
    for (std::size_t i = 0; i < seg.curve.size(); ++i)
      append(seg.t[i], seg.curve.phi[i], seg.curve.psi[i]);
    prof.steps_completed = 1;
    t0 = cr;
    if (seg.phi_end >= K + dK) {
      classify_end(ClassKind::ExceedsK, t0, seg.phi_end);
      return prof;
    }
  } else {
    auto src = [&](double phi) { return kin.b(phi) - kin.d(phi); };
    ShootOptions so;
    so.h_max_rel = 0.25;
    const double phi_sw = opt.phi_switch * K;
    const PhaseShot s = shoot_sharp(mp, c, 1e-9 * K, phi_sw, src, so);
    for (std::size_t i = 0; i < s.curve.size(); ++i) append(s.t[i], s.curve.phi[i], s.curve.psi[i]);
    if (s.end == ShotEnd::HitZero) {
      classify_end(ClassKind::DecaysToZero, s.t_end, s.phi_end);
      return prof;
    }
    if (s.end == ShotEnd::Failed) throw StepFailure("edge launch failed near phi = 0");
    t0 = s.t_end;
  }

  // ---- t-domain continuation of [phi, psi]
  auto rhs = [&](double t, const numerics::Vec<2>& y) {
    const double phi = std::max(y[0], 1e-300);
    const double dphi = dphi_of(phi, y[1]);
    const double phi_del = cr > 0.0 ? hist(t - cr) : phi;
    return numerics::Vec<2>{dphi, c * dphi + kin.d(phi) - kin.b(phi_del)};
  };

  numerics::DopriOptions dopt;
  dopt.rtol = opt.rtol;
  dopt.atol = opt.atol;
  if (cr > 0.0) dopt.h_max = cr / 4.0;

  numerics::Vec<2> y{prof.phi.back(), prof.psi.back()};
  double t = t0;
  int growth_run = 0;
  double psi_prev = y[1];
  bool done = false;
  while (!done) {
    const double t_seg = cr > 0.0 ? std::min(t + cr, t_max) : t_max;
    auto observer = [&](const numerics::DenseStep<2>& st) {
      const double t1 = st.t1();
      const double phi1 = st.y1[0], psi1 = st.y1[1];
      if (psi1 <= 0.0) {
        const double th = numerics::bisect([&](double tt) { return st.at(tt)[1]; }, st.t0, t1, 1e-15);
        const auto yh = st.at(th);
        append(th, yh[0], 0.0);
        classify_end(yh[0] > K - dK ? ClassKind::ConvergesMonotone : ClassKind::DecaysToZero, th, yh[0]);
        done = true;
        ++prof.steps_completed;
        return false;
      }
      if (phi1 >= K + dK) {
        const double th =
            numerics::bisect([&](double tt) { return st.at(tt)[0] - (K + dK); }, st.t0, t1, 1e-15);
        const auto yh = st.at(th);
        append(th, yh[0], yh[1]);
        classify_end(ClassKind::ExceedsK, th, yh[0]);
        done = true;
        ++prof.steps_completed;
        return false;
      }
      // dense samples so that the stored profile resolves the step
      for (int k = 1; k < 4; ++k) {
        const double tk = st.t0 + st.h * k / 4.0;
        const auto yk = st.at(tk);
        if (yk[1] > 0.0 && yk[0] > 0.0) {
          prof.t.push_back(tk);
          prof.phi.push_back(yk[0]);
          prof.psi.push_back(yk[1]);
        }
      }
      append(t1, phi1, psi1);
      // sustained growth of psi near K with slope d psi/d phi >= c - eps
      if (phi1 > K - dK && psi1 > psi_prev) {
        const double slope = (c * st.f1[0] + kin.d(phi1) - kin.b(cr > 0.0 ? hist(t1 - cr) : phi1)) /
                             std::max(st.f1[0], 1e-300);
        growth_run = slope >= c - 1e-6 ? growth_run + 1 : 0;
      } else {
        growth_run = 0;
      }
      psi_prev = psi1;
      if (growth_run >= opt.growth_window) {
        classify_end(ClassKind::ExceedsK, t1, phi1);
        prof.classification.growth_guard = true;
        done = true;
        return false;
      }
      return true;
    };
    const auto res = numerics::dopri5<2>(rhs, t, y, t_seg, dopt, observer);
    if (done) break;
    if (res.status != numerics::IntegrationStatus::Completed)
      throw StepFailure("integrator failed at t = " + std::to_string(res.t) +
                        ", phi = " + std::to_string(res.y[0]));
    t = res.t;
    y = res.y;
    if (cr > 0.0 || t >= t_max) ++prof.steps_completed;
    if (t >= t_max) {
      if (y[0] > K - dK) {
        classify_end(ClassKind::ConvergesMonotone, t, y[0]);
        break;
      }
      throw InconclusiveHorizon("t_max = " + std::to_string(t_max) + " reached at phi = " +
                                std::to_string(y[0]) + " below the K band");
    }
  }
  return prof;
}

/// Reparametrizes a profile by phi. Requires phi strictly increasing.
inline PhaseCurve profile_to_phase_curve(const WaveProfile& profile) {
  PhaseCurve curve;
  curve.c = profile.c;
  if (profile.empty()) return curve;
  for (std::size_t i = 1; i < profile.size(); ++i)
    if (!(profile.phi[i] > profile.phi[i - 1]))
      throw NotMonotone("profile is not strictly increasing at t = " + std::to_string(profile.t[i]));
  curve.phi = profile.phi;
  curve.psi = profile.psi;
  return curve;
}

/// Largest |t_i - T(phi_i)| between the profile and the travel time
/// reconstructed from its own phase curve.
inline double round_trip_error(const ModelParams& mp, const WaveProfile& profile) {
  const PhaseCurve curve = profile_to_phase_curve(profile);
  const TravelTime T(mp, curve);
  double err = 0.0;
  for (std::size_t i = 0; i < profile.size(); ++i) err = std::max(err, std::abs(T(profile.phi[i]) - profile.t[i]));
  return err;
}

}  // namespace sharpfront
