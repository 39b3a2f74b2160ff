#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sharpfront/delay_stepper.hpp"
#include "sharpfront/errors.hpp"
#include "sharpfront/kinetics.hpp"
#include "sharpfront/params.hpp"
#include "sharpfront/phase_plane.hpp"

namespace sharpfront {

struct BisectionStep {
  double c = 0.0;
  ClassKind kind = ClassKind::ConvergesMonotone;
  double c_lo = 0.0;  // bracket after this step
  double c_hi = 0.0;
};

struct SpeedResult {
  double c_lo = 0.0;
  double c_hi = 0.0;
  double c_star = 0.0;
  int iterations = 0;
  Classification lo_class;
  Classification hi_class;
  std::vector<BisectionStep> trace;
  std::optional<WaveProfile> profile_at_c_star;
  std::optional<PhaseCurve> curve_at_c_star;
  std::string method;
};

struct SpeedOptions {
  double tol = 1e-4;  // relative bracket width
  int max_iter = 60;
  int horizon_escalations = 4;
  double phi_launch = 1e-8;  // r = 0 shooting launch, relative to K
  bool build_profile = true;
  ProfileOptions profile{};
};

/// Method-of-steps classification with geometric escalation of t_max.
inline Classification classify_speed(const ModelParams& mp, const Kinetics& kin, double c,
                                     const SpeedOptions& opt = {}) {
  if (!(c > 0.0)) throw InvalidArgument("classify_speed: c must be positive");
  ProfileOptions po = opt.profile;
  if (!(po.t_max > 0.0)) po.t_max = default_t_max(mp, kin, c);
  for (int k = 0; k <= opt.horizon_escalations; ++k) {
    try {
      return construct_profile(mp, kin, c, po).classification;
    } catch (const InconclusiveHorizon&) {
      po.t_max *= 4.0;
    }
  }
  throw Inconclusive("classification at c = " + std::to_string(c) +
                     " still open after horizon escalation");
}

/// r = 0 phase-curve classification: psi hits 0 before K => DecaysToZero,
/// psi(K + delta_K) > 0 => ExceedsK.
inline Classification classify_nodelay(const ModelParams& mp, const Kinetics& kin, double c,
                                       const SpeedOptions& opt = {}) {
  const double K = kin.K();
  const double dK = opt.profile.delta_K > 0.0 ? opt.profile.delta_K : 1e-6 * K;
  auto src = [&](double phi) { return kin.b(phi) - kin.d(phi); };
  const PhaseShot s = shoot_sharp(mp, c, opt.phi_launch * K, K + dK, src);
  if (s.end == ShotEnd::Failed) throw StepFailure("phase shooting failed at c = " + std::to_string(c));
  Classification cl;
  cl.event_time = s.t_end;
  cl.terminal_phi = s.phi_end;
  if (s.end == ShotEnd::ReachedStop) cl.kind = ClassKind::ExceedsK;
  else cl.kind = s.phi_end > K - dK ? ClassKind::ConvergesMonotone : ClassKind::DecaysToZero;
  return cl;
}

namespace detail {

using Classifier = std::function<Classification(double)>;

inline SpeedResult bisect_speed(const Classifier& classify, const SpeedOptions& opt) {
  if (!(opt.tol > 0.0)) throw InvalidArgument("tol must be positive");
  SpeedResult res;
  auto record = [&](double c, ClassKind k) { res.trace.push_back({c, k, res.c_lo, res.c_hi}); };

  // resolves a band classification by probing just below and above
  auto decide = [&](double c, Classification cl, double& c_lo, Classification& lo,
                    double& c_hi, Classification& hi) {
    if (cl.kind == ClassKind::DecaysToZero) {
      c_lo = c;
      lo = cl;
      return;
    }
    if (cl.kind == ClassKind::ExceedsK) {
      c_hi = c;
      hi = cl;
      return;
    }
    const double below = c * (1.0 - opt.tol / 4.0), above = c * (1.0 + opt.tol / 4.0);
    const Classification cb = classify(below), ca = classify(above);
    if (cb.kind != ClassKind::DecaysToZero || ca.kind != ClassKind::ExceedsK)
      throw Inconclusive("classification band around c = " + std::to_string(c) +
                         " is wider than the tolerance");
    c_lo = below;
    lo = cb;
    c_hi = above;
    hi = ca;
  };

  // initial bracket from c = 1
  double c_lo = 0.0, c_hi = 0.0;
  Classification lo, hi;
  Classification c1 = classify(1.0);
  decide(1.0, c1, c_lo, lo, c_hi, hi);
  res.c_lo = c_lo;
  res.c_hi = c_hi;
  record(1.0, c1.kind);
  while (c_hi == 0.0) {
    const double c = 2.0 * c_lo;
    if (c > std::ldexp(1.0, 20)) throw BracketNotFound("no ExceedsK speed up to 2^20");
    const Classification cl = classify(c);
    decide(c, cl, c_lo, lo, c_hi, hi);
    res.c_lo = c_lo;
    res.c_hi = c_hi;
    record(c, cl.kind);
  }
  while (c_lo == 0.0) {
    const double c = 0.5 * c_hi;
    if (c < std::ldexp(1.0, -20)) throw BracketNotFound("no DecaysToZero speed down to 2^-20");
    const Classification cl = classify(c);
    decide(c, cl, c_lo, lo, c_hi, hi);
    res.c_lo = c_lo;
    res.c_hi = c_hi;
    record(c, cl.kind);
  }

  int it = 0;
  while (c_hi - c_lo > opt.tol * 0.5 * (c_lo + c_hi) && it < opt.max_iter) {
    const double mid = 0.5 * (c_lo + c_hi);
    const Classification cl = classify(mid);
    decide(mid, cl, c_lo, lo, c_hi, hi);
    ++it;
    res.c_lo = c_lo;
    res.c_hi = c_hi;
    record(mid, cl.kind);
  }
  res.iterations = it;
  res.lo_class = lo;
  res.hi_class = hi;
  res.c_star = 0.5 * (c_lo + c_hi);
  return res;
}

}  // namespace detail

/// Critical profile for r = 0 at speed c: forward sharp launch to K/2 joined
/// with a backward shot from the K-asymptotics, so the saddle at K is
/// approached along its stable direction.
inline std::pair<WaveProfile, PhaseCurve> critical_profile_nodelay(const ModelParams& mp,
                                                                   const Kinetics& kin, double c,
                                                                   double phi_launch = 1e-9,
                                                                   double anchor = 1e-7) {
  const ModelParams m0 = mp.with_delay(0.0);
  m0.validate();
  const double K = kin.K();
  auto src = [&](double phi) { return kin.b(phi) - kin.d(phi); };
  ShootOptions so;
  so.h_max_rel = 0.25;
  so.h_max = K / 200.0;
  const double phi_match = 0.5 * K;
  const PhaseShot fwd = shoot_sharp(m0, c, phi_launch * K, phi_match, src, so);
  if (fwd.end != ShotEnd::ReachedStop)
    throw StepFailure("forward launch did not reach K/2 at c = " + std::to_string(c));

  const EquilibriumAsymptotics as = asymptotics_at_K(m0, kin, c);
  const double eta = anchor * K;
  const double phi_a = K - eta;
  const double psi_a = as.kappa * std::pow(eta, as.psi_exponent);
  ShootOptions sb;
  sb.h_max = K / 200.0;
  const PhaseShot bwd = shoot_phase(m0, c, phi_a, psi_a, 0.0, phi_match, src, sb);
  if (bwd.end != ShotEnd::ReachedStop)
    throw StepFailure("backward shot from K did not reach K/2 at c = " + std::to_string(c));
  // bwd samples are increasing in phi; bwd.t is measured from the anchor
  const double shift = fwd.t_end - bwd.t.front();

  WaveProfile prof;
  PhaseCurve curve;
  prof.c = curve.c = c;
  for (std::size_t i = 0; i < fwd.curve.size(); ++i) {
    prof.t.push_back(fwd.t[i]);
    prof.phi.push_back(fwd.curve.phi[i]);
    prof.psi.push_back(fwd.curve.psi[i]);
    curve.phi.push_back(fwd.curve.phi[i]);
    curve.psi.push_back(fwd.curve.psi[i]);
    curve.slope.push_back(fwd.curve.slope[i]);
  }
  for (std::size_t i = 1; i < bwd.curve.size(); ++i) {
    prof.t.push_back(bwd.t[i] + shift);
    prof.phi.push_back(bwd.curve.phi[i]);
    prof.psi.push_back(bwd.curve.psi[i]);
    curve.phi.push_back(bwd.curve.phi[i]);
    curve.psi.push_back(bwd.curve.psi[i]);
    curve.slope.push_back(bwd.curve.slope[i]);
  }
  // close the phase curve at (K, 0); the slope there is left to the secant
  curve.phi.push_back(K);
  curve.psi.push_back(0.0);
  curve.slope.push_back(std::numeric_limits<double>::quiet_NaN());
  prof.classification = {ClassKind::ConvergesMonotone, prof.t.back(), prof.phi.back(), false};
  prof.steps_completed = 1;
  return {std::move(prof), std::move(curve)};
}

inline SpeedResult critical_speed(const ModelParams& mp, const Kinetics& kin,
                                  const SpeedOptions& opt = {}) {
  mp.validate();
  SpeedResult res = detail::bisect_speed(
      [&](double c) { return classify_speed(mp, kin, c, opt); }, opt);
  res.method = "method_of_steps";
  if (opt.build_profile) {
    if (mp.r == 0.0) {
      auto [prof, curve] = critical_profile_nodelay(mp, kin, res.c_star);
      res.profile_at_c_star = std::move(prof);
      res.curve_at_c_star = std::move(curve);
    } else {
      ProfileOptions po = opt.profile;
      try {
        res.profile_at_c_star = construct_profile(mp, kin, res.c_star, po);
      } catch (const InconclusiveHorizon&) {
      }
    }
  }
  return res;
}

/// r = 0 reduction solved by phase-curve shooting. With force = true a
/// delayed parameter set is reduced to r = 0.
inline SpeedResult critical_speed_nodelay(const ModelParams& mp, const Kinetics& kin,
                                          const SpeedOptions& opt = {}, bool force = false) {
  mp.validate();
  if (mp.r != 0.0 && !force)
    throw InvalidArgument("critical_speed_nodelay requires r = 0 (or force the reduction)");
  const ModelParams m0 = mp.with_delay(0.0);
  SpeedResult res = detail::bisect_speed(
      [&](double c) { return classify_nodelay(m0, kin, c, opt); }, opt);
  res.method = "phase_shooting";
  if (opt.build_profile) {
    auto [prof, curve] = critical_profile_nodelay(m0, kin, res.c_star);
    res.profile_at_c_star = std::move(prof);
    res.curve_at_c_star = std::move(curve);
  }
  return res;
}

/// r = 0 phase curve at a supercritical speed: the smooth branch, which
/// leaves 0 like psi_coeff * phi^{m(p-1)}. Shot backward from the
/// K-asymptotics down to phi_min.
inline PhaseCurve smooth_phase_curve(const ModelParams& mp, const Kinetics& kin, double c,
                                     double phi_min_rel = 1e-6, double anchor = 1e-7) {
  const ModelParams m0 = mp.with_delay(0.0);
  const double K = kin.K();
  auto src = [&](double phi) { return kin.b(phi) - kin.d(phi); };
  const EquilibriumAsymptotics as = asymptotics_at_K(m0, kin, c);
  const double eta = anchor * K;
  ShootOptions sb;
  sb.h_max = K / 200.0;
  const PhaseShot s = shoot_phase(m0, c, K - eta, as.kappa * std::pow(eta, as.psi_exponent), 0.0,
                                  phi_min_rel * K, src, sb);
  if (s.end != ShotEnd::ReachedStop)
    throw StepFailure("smooth branch did not reach phi_min at c = " + std::to_string(c));
  return s.curve;
}

}  // namespace sharpfront
