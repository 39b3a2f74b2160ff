#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "sharpfront/errors.hpp"
#include "sharpfront/kinetics.hpp"
#include "sharpfront/numerics/dopri.hpp"
#include "sharpfront/numerics/interp.hpp"
#include "sharpfront/numerics/roots.hpp"
#include "sharpfront/params.hpp"

namespace sharpfront {

/// Flux variable psi = |(phi^m)'|^{p-2}(phi^m)' as a function of phi.
/// `slope` holds d psi / d phi at the samples when known (may be empty).
struct PhaseCurve {
  std::vector<double> phi;
  std::vector<double> psi;
  std::vector<double> slope;
  double c = 0.0;

  bool empty() const { return phi.empty(); }
  std::size_t size() const { return phi.size(); }
  double phi_max() const { return phi.empty() ? 0.0 : phi.back(); }
};

/// Piecewise cubic evaluation of a PhaseCurve; clamps outside the sampled
/// range.
class PhaseCurveInterpolant {
 public:
  explicit PhaseCurveInterpolant(const PhaseCurve& curve) {
    if (curve.size() < 2) throw InvalidArgument("phase curve needs at least two samples");
    std::vector<double> slope = curve.slope;
    if (slope.size() != curve.size()) slope = numerics::pchip_slopes(curve.phi, curve.psi);
    for (std::size_t i = 0; i < slope.size(); ++i) {
      if (std::isfinite(slope[i])) continue;
      const std::size_t j = i == 0 ? 0 : i - 1;
      slope[i] = (curve.psi[j + 1] - curve.psi[j]) / (curve.phi[j + 1] - curve.phi[j]);
    }
    interp_ = numerics::HermiteInterpolant(curve.phi, curve.psi, std::move(slope));
    lo_ = curve.phi.front();
    hi_ = curve.phi.back();
    psi_lo_ = curve.psi.front();
    psi_hi_ = curve.psi.back();
  }

  double operator()(double phi) const {
    if (phi <= lo_) return psi_lo_;
    if (phi >= hi_) return psi_hi_;
    return interp_(phi);
  }
  double lo() const { return lo_; }
  double hi() const { return hi_; }

 private:
  numerics::HermiteInterpolant interp_;
  double lo_ = 0, hi_ = 0, psi_lo_ = 0, psi_hi_ = 0;
};

// ---------------------------------------------------------------------------
// Closed-form asymptotics

/// Leading behaviour of the sharp profile at its edge:
/// phi(t) ~ coefficient * t^exponent, psi(phi) ~ psi_slope * phi.
struct EdgeExpansion {
  double exponent = 0.0;
  double coefficient = 0.0;
  double psi_slope = 0.0;

  double phi_at(double t) const { return t <= 0.0 ? 0.0 : coefficient * std::pow(t, exponent); }
  double time_at(double phi) const {
    return phi <= 0.0 ? 0.0 : std::pow(phi / coefficient, 1.0 / exponent);
  }
};

inline EdgeExpansion sharp_edge_expansion(const ModelParams& mp, double c) {
  mp.validate();
  if (!(c > 0.0)) throw InvalidArgument("sharp_edge_expansion: c must be positive");
  const double k = mp.mp1();
  EdgeExpansion e;
  e.exponent = (mp.p - 1.0) / (k - 1.0);
  e.coefficient = std::pow(std::pow(c, mp.q()) * (k - 1.0) / k, e.exponent);
  e.psi_slope = c;
  return e;
}

enum class PCase { PEq2, PGt2, PLt2 };
enum class DecayKind { Exponential, Algebraic };

inline const char* to_string(PCase c) {
  switch (c) {
    case PCase::PEq2: return "p=2";
    case PCase::PGt2: return "p>2";
    case PCase::PLt2: return "1<p<2";
  }
  return "?";
}
inline const char* to_string(DecayKind k) {
  return k == DecayKind::Exponential ? "Exponential" : "Algebraic";
}

/// psi(phi) ~ kappa (K - phi)^psi_exponent as phi -> K-, with the profile
/// approaching K at rate lambda (exponential) or like (1 + lambda t)^{-p/(2-p)}.
struct EquilibriumAsymptotics {
  PCase pcase = PCase::PEq2;
  double lambda = 0.0;
  double kappa = 0.0;
  double psi_exponent = 1.0;
  DecayKind decay_kind = DecayKind::Exponential;
  std::optional<double> algebraic_rate;
  double residual = 0.0;
};

inline PCase classify_p(double p) {
  if (std::abs(p - 2.0) < 1e-12) return PCase::PEq2;
  return p > 2.0 ? PCase::PGt2 : PCase::PLt2;
}

/// Characteristic function whose positive root fixes lambda at K.
inline double characteristic_at_K(const ModelParams& mp, const Kinetics& kin, double c,
                                  double lambda) {
  const double K = kin.K(), m = mp.m, p = mp.p;
  const double bK = kin.db(K), dK = kin.dd(K);
  switch (classify_p(p)) {
    case PCase::PEq2:
      return m * std::pow(K, m - 1.0) * lambda * lambda + c * lambda +
             bK * std::exp(lambda * c * mp.r) - dK;
    case PCase::PGt2:
      return c * lambda + bK * std::exp(lambda * c * mp.r) - dK;
    case PCase::PLt2:
      return std::pow(m, p - 1.0) * std::pow(K, (m - 1.0) * (p - 1.0)) * (2.0 * (p - 1.0) / p) *
                 std::pow(p * lambda / (2.0 - p), p) +
             bK - dK;
  }
  return 0.0;
}

inline EquilibriumAsymptotics asymptotics_at_K(const ModelParams& mp, const Kinetics& kin,
                                               double c) {
  mp.validate();
  const double K = kin.K(), m = mp.m, p = mp.p;
  if (!(kin.dd(K) > kin.db(K)))
    throw NoPositiveRoot("asymptotics_at_K: requires d'(K) > b'(K)");
  auto f = [&](double lam) { return characteristic_at_K(mp, kin, c, lam); };
  const auto root = numerics::positive_root(f);
  if (!root) throw NoPositiveRoot("characteristic equation at K has no sign change");
  EquilibriumAsymptotics a;
  a.pcase = classify_p(p);
  a.lambda = *root;
  a.residual = f(a.lambda);
  const double mk = m * std::pow(K, m - 1.0);
  switch (a.pcase) {
    case PCase::PEq2:
      a.kappa = mk * a.lambda;
      a.psi_exponent = 1.0;
      break;
    case PCase::PGt2:
      a.kappa = std::pow(mk * a.lambda, p - 1.0);
      a.psi_exponent = p - 1.0;
      break;
    case PCase::PLt2:
      a.kappa = std::pow(m, p - 1.0) * std::pow(K, (m - 1.0) * (p - 1.0)) *
                std::pow(p * a.lambda / (2.0 - p), p - 1.0);
      a.psi_exponent = 2.0 * (p - 1.0) / p;
      a.decay_kind = DecayKind::Algebraic;
      a.algebraic_rate = p / (2.0 - p);
      break;
  }
  return a;
}

/// Decay of a smooth (everywhere positive) wave at 0:
/// psi ~ psi_coeff * phi^{m(p-1)} with lambda0 solving c*l + d'(0) = b'(0) e^{-l c r}.
struct SmoothDecay {
  double lambda0 = 0.0;
  double psi_coeff = 0.0;
  double residual = 0.0;
};

inline SmoothDecay smooth_decay_at_zero(const ModelParams& mp, const Kinetics& kin, double c) {
  mp.validate();
  const double b0 = kin.db(0.0), d0 = kin.dd(0.0);
  auto f = [&](double lam) { return c * lam + d0 - b0 * std::exp(-lam * c * mp.r); };
  const auto root = numerics::positive_root(f);
  if (!root) throw NoPositiveRoot("smooth_decay_at_zero: no positive root");
  SmoothDecay s;
  s.lambda0 = *root;
  s.residual = f(s.lambda0);
  s.psi_coeff = std::pow(mp.m * (b0 * std::exp(-s.lambda0 * c * mp.r) - d0) / c, mp.p - 1.0);
  return s;
}

/// Right-hand side of the phase equation
/// d psi/d phi = c - m phi^{m-1} (b(phi_cr) - d(phi)) / psi^{1/(p-1)}.
inline double psi_ode_rhs(const ModelParams& mp, const Kinetics& kin, double c, double phi,
                          double psi, double phi_cr) {
  if (!(psi > 0.0)) throw DomainError("psi_ode_rhs: psi must be positive");
  return c - mp.m * std::pow(phi, mp.m - 1.0) * (kin.b(phi_cr) - kin.d(phi)) /
                 std::pow(psi, mp.q());
}

// ---------------------------------------------------------------------------
// Phase-plane shooting in the variable w = psi^{p/(p-1)}, for which
//   dw/dphi = p/(p-1) * (c w^{1/p} - m phi^{m-1} S(phi)),
// S(phi) = b(phi_cr) - d(phi). The travel time t(phi) is carried along with
// dt/dphi = m phi^{m-1} / w^{1/p}.

struct ShootOptions {
  double rtol = 1e-11;
  double h_max = std::numeric_limits<double>::infinity();
  double h_max_rel = std::numeric_limits<double>::infinity();  // step <= h_max_rel * phi
};

enum class ShotEnd { ReachedStop, HitZero, ReachedTime, Failed };

struct PhaseShot {
  PhaseCurve curve;       // ordered by increasing phi
  std::vector<double> t;  // travel time at each sample
  ShotEnd end = ShotEnd::ReachedStop;
  double phi_end = 0.0;
  double psi_end = 0.0;
  double t_end = 0.0;
};

namespace detail {

inline double psi_from_w(double w, double p) { return w > 0.0 ? std::pow(w, (p - 1.0) / p) : 0.0; }
inline double w_from_psi(double psi, double p) {
  return psi > 0.0 ? std::pow(psi, p / (p - 1.0)) : 0.0;
}

}  // namespace detail

template <typename Source>
PhaseShot shoot_phase(const ModelParams& mp, double c, double phi0, double psi0, double t0,
                      double phi_stop, Source&& source, const ShootOptions& opt = {},
                      double t_stop = std::numeric_limits<double>::infinity()) {
  const double m = mp.m, p = mp.p;
  const double gain = p / (p - 1.0);
  const bool forward = phi_stop > phi0;
  if (!forward && t_stop == std::numeric_limits<double>::infinity()) t_stop = -t_stop;
  auto rhs = [&](double phi, const numerics::Vec<2>& y) {
    const double w = std::max(y[0], 0.0);
    const double wp = std::pow(w, 1.0 / p);
    const double mphi = m * std::pow(phi, m - 1.0);
    return numerics::Vec<2>{gain * (c * wp - mphi * source(phi)),
                            mphi / std::max(wp, 1e-300)};
  };
  auto slope_at = [&](double phi, double psi) {
    if (!(psi > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    return c - m * std::pow(phi, m - 1.0) * source(phi) / std::pow(psi, mp.q());
  };

  PhaseShot shot;
  std::vector<double> phis{phi0}, psis{psi0}, ts{t0};
  numerics::DopriOptions dopt;
  dopt.rtol = opt.rtol;
  dopt.atol = 1e-300;
  dopt.error_weights = {1.0, 0.0};
  dopt.h_max = opt.h_max;
  dopt.h_max_rel = opt.h_max_rel;
  dopt.h_init = 1e-3 * std::max(std::abs(phi0 - (forward ? 0.0 : phi_stop)), 1e-300);
  dopt.h_min_rel = 1e-18;
  shot.end = ShotEnd::ReachedStop;

  auto observer = [&](const numerics::DenseStep<2>& st) {
    const double phi1 = st.t1();
    const double w1 = st.y1[0];
    if (w1 <= 0.0) {
      const double phi_hit = numerics::bisect(
          [&](double ph) { return st.at(ph)[0]; }, st.t0, phi1, 1e-15);
      phis.push_back(phi_hit);
      psis.push_back(0.0);
      ts.push_back(st.at(phi_hit)[1]);
      shot.end = ShotEnd::HitZero;
      return false;
    }
    const double t1 = st.y1[1];
    if ((forward && t1 >= t_stop) || (!forward && t1 <= t_stop)) {
      const double phi_t = numerics::bisect(
          [&](double ph) { return st.at(ph)[1] - t_stop; }, st.t0, phi1, 1e-15);
      const auto y = st.at(phi_t);
      phis.push_back(phi_t);
      psis.push_back(detail::psi_from_w(y[0], p));
      ts.push_back(t_stop);
      shot.end = ShotEnd::ReachedTime;
      return false;
    }
    phis.push_back(phi1);
    psis.push_back(detail::psi_from_w(w1, p));
    ts.push_back(t1);
    // transversal approach to w = 0 closer than round-off: treat as crossing
    const double dw = st.f1[0];
    if (forward && dw < 0.0 && w1 / -dw <= 1e-13 * std::max(std::abs(phi1), 1e-300)) {
      phis.push_back(phi1 + w1 / -dw);
      psis.push_back(0.0);
      ts.push_back(t1);
      shot.end = ShotEnd::HitZero;
      return false;
    }
    return true;
  };

  const auto res = numerics::dopri5<2>(rhs, phi0, numerics::Vec<2>{detail::w_from_psi(psi0, p), t0},
                                       phi_stop, dopt, observer);
  if (res.status == numerics::IntegrationStatus::StepUnderflow ||
      res.status == numerics::IntegrationStatus::MaxSteps ||
      res.status == numerics::IntegrationStatus::NonFinite) {
    shot.end = ShotEnd::Failed;
  }

  if (!forward) {
    std::reverse(phis.begin(), phis.end());
    std::reverse(psis.begin(), psis.end());
    std::reverse(ts.begin(), ts.end());
  }
  shot.curve.c = c;
  shot.curve.slope.resize(phis.size());
  for (std::size_t i = 0; i < phis.size(); ++i) shot.curve.slope[i] = slope_at(phis[i], psis[i]);
  shot.curve.phi = std::move(phis);
  shot.curve.psi = std::move(psis);
  shot.t = std::move(ts);
  const std::size_t last = forward ? shot.curve.size() - 1 : 0;
  shot.phi_end = shot.curve.phi[last];
  shot.psi_end = shot.curve.psi[last];
  shot.t_end = shot.t[last];
  return shot;
}

/// Launches the sharp branch psi ~ c phi from phi0 (with the edge travel time
/// from the leading expansion) and prepends the edge sample (0, 0, t=0).
template <typename Source>
PhaseShot shoot_sharp(const ModelParams& mp, double c, double phi0, double phi_stop,
                      Source&& source, const ShootOptions& opt = {},
                      double t_stop = std::numeric_limits<double>::infinity()) {
  const EdgeExpansion edge = sharp_edge_expansion(mp, c);
  PhaseShot shot = shoot_phase(mp, c, phi0, c * phi0, edge.time_at(phi0), phi_stop,
                               std::forward<Source>(source), opt, t_stop);
  shot.curve.phi.insert(shot.curve.phi.begin(), 0.0);
  shot.curve.psi.insert(shot.curve.psi.begin(), 0.0);
  shot.curve.slope.insert(shot.curve.slope.begin(), c);
  shot.t.insert(shot.t.begin(), 0.0);
  return shot;
}

// ---------------------------------------------------------------------------
// First delay step: the birth-free system on (0, cr). The curve is the sharp
// branch psi ~ c phi; regularized launches (phi, psi) = (eps^2, eps) are
// extrapolated to eps -> 0 and must reproduce it.

struct DelaySegment {
  PhaseCurve curve;       // limit curve on [0, phi(cr)], starts at (0, 0)
  std::vector<double> t;  // travel time along the curve; t.back() == c r
  double phi_end = 0.0;
  double psi_end = 0.0;
  std::vector<double> eps_ladder;
  std::vector<double> sup_gaps;  // sup |psi_{eps_k} - psi_{eps_{k+1}}| on shared nodes
  double extrapolation_gap = 0.0;  // sup |extrapolated ladder - sharp launch|
  bool monotone_in_eps = true;
  double edge_slope = 0.0;  // ladder limit: least-squares d psi/d phi over the smallest decade
};

struct LadderOptions {
  std::vector<double> eps_ladder{1e-2, 1e-3, 1e-4, 1e-5};
  double cauchy_tol = 1e-3;  // on the extrapolated limit, relative to sup psi
  int nodes = 400;
  double phi_launch = 1e-10;  // sharp launch offset, relative to K
  ShootOptions shoot{};
};

namespace detail {

/// Limit of a sequence sampled at geometrically decreasing eps: Aitken with
/// three terms, Richardson (linear in eps) with two.
inline double extrapolate(std::span<const double> v, std::span<const double> eps) {
  const std::size_t n = v.size();
  if (n == 1) return v[0];
  const double v1 = v[n - 2], v2 = v[n - 1];
  const double rho = eps[n - 1] / eps[n - 2];
  const double richardson = v2 - (v1 - v2) * rho / (1.0 - rho);
  if (n == 2) return richardson;
  const double v0 = v[n - 3];
  const double d1 = v1 - v0, d2 = v2 - v1;
  const double den = d2 - d1;
  if (std::abs(den) < 1e-300) return v2;
  const double aitken = v2 - d2 * d2 / den;
  // Aitken must stay on the side the sequence is heading and within a few
  // increments of the last term; otherwise the asymptotic regime is not reached.
  if (std::abs(aitken - v2) > 3.0 * std::abs(d2) + 1e-300) return richardson;
  return aitken;
}

}  // namespace detail

inline DelaySegment initial_delay_segment(const ModelParams& mp, const Kinetics& kin, double c,
                                          const LadderOptions& opt = {}) {
  mp.validate();
  if (!(c > 0.0)) throw InvalidArgument("initial_delay_segment: c must be positive");
  DelaySegment seg;
  seg.curve.c = c;
  seg.eps_ladder = opt.eps_ladder;
  const double cr = c * mp.r;
  if (cr <= 0.0) return seg;
  if (opt.eps_ladder.size() < 2) throw InvalidArgument("eps ladder needs at least two entries");
  for (std::size_t k = 1; k < opt.eps_ladder.size(); ++k)
    if (!(opt.eps_ladder[k] < opt.eps_ladder[k - 1]) || !(opt.eps_ladder[k] > 0.0))
      throw InvalidArgument("eps ladder must be positive and decreasing");

  const double K = kin.K();
  auto birth_free = [&](double phi) { return -kin.d(phi); };
  const EdgeExpansion edge = sharp_edge_expansion(mp, c);
  ShootOptions sopt = opt.shoot;
  sopt.h_max = std::min(sopt.h_max, K / 100.0);

  // limit branch psi ~ c phi, launched just off the edge
  ShootOptions edge_opt = sopt;
  edge_opt.h_max_rel = std::min(edge_opt.h_max_rel, 0.25);
  const PhaseShot sharp =
      shoot_sharp(mp, c, opt.phi_launch * K, 1e6 * std::max(K, 1.0), birth_free, edge_opt, cr);
  if (sharp.end == ShotEnd::HitZero)
    throw SegmentDiesOut("flux reached zero before the first delay interval ended");
  if (sharp.end != ShotEnd::ReachedTime)
    throw NoConvergence("first delay segment did not reach t = c r");
  const double phi_hi = sharp.phi_end;
  const PhaseCurveInterpolant limit(sharp.curve);

  // extend the ladder by decades until two launches resolve the segment
  std::vector<double> ladder = opt.eps_ladder;
  while (20.0 * ladder[ladder.size() - 2] / c > 0.1 * phi_hi && ladder.back() > 1e-12)
    ladder.push_back(ladder.back() / 10.0);
  seg.eps_ladder = ladder;

  struct Branch {
    double eps;
    numerics::HermiteInterpolant psi;
  };
  std::vector<Branch> branches;
  for (double eps : ladder) {
    if (eps * eps >= phi_hi) continue;
    const PhaseShot s =
        shoot_phase(mp, c, eps * eps, eps, edge.time_at(eps * eps), phi_hi, birth_free, sopt);
    if (s.end == ShotEnd::HitZero)
      throw SegmentDiesOut("flux reached zero before the first delay interval ended");
    if (s.end == ShotEnd::Failed) throw NoConvergence("integration failed on eps-launch");
    branches.push_back({eps, numerics::HermiteInterpolant(s.curve.phi, s.curve.psi, s.curve.slope)});
  }
  if (branches.size() < 2)
    throw NoConvergence("eps ladder too coarse for the first delay interval");

  auto usable = [&](double eps, double phi) { return eps * eps <= phi && eps <= 0.05 * c * phi; };
  const double phi_lo = std::min(0.5 * phi_hi, 20.0 * branches.back().eps / c);

  std::vector<double> xs, ys;
  seg.sup_gaps.assign(branches.size() - 1, 0.0);
  double psi_sup = 0.0;
  const int n_nodes = std::max(opt.nodes, 16);
  for (int j = 0; j < n_nodes; ++j) {
    const double phi = phi_lo * std::pow(phi_hi / phi_lo, static_cast<double>(j) / (n_nodes - 1));
    std::vector<double> vp, ve;
    for (std::size_t k = 0; k < branches.size(); ++k) {
      const auto& b = branches[k];
      if (b.eps * b.eps > phi) continue;
      const double psi_k = b.psi(phi);
      if (k + 1 < branches.size() && branches[k + 1].eps * branches[k + 1].eps <= phi) {
        const double psi_next = branches[k + 1].psi(phi);
        seg.sup_gaps[k] = std::max(seg.sup_gaps[k], std::abs(psi_k - psi_next));
        if (psi_next > psi_k * (1.0 + 1e-9)) seg.monotone_in_eps = false;
      }
      if (!usable(b.eps, phi)) continue;
      vp.push_back(psi_k);
      ve.push_back(b.eps);
    }
    const double psi_lim = limit(phi);
    psi_sup = std::max(psi_sup, psi_lim);
    if (vp.size() < 2) continue;
    const double psi_x = detail::extrapolate(vp, ve);
    seg.extrapolation_gap = std::max(seg.extrapolation_gap, std::abs(psi_x - psi_lim));
    if (xs.empty() || phi <= 10.0 * xs.front()) {
      xs.push_back(phi);
      ys.push_back(psi_x);
    }
  }
  if (xs.size() < 4) throw NoConvergence("too few extrapolation nodes in first segment");
  if (seg.extrapolation_gap > opt.cauchy_tol * psi_sup)
    throw NoConvergence("eps-ladder limit not Cauchy within tolerance");
  seg.edge_slope = numerics::fit_line(xs, ys).slope;

  seg.curve = sharp.curve;
  seg.t = sharp.t;
  seg.phi_end = sharp.phi_end;
  seg.psi_end = sharp.psi_end;
  return seg;
}

}  // namespace sharpfront
