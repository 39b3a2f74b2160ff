#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "sharpfront/delay_stepper.hpp"
#include "sharpfront/errors.hpp"
#include "sharpfront/kinetics.hpp"
#include "sharpfront/numerics/interp.hpp"
#include "sharpfront/numerics/quadrature.hpp"
#include "sharpfront/params.hpp"
#include "sharpfront/phase_plane.hpp"
#include "sharpfront/speed_finder.hpp"

namespace sharpfront {

enum class TrialFamily { PowerDecay, Exponential, Tabulated };

inline const char* to_string(TrialFamily f) {
  switch (f) {
    case TrialFamily::PowerDecay: return "PowerDecay";
    case TrialFamily::Exponential: return "Exponential";
    case TrialFamily::Tabulated: return "Tabulated";
  }
  return "?";
}

/// Decreasing weight g on [0, K] with unit mass.
///   PowerDecay   g = (a+1)/K (1 - s/K)^a,          parameters {a}, a >= 1
///   Exponential  g = beta e^{-beta s}/(1 - e^{-beta K}), parameters {beta}
///   Tabulated    log g as a cubic Hermite table with a local model near K
class TrialFunction {
 public:
  static TrialFunction power_decay(double a, double K) {
    if (!(a >= 1.0)) throw NotAdmissible("PowerDecay exponent must be >= 1");
    TrialFunction g;
    g.family_ = TrialFamily::PowerDecay;
    g.params_ = {a};
    g.K_ = K;
    g.norm_ = (a + 1.0) / K;
    return g;
  }
  static TrialFunction exponential(double beta, double K) {
    if (!(beta > 0.0)) throw NotAdmissible("Exponential rate must be positive");
    TrialFunction g;
    g.family_ = TrialFamily::Exponential;
    g.params_ = {beta};
    g.K_ = K;
    g.norm_ = beta / -std::expm1(-beta * K);
    return g;
  }
  /// Unnormalized table of log g. Outside the knots -g'/g follows
  /// C s^{head_exp} (below) and tail_rate (K - s)^{-tail_power} (above).
  static TrialFunction tabulated(std::vector<double> phi, std::vector<double> log_g,
                                 std::vector<double> dlog_g, double K, double head_exp,
                                 double tail_rate, double tail_power) {
    TrialFunction g;
    g.family_ = TrialFamily::Tabulated;
    g.K_ = K;
    g.params_ = {head_exp, tail_rate, tail_power};
    g.table_ = numerics::HermiteInterpolant(phi, log_g, dlog_g);
    g.norm_ = 1.0;
    return g;
  }

  TrialFamily family() const { return family_; }
  const std::vector<double>& parameters() const { return params_; }
  double normalization() const { return norm_; }
  double K() const { return K_; }

  double operator()(double s) const { return eval(s).first; }
  double derivative(double s) const { return eval(s).second; }

  /// (g, g') at s.
  std::pair<double, double> eval(double s) const {
    switch (family_) {
      case TrialFamily::PowerDecay: {
        const double a = params_[0], u = std::max(1.0 - s / K_, 0.0);
        return {norm_ * std::pow(u, a), -norm_ * a / K_ * std::pow(u, a - 1.0)};
      }
      case TrialFamily::Exponential: {
        const double v = norm_ * std::exp(-params_[0] * s);
        return {v, -params_[0] * v};
      }
      case TrialFamily::Tabulated: return eval_table(s);
    }
    return {0.0, 0.0};
  }

  /// Rescales a tabulated function by a constant factor.
  void scale(double factor) {
    if (family_ != TrialFamily::Tabulated) throw InvalidArgument("only tabulated trials rescale");
    log_scale_ += std::log(factor);
  }

 private:
  // head: log g = L0 - C s^{e+1}/(e+1) below the first knot (slope matched)
  // tail: log g = L1 - R * model(K - s) beyond the last knot
  std::pair<double, double> eval_table(double s) const {
    const double lo = table_.front(), hi = table_.back();
    const double head_e = params_[0], tail_rate = params_[1], tail_pow = params_[2];
    double lg = 0.0, dlg = 0.0;
    if (s < lo) {
      const auto [l0, d0] = table_.eval(lo);
      // d log g / ds = d0 (s/lo)^head_e
      const double e1 = head_e + 1.0;
      lg = l0 + d0 * lo / e1 * (std::pow(std::max(s, 0.0) / lo, e1) - 1.0);
      dlg = d0 * std::pow(std::max(s, 0.0) / lo, head_e);
    } else if (s > hi) {
      const auto l1 = table_(hi);
      const double eta = std::max(K_ - s, 1e-300), eta1 = K_ - hi;
      if (std::abs(tail_pow - 1.0) < 1e-12) {
        // power tail: log g = l1 + R log(eta/eta1)
        lg = l1 + tail_rate * std::log(eta / eta1);
        dlg = -tail_rate / eta;
      } else {
        // d log g/ds = -R eta^{-tail_pow}
        const double e = 1.0 - tail_pow;
        lg = l1 + tail_rate * (std::pow(eta, e) - std::pow(eta1, e)) / e;
        dlg = -tail_rate * std::pow(eta, -tail_pow);
      }
    } else {
      const auto [l, d] = table_.eval(s);
      lg = l;
      dlg = d;
    }
    const double g = std::exp(lg + log_scale_);
    return {g, g * dlg};
  }

  TrialFamily family_ = TrialFamily::PowerDecay;
  std::vector<double> params_;
  double K_ = 1.0;
  double norm_ = 1.0;
  numerics::HermiteInterpolant table_;
  double log_scale_ = 0.0;
};

namespace detail {

inline numerics::QuadratureRule rule_on(double a, double b, int n_quad) {
  return numerics::graded_rule(a, b, std::max(n_quad, 64));
}

inline void check_admissible(const TrialFunction& g, const numerics::QuadratureRule& rule) {
  double mass = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const auto [v, dv] = g.eval(rule.nodes[i]);
    const bool underflow = g.family() == TrialFamily::Tabulated && v == 0.0 && dv == 0.0;
    if (!underflow && (!(v > 0.0) || !(dv < 0.0)))
      throw NotAdmissible("trial function not positive and decreasing at s = " +
                          std::to_string(rule.nodes[i]));
    mass += rule.weights[i] * v;
  }
  if (std::abs(mass - 1.0) > 1e-6)
    throw NotAdmissible("trial function mass " + std::to_string(mass) + " differs from 1");
}

}  // namespace detail

/// Young-inequality bound on c*(m, p, 0).
inline double young_lower_bound(const ModelParams& mp, const Kinetics& kin, const TrialFunction& g,
                                int n_quad = 512) {
  mp.validate();
  if (n_quad < 64) throw InvalidArgument("young_lower_bound: n_quad must be >= 64");
  const double K = kin.K(), p = mp.p, m = mp.m;
  const auto rule = detail::rule_on(0.0, K, n_quad);
  detail::check_admissible(g, rule);
  const double pre = p / std::pow(p - 1.0, (p - 1.0) / p);
  return rule.integrate([&](double s) {
    const auto [v, dv] = g.eval(s);
    const double react = std::max(m * std::pow(s, m - 1.0) * (kin.b(s) - kin.d(s)), 0.0);
    return pre * std::pow(-dv, 1.0 / p) * std::pow(v, (p - 1.0) / p) * std::pow(react, (p - 1.0) / p);
  });
}

/// F(g, psi) = int (-g') psi + int g m phi^{m-1} (b - d) / psi^{1/(p-1)}.
inline double evaluate_F(const ModelParams& mp, const Kinetics& kin, const TrialFunction& g,
                         const PhaseCurve& curve, int n_quad = 512, double delta_K = 0.0) {
  mp.validate();
  const double K = kin.K(), m = mp.m;
  const double dK = delta_K > 0.0 ? delta_K : 1e-6 * K;
  if (curve.empty() || curve.phi_max() < K - dK)
    throw CurveIncomplete("phase curve does not reach K");
  const PhaseCurveInterpolant psi(curve);
  const auto rule = detail::rule_on(0.0, K, n_quad);
  detail::check_admissible(g, rule);
  return rule.integrate([&](double s) {
    const auto [v, dv] = g.eval(s);
    const double ps = psi(s);
    if (!(ps > 0.0)) throw CurveIncomplete("phase curve vanishes inside (0, K)");
    return -dv * ps + v * m * std::pow(s, m - 1.0) * (kin.b(s) - kin.d(s)) / std::pow(ps, mp.q());
  });
}

/// Optimal weight: -g'/g = m phi^{m-1}(b - d) / ((p-1) psi^{p/(p-1)}), unit mass.
inline TrialFunction solve_optimal_trial(const ModelParams& mp, const Kinetics& kin,
                                         const PhaseCurve& curve, int n_nodes = 2000,
                                         double anchor = 1e-6) {
  const double m = mp.m, p = mp.p, K = kin.K();
  const double head_e = m - p / (p - 1.0);
  if (!(mp.p > 1.0) || !(head_e > -1.0))
    throw NotIntegrable("-g'/g is not integrable at 0 (needs m - p/(p-1) > -1)");
  if (curve.empty() || curve.phi_max() < K * (1.0 - anchor))
    throw CurveIncomplete("phase curve does not reach the anchor near K");
  const PhaseCurveInterpolant psi(curve);
  auto rate = [&](double s) {
    const double ps = std::max(psi(s), 1e-300);
    return m * std::pow(s, m - 1.0) * (kin.b(s) - kin.d(s)) / ((p - 1.0) * std::pow(ps, p / (p - 1.0)));
  };

  // knots: geometric toward both ends of [phi_lo, K(1 - anchor)]
  const double phi_lo = 1e-6 * K, phi_hi = K * (1.0 - anchor);
  std::vector<double> knots;
  const int half = n_nodes / 2;
  for (int i = 0; i < half; ++i)
    knots.push_back(phi_lo * std::pow(0.5 * K / phi_lo, static_cast<double>(i) / half));
  for (int i = half; i >= 0; --i)
    knots.push_back(K - (K - phi_hi) * std::pow(0.5 * K / (K - phi_hi), static_cast<double>(i) / half));
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

  const auto gl = numerics::gauss_legendre(8);
  std::vector<double> lg(knots.size()), dlg(knots.size());
  // head: rate ~ C s^{head_e} on (0, phi_lo)
  const double r0 = rate(phi_lo);
  lg[0] = -r0 * phi_lo / (head_e + 1.0);
  dlg[0] = -r0;
  for (std::size_t i = 1; i < knots.size(); ++i) {
    const double a = knots[i - 1], b = knots[i];
    const double mid = 0.5 * (a + b), rad = 0.5 * (b - a);
    double sum = 0.0;
    for (std::size_t j = 0; j < gl.nodes.size(); ++j) sum += gl.weights[j] * rate(mid + rad * gl.nodes[j]);
    lg[i] = lg[i - 1] - rad * sum;
    dlg[i] = -rate(b);
    if (!std::isfinite(lg[i])) throw NotIntegrable("-g'/g integral diverged at phi = " + std::to_string(b));
  }
  // tail model from the numerical rate at the anchor: rate ~ R (K - s)^{-tail_pow}
  const double eta = K - phi_hi;
  const double eta2 = 4.0 * eta;
  const double tail_pow = std::log(rate(phi_hi) / rate(K - eta2)) / std::log(eta2 / eta);
  const double tp = std::abs(tail_pow - 1.0) < 0.05 ? 1.0 : tail_pow;
  const double R = rate(phi_hi) * std::pow(eta, tp);

  TrialFunction g = TrialFunction::tabulated(knots, lg, dlg, K, head_e, R, tp);
  const auto rule = detail::rule_on(0.0, K, 1024);
  const double mass = rule.integrate([&](double s) { return g(s); });
  if (!(mass > 0.0) || !std::isfinite(mass)) throw NotIntegrable("optimal weight has no finite mass");
  g.scale(1.0 / mass);
  return g;
}

struct VariationalResult {
  double bound = 0.0;
  TrialFunction best_trial = TrialFunction::power_decay(1.0, 1.0);
  std::optional<double> F_value;
  int evaluations = 0;
};

/// Golden-section maximization of the Young bound over a one-parameter
/// family (PowerDecay a in [1, 20]; Exponential log beta K in [-5, 4]).
inline VariationalResult optimize_trial(const ModelParams& mp, const Kinetics& kin,
                                        TrialFamily family, int budget = 60, int n_quad = 512) {
  if (family == TrialFamily::Tabulated) throw InvalidArgument("optimize_trial needs a parametric family");
  const double K = kin.K();
  auto make = [&](double x) {
    return family == TrialFamily::PowerDecay ? TrialFunction::power_decay(x, K)
                                             : TrialFunction::exponential(std::exp(x) / K, K);
  };
  VariationalResult res;
  auto eval = [&](double x) {
    const TrialFunction g = make(x);
    const double v = young_lower_bound(mp, kin, g, n_quad);
    ++res.evaluations;
    if (res.evaluations == 1 || v > res.bound) {
      res.bound = v;
      res.best_trial = g;
    }
    return v;
  };
  double lo = family == TrialFamily::PowerDecay ? 1.0 : -5.0;
  double hi = family == TrialFamily::PowerDecay ? 20.0 : 4.0;
  eval(family == TrialFamily::PowerDecay ? 1.0 : 0.0);
  if (budget <= 1) return res;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
  double f1 = eval(x1), f2 = res.evaluations < budget ? eval(x2) : f1;
  while (res.evaluations < budget && hi - lo > 1e-8) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = eval(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = eval(x1);
    }
  }
  return res;
}

struct DelayGapCertificate {
  double c_star_r = 0.0;
  double c_star_0 = 0.0;
  double margin = 0.0;
  double correction = 0.0;  // int g m phi^{m-1}(b(phi) - b(phi_cr)) / psi^{1/(p-1)}
  double tol = 0.0;
};

/// Delay correction integral on phi in [0, min(K, curve end)] for a delayed
/// phase curve at speed c.
inline double delay_correction(const ModelParams& mp, const Kinetics& kin, const TrialFunction& g,
                               const PhaseCurve& curve, double c, int n_quad = 512) {
  const double m = mp.m;
  const double top = std::min(kin.K(), curve.phi_max());
  const TravelTime T(mp, curve);
  const PhaseCurveInterpolant psi(curve);
  const auto rule = detail::rule_on(0.0, top, n_quad);
  return rule.integrate([&](double s) {
    const double phi_cr = delayed_phase_value(T, mp, s, c);
    return g(s) * m * std::pow(s, m - 1.0) * (kin.b(s) - kin.b(phi_cr)) /
           std::pow(std::max(psi(s), 1e-300), mp.q());
  });
}

inline DelayGapCertificate delay_gap_certificate(const ModelParams& mp, const Kinetics& kin, double r,
                                                 double tol, SpeedOptions opt = {}) {
  if (!(r >= 0.0)) throw InvalidArgument("delay must be nonnegative");
  opt.tol = tol;
  opt.build_profile = false;
  DelayGapCertificate cert;
  cert.tol = tol;
  const SpeedResult with = critical_speed(mp.with_delay(r), kin, opt);
  const SpeedResult without = critical_speed(mp.with_delay(0.0), kin, opt);
  cert.c_star_r = with.c_star;
  cert.c_star_0 = without.c_star;
  cert.margin = cert.c_star_0 - cert.c_star_r;
  if (r > 0.0) {
    const ModelParams md = mp.with_delay(r);
    const WaveProfile prof = construct_profile(md, kin, with.c_hi, opt.profile);
    const PhaseCurve curve = profile_to_phase_curve(prof);
    cert.correction =
        delay_correction(md, kin, TrialFunction::power_decay(1.0, kin.K()), curve, with.c_hi);
  }
  return cert;
}

}  // namespace sharpfront
