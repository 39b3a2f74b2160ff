#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sharpfront/errors.hpp"
#include "sharpfront/numerics/roots.hpp"

namespace sharpfront {

using ScalarFn = std::function<double(double)>;

enum class KineticsKind { Fisher, NicholsonLinearDeath, NicholsonQuadraticDeath, MackeyGlass, Custom };

inline std::string to_string(KineticsKind k) {
  switch (k) {
    case KineticsKind::Fisher: return "Fisher";
    case KineticsKind::NicholsonLinearDeath: return "NicholsonLinearDeath";
    case KineticsKind::NicholsonQuadraticDeath: return "NicholsonQuadraticDeath";
    case KineticsKind::MackeyGlass: return "MackeyGlass";
    case KineticsKind::Custom: return "Custom";
  }
  return "?";
}

inline KineticsKind kinetics_kind_from_string(const std::string& s) {
  for (auto k : {KineticsKind::Fisher, KineticsKind::NicholsonLinearDeath,
                 KineticsKind::NicholsonQuadraticDeath, KineticsKind::MackeyGlass,
                 KineticsKind::Custom}) {
    if (to_string(k) == s) return k;
  }
  throw InvalidArgument("unknown kinetics kind '" + s + "'");
}

/// Birth/death specification. Built-in kinds read their constants from
/// `parameters`:
///   Fisher:                     scale           b = scale*u, d = scale*u^2
///   NicholsonLinearDeath:       p_tilde, q_tilde, a, delta
///                               b = p_tilde*u*exp(-a*u^q_tilde), d = delta*u
///   NicholsonQuadraticDeath:    as above with d = delta*u^2
///   MackeyGlass:                b = p_tilde*u/(1 + a*u^q_tilde), d = delta*u
/// Custom kinetics supply all four handles explicitly.
struct KineticsSpec {
  KineticsKind kind = KineticsKind::Fisher;
  std::map<std::string, double> parameters;
  ScalarFn b, d, db, dd;  // Custom only

  static KineticsSpec fisher(double scale = 1.0) {
    return {KineticsKind::Fisher, {{"scale", scale}}, {}, {}, {}, {}};
  }
  static KineticsSpec nicholson_linear(double p_tilde, double delta, double a, double q_tilde) {
    return {KineticsKind::NicholsonLinearDeath,
            {{"p_tilde", p_tilde}, {"delta", delta}, {"a", a}, {"q_tilde", q_tilde}},
            {}, {}, {}, {}};
  }
  static KineticsSpec nicholson_quadratic(double p_tilde, double delta, double a,
                                          double q_tilde) {
    return {KineticsKind::NicholsonQuadraticDeath,
            {{"p_tilde", p_tilde}, {"delta", delta}, {"a", a}, {"q_tilde", q_tilde}},
            {}, {}, {}, {}};
  }
  static KineticsSpec mackey_glass(double p_tilde, double a, double q_tilde, double delta = 1.0) {
    return {KineticsKind::MackeyGlass,
            {{"p_tilde", p_tilde}, {"a", a}, {"q_tilde", q_tilde}, {"delta", delta}},
            {}, {}, {}, {}};
  }
  static KineticsSpec custom(ScalarFn b, ScalarFn d, ScalarFn db, ScalarFn dd) {
    return {KineticsKind::Custom, {}, std::move(b), std::move(d), std::move(db), std::move(dd)};
  }
};

struct HypothesisViolationEntry {
  std::string hypothesis;  // "equilibria" or "monotonicity"
  std::string what;        // which condition
  double location = 0.0;
  double value = 0.0;
};

struct HypothesisReport {
  bool passed = true;
  std::vector<HypothesisViolationEntry> violations;
  int grid_size = 0;
};

class HypothesisViolation : public Error {
 public:
  HypothesisViolation(const std::string& what, HypothesisReport report)
      : Error("HypothesisViolation", what), report_(std::move(report)) {}
  const HypothesisReport& report() const { return report_; }

 private:
  HypothesisReport report_;
};

/// Validated birth/death pair with its positive equilibrium K. Immutable.
class Kinetics {
 public:
  double b(double u) const { return b_(u); }
  double d(double u) const { return d_(u); }
  double db(double u) const { return db_(u); }
  double dd(double u) const { return dd_(u); }
  double K() const { return K_; }
  const HypothesisReport& report() const { return report_; }
  const KineticsSpec& spec() const { return spec_; }

 private:
  friend Kinetics build_kinetics(const KineticsSpec&, double);
  friend Kinetics assemble_unchecked(const KineticsSpec&, double);
  ScalarFn b_, d_, db_, dd_;
  double K_ = 0.0;
  HypothesisReport report_;
  KineticsSpec spec_;
};

namespace detail {

inline double param(const KineticsSpec& s, const std::string& name) {
  const auto it = s.parameters.find(name);
  if (it == s.parameters.end())
    throw InvalidArgument(to_string(s.kind) + " kinetics needs parameter '" + name + "'");
  if (!(it->second > 0.0))
    throw InvalidArgument(to_string(s.kind) + " parameter '" + name + "' must be positive");
  return it->second;
}

struct Handles {
  ScalarFn b, d, db, dd;
};

inline Handles handles_for(const KineticsSpec& s) {
  switch (s.kind) {
    case KineticsKind::Fisher: {
      const double k = s.parameters.count("scale") ? param(s, "scale") : 1.0;
      return {[k](double u) { return k * u; }, [k](double u) { return k * u * u; },
              [k](double) { return k; }, [k](double u) { return 2.0 * k * u; }};
    }
    case KineticsKind::NicholsonLinearDeath:
    case KineticsKind::NicholsonQuadraticDeath: {
      const double P = param(s, "p_tilde"), q = param(s, "q_tilde"), a = param(s, "a"),
                   delta = param(s, "delta");
      ScalarFn b = [=](double u) { return P * u * std::exp(-a * std::pow(u, q)); };
      ScalarFn db = [=](double u) {
        const double uq = std::pow(u, q);
        return P * std::exp(-a * uq) * (1.0 - a * q * uq);
      };
      if (s.kind == KineticsKind::NicholsonLinearDeath)
        return {b, [=](double u) { return delta * u; }, db, [=](double) { return delta; }};
      return {b, [=](double u) { return delta * u * u; }, db,
              [=](double u) { return 2.0 * delta * u; }};
    }
    case KineticsKind::MackeyGlass: {
      const double P = param(s, "p_tilde"), q = param(s, "q_tilde"), a = param(s, "a");
      const double delta = s.parameters.count("delta") ? param(s, "delta") : 1.0;
      return {[=](double u) { return P * u / (1.0 + a * std::pow(u, q)); },
              [=](double u) { return delta * u; },
              [=](double u) {
                const double uq = std::pow(u, q);
                return P * (1.0 + a * (1.0 - q) * uq) / ((1.0 + a * uq) * (1.0 + a * uq));
              },
              [=](double) { return delta; }};
    }
    case KineticsKind::Custom:
      if (!s.b || !s.d || !s.db || !s.dd)
        throw InvalidArgument("Custom kinetics must supply b, d, b' and d'");
      return {s.b, s.d, s.db, s.dd};
  }
  throw InvalidArgument("unreachable kinetics kind");
}

}  // namespace detail

/// Positive root K of b - d: scans (0, u_max] for the first sign change from
/// positive to non-positive and bisects to relative tolerance 1e-12.
inline double positive_equilibrium(const ScalarFn& b, const ScalarFn& d, double u_max) {
  if (!(u_max > 0.0)) throw InvalidArgument("positive_equilibrium: u_max must be positive");
  auto g = [&](double u) { return b(u) - d(u); };
  constexpr int n_scan = 20000;
  const double lo_scan = u_max * 1e-9;
  const double ratio = std::pow(u_max / lo_scan, 1.0 / (n_scan - 1));
  double prev = lo_scan;
  bool seen_positive = g(prev) > 0.0;
  for (int i = 1; i < n_scan; ++i) {
    const double u = (i == n_scan - 1) ? u_max : lo_scan * std::pow(ratio, i);
    const double gu = g(u);
    if (seen_positive && gu <= 0.0) {
      if (gu == 0.0) return u;
      return numerics::bisect(g, prev, u, 1e-12);
    }
    seen_positive = seen_positive || gu > 0.0;
    prev = u;
  }
  throw NoPositiveEquilibrium("b - d has no sign change on (0, " + std::to_string(u_max) + "]");
}

/// Checks the equilibrium conditions at the endpoints and monotonicity on
/// `grid` uniform interior points. Monotonicity is strict on the open
/// interval; at s = 0 and s = K the non-strict endpoint conditions apply.
inline HypothesisReport check_hypotheses(const ScalarFn& b, const ScalarFn& d, const ScalarFn& db,
                                         const ScalarFn& dd, double K, int grid = 2048) {
  HypothesisReport rep;
  rep.grid_size = grid;
  const double tol0 = 1e-12;
  auto add = [&](const char* h, const char* what, double s, double v) {
    rep.violations.push_back({h, what, s, v});
  };
  if (std::abs(b(0.0)) > tol0) add("equilibria", "b(0)=0", 0.0, b(0.0));
  if (std::abs(d(0.0)) > tol0) add("equilibria", "d(0)=0", 0.0, d(0.0));
  const double resid = b(K) - d(K);
  if (std::abs(resid) > 1e-9 * std::max(1.0, std::abs(dd(K)))) add("equilibria", "b(K)=d(K)", K, resid);
  if (!(db(0.0) > dd(0.0))) add("equilibria", "b'(0)>d'(0)", 0.0, db(0.0) - dd(0.0));
  if (!(dd(0.0) >= 0.0)) add("equilibria", "d'(0)>=0", 0.0, dd(0.0));
  if (!(dd(K) > db(K))) add("equilibria", "d'(K)>b'(K)", K, dd(K) - db(K));
  if (!(db(K) >= 0.0)) add("equilibria", "b'(K)>=0", K, db(K));
  for (int i = 1; i <= grid; ++i) {
    const double s = K * i / (grid + 1.0);
    if (!(db(s) > 0.0)) add("monotonicity", "b'(s)>0", s, db(s));
    if (!(dd(s) > 0.0)) add("monotonicity", "d'(s)>0", s, dd(s));
  }
  rep.passed = rep.violations.empty();
  return rep;
}

/// Kinetics without hypothesis enforcement (report still attached). Meant for
/// tests and diagnostics that deliberately probe invalid inputs.
inline Kinetics assemble_unchecked(const KineticsSpec& spec, double u_max = 100.0) {
  auto h = detail::handles_for(spec);
  Kinetics k;
  k.K_ = positive_equilibrium(h.b, h.d, u_max);
  k.report_ = check_hypotheses(h.b, h.d, h.db, h.dd, k.K_);
  k.b_ = std::move(h.b);
  k.d_ = std::move(h.d);
  k.db_ = std::move(h.db);
  k.dd_ = std::move(h.dd);
  k.spec_ = spec;
  return k;
}

inline Kinetics build_kinetics(const KineticsSpec& spec, double u_max = 100.0) {
  Kinetics k = assemble_unchecked(spec, u_max);
  if (!k.report().passed) {
    std::ostringstream os;
    os << to_string(spec.kind) << " kinetics violates hypotheses:";
    for (const auto& v : k.report().violations)
      os << " [" << v.hypothesis << " " << v.what << " at s=" << v.location << "]";
    throw HypothesisViolation(os.str(), k.report());
  }
  return k;
}

}  // namespace sharpfront
