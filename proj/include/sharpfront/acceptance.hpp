#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "sharpfront/delay_stepper.hpp"
#include "sharpfront/errors.hpp"
#include "sharpfront/kinetics.hpp"
#include "sharpfront/params.hpp"
#include "sharpfront/pde_sim.hpp"
#include "sharpfront/phase_plane.hpp"
#include "sharpfront/regularity.hpp"
#include "sharpfront/speed_finder.hpp"
#include "sharpfront/variational.hpp"

namespace sharpfront::acceptance {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  bool skipped = false;
  std::string detail;
  double seconds = 0.0;
};

struct Options {
  bool simulator = true;   // false drops the PDE cross-checks
  double tol_scale = 1.0;  // multiplies solver tolerances
  std::vector<int> criteria;  // empty: all
  int workers = 1;
};

namespace detail {

/// Accumulates named checks into one verdict.
class Checks {
 public:
  void add(const std::string& name, bool ok, const std::string& info) {
    ok_ = ok_ && ok;
    if (!text_.empty()) text_ += "; ";
    text_ += name + (ok ? " ok" : " FAILED") + " (" + info + ")";
  }
  bool ok() const { return ok_; }
  const std::string& text() const { return text_; }

 private:
  bool ok_ = true;
  std::string text_;
};

inline std::string num(double v, int digits = 6) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

inline Kinetics fisher(double scale = 1.0) { return build_kinetics(KineticsSpec::fisher(scale)); }
inline Kinetics nicholson() { return build_kinetics(KineticsSpec::nicholson_linear(2.0, 1.0, 1.0, 1.0)); }

inline SpeedOptions speed_opts(double tol, bool profile) {
  SpeedOptions o;
  o.tol = tol;
  o.build_profile = profile;
  return o;
}

inline void time_limit(Checks& ck, double seconds, double limit) {
  ck.add("runtime", seconds <= limit, num(seconds, 3) + " s <= " + num(limit, 3) + " s");
}

using Clock = std::chrono::steady_clock;
inline double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace detail

inline void c1_fisher_benchmark(const Options& o, detail::Checks& ck) {
  const auto t0 = detail::Clock::now();
  const auto kin = detail::fisher();
  const auto res = critical_speed_nodelay(ModelParams::make(2, 2, 0), kin, detail::speed_opts(1e-4 * o.tol_scale, true));
  const auto& prof = *res.profile_at_c_star;
  const auto& curve = *res.curve_at_c_star;
  double ep = 0.0, ec = 0.0;
  for (std::size_t i = 0; i < prof.size(); ++i)
    ep = std::max(ep, std::abs(prof.phi[i] - (1.0 - std::exp(-prof.t[i] / 2.0))));
  for (std::size_t i = 0; i < curve.size(); ++i)
    ec = std::max(ec, std::abs(curve.psi[i] - curve.phi[i] * (1.0 - curve.phi[i])));
  ck.add("c*", std::abs(res.c_star - 1.0) <= 1e-3, "c* = " + detail::num(res.c_star, 10));
  ck.add("profile sup error", ep <= 1e-3, detail::num(ep, 3));
  ck.add("phase curve sup error", ec <= 1e-3, detail::num(ec, 3));
  detail::time_limit(ck, detail::since(t0), 30.0);
}

inline void c2_scaling(const Options& o, detail::Checks& ck) {
  const auto t0 = detail::Clock::now();
  const auto res = critical_speed_nodelay(ModelParams::make(2, 2, 0), detail::fisher(4.0),
                                          detail::speed_opts(1e-4 * o.tol_scale, false));
  ck.add("c*", std::abs(res.c_star - 2.0) <= 2e-3, "c* = " + detail::num(res.c_star, 10));
  detail::time_limit(ck, detail::since(t0), 30.0);
}

inline void c3_cross_solver(const Options& o, detail::Checks& ck) {
  const auto t0 = detail::Clock::now();
  const double tol = 1e-3 * o.tol_scale;
  const auto mp = ModelParams::make(2, 2, 0);
  for (const auto& [name, kin] : {std::pair{"Fisher", detail::fisher()}, std::pair{"Nicholson", detail::nicholson()}}) {
    const auto a = critical_speed(mp, kin, detail::speed_opts(tol, false));
    const auto b = critical_speed_nodelay(mp, kin, detail::speed_opts(tol, false));
    const double diff = std::abs(a.c_star - b.c_star);
    ck.add(name, diff <= 2.0 * tol,
           "steps " + detail::num(a.c_star, 8) + " vs shooting " + detail::num(b.c_star, 8));
  }
  detail::time_limit(ck, detail::since(t0), 120.0);
}

inline void c4_delay_slows(const Options& o, detail::Checks& ck) {
  const auto t0 = detail::Clock::now();
  const auto kin = detail::nicholson();
  const double tol = 1e-4 * o.tol_scale;
  const std::vector<double> rs = {0.0, 0.25, 0.5, 1.0};
  std::vector<SpeedResult> res;
  for (double r : rs) res.push_back(critical_speed(ModelParams::make(2, 2, r), kin, detail::speed_opts(tol, false)));
  std::string list;
  for (std::size_t i = 0; i < rs.size(); ++i)
    list += (i ? ", " : "") + detail::num(res[i].c_star, 8);
  for (std::size_t i = 1; i < rs.size(); ++i) {
    const double margin = res[i - 1].c_star - res[i].c_star;
    ck.add("r " + detail::num(rs[i - 1]) + " -> " + detail::num(rs[i]), margin > 3e-3,
           "margin " + detail::num(margin, 4));
  }
  // witness: delay correction on the r = 1 curve just above c*
  const auto md = ModelParams::make(2, 2, 1.0);
  const WaveProfile prof = construct_profile(md, kin, res.back().c_hi);
  const double corr = delay_correction(md, kin, TrialFunction::power_decay(1.0, kin.K()),
                                       profile_to_phase_curve(prof), res.back().c_hi);
  ck.add("delay correction positive", corr > 0.0, detail::num(corr, 4));
  ck.add("c*(r)", true, list);
  detail::time_limit(ck, detail::since(t0), 600.0);
}

inline std::vector<TrialFunction> test_trials(double K) {
  return {TrialFunction::power_decay(1.0, K), TrialFunction::power_decay(2.0, K),
          TrialFunction::power_decay(3.5, K), TrialFunction::exponential(1.0 / K, K),
          TrialFunction::exponential(3.0 / K, K)};
}

inline void c5_f_invariance(const Options& o, detail::Checks& ck) {
  const auto kin = detail::fisher();
  const auto mp = ModelParams::make(2, 2, 0);
  const auto res = critical_speed_nodelay(mp, kin, detail::speed_opts(1e-7 * o.tol_scale, true));
  for (const auto& g : test_trials(kin.K())) {
    const double F = evaluate_F(mp, kin, g, *res.curve_at_c_star);
    ck.add(std::string(to_string(g.family())) + "(" + detail::num(g.parameters()[0]) + ")",
           std::abs(F - res.c_star) <= 1e-3, "F = " + detail::num(F, 10));
  }
}

inline void c6_variational_bound(const Options& o, detail::Checks& ck) {
  const auto kin = detail::fisher();
  const auto mp = ModelParams::make(2, 2, 0);
  const double yb = young_lower_bound(mp, kin, TrialFunction::power_decay(1.0, kin.K()));
  ck.add("bound for g = 2(1-s)", std::abs(yb - 2.0 * std::sqrt(2.0) / 3.0) <= 1e-3, detail::num(yb, 10));
  const auto opt = optimize_trial(mp, kin, TrialFamily::PowerDecay);
  const double a = opt.best_trial.parameters()[0];
  ck.add("optimized exponent", std::abs(a - 2.0) <= 0.05, "a = " + detail::num(a, 8));
  ck.add("optimized bound", std::abs(opt.bound - 1.0) <= 2e-3, detail::num(opt.bound, 10));
  const auto res = critical_speed_nodelay(mp, kin, detail::speed_opts(1e-7 * o.tol_scale, true));
  const auto& curve = *res.curve_at_c_star;
  auto trials = test_trials(kin.K());
  trials.push_back(opt.best_trial);
  trials.push_back(solve_optimal_trial(mp, kin, curve));
  double worst = -1e300;
  for (const auto& g : trials) worst = std::max(worst, young_lower_bound(mp, kin, g) - evaluate_F(mp, kin, g, curve));
  ck.add("domination", worst <= 1e-6, "max(bound - F) = " + detail::num(worst, 3) + " over " +
                                          std::to_string(trials.size()) + " trials");
}

inline void c7_edge_regularity(const Options& o, detail::Checks& ck) {
  const auto kin = detail::fisher();
  for (const auto& [m, p] : std::vector<std::pair<double, double>>{{2, 2}, {3, 1.5}, {2, 3}}) {
    const auto mp = ModelParams::make(m, p, 0);
    const auto res = critical_speed_nodelay(mp, kin, detail::speed_opts(1e-6 * o.tol_scale, true));
    const EdgeFit fit = fit_edge_exponent(*res.profile_at_c_star, kin.K());
    const double expect = (p - 1.0) / (m * (p - 1.0) - 1.0);
    const std::string tag = "(" + detail::num(m) + "," + detail::num(p) + ")";
    ck.add("exponent " + tag, std::abs(fit.exponent / expect - 1.0) <= 0.05,
           detail::num(fit.exponent, 6) + " vs " + detail::num(expect, 6));
    if (m == 2 && p == 2)
      ck.add("coefficient (2,2)", std::abs(fit.coefficient / 0.5 - 1.0) <= 0.10, detail::num(fit.coefficient, 6) + " vs 0.5");
  }
}

inline void c8_equilibrium_asymptotics(const Options& o, detail::Checks& ck) {
  const auto kin = detail::fisher();
  for (const auto& [m, p] : std::vector<std::pair<double, double>>{{2, 2}, {3, 1.5}, {2, 3}}) {
    const auto mp = ModelParams::make(m, p, 0);
    const auto res = critical_speed_nodelay(mp, kin, detail::speed_opts(1e-6 * o.tol_scale, true));
    const auto as = asymptotics_at_K(mp, kin, res.c_star);
    const std::string tag = "(" + detail::num(m) + "," + detail::num(p) + ")";
    ck.add("residual " + tag, std::abs(as.residual) <= 1e-10, detail::num(as.residual, 3));
    if (p == 3) continue;
    const DecayFit fit = fit_equilibrium_decay(*res.profile_at_c_star, mp, kin.K(), as);
    if (p == 2) {
      ck.add("tail " + tag, fit.fitted_kind == DecayKind::Exponential && std::abs(fit.rate / 0.5 - 1.0) <= 0.05,
             std::string(to_string(fit.fitted_kind)) + " rate " + detail::num(fit.rate, 6));
    } else {
      const double expect = p / (2.0 - p);
      ck.add("tail " + tag, fit.fitted_kind == DecayKind::Algebraic && std::abs(fit.rate / expect - 1.0) <= 0.10,
             std::string(to_string(fit.fitted_kind)) + " rate " + detail::num(fit.rate, 6) + " vs " + detail::num(expect));
    }
  }
}

inline SimResult run_sim(const ModelParams& mp, const Kinetics& kin, double x_max, double t_end, double dx,
                         int workers, bool reaction = true) {
  const double K = kin.K();
  const auto grid = Grid1D::make(-2.0, x_max, static_cast<int>(std::lround((x_max + 2.0) / dx)));
  SimOptions so;
  so.t_end = t_end;
  so.workers = workers;
  so.reaction = reaction;
  return simulate_front(mp, kin, [&](double x) { return K * std::max(0.0, 1.0 - std::abs(x)); }, grid, so);
}

inline void c9_simulator(const Options& o, detail::Checks& ck) {
  const auto t0 = detail::Clock::now();
  struct Case {
    std::string name;
    Kinetics kin;
    double r, x_max, t_end, rel;
  };
  const std::vector<Case> cases = {{"Fisher", detail::fisher(), 0.0, 140.0, 120.0, 0.05},
                                   {"Nicholson r=1", detail::nicholson(), 1.0, 70.0, 160.0, 0.07}};
  for (const auto& cs : cases) {
    const auto mp = ModelParams::make(2, 2, cs.r);
    const double c_star = critical_speed(mp, cs.kin, detail::speed_opts(1e-4 * o.tol_scale, false)).c_star;
    SpeedEstimate est[2];
    const double dxs[2] = {0.1, 0.05};
    for (int k = 0; k < 2; ++k) {
      const SimResult sim = run_sim(mp, cs.kin, cs.x_max, cs.t_end, dxs[k], o.workers);
      est[k] = estimate_spreading_speed(sim.trace, 0.5, min_fit_span(mp));
    }
    ck.add(cs.name + " speed", std::abs(est[1].c / c_star - 1.0) <= cs.rel,
           "pde " + detail::num(est[1].c, 6) + " vs c* " + detail::num(c_star, 6));
    const double shift = std::abs(est[1].c - est[0].c);
    ck.add(cs.name + " refinement", shift < est[0].std_error + est[1].std_error + 0.02 * est[1].c,
           "dx 0.1 -> 0.05 moves " + detail::num(shift, 3));
  }
  detail::time_limit(ck, detail::since(t0), 900.0);
}

inline void c10_properties(const Options& o, detail::Checks& ck) {
  const auto kin = detail::fisher();
  const auto mp = ModelParams::make(2, 2, 0);

  // bracket invariant
  {
    const auto res = critical_speed_nodelay(mp, kin, detail::speed_opts(1e-6 * o.tol_scale, false));
    bool ok = true;
    double lo = 0.0, hi = std::numeric_limits<double>::infinity();
    for (const auto& s : res.trace) {
      if (s.c_lo > 0.0 && s.c_hi > 0.0) {
        ok = ok && s.c_lo < s.c_hi && s.c_lo >= lo && s.c_hi <= hi;
        lo = s.c_lo;
        hi = s.c_hi;
      }
    }
    const auto opt = detail::speed_opts(1e-6, false);
    ok = ok && classify_nodelay(mp, kin, res.c_lo, opt).kind == ClassKind::DecaysToZero &&
         classify_nodelay(mp, kin, res.c_hi, opt).kind == ClassKind::ExceedsK;
    ck.add("bracket invariant", ok, std::to_string(res.trace.size()) + " steps");
  }

  // monotone dependence on c
  {
    auto src = [&](double phi) { return kin.b(phi) - kin.d(phi); };
    const PhaseShot a = shoot_sharp(mp, 0.8, 1e-8, 1.0 + 1e-6, src);
    const PhaseShot b = shoot_sharp(mp, 1.2, 1e-8, 1.0 + 1e-6, src);
    const PhaseCurveInterpolant pa(a.curve), pb(b.curve);
    const double top = std::min(a.phi_end, b.phi_end);
    double worst = -1e300;
    for (int i = 1; i < 1000; ++i) {
      const double phi = top * i / 1000.0;
      worst = std::max(worst, pa(phi) - pb(phi));
    }
    ck.add("psi_0.8 <= psi_1.2", worst <= 0.0, "max difference " + detail::num(worst, 3));
  }

  if (o.simulator) {
    const SimResult s = run_sim(mp, kin, 40.0, 20.0, 0.1, o.workers);
    ck.add("invariant region", s.max_excursion <= 1e-12, "max excursion " + detail::num(s.max_excursion, 3));
    const SimResult z = run_sim(mp, kin, 40.0, 20.0, 0.1, o.workers, false);
    const double drift = std::abs(z.mass.back() - z.mass.front()) / z.mass.front();
    ck.add("mass conservation", drift <= 1e-10, "relative drift " + detail::num(drift, 3));
  }

  // regularity classifier against the m vs p/(p-1) threshold
  {
    std::mt19937 rng(20261016);
    std::uniform_real_distribution<double> um(0.3, 5.0), up(1.1, 5.0);
    int tested = 0, agree = 0;
    while (tested < 100) {
      const double m = um(rng), p = up(rng);
      if (m * (p - 1.0) <= 1.0 + 1e-6) continue;
      ++tested;
      const auto rc = regularity_class(ModelParams::make(m, p, 0));
      const bool expect = m < p / (p - 1.0);
      if (rc.is_C1 == expect) ++agree;
    }
    ck.add("regularity threshold", agree == tested, std::to_string(agree) + "/" + std::to_string(tested));
  }
}

struct Criterion {
  int id;
  const char* title;
  std::function<void(const Options&, detail::Checks&)> run;
  bool needs_simulator = false;
};

inline const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      {1, "porous-medium Fisher benchmark", c1_fisher_benchmark},
      {2, "kinetics scaling", c2_scaling},
      {3, "cross-solver agreement", c3_cross_solver},
      {4, "delay slows the front", c4_delay_slows},
      {5, "F-invariance", c5_f_invariance},
      {6, "variational bound", c6_variational_bound},
      {7, "edge regularity", c7_edge_regularity},
      {8, "equilibrium asymptotics", c8_equilibrium_asymptotics},
      {9, "simulator cross-check", c9_simulator, true},
      {10, "property suites", c10_properties},
  };
  return all;
}

/// Runs the selected criteria; `on_result` sees each verdict as it lands.
inline std::vector<CriterionResult> run(const Options& o,
                                        const std::function<void(const CriterionResult&)>& on_result = {}) {
  std::vector<CriterionResult> out;
  for (const auto& c : criteria()) {
    if (!o.criteria.empty() && std::find(o.criteria.begin(), o.criteria.end(), c.id) == o.criteria.end())
      continue;
    CriterionResult r;
    r.id = c.id;
    r.title = c.title;
    const auto t0 = detail::Clock::now();
    if (c.needs_simulator && !o.simulator) {
      r.skipped = true;
      r.passed = true;
      r.detail = "simulator disabled";
    } else {
      detail::Checks ck;
      try {
        c.run(o, ck);
        r.passed = ck.ok();
        r.detail = ck.text();
      } catch (const std::exception& e) {
        r.passed = false;
        r.detail = (ck.text().empty() ? "" : ck.text() + "; ") + "error: " + e.what();
      }
    }
    r.seconds = detail::since(t0);
    if (on_result) on_result(r);
    out.push_back(std::move(r));
  }
  return out;
}

inline std::string format_line(const CriterionResult& r) {
  std::ostringstream os;
  os << (r.skipped ? "SKIP" : r.passed ? "PASS" : "FAIL") << " [" << r.id << "] " << r.title << " ("
     << detail::num(r.seconds, 3) << " s): " << r.detail;
  return os.str();
}

}  // namespace sharpfront::acceptance
