#pragma once

#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "sharpfront/acceptance.hpp"
#include "sharpfront/config.hpp"
#include "sharpfront/delay_stepper.hpp"
#include "sharpfront/errors.hpp"
#include "sharpfront/io.hpp"
#include "sharpfront/kinetics.hpp"
#include "sharpfront/pde_sim.hpp"
#include "sharpfront/regularity.hpp"
#include "sharpfront/speed_finder.hpp"
#include "sharpfront/variational.hpp"

namespace sharpfront::cli {

using io::json;

enum ExitCode { Ok = 0, ConfigFailure = 1, ComputeFailure = 2 };

struct RunContext {
  std::string out_dir = "out";
  int jobs = 1;
  bool verbose = false;
  std::ostream* log = &std::cerr;
};

namespace detail {

inline json params_json(const ModelParams& mp) { return {{"m", mp.m}, {"p", mp.p}, {"r", mp.r}}; }

inline json kinetics_json(const RunConfig& cfg, const Kinetics& kin) {
  json k = {{"kind", cfg.kinetics_name}, {"K", kin.K()}};
  for (const auto& [name, v] : cfg.kinetics.parameters) k["parameters"][name] = v;
  return k;
}

inline json class_json(const Classification& c) {
  return {{"kind", to_string(c.kind)}, {"event_time", c.event_time}, {"terminal_phi", c.terminal_phi},
          {"growth_guard", c.growth_guard}};
}

inline SpeedOptions speed_options(const RunConfig& cfg, bool build_profile) {
  SpeedOptions o;
  o.tol = cfg.solver.tol;
  o.max_iter = cfg.solver.max_iter;
  o.build_profile = build_profile;
  o.profile.t_max = cfg.solver.t_max;
  o.profile.delta_K = cfg.solver.delta_K;
  return o;
}

inline bool use_shooting(const RunConfig& cfg, const ModelParams& mp) {
  if (cfg.solver.method == "shooting") return true;
  if (cfg.solver.method == "steps") return false;
  return mp.r == 0.0;
}

inline SpeedResult find_speed(const RunConfig& cfg, const ModelParams& mp, const Kinetics& kin,
                              bool build_profile) {
  const SpeedOptions o = speed_options(cfg, build_profile);
  return use_shooting(cfg, mp) ? critical_speed_nodelay(mp, kin, o) : critical_speed(mp, kin, o);
}

inline io::Csv profile_csv(const WaveProfile& p) {
  io::Csv csv({"t", "phi", "psi"});
  for (std::size_t i = 0; i < p.size(); ++i) csv.row({p.t[i], p.phi[i], p.psi[i]});
  return csv;
}

inline io::Csv curve_csv(const PhaseCurve& c) {
  io::Csv csv({"phi", "psi"});
  for (std::size_t i = 0; i < c.size(); ++i) csv.row({c.phi[i], c.psi[i]});
  return csv;
}

inline json speed_json(const SpeedResult& r) {
  return {{"c_star", r.c_star}, {"c_lo", r.c_lo}, {"c_hi", r.c_hi}, {"iterations", r.iterations},
          {"method", r.method}, {"lo_class", class_json(r.lo_class)}, {"hi_class", class_json(r.hi_class)}};
}

// ---------------------------------------------------------------------------
// commands

inline int cmd_speed(const RunConfig& cfg, const Kinetics& kin, io::OutputSet& out) {
  const SpeedResult r = find_speed(cfg, cfg.params, kin, true);
  json j = {{"params", params_json(cfg.params)}, {"kinetics", kinetics_json(cfg, kin)}};
  j.update(speed_json(r));
  j["tol"] = cfg.solver.tol;
  io::Csv trace({"step", "c", "kind", "c_lo", "c_hi"});
  for (std::size_t i = 0; i < r.trace.size(); ++i) {
    const auto& s = r.trace[i];
    trace.row_text({std::to_string(i), io::fmt17(s.c), to_string(s.kind), io::fmt17(s.c_lo), io::fmt17(s.c_hi)});
  }
  out.write_json("speed.json", j);
  out.write_csv("bisection_trace.csv", trace);
  if (r.profile_at_c_star) out.write_csv("profile.csv", profile_csv(*r.profile_at_c_star));
  if (r.curve_at_c_star) out.write_csv("phase_curve.csv", curve_csv(*r.curve_at_c_star));
  return Ok;
}

inline int cmd_profile(const RunConfig& cfg, const Kinetics& kin, io::OutputSet& out) {
  const ModelParams& mp = cfg.params;
  WaveProfile prof;
  PhaseCurve curve;
  json j = {{"params", params_json(mp)}, {"kinetics", kinetics_json(cfg, kin)}};
  if (cfg.solver.c) {
    ProfileOptions po;
    po.t_max = cfg.solver.t_max;
    po.delta_K = cfg.solver.delta_K;
    prof = construct_profile(mp, kin, *cfg.solver.c, po);
    curve = profile_to_phase_curve(prof);
    j["c"] = *cfg.solver.c;
    j["source"] = "method_of_steps";
  } else {
    SpeedResult r = find_speed(cfg, mp, kin, true);
    if (!r.profile_at_c_star) throw Inconclusive("no profile could be built at c* = " + io::fmt17(r.c_star));
    prof = *r.profile_at_c_star;
    curve = r.curve_at_c_star ? *r.curve_at_c_star : profile_to_phase_curve(prof);
    j["c"] = r.c_star;
    j["source"] = "critical";
  }
  j["classification"] = class_json(prof.classification);
  j["steps_completed"] = prof.steps_completed;
  j["samples"] = prof.size();
  out.write_json("profile.json", j);
  out.write_csv("profile.csv", profile_csv(prof));
  out.write_csv("phase_curve.csv", curve_csv(curve));
  return Ok;
}

inline int cmd_variational(const RunConfig& cfg, const Kinetics& kin, io::OutputSet& out) {
  const ModelParams m0 = cfg.params.with_delay(0.0);
  const TrialFamily fam = cfg.variational.family == "power" ? TrialFamily::PowerDecay : TrialFamily::Exponential;
  const VariationalResult v = optimize_trial(m0, kin, fam, cfg.variational.budget, cfg.variational.n_quad);
  RunConfig c0 = cfg;
  c0.solver.method = "shooting";
  const SpeedResult s = find_speed(c0, m0, kin, true);
  const double F = evaluate_F(m0, kin, v.best_trial, *s.curve_at_c_star, cfg.variational.n_quad);
  json j = {{"params", params_json(cfg.params)}, {"kinetics", kinetics_json(cfg, kin)}};
  j["family"] = to_string(fam);
  j["best_parameter"] = v.best_trial.parameters()[0];
  j["bound"] = v.bound;
  j["evaluations"] = v.evaluations;
  j["c_star_nodelay"] = s.c_star;
  j["F_best_trial"] = F;
  try {
    const TrialFunction gh = solve_optimal_trial(m0, kin, *s.curve_at_c_star);
    j["optimal_weight_bound"] = young_lower_bound(m0, kin, gh, cfg.variational.n_quad);
  } catch (const Error& e) {
    j["optimal_weight_error"] = e.what();
  }
  if (cfg.params.r > 0.0) {
    SpeedOptions so = speed_options(cfg, false);
    const DelayGapCertificate cert = delay_gap_certificate(m0, kin, cfg.params.r, cfg.solver.tol, so);
    j["delay_gap"] = {{"c_star_r", cert.c_star_r}, {"c_star_0", cert.c_star_0}, {"margin", cert.margin},
                      {"correction", cert.correction}, {"tol", cert.tol}};
  }
  io::Csv trial({"phi", "g", "dg"});
  const double K = kin.K();
  for (int i = 0; i <= 400; ++i) {
    const double s_ = K * i / 400.0;
    const auto [g, dg] = v.best_trial.eval(s_);
    trial.row({s_, g, dg});
  }
  out.write_json("variational.json", j);
  out.write_csv("trial.csv", trial);
  return Ok;
}

inline int cmd_regularity(const RunConfig& cfg, const Kinetics& kin, io::OutputSet& out) {
  const ModelParams& mp = cfg.params;
  const RegularityClass rc = regularity_class(mp);
  json j = {{"params", params_json(mp)}, {"kinetics", kinetics_json(cfg, kin)}};
  j["class"] = {{"ratio", rc.ratio}, {"gamma", rc.gamma}, {"alpha", rc.alpha}, {"is_C1", rc.is_C1},
                {"is_integer_case", rc.is_integer_case}};
  const SpeedResult s = find_speed(cfg, mp, kin, true);
  j["c_star"] = s.c_star;
  const EdgeExpansion ee = sharp_edge_expansion(mp, s.c_star);
  j["edge_expansion"] = {{"exponent", ee.exponent}, {"coefficient", ee.coefficient}};
  if (s.profile_at_c_star) {
    try {
      const EdgeFit f = fit_edge_exponent(*s.profile_at_c_star, kin.K());
      j["edge_fit"] = {{"exponent", f.exponent}, {"coefficient", f.coefficient}, {"r2", f.r2}, {"samples", f.samples}};
    } catch (const Error& e) {
      j["edge_fit"] = {{"error", e.code()}, {"message", e.what()}};
    }
  }
  if (mp.r == 0.0) {
    const EquilibriumAsymptotics as = asymptotics_at_K(mp, kin, s.c_star);
    j["asymptotics"] = {{"p_case", to_string(as.pcase)}, {"lambda", as.lambda}, {"kappa", as.kappa},
                        {"psi_exponent", as.psi_exponent}, {"decay_kind", to_string(as.decay_kind)},
                        {"residual", as.residual}};
    if (as.algebraic_rate) j["asymptotics"]["algebraic_rate"] = *as.algebraic_rate;
    try {
      const DecayFit d = fit_equilibrium_decay(*s.profile_at_c_star, mp, kin.K(), as);
      j["decay_fit"] = {{"rate", d.rate}, {"fitted_kind", to_string(d.fitted_kind)}, {"kind_match", d.kind_match},
                        {"r2_exponential", d.r2_exponential}, {"r2_algebraic", d.r2_algebraic},
                        {"samples", d.samples}};
    } catch (const Error& e) {
      j["decay_fit"] = {{"error", e.code()}, {"message", e.what()}};
    }
  }
  out.write_json("regularity.json", j);
  return Ok;
}

inline int cmd_simulate(const RunConfig& cfg, const Kinetics& kin, const RunContext& ctx, io::OutputSet& out) {
  const auto& sc = cfg.simulate;
  const Grid1D grid = Grid1D::make(sc.x_min, sc.x_max, sc.n_cells);
  SimOptions so;
  so.t_end = sc.t_end;
  so.cfl = sc.cfl;
  so.level = sc.level;
  so.trace_interval = sc.trace_interval;
  so.snapshot_interval = sc.snapshot_interval;
  so.workers = ctx.jobs;
  const double K = kin.K();
  const SimResult res =
      simulate_front(cfg.params, kin, [&](double x) { return K * std::max(0.0, 1.0 - std::abs(x)); }, grid, so);
  json j = {{"params", params_json(cfg.params)}, {"kinetics", kinetics_json(cfg, kin)}};
  j["grid"] = {{"x_min", sc.x_min}, {"x_max", sc.x_max}, {"n_cells", sc.n_cells}, {"dx", grid.dx()}};
  j["steps"] = res.steps;
  j["t"] = res.t;
  j["max_excursion"] = res.max_excursion;
  j["level"] = res.trace.level;
  try {
    const SpeedEstimate e = estimate_spreading_speed(res.trace, sc.fit_fraction, min_fit_span(cfg.params));
    j["speed"] = {{"c", e.c}, {"std_error", e.std_error}, {"samples", e.samples}, {"t_from", e.t_from}, {"t_to", e.t_to}};
  } catch (const Error& e) {
    j["speed"] = {{"error", e.code()}, {"message", e.what()}};
  }
  io::Csv trace({"t", "x_front"});
  for (std::size_t i = 0; i < res.trace.times.size(); ++i) trace.row({res.trace.times[i], res.trace.positions[i]});
  out.write_json("simulate.json", j);
  out.write_csv("front_trace.csv", trace);
  if (!res.snapshots.empty()) {
    io::Csv snaps({"t", "x", "u"});
    for (const auto& s : res.snapshots)
      for (int i = 0; i < grid.n_cells; ++i) snaps.row({s.t, grid.center(i), s.u[i]});
    out.write_csv("snapshots.csv", snaps);
  }
  return Ok;
}

/// Pure per-cell computations on a worker pool; results are collected in
/// order and written once by the calling thread.
inline int cmd_sweep(const RunConfig& cfg, const Kinetics& kin, const RunContext& ctx, io::OutputSet& out) {
  const auto& values = cfg.sweep.values;
  const std::size_t n = values.size();
  std::vector<std::optional<SpeedResult>> results(n);
  std::vector<std::string> errors(n);
  std::atomic<std::size_t> next{0};
  std::mutex log_mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      ModelParams mp = cfg.params;
      (cfg.sweep.parameter == "r" ? mp.r : cfg.sweep.parameter == "m" ? mp.m : mp.p) = values[i];
      try {
        RunConfig c = cfg;
        if (c.solver.method == "shooting" && mp.r != 0.0) c.solver.method = "steps";
        results[i] = find_speed(c, mp, kin, false);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
      if (ctx.verbose) {
        std::lock_guard lock(log_mu);
        *ctx.log << "sweep " << cfg.sweep.parameter << " = " << io::fmt17(values[i])
                 << (results[i] ? " c* = " + io::fmt17(results[i]->c_star) : " failed: " + errors[i]) << "\n";
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    const int workers = std::max(1, std::min<int>(ctx.jobs, static_cast<int>(n)));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  const std::string& name = cfg.sweep.parameter;
  io::Csv csv({name, "c_star", "c_lo", "c_hi", "iterations"});
  json cells = json::array();
  bool decreasing = true;
  double min_margin = std::numeric_limits<double>::infinity();
  std::string first_error;
  for (std::size_t i = 0; i < n; ++i) {
    if (!results[i]) {
      cells.push_back({{name, values[i]}, {"error", errors[i]}});
      if (first_error.empty()) first_error = errors[i];
      continue;
    }
    const auto& r = *results[i];
    csv.row({values[i], r.c_star, r.c_lo, r.c_hi, static_cast<double>(r.iterations)});
    json cell = {{name, values[i]}};
    cell.update(speed_json(r));
    cells.push_back(cell);
    if (i > 0 && results[i - 1]) {
      const double margin = results[i - 1]->c_star - r.c_star;
      min_margin = std::min(min_margin, margin);
      decreasing = decreasing && margin > 0.0;
    }
  }
  json j = {{"params", params_json(cfg.params)}, {"kinetics", kinetics_json(cfg, kin)},
            {"parameter", name}, {"tol", cfg.solver.tol}, {"cells", cells}};
  j["strictly_decreasing"] = decreasing;
  if (std::isfinite(min_margin)) j["min_margin"] = min_margin;
  out.write_csv("sweep.csv", csv);
  out.write_json("sweep.json", j);
  if (!first_error.empty()) throw Inconclusive("sweep cell failed: " + first_error);
  return Ok;
}

inline int cmd_validate(const RunConfig& cfg, const RunContext& ctx, io::OutputSet& out) {
  acceptance::Options o;
  o.simulator = cfg.validate.simulator;
  o.tol_scale = cfg.validate.tol_scale;
  o.criteria = cfg.validate.criteria;
  o.workers = ctx.jobs;
  const auto results = acceptance::run(o, [&](const acceptance::CriterionResult& r) {
    if (ctx.verbose) *ctx.log << acceptance::format_line(r) << "\n";
  });
  io::Csv csv({"id", "title", "status", "seconds"});
  json rows = json::array();
  bool all = true;
  for (const auto& r : results) {
    const std::string status = r.skipped ? "SKIP" : r.passed ? "PASS" : "FAIL";
    csv.row_text({std::to_string(r.id), r.title, status, io::fmt17(r.seconds)});
    rows.push_back({{"id", r.id}, {"title", r.title}, {"status", status}, {"detail", r.detail}});
    all = all && r.passed;
  }
  out.write_json("validate.json", {{"simulator", o.simulator}, {"tol_scale", o.tol_scale},
                                   {"all_passed", all}, {"criteria", rows}});
  out.write_csv("validate.csv", csv);
  return all ? Ok : ComputeFailure;
}

}  // namespace detail

/// Executes a parsed configuration and writes every artifact plus the manifest.
inline int run(const RunConfig& cfg, const RunContext& ctx) {
  io::OutputSet out(ctx.out_dir);
  const std::string command = to_string(cfg.command);
  int code = Ok;
  try {
    const Kinetics kin = build_kinetics(cfg.kinetics);
    switch (cfg.command) {
      case Command::Speed: code = detail::cmd_speed(cfg, kin, out); break;
      case Command::Profile: code = detail::cmd_profile(cfg, kin, out); break;
      case Command::Variational: code = detail::cmd_variational(cfg, kin, out); break;
      case Command::Regularity: code = detail::cmd_regularity(cfg, kin, out); break;
      case Command::Simulate: code = detail::cmd_simulate(cfg, kin, ctx, out); break;
      case Command::Sweep: code = detail::cmd_sweep(cfg, kin, ctx, out); break;
      case Command::Validate: code = detail::cmd_validate(cfg, ctx, out); break;
    }
    if (code != Ok)
      out.write_json("error.json", {{"error", "ValidationFailed"}, {"message", "one or more criteria failed"}});
  } catch (const Error& e) {
    code = ComputeFailure;
    out.write_json("error.json", {{"error", e.code()}, {"message", e.what()}});
    *ctx.log << "error: " << e.code() << ": " << e.what() << "\n";
  } catch (const std::exception& e) {
    code = ComputeFailure;
    out.write_json("error.json", {{"error", "InternalError"}, {"message", e.what()}});
    *ctx.log << "error: " << e.what() << "\n";
  }
  out.write_manifest(command, cfg.hash(), code);
  if (ctx.verbose) *ctx.log << command << " finished with exit code " << code << "\n";
  return code;
}

/// Loads the config at `path` and runs it; config problems map to exit 1.
inline int run_file(const std::string& path, const RunContext& ctx, const std::string& command = "") {
  RunConfig cfg;
  try {
    cfg = load_config(path, command);
  } catch (const ConfigError& e) {
    *ctx.log << "config error: " << e.what() << "\n";
    return ConfigFailure;
  }
  return run(cfg, ctx);
}

}  // namespace sharpfront::cli
