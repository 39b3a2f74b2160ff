#pragma once

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sharpfront/errors.hpp"
#include "sharpfront/io.hpp"
#include "sharpfront/kinetics.hpp"
#include "sharpfront/params.hpp"

namespace sharpfront {

enum class Command { Speed, Profile, Variational, Regularity, Simulate, Sweep, Validate };

inline const char* to_string(Command c) {
  switch (c) {
    case Command::Speed: return "speed";
    case Command::Profile: return "profile";
    case Command::Variational: return "variational";
    case Command::Regularity: return "regularity";
    case Command::Simulate: return "simulate";
    case Command::Sweep: return "sweep";
    case Command::Validate: return "validate";
  }
  return "?";
}

struct SolverConfig {
  double tol = 1e-4;
  std::string method = "auto";  // auto | steps | shooting
  int max_iter = 60;
  double t_max = 0.0;
  double delta_K = 0.0;
  std::optional<double> c;  // profile speed; unset selects c*
};

struct VariationalConfig {
  std::string family = "power";  // power | exponential
  int budget = 60;
  int n_quad = 512;
};

struct SimulateConfig {
  double x_min = -2.0;
  double x_max = 140.0;
  int n_cells = 1420;
  double t_end = 120.0;
  double cfl = 0.4;
  double level = 0.0;
  double trace_interval = 0.1;
  double fit_fraction = 0.5;
  double snapshot_interval = 0.0;
};

struct SweepConfig {
  std::string parameter = "r";
  std::vector<double> values;
};

struct ValidateConfig {
  bool simulator = true;
  double tol_scale = 1.0;
  std::vector<int> criteria;  // empty: all
};

struct RunConfig {
  Command command = Command::Speed;
  ModelParams params;
  KineticsSpec kinetics;
  std::string kinetics_name = "fisher";
  SolverConfig solver;
  VariationalConfig variational;
  SimulateConfig simulate;
  SweepConfig sweep;
  ValidateConfig validate;
  std::string canonical;  // sorted key=value text of the resolved config

  std::string hash() const { return io::sha256_hex(canonical); }
};

namespace detail {

inline const std::map<std::string, std::set<std::string>>& config_schema() {
  static const std::map<std::string, std::set<std::string>> schema = {
      {"run", {"command"}},
      {"model", {"m", "p", "r"}},
      {"kinetics", {"kind", "scale", "p_tilde", "delta", "a", "q_tilde"}},
      {"solver", {"tol", "method", "max_iter", "t_max", "delta_K", "c"}},
      {"variational", {"family", "budget", "n_quad"}},
      {"simulate",
       {"x_min", "x_max", "n_cells", "t_end", "cfl", "level", "trace_interval", "fit_fraction",
        "snapshot_interval"}},
      {"sweep", {"parameter", "values"}},
      {"validate", {"simulator", "tol_scale", "criteria"}},
  };
  return schema;
}

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  return s.substr(a, s.find_last_not_of(" \t\r\n") - a + 1);
}

inline double to_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (t.empty() || used != t.size() || !std::isfinite(v))
    throw ConfigError(key + ": expected a number, got '" + text + "'");
  return v;
}

inline int to_int(const std::string& key, const std::string& text) {
  const double v = to_double(key, text);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError(key + ": expected an integer");
  return static_cast<int>(v);
}

inline bool to_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw ConfigError(key + ": expected true or false");
}

inline std::vector<double> to_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(key, item));
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

inline Command command_from_string(const std::string& s) {
  for (auto c : {Command::Speed, Command::Profile, Command::Variational, Command::Regularity,
                 Command::Simulate, Command::Sweep, Command::Validate})
    if (s == to_string(c)) return c;
  throw ConfigError("run.command: unknown command '" + s + "'");
}

inline KineticsSpec kinetics_from(const std::string& kind, const std::map<std::string, double>& kv) {
  auto need = [&](const std::string& k, double fallback) {
    const auto it = kv.find(k);
    return it == kv.end() ? fallback : it->second;
  };
  auto only = [&](std::set<std::string> allowed) {
    for (const auto& [k, v] : kv)
      if (!allowed.count(k)) throw ConfigError("kinetics." + k + " is not a parameter of kind " + kind);
  };
  if (kind == "fisher") {
    only({"scale"});
    return KineticsSpec::fisher(need("scale", 1.0));
  }
  if (kind == "nicholson_linear" || kind == "nicholson_quadratic" || kind == "mackey_glass") {
    only({"p_tilde", "delta", "a", "q_tilde"});
    for (const char* k : {"p_tilde", "a", "q_tilde"})
      if (!kv.count(k)) throw ConfigError("kinetics." + std::string(k) + " is required for kind " + kind);
    const double pt = kv.at("p_tilde"), a = kv.at("a"), q = kv.at("q_tilde"), dl = need("delta", 1.0);
    if (kind == "nicholson_linear") return KineticsSpec::nicholson_linear(pt, dl, a, q);
    if (kind == "nicholson_quadratic") return KineticsSpec::nicholson_quadratic(pt, dl, a, q);
    return KineticsSpec::mackey_glass(pt, a, q, dl);
  }
  throw ConfigError("kinetics.kind: unknown kind '" + kind + "'");
}

}  // namespace detail

/// Parses and validates an INI-style configuration. Every failure is a ConfigError.
/// `command` (from the command line) fills in or must match run.command.
inline RunConfig parse_config(std::istream& in, const std::string& command = "") {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }

  // flatten and check against the schema
  std::map<std::string, std::string> kv;
  const auto& schema = detail::config_schema();
  for (const auto& [section, body] : tree) {
    const auto it = schema.find(section);
    if (it == schema.end()) {
      if (body.empty()) throw ConfigError("key '" + section + "' outside a section");
      throw ConfigError("unknown section [" + section + "]");
    }
    for (const auto& [key, val] : body) {
      if (!it->second.count(key)) throw ConfigError("unknown key " + section + "." + key);
      kv[section + "." + key] = detail::trim(val.get_value<std::string>());
    }
  }
  auto get = [&](const std::string& k) -> std::optional<std::string> {
    const auto it = kv.find(k);
    if (it == kv.end()) return std::nullopt;
    return it->second;
  };
  auto num = [&](const std::string& k, double& out) {
    if (auto v = get(k)) out = detail::to_double(k, *v);
  };
  auto inum = [&](const std::string& k, int& out) {
    if (auto v = get(k)) out = detail::to_int(k, *v);
  };

  RunConfig cfg;
  const auto cmd = get("run.command");
  if (!cmd && command.empty()) throw ConfigError("run.command is required");
  if (cmd && !command.empty() && *cmd != command)
    throw ConfigError("run.command = " + *cmd + " conflicts with subcommand " + command);
  cfg.command = detail::command_from_string(cmd ? *cmd : command);

  double m = 2.0, p = 2.0, r = 0.0;
  num("model.m", m);
  num("model.p", p);
  num("model.r", r);
  cfg.params = ModelParams::unchecked(m, p, r);
  try {
    cfg.params.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }

  cfg.kinetics_name = get("kinetics.kind").value_or("fisher");
  std::map<std::string, double> kparams;
  for (const auto& [k, v] : kv)
    if (k.rfind("kinetics.", 0) == 0 && k != "kinetics.kind") kparams[k.substr(9)] = detail::to_double(k, v);
  cfg.kinetics = detail::kinetics_from(cfg.kinetics_name, kparams);
  try {
    build_kinetics(cfg.kinetics);
  } catch (const Error& e) {
    throw ConfigError(std::string("kinetics rejected: ") + e.what());
  }

  auto& s = cfg.solver;
  num("solver.tol", s.tol);
  if (auto v = get("solver.method")) s.method = *v;
  inum("solver.max_iter", s.max_iter);
  num("solver.t_max", s.t_max);
  num("solver.delta_K", s.delta_K);
  if (auto v = get("solver.c")) s.c = detail::to_double("solver.c", *v);
  if (!(s.tol > 0.0 && s.tol < 1.0)) throw ConfigError("solver.tol must lie in (0, 1)");
  if (s.method != "auto" && s.method != "steps" && s.method != "shooting")
    throw ConfigError("solver.method must be auto, steps or shooting");
  if (s.method == "shooting" && r != 0.0) throw ConfigError("solver.method = shooting requires model.r = 0");
  if (s.max_iter < 1) throw ConfigError("solver.max_iter must be positive");
  if (s.t_max < 0.0 || s.delta_K < 0.0) throw ConfigError("solver.t_max and solver.delta_K must be >= 0");
  if (s.c && !(*s.c > 0.0)) throw ConfigError("solver.c must be positive");

  auto& v = cfg.variational;
  if (auto f = get("variational.family")) v.family = *f;
  inum("variational.budget", v.budget);
  inum("variational.n_quad", v.n_quad);
  if (v.family != "power" && v.family != "exponential")
    throw ConfigError("variational.family must be power or exponential");
  if (v.budget < 1) throw ConfigError("variational.budget must be positive");
  if (v.n_quad < 64) throw ConfigError("variational.n_quad must be >= 64");

  auto& sm = cfg.simulate;
  num("simulate.x_min", sm.x_min);
  num("simulate.x_max", sm.x_max);
  inum("simulate.n_cells", sm.n_cells);
  num("simulate.t_end", sm.t_end);
  num("simulate.cfl", sm.cfl);
  num("simulate.level", sm.level);
  num("simulate.trace_interval", sm.trace_interval);
  num("simulate.fit_fraction", sm.fit_fraction);
  num("simulate.snapshot_interval", sm.snapshot_interval);
  if (!(sm.x_max > sm.x_min) || sm.n_cells < 3) throw ConfigError("simulate grid needs x_max > x_min and n_cells >= 3");
  if (!(sm.t_end > 0.0) || !(sm.trace_interval > 0.0)) throw ConfigError("simulate.t_end and trace_interval must be positive");
  if (!(sm.cfl > 0.0 && sm.cfl < 1.0)) throw ConfigError("simulate.cfl must lie in (0, 1)");
  if (!(sm.fit_fraction > 0.0 && sm.fit_fraction <= 1.0)) throw ConfigError("simulate.fit_fraction must lie in (0, 1]");
  if (sm.level < 0.0 || sm.snapshot_interval < 0.0) throw ConfigError("simulate.level and snapshot_interval must be >= 0");

  auto& sw = cfg.sweep;
  if (auto f = get("sweep.parameter")) sw.parameter = *f;
  if (sw.parameter != "r" && sw.parameter != "m" && sw.parameter != "p")
    throw ConfigError("sweep.parameter must be r, m or p");
  if (auto l = get("sweep.values")) sw.values = detail::to_list("sweep.values", *l);
  if (cfg.command == Command::Sweep) {
    if (sw.values.empty()) throw ConfigError("sweep.values is required for the sweep command");
    for (double x : sw.values) {
      ModelParams q = cfg.params;
      (sw.parameter == "r" ? q.r : sw.parameter == "m" ? q.m : q.p) = x;
      try {
        q.validate();
      } catch (const Error& e) {
        throw ConfigError("sweep value " + io::fmt17(x) + ": " + e.what());
      }
    }
  }

  auto& va = cfg.validate;
  if (auto b = get("validate.simulator")) va.simulator = detail::to_bool("validate.simulator", *b);
  num("validate.tol_scale", va.tol_scale);
  if (!(va.tol_scale > 0.0 && va.tol_scale <= 10.0)) throw ConfigError("validate.tol_scale must lie in (0, 10]");
  if (auto l = get("validate.criteria")) {
    for (double x : detail::to_list("validate.criteria", *l)) {
      if (x != std::floor(x) || x < 1 || x > 10) throw ConfigError("validate.criteria entries must be 1..10");
      va.criteria.push_back(static_cast<int>(x));
    }
  }

  // canonical text of the resolved configuration
  std::map<std::string, std::string> canon;
  canon["run.command"] = to_string(cfg.command);
  canon["model.m"] = io::fmt17(m);
  canon["model.p"] = io::fmt17(p);
  canon["model.r"] = io::fmt17(r);
  canon["kinetics.kind"] = cfg.kinetics_name;
  for (const auto& [k, x] : cfg.kinetics.parameters) canon["kinetics." + k] = io::fmt17(x);
  canon["solver.tol"] = io::fmt17(s.tol);
  canon["solver.method"] = s.method;
  canon["solver.max_iter"] = std::to_string(s.max_iter);
  canon["solver.t_max"] = io::fmt17(s.t_max);
  canon["solver.delta_K"] = io::fmt17(s.delta_K);
  canon["solver.c"] = s.c ? io::fmt17(*s.c) : "auto";
  canon["variational.family"] = v.family;
  canon["variational.budget"] = std::to_string(v.budget);
  canon["variational.n_quad"] = std::to_string(v.n_quad);
  for (const auto& [k, x] : std::map<std::string, double>{{"x_min", sm.x_min}, {"x_max", sm.x_max},
                                                          {"t_end", sm.t_end}, {"cfl", sm.cfl},
                                                          {"level", sm.level},
                                                          {"trace_interval", sm.trace_interval},
                                                          {"fit_fraction", sm.fit_fraction},
                                                          {"snapshot_interval", sm.snapshot_interval}})
    canon["simulate." + k] = io::fmt17(x);
  canon["simulate.n_cells"] = std::to_string(sm.n_cells);
  canon["sweep.parameter"] = sw.parameter;
  std::string vals;
  for (double x : sw.values) vals += (vals.empty() ? "" : ",") + io::fmt17(x);
  canon["sweep.values"] = vals;
  canon["validate.simulator"] = va.simulator ? "true" : "false";
  canon["validate.tol_scale"] = io::fmt17(va.tol_scale);
  std::string crit;
  for (int x : va.criteria) crit += (crit.empty() ? "" : ",") + std::to_string(x);
  canon["validate.criteria"] = crit;
  for (const auto& [k, x] : canon) cfg.canonical += k + "=" + x + "\n";
  return cfg;
}

inline RunConfig parse_config_text(const std::string& text, const std::string& command = "") {
  std::istringstream in(text);
  return parse_config(in, command);
}

inline RunConfig load_config(const std::string& path, const std::string& command = "") {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  return parse_config(in, command);
}

}  // namespace sharpfront
