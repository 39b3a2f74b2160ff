#pragma once

#include <algorithm>
#include <barrier>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "sharpfront/errors.hpp"
#include "sharpfront/kinetics.hpp"
#include "sharpfront/numerics/interp.hpp"
#include "sharpfront/params.hpp"

namespace sharpfront {

struct Grid1D {
  double x_min = 0.0;
  double x_max = 1.0;
  int n_cells = 1;

  static Grid1D make(double x_min, double x_max, int n_cells) {
    if (!(x_max > x_min) || n_cells < 3) throw InvalidArgument("Grid1D needs x_max > x_min and >= 3 cells");
    return {x_min, x_max, n_cells};
  }
  double dx() const { return (x_max - x_min) / n_cells; }
  double center(int i) const { return x_min + (i + 0.5) * dx(); }
};

/// Past states at roughly uniform spacing, linearly interpolated in time.
/// Times at or before 0 read the initial state.
class DelayHistory {
 public:
  DelayHistory(std::vector<double> initial, double delay, double spacing)
      : delay_(delay), spacing_(spacing), initial_(std::move(initial)) {
    snaps_.push_back({0.0, initial_});
  }

  std::size_t capacity() const {
    return delay_ > 0.0 ? static_cast<std::size_t>(std::ceil(delay_ / spacing_)) + 2 : 1;
  }
  std::size_t size() const { return snaps_.size(); }

  void record(double t, const std::vector<double>& u) {
    if (t < snaps_.back().first + spacing_) return;
    snaps_.push_back({t, u});
    // drop snapshots no longer needed for reads at t - delay
    while (snaps_.size() > 2 && snaps_[1].first <= t - delay_ - spacing_) snaps_.pop_front();
  }

  /// Fills out with the state at time s.
  void read(double s, std::vector<double>& out) const {
    if (s <= 0.0 || snaps_.size() == 1) {
      out = initial_;
      return;
    }
    if (s >= snaps_.back().first) {
      out = snaps_.back().second;
      return;
    }
    std::size_t j = 0;
    while (j + 1 < snaps_.size() && snaps_[j + 1].first <= s) ++j;
    if (j + 1 >= snaps_.size() || s < snaps_[j].first) {
      out = snaps_[j].second;
      return;
    }
    const double w = (s - snaps_[j].first) / (snaps_[j + 1].first - snaps_[j].first);
    const auto& a = snaps_[j].second;
    const auto& b = snaps_[j + 1].second;
    out.resize(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = (1.0 - w) * a[i] + w * b[i];
  }

 private:
  double delay_, spacing_;
  std::vector<double> initial_;
  std::deque<std::pair<double, std::vector<double>>> snaps_;
};

struct FrontTrace {
  std::vector<double> times;
  std::vector<double> positions;
  double level = 0.0;
};

struct Snapshot {
  double t = 0.0;
  std::vector<double> u;
};

struct SimOptions {
  double t_end = 10.0;
  double cfl = 0.4;
  double level = 0.0;             // 0 selects K/2
  double trace_interval = 0.1;
  double history_spacing = 0.0;   // 0 selects r/200
  double snapshot_interval = 0.0; // 0 disables snapshots
  bool reaction = true;           // false: pure doubly nonlinear diffusion
  int workers = 1;
  int boundary_cells = 10;
  double invariant_slack = 1e-12;
};

struct SimResult {
  std::vector<double> u;
  FrontTrace trace;
  std::vector<Snapshot> snapshots;
  long steps = 0;
  double t = 0.0;
  double max_excursion = 0.0;  // largest departure of u outside [0, K]
  std::vector<double> mass;    // sum u dx at each trace time
};

namespace detail {

/// Rightmost x where u crosses `level` downward between cell centres.
inline bool front_position(const Grid1D& g, const std::vector<double>& u, double level, double& x) {
  for (int i = g.n_cells - 2; i >= 0; --i) {
    if (u[i] >= level && u[i + 1] < level) {
      const double w = (u[i] - level) / (u[i] - u[i + 1]);
      x = g.center(i) + w * g.dx();
      return true;
    }
  }
  return false;
}

inline double flux_pow(double D, double p) {
  if (p == 2.0) return D;
  const double a = std::abs(D);
  return a == 0.0 ? 0.0 : std::pow(a, p - 2.0) * D;
}

}  // namespace detail

/// Explicit conservative finite-volume solver with no-flux boundaries.
inline SimResult simulate_front(const ModelParams& mp, const Kinetics& kin,
                                const std::function<double(double)>& ic, const Grid1D& grid,
                                const SimOptions& opt) {
  mp.validate();
  if (!(opt.cfl > 0.0 && opt.cfl < 1.0)) throw InvalidArgument("cfl must lie in (0, 1)");
  const int n = grid.n_cells;
  const double dx = grid.dx(), m = mp.m, p = mp.p, K = kin.K();
  const double level = opt.level > 0.0 ? opt.level : 0.5 * K;
  const double r = mp.r;

  SimResult res;
  res.u.resize(n);
  for (int i = 0; i < n; ++i) res.u[i] = ic(grid.center(i));
  res.trace.level = level;

  // reaction stiffness bound over [0, K]
  double rate_max = 0.0;
  if (opt.reaction)
    for (int k = 0; k <= 256; ++k) {
      const double s = K * k / 256.0;
      rate_max = std::max({rate_max, std::abs(kin.db(s)), std::abs(kin.dd(s))});
    }
  const double dt_react = rate_max > 0.0 ? 0.5 / rate_max : std::numeric_limits<double>::infinity();

  const double spacing = opt.history_spacing > 0.0 ? opt.history_spacing : (r > 0.0 ? r / 200.0 : 1.0);
  DelayHistory hist(res.u, r, spacing);

  std::vector<double> um(n), flux(n + 1, 0.0), u_del(n), u_new(n);
  const double d_floor = p < 2.0 ? 1e-6 * std::pow(std::max(K, 1e-300), m) / (grid.x_max - grid.x_min) : 0.0;

  auto record_trace = [&](double t) {
    double x = 0.0;
    if (detail::front_position(grid, res.u, level, x)) {
      if (x > grid.x_max - opt.boundary_cells * dx)
        throw BoundaryContamination("front reached the right boundary at t = " + std::to_string(t));
      res.trace.times.push_back(t);
      res.trace.positions.push_back(x);
    }
    double mass = 0.0;
    for (double v : res.u) mass += v * dx;
    res.mass.push_back(mass);
  };

  // partitioned update: each worker owns a contiguous cell range
  const int workers = std::max(1, std::min(opt.workers, n));
  double dt = 0.0;
  auto update_range = [&](int lo, int hi) {
    for (int i = lo; i < hi; ++i) {
      double v = res.u[i] + dt * (flux[i + 1] - flux[i]) / dx;
      if (opt.reaction) v += dt * (kin.b(u_del[i]) - kin.d(res.u[i]));
      u_new[i] = v;
    }
  };

  double t = 0.0;
  double next_trace = 0.0, next_snap = 0.0;
  auto t_eps = [&] { return 1e-9 * std::max(1.0, t); };
  const auto emit = [&]() {
    if (t + t_eps() >= next_trace) {
      record_trace(t);
      next_trace += opt.trace_interval;
    }
    if (opt.snapshot_interval > 0.0 && t + t_eps() >= next_snap) {
      res.snapshots.push_back({t, res.u});
      next_snap += opt.snapshot_interval;
    }
  };
  emit();

  std::vector<std::jthread> pool;
  std::barrier sync(workers);
  bool stop = false;
  auto chunk = [&](int w) { return std::pair{n * w / workers, n * (w + 1) / workers}; };
  for (int w = 1; w < workers; ++w) {
    pool.emplace_back([&, w] {
      while (true) {
        sync.arrive_and_wait();  // start of step
        if (stop) return;
        const auto [lo, hi] = chunk(w);
        update_range(lo, hi);
        sync.arrive_and_wait();  // end of step
      }
    });
  }
  auto finish_pool = [&] {
    if (workers > 1) {
      stop = true;
      sync.arrive_and_wait();
    }
    pool.clear();
  };

  try {
    while (t < opt.t_end - t_eps()) {
      double umax = 0.0;
      for (int i = 0; i < n; ++i) {
        um[i] = std::pow(std::max(res.u[i], 0.0), m);
        umax = std::max(umax, res.u[i]);
      }
      double a_max = 0.0;
      for (int i = 0; i + 1 < n; ++i) {
        const double D = (um[i + 1] - um[i]) / dx;
        flux[i + 1] = detail::flux_pow(D, p);
        if (p != 2.0) a_max = std::max(a_max, (p - 1.0) * std::pow(std::max(std::abs(D), d_floor), p - 2.0));
      }
      if (p == 2.0) a_max = 1.0;
      a_max *= m * std::pow(std::max(umax, 1e-300), m - 1.0);
      dt = std::min({opt.cfl * dx * dx / (a_max + 1e-12), dt_react, opt.t_end - t});
      if (next_trace - t > t_eps()) dt = std::min(dt, next_trace - t);
      if (!(dt > 1e-12 * std::max(1.0, t)))
        throw CFLViolation("time step underflow at t = " + std::to_string(t));

      if (opt.reaction) {
        if (r > 0.0) hist.read(t - r, u_del);
        else u_del = res.u;
      }
      if (workers > 1) {
        sync.arrive_and_wait();
        const auto [lo, hi] = chunk(0);
        update_range(lo, hi);
        sync.arrive_and_wait();
      } else {
        update_range(0, n);
      }
      for (int i = 0; i < n; ++i) {
        const double v = u_new[i];
        const double ex = opt.reaction ? std::max(-v, v - K) : -v;
        res.max_excursion = std::max(res.max_excursion, ex);
      }
      if (res.max_excursion > opt.invariant_slack + 1e-12 * K)
        throw StepFailure("state left the invariant region [0, K] at t = " + std::to_string(t));
      res.u.swap(u_new);
      t += dt;
      ++res.steps;
      if (r > 0.0) hist.record(t, res.u);
      emit();
    }
  } catch (...) {
    finish_pool();
    throw;
  }
  finish_pool();
  res.t = t;
  return res;
}

struct SpeedEstimate {
  double c = 0.0;
  double std_error = 0.0;
  int samples = 0;
  double t_from = 0.0, t_to = 0.0;
};

/// Least-squares slope of position against time over the last
/// `fraction` of the trace, which must span at least `min_span` time units.
inline SpeedEstimate estimate_spreading_speed(const FrontTrace& trace, double fraction,
                                              double min_span) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw InvalidArgument("fit fraction must lie in (0, 1]");
  const std::size_t n = trace.times.size();
  const std::size_t start = n - static_cast<std::size_t>(std::floor(fraction * n));
  if (n < 3 || n - start < 3) throw TraceTooShort("front trace has too few samples");
  const std::span<const double> t(trace.times.data() + start, n - start);
  const std::span<const double> x(trace.positions.data() + start, n - start);
  if (t.back() - t.front() < min_span)
    throw TraceTooShort("fit window spans " + std::to_string(t.back() - t.front()) + " < " +
                        std::to_string(min_span));
  const auto f = numerics::fit_line(t, x);
  return {f.slope, f.slope_stderr, static_cast<int>(t.size()), t.front(), t.back()};
}

/// Span rule for estimate_spreading_speed: 10 delays, or 20 time units without delay.
inline double min_fit_span(const ModelParams& mp) { return mp.r > 0.0 ? 10.0 * mp.r : 20.0; }

}  // namespace sharpfront
