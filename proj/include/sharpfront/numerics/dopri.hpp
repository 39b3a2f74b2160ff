#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <utility>
#include <vector>

namespace sharpfront::numerics {

template <std::size_t N>
using Vec = std::array<double, N>;

/// One accepted Dormand-Prince step together with its 4th-order continuous
/// extension (Hairer's dopri5 dense output).
template <std::size_t N>
struct DenseStep {
  double t0 = 0.0;
  double h = 0.0;
  Vec<N> y0{};
  Vec<N> y1{};
  Vec<N> f0{};
  Vec<N> f1{};
  std::array<Vec<N>, 5> rcont{};

  double t1() const { return t0 + h; }

  Vec<N> at(double t) const {
    const double theta = (t - t0) / h;
    const double theta1 = 1.0 - theta;
    Vec<N> y{};
    for (std::size_t i = 0; i < N; ++i) {
      y[i] = rcont[0][i] +
             theta * (rcont[1][i] +
                      theta1 * (rcont[2][i] + theta * (rcont[3][i] + theta1 * rcont[4][i])));
    }
    return y;
  }
};

enum class IntegrationStatus { Completed, Stopped, StepUnderflow, MaxSteps, NonFinite };

template <std::size_t N>
struct IntegrationResult {
  IntegrationStatus status = IntegrationStatus::Completed;
  double t = 0.0;
  Vec<N> y{};
  long accepted = 0;
  long rejected = 0;
};

struct DopriOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double h_init = 0.0;  // 0 selects an automatic initial step
  double h_max = std::numeric_limits<double>::infinity();
  double h_max_rel = std::numeric_limits<double>::infinity();  // cap h by h_max_rel*|t|
  double h_min_rel = 1e-15;  // relative to |t|
  long max_steps = 2'000'000;
  std::vector<double> error_weights;  // per component; empty means all 1
};

/// Adaptive embedded 5(4) Runge-Kutta integrator. Works in either direction
/// of t. The observer is called with every accepted DenseStep and returns
/// false to stop the integration after that step.
template <std::size_t N, typename Rhs, typename Observer>
IntegrationResult<N> dopri5(Rhs&& rhs, double t0, Vec<N> y0, double t_end,
                            const DopriOptions& opt, Observer&& observer) {
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                   a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                   a75 = -2187.0 / 6784, a76 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
  constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                   d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                   d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

  IntegrationResult<N> res;
  res.t = t0;
  res.y = y0;
  const double span = t_end - t0;
  if (span == 0.0) return res;
  const double dir = span > 0 ? 1.0 : -1.0;

  auto combine = [](const Vec<N>& y, double h, std::initializer_list<std::pair<double, const Vec<N>*>> terms) {
    Vec<N> out = y;
    for (const auto& [coef, k] : terms) {
      if (coef == 0.0) continue;
      for (std::size_t i = 0; i < N; ++i) out[i] += h * coef * (*k)[i];
    }
    return out;
  };

  double t = t0;
  Vec<N> y = y0;
  Vec<N> k1 = rhs(t, y);

  double h = opt.h_init;
  if (h <= 0.0) {
    double d0 = 0.0, d1n = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sc = opt.atol + opt.rtol * std::abs(y[i]);
      const double wgt = opt.error_weights.empty() ? 1.0 : opt.error_weights[i];
      d0 += wgt * (y[i] / sc) * (y[i] / sc);
      d1n += wgt * (k1[i] / sc) * (k1[i] / sc);
    }
    d0 = std::sqrt(d0 / N);
    d1n = std::sqrt(d1n / N);
    h = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
    h = std::min(h, std::abs(span) * 1e-2);
  }
  h = std::min({h, opt.h_max, std::abs(span)});

  double err_prev = 1e-4;
  bool last_rejected = false;
  for (long n = 0; n < opt.max_steps; ++n) {
    const double h_min = opt.h_min_rel * std::max(std::abs(t), 1e-300);
    if (h < h_min) {
      res.status = IntegrationStatus::StepUnderflow;
      res.t = t;
      res.y = y;
      return res;
    }
    if (std::isfinite(opt.h_max_rel)) h = std::min(h, std::max(opt.h_max_rel * std::abs(t), h_min));
    bool last = false;
    if (dir * (t + dir * h - t_end) >= 0.0 || std::abs(t_end - (t + dir * h)) < h_min) {
      h = std::abs(t_end - t);
      last = true;
    }
    const double hs = dir * h;
    const Vec<N> y2 = combine(y, hs, {{a21, &k1}});
    const Vec<N> k2 = rhs(t + c2 * hs, y2);
    const Vec<N> y3 = combine(y, hs, {{a31, &k1}, {a32, &k2}});
    const Vec<N> k3 = rhs(t + c3 * hs, y3);
    const Vec<N> y4 = combine(y, hs, {{a41, &k1}, {a42, &k2}, {a43, &k3}});
    const Vec<N> k4 = rhs(t + c4 * hs, y4);
    const Vec<N> y5 = combine(y, hs, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}});
    const Vec<N> k5 = rhs(t + c5 * hs, y5);
    const Vec<N> y6 =
        combine(y, hs, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}});
    const double t_new = last ? t_end : t + hs;
    const Vec<N> k6 = rhs(t + hs, y6);
    const Vec<N> y_new =
        combine(y, hs, {{a71, &k1}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}});
    const Vec<N> k7 = rhs(t_new, y_new);

    double err = 0.0;
    bool finite = true;
    for (std::size_t i = 0; i < N; ++i) {
      const double ei =
          hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(y_new[i]));
      const double wgt = opt.error_weights.empty() ? 1.0 : opt.error_weights[i];
      err += wgt * (ei / sc) * (ei / sc);
      finite = finite && std::isfinite(y_new[i]);
    }
    err = std::sqrt(err / N);
    if (!finite || !std::isfinite(err)) {
      ++res.rejected;
      h *= 0.25;
      last_rejected = true;
      continue;
    }

    if (err <= 1.0) {
      DenseStep<N> step;
      step.t0 = t;
      step.h = t_new - t;
      step.y0 = y;
      step.y1 = y_new;
      step.f0 = k1;
      step.f1 = k7;
      for (std::size_t i = 0; i < N; ++i) {
        const double ydiff = y_new[i] - y[i];
        const double bspl = step.h * k1[i] - ydiff;
        step.rcont[0][i] = y[i];
        step.rcont[1][i] = ydiff;
        step.rcont[2][i] = bspl;
        step.rcont[3][i] = ydiff - step.h * k7[i] - bspl;
        step.rcont[4][i] = step.h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                                     d6 * k6[i] + d7 * k7[i]);
      }
      ++res.accepted;
      t = t_new;
      y = y_new;
      k1 = k7;
      const bool keep_going = observer(step);
      if (!keep_going) {
        res.status = IntegrationStatus::Stopped;
        res.t = t;
        res.y = y;
        return res;
      }
      if (last) {
        res.status = IntegrationStatus::Completed;
        res.t = t;
        res.y = y;
        return res;
      }
      // PI step-size control
      const double e = std::max(err, 1e-10);
      double fac = 0.9 * std::pow(e, -0.7 / 5.0) * std::pow(err_prev, 0.4 / 5.0);
      fac = std::clamp(fac, 0.2, 5.0);
      if (last_rejected) fac = std::min(fac, 1.0);
      h = std::min(h * fac, opt.h_max);
      err_prev = std::max(err, 1e-4);
      last_rejected = false;
    } else {
      ++res.rejected;
      h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
      last_rejected = true;
    }
  }
  res.status = IntegrationStatus::MaxSteps;
  res.t = t;
  res.y = y;
  return res;
}

}  // namespace sharpfront::numerics
