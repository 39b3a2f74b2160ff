#pragma once

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "sharpfront/errors.hpp"

namespace sharpfront::numerics {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  template <typename F>
  double integrate(F&& f) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * f(nodes[i]);
    return sum;
  }
};

/// n-point Gauss-Legendre rule on [-1, 1] (Newton iteration on P_n).
inline QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw InvalidArgument("gauss_legendre: n must be positive");
  // returns (P_n(x), P_n'(x))
  auto legendre = [n](double x) {
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    if (n == 1) p0 = 1.0;
    return std::pair{p1, n * (x * p1 - p0) / (x * x - 1.0)};
  };
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre(x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

/// Composite Gauss-Legendre rule on [a, b] with panels graded geometrically
/// toward both endpoints. `n_quad` bounds the node count; panels carry
/// `order` points each and come in mirrored pairs. Panel widths shrink by `ratio` per level.
inline QuadratureRule graded_rule(double a, double b, int n_quad, int order = 16,
                                  double ratio = 0.25) {
  if (!(b > a)) throw InvalidArgument("graded_rule: empty interval");
  if (n_quad < 2 * order) throw InvalidArgument("graded_rule: n_quad too small");
  const int panels = n_quad / order;
  const int per_side = panels / 2;
  // breakpoints on [0, 1/2]: 0, r^(L-1)/2, ..., r/2, 1/2
  std::vector<double> half{0.0};
  for (int k = per_side - 1; k >= 1; --k) half.push_back(0.5 * std::pow(ratio, k));
  half.push_back(0.5);
  std::vector<double> breaks = half;
  for (int k = static_cast<int>(half.size()) - 2; k >= 0; --k) breaks.push_back(1.0 - half[k]);
  const QuadratureRule base = gauss_legendre(order);
  QuadratureRule rule;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double lo = a + (b - a) * breaks[i];
    const double hi = a + (b - a) * breaks[i + 1];
    if (hi <= lo) continue;
    const double mid = 0.5 * (lo + hi), rad = 0.5 * (hi - lo);
    for (int j = 0; j < order; ++j) {
      rule.nodes.push_back(mid + rad * base.nodes[j]);
      rule.weights.push_back(rad * base.weights[j]);
    }
  }
  return rule;
}

}  // namespace sharpfront::numerics
