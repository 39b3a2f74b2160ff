#include <gtest/gtest.h>

#include <cmath>

#include "sharpfront/numerics/dopri.hpp"
#include "sharpfront/numerics/interp.hpp"
#include "sharpfront/numerics/quadrature.hpp"
#include "sharpfront/numerics/roots.hpp"

using namespace sharpfront::numerics;

TEST(Roots, BisectFindsSqrt2) {
  const double r = bisect([](double x) { return x * x - 2.0; }, 0.0, 2.0);
  EXPECT_NEAR(r, std::sqrt(2.0), 1e-13);
}

TEST(Roots, PositiveRootExpandsBracket) {
  const auto r = positive_root([](double x) { return x - 1000.0; });
  ASSERT_TRUE(r.has_value());
  EXPECT_NEAR(*r, 1000.0, 1e-9);
  EXPECT_FALSE(positive_root([](double) { return -1.0; }).has_value());
}

TEST(Quadrature, GaussLegendreExactForPolynomials) {
  const auto rule = gauss_legendre(8);
  EXPECT_NEAR(rule.integrate([](double x) { return std::pow(x, 14); }), 2.0 / 15.0, 1e-14);
}

TEST(Quadrature, GradedRuleHandlesEndpointSingularities) {
  const auto rule = graded_rule(0.0, 1.0, 512);
  EXPECT_NEAR(rule.integrate([](double x) { return 1.0 / std::sqrt(x); }), 2.0, 1e-5);
  EXPECT_NEAR(rule.integrate([](double x) { return std::log(1.0 - x); }), -1.0, 1e-10);
}

TEST(Dopri, ExponentialDecayAndDenseOutput) {
  DopriOptions opt;
  double worst = 0.0;
  const auto res = dopri5<1>([](double, const Vec<1>& y) { return Vec<1>{-y[0]}; }, 0.0, Vec<1>{1.0}, 5.0, opt,
                             [&](const DenseStep<1>& s) {
                               const double tm = s.t0 + 0.5 * s.h;
                               worst = std::max(worst, std::abs(s.at(tm)[0] - std::exp(-tm)));
                               return true;
                             });
  EXPECT_EQ(res.status, IntegrationStatus::Completed);
  EXPECT_NEAR(res.y[0], std::exp(-5.0), 1e-10);
  EXPECT_LT(worst, 1e-8);
}

TEST(Dopri, IntegratesBackward) {
  const auto res = dopri5<1>([](double, const Vec<1>& y) { return Vec<1>{y[0]}; }, 1.0, Vec<1>{1.0}, 0.0,
                             DopriOptions{}, [](const DenseStep<1>&) { return true; });
  EXPECT_NEAR(res.y[0], std::exp(-1.0), 1e-10);
}

TEST(Interp, HermiteReproducesCubic) {
  std::vector<double> x{0, 0.5, 1.3, 2}, y, dy;
  for (double v : x) {
    y.push_back(v * v * v);
    dy.push_back(3 * v * v);
  }
  HermiteInterpolant h(x, y, dy);
  EXPECT_NEAR(h(0.9), 0.729, 1e-14);
}

TEST(Interp, LineFitRecoversSlope) {
  std::vector<double> x{0, 1, 2, 3}, y{1, 3, 5, 7};
  const auto f = fit_line(x, y);
  EXPECT_NEAR(f.slope, 2.0, 1e-14);
  EXPECT_NEAR(f.intercept, 1.0, 1e-14);
  EXPECT_NEAR(f.r2, 1.0, 1e-14);
}
