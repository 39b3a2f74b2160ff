#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "sharpfront/regularity.hpp"
#include "sharpfront/speed_finder.hpp"

using namespace sharpfront;

namespace {
const Kinetics& fisher() {
  static const Kinetics k = build_kinetics(KineticsSpec::fisher());
  return k;
}
WaveProfile critical(double m, double p) {
  SpeedOptions o;
  o.tol = 1e-6;
  return *critical_speed_nodelay(ModelParams::make(m, p), fisher(), o).profile_at_c_star;
}
}  // namespace

TEST(RegularityClass, IntegerCaseIsLipschitz) {
  const auto rc = regularity_class(ModelParams::make(2, 2));
  EXPECT_TRUE(rc.is_integer_case);
  EXPECT_EQ(rc.gamma, 0);
  EXPECT_DOUBLE_EQ(rc.alpha, 1.0);
  EXPECT_FALSE(rc.is_C1);
}

TEST(RegularityClass, FractionalCases) {
  auto rc = regularity_class(ModelParams::make(2, 3));
  EXPECT_NEAR(rc.ratio, 2.0 / 3.0, 1e-15);
  EXPECT_EQ(rc.gamma, 0);
  EXPECT_FALSE(rc.is_C1);
  rc = regularity_class(ModelParams::make(1.5, 2));
  EXPECT_NEAR(rc.ratio, 2.0, 1e-15);
  EXPECT_EQ(rc.gamma, 1);
  EXPECT_TRUE(rc.is_C1);
  rc = regularity_class(ModelParams::make(1.2, 2));
  EXPECT_NEAR(rc.ratio, 5.0, 1e-12);
  EXPECT_EQ(rc.gamma, 4);
}

TEST(RegularityClass, ThresholdAgreesOnRandomParameters) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> um(0.3, 5.0), up(1.1, 5.0);
  int n = 0;
  while (n < 200) {
    const double m = um(rng), p = up(rng);
    if (m * (p - 1) <= 1.000001) continue;
    ++n;
    EXPECT_EQ(regularity_class(ModelParams::make(m, p)).is_C1, m < p / (p - 1)) << m << " " << p;
  }
}

TEST(EdgeFitTest, ExponentsMatchTheory) {
  for (auto [m, p] : std::vector<std::pair<double, double>>{{2, 2}, {3, 1.5}, {2, 3}}) {
    const auto f = fit_edge_exponent(critical(m, p), 1.0);
    EXPECT_NEAR(f.exponent / ((p - 1) / (m * (p - 1) - 1)), 1.0, 0.05) << m << " " << p;
  }
}

TEST(EdgeFitTest, SparseWindowRejected) {
  WaveProfile w;
  w.t = {1, 2, 3};
  w.phi = {1e-5, 2e-5, 3e-5};
  w.psi = {1, 1, 1};
  EXPECT_THROW(fit_edge_exponent(w, 1.0), WindowTooSparse);
}

TEST(DecayFitTest, FisherExponentialTail) {
  const auto mp = ModelParams::make(2, 2);
  const auto prof = critical(2, 2);
  const auto d = fit_equilibrium_decay(prof, mp, 1.0, asymptotics_at_K(mp, fisher(), prof.c));
  EXPECT_EQ(d.fitted_kind, DecayKind::Exponential);
  EXPECT_TRUE(d.kind_match);
  EXPECT_NEAR(d.rate, 0.5, 0.025);
}

TEST(DecayFitTest, SubquadraticAlgebraicTail) {
  const auto mp = ModelParams::make(3, 1.5);
  const auto prof = critical(3, 1.5);
  const auto d = fit_equilibrium_decay(prof, mp, 1.0, asymptotics_at_K(mp, fisher(), prof.c));
  EXPECT_EQ(d.fitted_kind, DecayKind::Algebraic);
  EXPECT_NEAR(d.rate, 3.0, 0.3);
}

TEST(DecayFitTest, ShortTailRejected) {
  const auto mp = ModelParams::make(2, 2);
  WaveProfile w;
  for (int i = 0; i < 50; ++i) {
    w.t.push_back(i);
    w.phi.push_back(0.5 + 0.004 * i);
    w.psi.push_back(0.1);
  }
  EXPECT_THROW(fit_equilibrium_decay(w, mp, 1.0, asymptotics_at_K(mp, fisher(), 1.0)), TailTooShort);
}
