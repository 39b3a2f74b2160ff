#include <gtest/gtest.h>

#include <cmath>

#include "sharpfront/delay_stepper.hpp"
#include "sharpfront/speed_finder.hpp"

using namespace sharpfront;

namespace {
const Kinetics& fisher() {
  static const Kinetics k = build_kinetics(KineticsSpec::fisher());
  return k;
}
const Kinetics& nicholson() {
  static const Kinetics k = build_kinetics(KineticsSpec::nicholson_linear(2, 1, 1, 1));
  return k;
}
SpeedOptions tol(double t, bool profile = false) {
  SpeedOptions o;
  o.tol = t;
  o.build_profile = profile;
  return o;
}
}  // namespace

TEST(Profile, ClassificationAroundFisherCriticalSpeed) {
  const auto mp = ModelParams::make(2, 2);
  EXPECT_EQ(construct_profile(mp, fisher(), 0.9).classification.kind, ClassKind::DecaysToZero);
  EXPECT_EQ(construct_profile(mp, fisher(), 1.1).classification.kind, ClassKind::ExceedsK);
}

TEST(Profile, DelayedProfileClassifies) {
  const auto mp = ModelParams::make(2, 2, 1.0);
  EXPECT_EQ(construct_profile(mp, nicholson(), 0.3).classification.kind, ClassKind::DecaysToZero);
  EXPECT_EQ(construct_profile(mp, nicholson(), 0.4).classification.kind, ClassKind::ExceedsK);
}

TEST(Profile, TravelTimeRoundTrip) {
  const auto mp = ModelParams::make(2, 2);
  const WaveProfile p = construct_profile(mp, fisher(), 1.1);
  EXPECT_LT(round_trip_error(mp, p), 1e-6);
}

TEST(TravelTimeTest, InverseMatchesForward) {
  PhaseCurve c;
  c.phi = {0.0, 1e-6};
  for (int i = 1; i <= 200; ++i) c.phi.push_back(0.99 * i / 200.0);
  for (double phi : c.phi) {
    c.psi.push_back(phi * (1 - phi));
    c.slope.push_back(1 - 2 * phi);
  }
  const auto mp = ModelParams::make(2, 2, 1.0);
  const TravelTime T(mp, c);
  // logistic curve: T(phi) = -2 log(1 - phi)
  EXPECT_NEAR(T(0.5), 2.0 * std::log(2.0), 1e-6);
  EXPECT_NEAR(T.inverse(T(0.7)), 0.7, 1e-10);
  EXPECT_NEAR(delayed_phase_value(T, mp, 0.75, 2.0 * std::log(2.0)), 0.5, 1e-6);
  EXPECT_EQ(delayed_phase_value(T, mp.with_delay(0.0), 0.4, 1.0), 0.4);
}

TEST(Speed, FisherNoDelayIsOne) {
  const auto r = critical_speed_nodelay(ModelParams::make(2, 2), fisher(), tol(1e-4, true));
  EXPECT_NEAR(r.c_star, 1.0, 1e-3);
  EXPECT_LT(r.c_lo, r.c_hi);
  ASSERT_TRUE(r.curve_at_c_star.has_value());
  ASSERT_TRUE(r.profile_at_c_star.has_value());
}

TEST(Speed, FisherScaledIsTwo) {
  const auto r = critical_speed_nodelay(ModelParams::make(2, 2), build_kinetics(KineticsSpec::fisher(4)), tol(1e-4));
  EXPECT_NEAR(r.c_star, 2.0, 2e-3);
}

TEST(Speed, MethodsAgreeWithoutDelay) {
  const auto mp = ModelParams::make(2, 2);
  const auto a = critical_speed(mp, nicholson(), tol(1e-3));
  const auto b = critical_speed_nodelay(mp, nicholson(), tol(1e-3));
  EXPECT_NEAR(a.c_star, b.c_star, 2e-3);
}

TEST(Speed, DelayStrictlyReducesSpeed) {
  const auto c0 = critical_speed(ModelParams::make(2, 2, 0.0), nicholson(), tol(1e-3)).c_star;
  const auto c1 = critical_speed(ModelParams::make(2, 2, 0.5), nicholson(), tol(1e-3)).c_star;
  EXPECT_GT(c0 - c1, 3e-3);
}

TEST(Speed, BracketNestsOnEveryStep) {
  const auto r = critical_speed_nodelay(ModelParams::make(2, 2), fisher(), tol(1e-6));
  double lo = 0.0, hi = 1e300;
  for (const auto& s : r.trace) {
    if (s.c_lo <= 0.0 || s.c_hi <= 0.0) continue;
    EXPECT_LT(s.c_lo, s.c_hi);
    EXPECT_GE(s.c_lo, lo);
    EXPECT_LE(s.c_hi, hi);
    lo = s.c_lo;
    hi = s.c_hi;
  }
  EXPECT_LE(r.c_hi - r.c_lo, 1e-6 * r.c_star * 1.0001);
}

TEST(Speed, NodelayRefusesDelayUnlessForced) {
  const auto mp = ModelParams::make(2, 2, 1.0);
  EXPECT_THROW(critical_speed_nodelay(mp, fisher(), tol(1e-3)), InvalidArgument);
  EXPECT_NEAR(critical_speed_nodelay(mp, fisher(), tol(1e-3), true).c_star, 1.0, 2e-3);
}

TEST(Speed, InvalidToleranceRejected) {
  EXPECT_THROW(critical_speed_nodelay(ModelParams::make(2, 2), fisher(), tol(0.0)), InvalidArgument);
}
