#include <gtest/gtest.h>

#include <cmath>

#include "sharpfront/kinetics.hpp"
#include "sharpfront/params.hpp"

using namespace sharpfront;

TEST(Kinetics, FisherEquilibrium) {
  const auto k = build_kinetics(KineticsSpec::fisher());
  EXPECT_NEAR(k.K(), 1.0, 1e-10);
  EXPECT_TRUE(k.report().passed);
  EXPECT_NEAR(build_kinetics(KineticsSpec::fisher(4.0)).K(), 1.0, 1e-10);
}

TEST(Kinetics, NicholsonEquilibriumIsLog2) {
  const auto k = build_kinetics(KineticsSpec::nicholson_linear(2, 1, 1, 1));
  EXPECT_NEAR(k.K(), std::log(2.0), 1e-10);
  EXPECT_NEAR(k.b(k.K()), k.d(k.K()), 1e-10);
}

TEST(Kinetics, MackeyGlassEquilibrium) {
  const auto k = build_kinetics(KineticsSpec::mackey_glass(2, 1, 1));
  EXPECT_NEAR(k.K(), 1.0, 1e-10);
}

TEST(Kinetics, NoPositiveEquilibriumWhenBirthTooWeak) {
  EXPECT_THROW(build_kinetics(KineticsSpec::nicholson_linear(0.5, 1, 1, 1)), NoPositiveEquilibrium);
}

TEST(Kinetics, HumpedBirthViolatesMonotonicity) {
  // p_tilde = 20 puts the birth maximum at u = 1 < K
  try {
    build_kinetics(KineticsSpec::nicholson_linear(20, 1, 1, 1));
    FAIL() << "expected HypothesisViolation";
  } catch (const HypothesisViolation& e) {
    EXPECT_FALSE(e.report().passed);
    bool monotone = false;
    for (const auto& v : e.report().violations) monotone = monotone || v.hypothesis == "monotonicity";
    EXPECT_TRUE(monotone);
  }
  const auto k = assemble_unchecked(KineticsSpec::nicholson_linear(20, 1, 1, 1));
  EXPECT_FALSE(k.report().passed);
}

TEST(Kinetics, CustomNeedsHandles) {
  const auto k = build_kinetics(KineticsSpec::custom([](double u) { return 2 * u; }, [](double u) { return u + u * u; },
                                                     [](double) { return 2.0; }, [](double u) { return 1 + 2 * u; }));
  EXPECT_NEAR(k.K(), 1.0, 1e-10);
}

TEST(Kinetics, KindNamesRoundTrip) {
  EXPECT_EQ(kinetics_kind_from_string("MackeyGlass"), KineticsKind::MackeyGlass);
  EXPECT_THROW(kinetics_kind_from_string("logistic"), InvalidArgument);
}

TEST(Params, RegimeViolationNamesConstraint) {
  try {
    ModelParams::make(1.0, 2.0);
    FAIL();
  } catch (const InvalidRegime& e) {
    EXPECT_NE(std::string(e.what()).find("m(p-1)"), std::string::npos);
  }
  EXPECT_NO_THROW(ModelParams::make(3.0, 1.5));
  EXPECT_THROW(ModelParams::make(2.0, 2.0, -1.0), Error);
}
