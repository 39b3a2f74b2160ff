#include <gtest/gtest.h>

#include <cmath>

#include "sharpfront/kinetics.hpp"
#include "sharpfront/phase_plane.hpp"

using namespace sharpfront;

namespace {
const Kinetics& fisher() {
  static const Kinetics k = build_kinetics(KineticsSpec::fisher());
  return k;
}
}  // namespace

TEST(EdgeExpansion, ExponentAndCoefficient) {
  auto e = sharp_edge_expansion(ModelParams::make(2, 2), 1.0);
  EXPECT_NEAR(e.exponent, 1.0, 1e-14);
  EXPECT_NEAR(e.coefficient, 0.5, 1e-14);
  e = sharp_edge_expansion(ModelParams::make(2, 3), 1.0);
  EXPECT_NEAR(e.exponent, 2.0 / 3.0, 1e-14);
  EXPECT_NEAR(e.coefficient, 0.8254818122236567, 1e-12);
}

TEST(Asymptotics, FisherExponentialDecay) {
  const auto a = asymptotics_at_K(ModelParams::make(2, 2), fisher(), 1.0);
  EXPECT_EQ(a.pcase, PCase::PEq2);
  EXPECT_EQ(a.decay_kind, DecayKind::Exponential);
  EXPECT_NEAR(a.lambda, 0.5, 1e-9);
  EXPECT_NEAR(a.kappa, 1.0, 1e-9);
  EXPECT_LE(std::abs(a.residual), 1e-10);
}

TEST(Asymptotics, SubquadraticPIsAlgebraic) {
  const auto a = asymptotics_at_K(ModelParams::make(3, 1.5), fisher(), 1.0);
  EXPECT_EQ(a.pcase, PCase::PLt2);
  EXPECT_EQ(a.decay_kind, DecayKind::Algebraic);
  EXPECT_NEAR(a.lambda, 0.30285343213868994, 1e-9);
  EXPECT_NEAR(a.kappa, 1.6509636244473133, 1e-9);
  ASSERT_TRUE(a.algebraic_rate.has_value());
  EXPECT_NEAR(*a.algebraic_rate, 3.0, 1e-12);
  EXPECT_LE(std::abs(a.residual), 1e-10);
}

TEST(Asymptotics, SuperquadraticPResidual) {
  const auto a = asymptotics_at_K(ModelParams::make(2, 3), fisher(), 1.0);
  EXPECT_EQ(a.pcase, PCase::PGt2);
  EXPECT_LE(std::abs(a.residual), 1e-10);
}

TEST(SmoothDecay, NicholsonDelayedRoot) {
  const auto k = build_kinetics(KineticsSpec::nicholson_linear(2, 1, 1, 1));
  const auto s = smooth_decay_at_zero(ModelParams::make(2, 2, 1.0), k, 1.0);
  EXPECT_NEAR(s.lambda0, 0.37482252818362338, 1e-12);
  EXPECT_LE(std::abs(s.residual), 1e-12);
}

TEST(Shooting, FisherCriticalCurveIsLogistic) {
  auto src = [](double phi) { return phi - phi * phi; };
  const PhaseShot s = shoot_sharp(ModelParams::make(2, 2), 1.0, 1e-8, 0.999, src);
  ASSERT_EQ(s.end, ShotEnd::ReachedStop);
  double worst = 0.0;
  for (std::size_t i = 0; i < s.curve.size(); ++i)
    worst = std::max(worst, std::abs(s.curve.psi[i] - s.curve.phi[i] * (1 - s.curve.phi[i])));
  EXPECT_LT(worst, 1e-6);
}

TEST(Shooting, SlowSpeedHitsZero) {
  auto src = [](double phi) { return phi - phi * phi; };
  const PhaseShot s = shoot_sharp(ModelParams::make(2, 2), 0.8, 1e-8, 1.0 + 1e-6, src);
  EXPECT_EQ(s.end, ShotEnd::HitZero);
  EXPECT_LT(s.phi_end, 1.0);
}

TEST(PsiOde, RejectsNonPositivePsi) {
  EXPECT_THROW(psi_ode_rhs(ModelParams::make(2, 2), fisher(), 1.0, 0.5, 0.0, 0.5), DomainError);
  EXPECT_NEAR(psi_ode_rhs(ModelParams::make(2, 2), fisher(), 1.0, 0.5, 0.25, 0.5), 0.0, 1e-14);
}

TEST(DelaySegment, LadderCertifiesSharpLaunch) {
  const auto k = build_kinetics(KineticsSpec::nicholson_linear(2, 1, 1, 1));
  const auto seg = initial_delay_segment(ModelParams::make(2, 2, 1.0), k, 0.5);
  ASSERT_FALSE(seg.curve.empty());
  EXPECT_NEAR(seg.t.back(), 0.5, 1e-9);
  EXPECT_GT(seg.phi_end, 0.0);
  EXPECT_LE(seg.extrapolation_gap, 1e-3 * *std::max_element(seg.curve.psi.begin(), seg.curve.psi.end()) + 1e-12);
}
