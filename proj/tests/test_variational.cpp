#include <gtest/gtest.h>

#include <cmath>

#include "sharpfront/variational.hpp"

using namespace sharpfront;

namespace {
const Kinetics& fisher() {
  static const Kinetics k = build_kinetics(KineticsSpec::fisher());
  return k;
}
const PhaseCurve& fisher_curve() {
  static const PhaseCurve c = [] {
    SpeedOptions o;
    o.tol = 1e-7;
    return *critical_speed_nodelay(ModelParams::make(2, 2), fisher(), o).curve_at_c_star;
  }();
  return c;
}
}  // namespace

TEST(Trial, UnitMassAndAdmissibility) {
  EXPECT_THROW(TrialFunction::power_decay(0.5, 1.0), NotAdmissible);
  EXPECT_THROW(TrialFunction::exponential(-1.0, 1.0), NotAdmissible);
  const auto g = TrialFunction::power_decay(1.0, 1.0);
  EXPECT_NEAR(g(0.0), 2.0, 1e-15);
  EXPECT_NEAR(g.derivative(0.3), -2.0, 1e-15);
}

TEST(Young, LinearWeightBound) {
  const double b = young_lower_bound(ModelParams::make(2, 2), fisher(), TrialFunction::power_decay(1.0, 1.0));
  EXPECT_NEAR(b, 2.0 * std::sqrt(2.0) / 3.0, 1e-6);
}

TEST(Young, OptimizerFindsQuadraticWeight) {
  const auto r = optimize_trial(ModelParams::make(2, 2), fisher(), TrialFamily::PowerDecay);
  EXPECT_NEAR(r.best_trial.parameters()[0], 2.0, 0.05);
  EXPECT_NEAR(r.bound, 1.0, 2e-3);
  EXPECT_LE(r.evaluations, 60);
}

TEST(FInvariance, EqualsCriticalSpeedForAnyWeight) {
  const auto mp = ModelParams::make(2, 2);
  for (const auto& g : {TrialFunction::power_decay(1, 1), TrialFunction::power_decay(3.5, 1),
                        TrialFunction::exponential(1, 1), TrialFunction::exponential(3, 1)}) {
    const double F = evaluate_F(mp, fisher(), g, fisher_curve());
    EXPECT_NEAR(F, 1.0, 1e-3);
    EXPECT_LE(young_lower_bound(mp, fisher(), g), F + 1e-6);
  }
}

TEST(FInvariance, IncompleteCurveRejected) {
  PhaseCurve c;
  c.phi = {0.0, 0.5};
  c.psi = {0.0, 0.25};
  EXPECT_THROW(evaluate_F(ModelParams::make(2, 2), fisher(), TrialFunction::power_decay(1, 1), c), CurveIncomplete);
}

TEST(OptimalWeight, FisherIsQuadratic) {
  const auto g = solve_optimal_trial(ModelParams::make(2, 2), fisher(), fisher_curve());
  EXPECT_NEAR(g(0.0), 3.0, 1e-3);
  EXPECT_NEAR(g(0.5), 0.75, 1e-3);
}

TEST(OptimalWeight, NonIntegrableHeadRejected) {
  // outside the slow-diffusion regime: m - p/(p-1) = -1.8
  const auto mq = ModelParams::unchecked(1.2, 1.5);
  EXPECT_THROW(solve_optimal_trial(mq, fisher(), fisher_curve()), NotIntegrable);
}
