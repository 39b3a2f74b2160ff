#include <gtest/gtest.h>

#include <cmath>

#include "sharpfront/pde_sim.hpp"

using namespace sharpfront;

namespace {
const Kinetics& fisher() {
  static const Kinetics k = build_kinetics(KineticsSpec::fisher());
  return k;
}
auto hat = [](double x) { return std::max(0.0, 1.0 - std::abs(x)); };
}  // namespace

TEST(Grid, Geometry) {
  const auto g = Grid1D::make(0, 10, 100);
  EXPECT_DOUBLE_EQ(g.dx(), 0.1);
  EXPECT_NEAR(g.center(0), 0.05, 1e-15);
  EXPECT_THROW(Grid1D::make(1, 0, 10), InvalidArgument);
}

TEST(History, InterpolatesBetweenSnapshots) {
  DelayHistory h({0.0}, 1.0, 0.1);
  h.record(0.1, {1.0});
  h.record(0.2, {2.0});
  std::vector<double> out;
  h.read(0.15, out);
  EXPECT_NEAR(out[0], 1.5, 1e-14);
  h.read(-1.0, out);
  EXPECT_EQ(out[0], 0.0);
}

TEST(Simulator, InvariantRegionHolds) {
  SimOptions o;
  o.t_end = 10;
  const auto r = simulate_front(ModelParams::make(2, 2), fisher(), hat, Grid1D::make(-2, 30, 320), o);
  EXPECT_LE(r.max_excursion, 1e-12);
  for (double v : r.u) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0 + 1e-12);
  }
}

TEST(Simulator, ZeroReactionConservesMass) {
  SimOptions o;
  o.t_end = 10;
  o.reaction = false;
  for (double p : {2.0, 3.0, 1.5}) {
    const double m = p == 1.5 ? 3.0 : 2.0;
    const auto r = simulate_front(ModelParams::make(m, p), fisher(), hat, Grid1D::make(-10, 10, 200), o);
    EXPECT_NEAR(r.mass.back() / r.mass.front(), 1.0, 1e-10) << p;
  }
}

TEST(Simulator, ParallelMatchesSerial) {
  SimOptions o;
  o.t_end = 5;
  const auto g = Grid1D::make(-2, 20, 220);
  const auto a = simulate_front(ModelParams::make(2, 2), fisher(), hat, g, o);
  o.workers = 3;
  const auto b = simulate_front(ModelParams::make(2, 2), fisher(), hat, g, o);
  ASSERT_EQ(a.u.size(), b.u.size());
  for (std::size_t i = 0; i < a.u.size(); ++i) EXPECT_EQ(a.u[i], b.u[i]);
}

TEST(Simulator, FrontReachingBoundaryIsReported) {
  SimOptions o;
  o.t_end = 40;
  EXPECT_THROW(simulate_front(ModelParams::make(2, 2), fisher(), hat, Grid1D::make(-2, 10, 120), o),
               BoundaryContamination);
}

TEST(Simulator, FisherSpreadingSpeed) {
  SimOptions o;
  o.t_end = 60;
  const auto r = simulate_front(ModelParams::make(2, 2), fisher(), hat, Grid1D::make(-2, 80, 820), o);
  const auto e = estimate_spreading_speed(r.trace, 0.5, 20.0);
  EXPECT_NEAR(e.c, 1.0, 0.05);
}

TEST(SpeedEstimateTest, ShortTraceRejected) {
  FrontTrace t;
  t.times = {0, 1, 2, 3};
  t.positions = {0, 1, 2, 3};
  EXPECT_THROW(estimate_spreading_speed(t, 1.0, 20.0), TraceTooShort);
  EXPECT_THROW(estimate_spreading_speed(t, 0.0, 1.0), InvalidArgument);
}
