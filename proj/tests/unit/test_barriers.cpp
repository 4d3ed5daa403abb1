#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "fbreg/barriers.hpp"
#include "fbreg/error.hpp"

using namespace fbreg;

namespace {

Barrier constant_barrier(double c) {
  Barrier b;
  b.name = "constant";
  b.dim = 1;
  b.value = [c](std::span<const double>, double) { return c; };
  b.growth = 0.0;
  b.scale = std::abs(c) + 1.0;
  b.valid = [](std::span<const double>, double) { return true; };
  b.singular_distance = [](std::span<const double>, double) {
    return std::numeric_limits<double>::infinity();
  };
  b.claimed = Sense::at_most(0.0);
  return b;
}

}  // namespace

TEST(Verify, ConstantHasExactlyZeroMargin) {
  const KernelSpec k = fractional_laplacian(1, 0.5);
  const Barrier b = constant_barrier(2.5);
  const std::vector<SpaceTimeSample> samples{{{-0.3}, 0.0}, {{0.0}, 0.0}, {{0.4}, 0.0}};
  const double spacings[] = {0.1, 0.05};
  const auto rep = verify_inequality(k, b, samples, b.claimed, spacings);
  ASSERT_EQ(rep.levels.size(), 2u);
  for (const auto& lv : rep.levels) EXPECT_EQ(lv.worst, 0.0);
  EXPECT_TRUE(rep.pass);
  Sense strict = Sense::at_most(0.0, true);
  EXPECT_FALSE(verify_inequality(k, b, samples, strict, spacings).pass);
}

TEST(Verify, SamplesOutsideTheValidityRegionAreRejected) {
  const KernelSpec k = fractional_laplacian(2, 0.5);
  const double e[2] = {0.0, 1.0};
  const Barrier b = cone_supersolution(e, 1.0, 0.1);
  const std::vector<SpaceTimeSample> bad{{{0.0, -1.5}, 0.0}};
  const double spacings[] = {0.1};
  EXPECT_THROW(verify_inequality(k, b, bad, b.claimed, spacings), Error);
}

TEST(Cone, VanishesOutsideItsSupport) {
  const double e[2] = {0.0, 1.0};
  const Barrier b = cone_supersolution(e, 1.0, 0.3);
  for (double a = 0.0; a < 2.0 * std::numbers::pi; a += 0.1) {
    const double x[2] = {std::cos(a), std::sin(a)};
    const double c = x[1];
    const double arg = c + 1.0 * (1.0 - c * c);
    if (arg <= 0.0) EXPECT_EQ(b(x), 0.0);
    else EXPECT_GT(b(x), 0.0);
  }
  const double inside[2] = {0.0, 0.5}, outside[2] = {0.0, -0.5};
  EXPECT_TRUE(in_cone(e, 1.0, inside));
  EXPECT_FALSE(in_cone(e, 1.0, outside));
}

TEST(TravelingCone, SupportAndHomogeneity) {
  const double e[2] = {0.0, 1.0};
  const double omega = 1.0, theta0 = std::numbers::pi / 3, gamma = 0.25;
  const Barrier b = traveling_cone_subsolution(e, omega, theta0, gamma, 0.5);
  for (double t : {-0.8, -0.3}) {
    for (double a = -std::numbers::pi; a < std::numbers::pi; a += 0.2) {
      const double x[2] = {0.5 * std::sin(a), 0.5 * std::cos(a) - omega * t};
      // x + omega t e sits at angle |a| from e.
      if (std::abs(a) >= theta0) EXPECT_EQ(b(x, t), 0.0) << a;
    }
  }
  const double x[2] = {0.1, 0.3};
  for (double r : {0.5, 2.0, 3.0}) {
    const double rx[2] = {r * x[0], r * x[1]};
    const double ref = std::pow(r, 1.0 - gamma) * b(x, -0.2);
    EXPECT_NEAR(b(rx, -0.2 * r), ref, 1e-13 * std::max(1.0, std::abs(ref)));
  }
}

TEST(ExpCusp, NonincreasingInTheDistance) {
  const double e[1] = {1.0};
  const Barrier b = exp_cusp_barrier(e, 0.2, 0.5, true);
  double prev = std::numeric_limits<double>::infinity();
  for (double d = 0.0; d < 3.0; d += 0.25) {
    const double x[1] = {d - 0.5 * 0.3};
    const double val = b(x, 0.3);
    EXPECT_LE(val, prev);
    prev = val;
  }
  EXPECT_THROW(exp_cusp_barrier(e, 0.3), Error);
}

TEST(PowerBarriers, FlatStaticBoundaryHasExponentOneHalf) {
  const KernelSpec k = fractional_laplacian(1, 0.5);
  const GraphDomain flat{[](double) { return 0.0; }, [](double) { return 0.0; }};
  const auto pb = power_regularized_barriers(k, flat, 0.0, 0.2, 3.0);
  EXPECT_DOUBLE_EQ(pb.gamma0, 0.5);
  for (double d : {0.05, 0.3, 0.9}) {
    const double x[1] = {d};
    EXPECT_NEAR(pb.gamma_bar(x, -0.5), 0.5, 1e-15);
    EXPECT_NEAR(pb.phi2(x, -0.5), 3.0 * std::sqrt(d) - std::pow(d, 0.7), 1e-14);
    EXPECT_NEAR(pb.phi1(x, -0.5), 3.0 * std::sqrt(d) + std::pow(d, 0.7), 1e-14);
  }
  const double out[1] = {-0.1};
  EXPECT_EQ(pb.phi1(out, 0.0), 0.0);
  EXPECT_THROW(power_regularized_barriers(k, flat, 0.0, 0.3, 1.0), Error);
}

TEST(PowerBarriers, MovingBoundaryUsesTheCriticalExponent) {
  const KernelSpec k = fractional_laplacian(1, 0.5);
  const GraphDomain moving{[](double t) { return -t; }, [](double) { return -1.0; }};
  const auto pb = power_regularized_barriers(k, moving, 0.0, 0.1, 1.0);
  EXPECT_NEAR(pb.gamma0, 0.75, 1e-12);
  const double x[1] = {0.3};
  EXPECT_NEAR(pb.rho(x, -0.2), (0.3 - 0.2) / std::sqrt(2.0), 1e-15);
}

TEST(HeatTail, BothStatedBoundsHold) {
  const KernelSpec k = fractional_laplacian(1, 0.5);
  const auto rep = heat_tail_supersolution(k, 2.0, 0.5, 129, 32);
  EXPECT_GE(rep.lower, 1.0 - 1e-9);
  EXPECT_TRUE(std::isfinite(rep.upper));
  EXPECT_GT(rep.upper, 0.0);
}
