#include <gtest/gtest.h>

#include <cmath>

#include "fbreg/error.hpp"
#include "fbreg/harnack.hpp"

using namespace fbreg;

namespace {

HarnackScenario small_scenario(double omega) {
  HarnackScenario sc;
  sc.kernel = fractional_laplacian(2, 0.5);
  sc.omega = omega;
  sc.nodes = 65;
  sc.steps = 32;
  return sc;
}

}  // namespace

TEST(Harnack, RejectsOrdersBelowOneHalf) {
  HarnackScenario sc = small_scenario(0.0);
  sc.kernel = fractional_laplacian(2, 0.4);
  EXPECT_THROW(validate_scenario(sc), Error);
  sc.kernel = fractional_laplacian(2, 0.5);
  EXPECT_NO_THROW(validate_scenario(sc));
}

TEST(Harnack, ProportionalDataHaveNoOscillation) {
  HarnackScenario sc = small_scenario(0.0);
  sc.initial1 = [](std::span<const double> x) { return 1.0 + x[1]; };
  sc.initial2 = [](std::span<const double> x) { return 3.0 * (1.0 + x[1]); };
  const auto rep = run_harnack(sc);
  EXPECT_TRUE(rep.exact);
  for (double o : rep.osc) EXPECT_LE(o, 1e-9);
  // Quotients are normalized by the anchor values.
  EXPECT_NEAR(rep.anchor2 / rep.anchor1, 3.0, 1e-9);
  EXPECT_NEAR(rep.min_ratio12, 1.0, 1e-9);
  EXPECT_NEAR(rep.min_ratio21, 1.0, 1e-9);
}

TEST(Harnack, DefaultPairIsComparableAndDecays) {
  const auto rep = run_harnack(small_scenario(0.5));
  ASSERT_EQ(rep.radii.size(), 4u);
  EXPECT_TRUE(rep.positive);
  EXPECT_TRUE(rep.monotone);
  EXPECT_GT(rep.min_ratio12, 0.0);
  EXPECT_GT(rep.min_ratio21, 0.0);
  EXPECT_FALSE(rep.exact);
  for (std::size_t i = 1; i < rep.radii.size(); ++i)
    EXPECT_NEAR(rep.radii[i], rep.radii[i - 1] / 2.0, 1e-15);
}
