#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fbreg/error.hpp"
#include "fbreg/metrics.hpp"
#include "oracles.hpp"

using namespace fbreg;
using oracle::brute_seminorm;

namespace {

GridFunction random_grid(int kind, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  GridFunction w = kind == 0   ? GridFunction::spatial({20}, 0.05, {0.0}, 0.5)
                   : kind == 1 ? GridFunction::spatial({20, 20}, 0.05, {0.0, 0.0}, 0.5)
                               : GridFunction::space_time(20, {20}, 0.05, 0.01, {0.0}, 0.0, 0.6);
  const double a = u(rng), b = 3.0 * u(rng);
  for (std::size_t i = 0; i < w.size(); ++i) {
    double r = 0.0;
    for (double c : w.coordinates(i)) r += c;
    w[i] = a * std::sin(b * r) + 0.05 * u(rng);
  }
  return w;
}

}  // namespace

TEST(Holder, ConstantHasZeroSeminorm) {
  GridFunction w = GridFunction::spatial({9, 9}, 0.1, {0.0, 0.0}, 0.5);
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = 4.0;
  EXPECT_EQ(parabolic_holder_seminorm(w, 0.5, 0.5).value, 0.0);
}

TEST(Holder, TwoNodesGiveTheQuotient) {
  GridFunction w = GridFunction::spatial({2}, 0.3, {0.0}, 0.5);
  w[0] = 0.0;
  w[1] = 0.3;
  const auto rep = parabolic_holder_seminorm(w, 0.4, 0.5);
  EXPECT_NEAR(rep.value, std::pow(0.3, 0.6), 1e-15);
  EXPECT_TRUE(rep.exact);
}

TEST(Holder, AgreesWithAllPairsSearch) {
  std::mt19937_64 rng(11);
  for (int f = 0; f < 10; ++f) {
    const GridFunction w = random_grid(f % 3, rng);
    for (double beta : {0.3, 0.5, 0.9}) {
      const double ref = brute_seminorm(w, beta, w.s());
      const auto rep = parabolic_holder_seminorm(w, beta, w.s());
      EXPECT_TRUE(rep.exact);
      EXPECT_NEAR(rep.value, ref, 1e-12 * ref) << "f=" << f << " beta=" << beta;
    }
  }
}

TEST(Holder, SampledSearchNeverExceedsTheExactValue) {
  std::mt19937_64 rng(5);
  const GridFunction w = random_grid(1, rng);
  SeminormOptions opt;
  opt.force_sampled = true;
  opt.pair_budget = 5000;
  opt.seed = 3;
  const auto rep = parabolic_holder_seminorm(w, 0.5, 0.5, {}, opt);
  EXPECT_FALSE(rep.exact);
  EXPECT_EQ(rep.seed, 3u);
  EXPECT_LE(rep.value, brute_seminorm(w, 0.5, 0.5) * (1.0 + 1e-12));
  EXPECT_GT(rep.value, 0.0);
  const auto again = parabolic_holder_seminorm(w, 0.5, 0.5, {}, opt);
  EXPECT_EQ(again.value, rep.value);
}

TEST(Holder, RegionRestrictsTheSearch) {
  GridFunction w = GridFunction::spatial({10}, 0.1, {0.0}, 0.5);
  for (std::size_t i = 0; i < 10; ++i) w[i] = i < 5 ? 0.0 : static_cast<double>(i);
  Region left;
  left.ranges = {{0, 4}};
  EXPECT_EQ(parabolic_holder_seminorm(w, 0.5, 0.5, left).value, 0.0);
}

TEST(Holder, GradientOfAPowerIsFinite) {
  const double s = 0.5;
  GridFunction u = GridFunction::spatial({101}, 0.02, {-1.0}, s);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double x = u.coordinates(i)[0];
    u[i] = x > 0.0 ? std::pow(x, 1.0 + s) : 0.0;
  }
  const auto rep = global_gradient_holder(u, s, {});
  EXPECT_TRUE(std::isfinite(rep.value));
  EXPECT_GT(rep.value, 0.5);
  EXPECT_LT(rep.value, 3.0);
}

TEST(Order, RecoversKnownRates) {
  const std::vector<double> h{0.1, 0.05, 0.025, 0.0125};
  std::vector<double> quad, root, noisy;
  const double wobble[] = {1.03, 0.97, 1.05, 0.96};
  for (std::size_t i = 0; i < h.size(); ++i) {
    quad.push_back(h[i] * h[i]);
    root.push_back(3.0 * std::sqrt(h[i]));
    noisy.push_back(h[i] * wobble[i]);
  }
  EXPECT_NEAR(convergence_order(quad, h).order, 2.0, 1e-12);
  EXPECT_NEAR(convergence_order(root, h).order, 0.5, 1e-12);
  const auto est = convergence_order(noisy, h);
  EXPECT_NEAR(est.order, 1.0, 0.2);
  EXPECT_TRUE(est.monotone);
  const std::vector<double> two{1.0, 0.5};
  EXPECT_THROW(convergence_order(two, std::span<const double>(h.data(), 2)), Error);
}

TEST(TimeRegularity, TravelingPowerGivesItsExponent) {
  // (x + t)_+^{1 + alpha}: d_t u is C^alpha in time. The spatial nodes sample
  // many offsets of the kink relative to the time levels.
  for (double alpha : {0.4, 0.75}) {
    GridFunction u = GridFunction::space_time(1025, {81}, 0.025, 1.0 / 1024, {-1.0}, 0.0, 0.5);
    for (std::size_t i = 0; i < u.size(); ++i) {
      const auto p = u.coordinates(i);
      const double d = p[1] + p[0];
      u[i] = d > 0.0 ? std::pow(d, 1.0 + alpha) : 0.0;
    }
    const auto rep = fit_time_regularity(u, 0.5, 0.05, 0.0, 1.0);
    EXPECT_NEAR(rep.measured, alpha, 0.05) << "alpha=" << alpha;
    EXPECT_NEAR(rep.predicted, 0.5, 1e-15);
  }
}

TEST(TimeRegularity, PredictedExponent) {
  EXPECT_NEAR(predicted_time_exponent(0.5, 0.1), 0.5, 1e-15);
  EXPECT_NEAR(predicted_time_exponent(0.75, 0.05), 1.0 / 0.75 - 1.05, 1e-15);
  const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
  EXPECT_NEAR(predicted_time_exponent(golden, 0.0), golden, 1e-12);
}

TEST(TimeRegularity, ShortWindowIsRejected) {
  GridFunction u = GridFunction::space_time(17, {3}, 0.1, 1.0 / 16, {0.0}, 0.0, 0.5);
  EXPECT_THROW(fit_time_regularity(u, 0.5, 0.05, 0.0, 1.0), Error);
}
