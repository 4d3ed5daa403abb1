#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fbreg/profiles.hpp"

using namespace fbreg;

TEST(Gamma, CriticalExponentAtClosedFormSpeeds) {
  const KernelSpec k = fractional_laplacian(1, 0.5);
  const double e[1] = {1.0};
  const std::pair<double, double> cases[] = {
      {0.0, 0.5}, {1.0 / std::sqrt(3.0), 2.0 / 3.0}, {1.0, 0.75}, {std::sqrt(3.0), 5.0 / 6.0}};
  for (auto [v, g] : cases) EXPECT_NEAR(gamma_critical(k, e, v), g, 1e-12) << "v=" << v;
}

TEST(Gamma, CriticalExponentZeroesTheFlatDefect) {
  // (d_t - L) xi_+^beta = beta xi^{beta-1} (cot(pi beta) + v) for sqrt(-Delta) in 1D.
  const KernelSpec k = fractional_laplacian(1, 0.5);
  const double e[1] = {1.0};
  for (double v : {0.0, 0.3, 2.0, 7.5}) {
    const double g = gamma_critical(k, e, v);
    EXPECT_NEAR(1.0 / std::tan(std::numbers::pi * g) + v, 0.0, 1e-10);
  }
}

TEST(Gamma, CriticalExponentScalesWithTheSymbol) {
  // Doubling the density doubles A(e); the exponent then sees v / 2.
  const KernelSpec k2 = make_kernel(0.5, 1.0, 2.0, DensitySpec::isotropic(2.0), {}, 2);
  const KernelSpec k1 = fractional_laplacian(2, 0.5);
  const double e[2] = {0.0, 1.0};
  EXPECT_NEAR(gamma_critical(k2, e, 1.0), gamma_critical(k1, e, 0.5), 1e-9);
}

TEST(Gamma, DriftExponent) {
  EXPECT_EQ(gamma_drift(0.0), 0.5);
  EXPECT_EQ(gamma_drift(1.0), 0.25);
  const KernelSpec k = fractional_laplacian(1, 0.5, {1.0});
  const double e[1] = {1.0};
  EXPECT_NEAR(gamma_elliptic(k, e), 0.25, 1e-12);
}

TEST(Gamma, EllipticExponentOfSymmetricKernelIsS) {
  for (double s : {0.3, 0.6, 0.9}) {
    const KernelSpec k = make_kernel(s, 0.5, 2.0, DensitySpec::axial(0.5, 2.0, 1), {}, 2);
    const double e[2] = {0.6, 0.8};
    EXPECT_DOUBLE_EQ(gamma_elliptic(k, e), s);
  }
}

TEST(Profile, EvaluatesThePowerOfTheShiftedCoordinate) {
  Profile1D p;
  p.kappa = 2.0;
  p.e = {0.0, 1.0};
  p.v = 0.5;
  p.gamma = 0.75;
  const double x[2] = {3.0, 0.2};
  EXPECT_NEAR(eval_profile(p, x, 0.4), 2.0 * std::pow(0.4, 1.75), 1e-14);
  const double y[2] = {3.0, -0.3};
  EXPECT_EQ(eval_profile(p, y, 0.4), 0.0);
}

TEST(Profile, MakeProfileTiesGammaToTheSpeed) {
  const KernelSpec k = fractional_laplacian(1, 0.5);
  const double e[1] = {1.0};
  const Profile1D p = make_profile(k, e, 1.0);
  EXPECT_NEAR(p.gamma, 0.75, 1e-12);
  const KernelSpec k75 = fractional_laplacian(1, 0.75);
  EXPECT_NEAR(make_profile(k75, e, 0.0).gamma, 0.75, 1e-12);
}

TEST(Profile, ResidualShrinksUnderRefinementAndIsSharp) {
  const KernelSpec k = fractional_laplacian(1, 0.5);
  const double e[1] = {1.0};
  const double xi[] = {0.5, 1.0, 1.5};
  const double spacings[] = {0.05, 0.025, 0.0125};
  const Profile1D p = make_profile(k, e, 1.0);
  const auto rep = profile_residual(k, p, xi, spacings);
  ASSERT_EQ(rep.levels.size(), 3u);
  EXPECT_LT(rep.levels[2].residual, rep.levels[0].residual);
  Profile1D off = p;
  off.gamma += 0.05;
  const auto bad = profile_residual(k, off, xi, spacings);
  EXPECT_LT(rep.final_residual(), 0.2 * bad.final_residual());
}
