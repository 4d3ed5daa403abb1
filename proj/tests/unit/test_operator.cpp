#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fbreg/discrete_operator.hpp"
#include "fbreg/error.hpp"
#include "fbreg/kernel.hpp"

using namespace fbreg;

namespace {

// Classical constant of (-Delta)^s: 4^s Gamma(n/2 + s) / (pi^{n/2} |Gamma(-s)|).
double classical_constant(int n, double s) {
  return std::pow(4.0, s) * std::tgamma(n / 2.0 + s) /
         (std::pow(std::numbers::pi, n / 2.0) * std::abs(std::tgamma(-s)));
}

// (-Delta)^s (1 + |x|^2)^{-(n-2s)/2} = c (1 + |x|^2)^{-(n+2s)/2},
// c = 4^s Gamma((n+2s)/2) / Gamma((n-2s)/2).
struct Bessel {
  int n;
  double s;
  double a() const { return (n - 2.0 * s) / 2.0; }
  double c() const {
    return std::pow(4.0, s) * std::tgamma((n + 2.0 * s) / 2.0) / std::tgamma((n - 2.0 * s) / 2.0);
  }
  double u(std::span<const double> x) const {
    double r2 = 0.0;
    for (double v : x) r2 += v * v;
    return std::pow(1.0 + r2, -a());
  }
  double Lu(std::span<const double> x) const {
    double r2 = 0.0;
    for (double v : x) r2 += v * v;
    return -c() * std::pow(1.0 + r2, -(n + 2.0 * s) / 2.0);
  }
};

double bessel_error(const Bessel& b, double h, double cube) {
  const KernelSpec k = fractional_laplacian(b.n, b.s);
  const Stencil st(k, h, static_cast<int>(std::lround(cube / h - 0.5)));
  const SpaceFunction u = [&](std::span<const double> x) { return b.u(x); };
  double worst = 0.0;
  for (double r : {0.0, 0.5, 1.0}) {
    std::vector<double> x(static_cast<std::size_t>(b.n), 0.0);
    x[0] = r;
    worst = std::max(worst, std::abs(apply_at(st, u, x, std::max(0.0, -2.0 * b.a())) - b.Lu(x)));
  }
  return worst;
}

}  // namespace

TEST(Kernel, IsotropicDensityCarriesTheClassicalConstant) {
  for (int n : {1, 2})
    for (double s : {0.3, 0.5, 0.75}) {
      const KernelSpec k = fractional_laplacian(n, s);
      std::vector<double> y(static_cast<std::size_t>(n), 0.0);
      y[0] = 1.0;
      EXPECT_NEAR(k.kernel(y), classical_constant(n, s), 1e-12 * classical_constant(n, s))
          << "n=" << n << " s=" << s;
    }
}

TEST(Kernel, FractionalLaplacianSymbolIsHomogeneous) {
  for (int n : {1, 2})
    for (double s : {0.4, 0.5, 0.8}) {
      const KernelSpec k = fractional_laplacian(n, s);
      std::vector<double> e(static_cast<std::size_t>(n), 0.0);
      e[0] = 1.0;
      if (n == 2) e = {0.6, 0.8};
      for (double m : {0.5, 1.0, 3.0}) {
        const Symbol sym = symbol(k, e, m);
        EXPECT_NEAR(sym.A, std::pow(m, 2.0 * s), 1e-9);
        EXPECT_NEAR(sym.B, 0.0, 1e-12);
      }
    }
}

TEST(Kernel, DriftEntersTheImaginaryPart) {
  const KernelSpec k = fractional_laplacian(2, 0.5, {1.5, -0.5});
  const double e[2] = {0.6, 0.8};
  const Symbol sym = symbol(k, e, 2.0);
  EXPECT_NEAR(sym.A, 2.0, 1e-9);
  EXPECT_NEAR(sym.B, 2.0 * (1.5 * 0.6 - 0.5 * 0.8), 1e-12);
}

TEST(Kernel, AxialDensitySymbolIsRotationCovariant) {
  const KernelSpec kx = make_kernel(0.6, 1.0, 3.0, DensitySpec::axial(1.0, 3.0, 0), {}, 2);
  const KernelSpec ky = make_kernel(0.6, 1.0, 3.0, DensitySpec::axial(1.0, 3.0, 1), {}, 2);
  const double ex[2] = {1.0, 0.0}, ey[2] = {0.0, 1.0};
  EXPECT_NEAR(symbol(kx, ex).A, symbol(ky, ey).A, 1e-10);
  EXPECT_GT(symbol(kx, ex).A, symbol(kx, ey).A);
  const KernelSpec flat = make_kernel(0.6, 1.0, 3.0, DensitySpec::axial(2.0, 2.0, 0), {}, 2);
  EXPECT_NEAR(symbol(flat, ey).A, 2.0, 1e-9);
}

TEST(Kernel, ConstructionErrorsCarryTheirCodes) {
  auto code_of = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  EXPECT_EQ(code_of([] { make_kernel(0.75, 1.0, 1.0, DensitySpec::isotropic(), {1.0}, 1); }),
            ErrorCode::DriftOrder);
  EXPECT_EQ(code_of([] { make_kernel(1.2, 1.0, 1.0, DensitySpec::isotropic(), {}, 1); }),
            ErrorCode::KernelInvalid);
  EXPECT_EQ(code_of([] { make_kernel(0.5, 1.0, 2.0, DensitySpec::isotropic(3.0), {}, 1); }),
            ErrorCode::KernelInvalid);
  EXPECT_EQ(code_of([] { make_kernel(0.5, 1.0, 2.0, DensitySpec::two_sided(2.0, 1.0), {}, 1); }),
            ErrorCode::ZeroMoment);
}

TEST(Operator, ConstantsAreAnnihilatedExactly) {
  for (double s : {0.3, 0.5, 0.8}) {
    const KernelSpec k = fractional_laplacian(1, s);
    const Stencil st(k, 0.05, 40);
    const SpaceFunction one = [](std::span<const double>) { return 3.0; };
    const double x[1] = {0.37};
    EXPECT_EQ(apply_at(st, one, x, 0.0, 3.0), 0.0);
  }
}

TEST(Operator, MatchesClosedFormFractionalLaplacian) {
  for (const Bessel b : {Bessel{1, 0.3}, Bessel{1, 0.75}}) {
    const double e1 = bessel_error(b, 0.1, 4.0);
    const double e2 = bessel_error(b, 0.05, 4.0);
    const double e3 = bessel_error(b, 0.025, 4.0);
    EXPECT_LT(e3, 1e-5) << "s=" << b.s;
    EXPECT_LT(e2, e1);
    EXPECT_LT(e3, e2);
  }
  const Bessel b2{2, 0.5};
  const double e1 = bessel_error(b2, 0.2, 2.0);
  const double e2 = bessel_error(b2, 0.1, 2.0);
  EXPECT_LT(e2, e1);
  EXPECT_LT(e2, 2e-3);
}

TEST(Operator, HalfLaplacianOfPoissonKernel) {
  // -(−Δ)^{1/2} 1/(1+x^2) = (x^2 - 1)/(1 + x^2)^2 (harmonic extension (1+y)/(x^2+(1+y)^2)).
  const KernelSpec k = fractional_laplacian(1, 0.5);
  const std::size_t N = 161;
  const double h = 8.0 / static_cast<double>(N - 1);
  auto u = [](std::span<const double> x, double) { return 1.0 / (1.0 + x[0] * x[0]); };
  const DiscreteOperator op(k, {N}, h, {-4.0}, ExteriorRule::function(u, 0.0));
  std::vector<double> vals(N);
  for (std::size_t i = 0; i < N; ++i) vals[i] = u(op.node(i), 0.0);
  const auto Lu = op.apply(vals);
  for (std::size_t i = 60; i <= 100; i += 10) {
    const double x = op.node(i)[0];
    EXPECT_NEAR(Lu[i], (x * x - 1.0) / ((1.0 + x * x) * (1.0 + x * x)), 2e-4) << "x=" << x;
  }
}

TEST(Operator, PeriodicCosineIsAnEigenfunction) {
  for (double s : {0.4, 0.7}) {
    const KernelSpec k = fractional_laplacian(1, s);
    const std::size_t N = 64;
    const double h = 2.0 * std::numbers::pi / static_cast<double>(N);
    const DiscreteOperator op(k, {N}, h, {0.0}, ExteriorRule::periodic());
    std::vector<double> c(N);
    for (std::size_t i = 0; i < N; ++i) c[i] = std::cos(static_cast<double>(i) * h);
    const auto Lc = op.apply(c);
    for (std::size_t i = 0; i < N; i += 7) EXPECT_NEAR(Lc[i], -c[i], 1e-4) << "s=" << s;
  }
}

TEST(Operator, BoxMatrixAgreesWithDenseCopy) {
  const KernelSpec k = fractional_laplacian(2, 0.6);
  const DiscreteOperator op(k, {6, 5}, 0.2, {-0.5, -0.4}, ExteriorRule::constant(0.0));
  const auto dense = op.dense();
  std::vector<double> u(op.size());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::sin(1.0 + 0.3 * static_cast<double>(i));
  std::vector<double> fast(op.size());
  op.apply_linear(u, fast);
  for (std::size_t i = 0; i < u.size(); ++i) {
    double ref = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) ref += dense[i * u.size() + j] * u[j];
    EXPECT_NEAR(fast[i], ref, 1e-10);
    EXPECT_NEAR(op.diagonal() * u[i] + op.offdiag_dot(i, u), ref, 1e-10);
  }
}

TEST(Operator, SymmetricKernelGivesMonotoneScheme) {
  const KernelSpec k = fractional_laplacian(1, 0.5);
  const DiscreteOperator op(k, {33}, 1.0 / 16, {-1.0}, ExteriorRule::constant(0.0));
  EXPECT_TRUE(op.monotone());
  const auto dense = op.dense();
  for (std::size_t i = 0; i < 33; ++i)
    for (std::size_t j = 0; j < 33; ++j)
      if (i != j) EXPECT_GE(dense[i * 33 + j], 0.0);
}
