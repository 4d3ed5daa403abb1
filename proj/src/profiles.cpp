#include "fbreg/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fbreg/error.hpp"
#include "fbreg/metrics.hpp"

namespace fbreg {

namespace {
constexpr auto kMod = Module::Profiles;
}

double gamma_critical(const KernelSpec& kernel, std::span<const double> e, double v) {
  require(kernel.s() == 0.5, kMod, ErrorCode::DriftOrder,
          "the critical exponent formula needs s = 1/2");
  require(v >= 0.0, kMod, ErrorCode::InvalidArgument, "speed must be >= 0");
  const Symbol sym = symbol(kernel, e);
  return 0.5 + std::atan((v - sym.B) / sym.A) / std::numbers::pi;
}

double gamma_elliptic(const KernelSpec& kernel, std::span<const double> e) {
  if (kernel.symmetric() && !kernel.has_drift()) {
    require(static_cast<int>(e.size()) == kernel.dim(), kMod, ErrorCode::InvalidArgument,
            "direction has wrong dimension");
    return kernel.s();
  }
  const Symbol sym = symbol(kernel, e);
  return kernel.s() - std::atan(sym.B / sym.A) / std::numbers::pi;
}

double gamma_drift(double b_norm) {
  require(b_norm >= 0.0, kMod, ErrorCode::InvalidArgument, "|b| must be >= 0");
  return 0.5 - std::atan(b_norm) / std::numbers::pi;
}

Profile1D make_profile(const KernelSpec& kernel, std::span<const double> e, double v,
                       double kappa) {
  require(kappa >= 0.0, kMod, ErrorCode::InvalidArgument, "kappa must be >= 0");
  Profile1D p;
  p.kappa = kappa;
  p.e.assign(e.begin(), e.end());
  p.v = v;
  p.s = kernel.s();
  if (kernel.s() == 0.5) {
    p.gamma = gamma_critical(kernel, e, v);
  } else {
    require(v == 0.0, kMod, ErrorCode::DriftOrder,
            "moving profiles exist only for s = 1/2; use v = 0");
    p.gamma = gamma_elliptic(kernel, e);
  }
  return p;
}

double eval_profile(const Profile1D& p, std::span<const double> x, double t) {
  double xi = p.v * t;
  for (std::size_t i = 0; i < p.e.size(); ++i) xi += x[i] * p.e[i];
  if (xi <= 0.0) return 0.0;
  return p.kappa * std::pow(xi, 1.0 + p.gamma);
}

ResidualReport profile_residual(const KernelSpec& kernel, const Profile1D& p,
                                std::span<const double> xi_samples,
                                std::span<const double> spacings, double cube_radius) {
  require(!xi_samples.empty() && !spacings.empty(), kMod, ErrorCode::InvalidArgument,
          "need samples and at least one spacing");
  const KernelSpec k1 = effective_1d_kernel(kernel, p.e, p.v);
  const double amp = (1.0 + p.gamma) * p.kappa;
  const double g = p.gamma;
  SpaceFunction du = [amp, g](std::span<const double> x) {
    return x[0] > 0.0 ? amp * std::pow(x[0], g) : 0.0;
  };
  const double max_xi = *std::max_element(xi_samples.begin(), xi_samples.end());
  const double radius = std::max(cube_radius, 2.0 * max_xi);

  ResidualReport report;
  for (double h : spacings) {
    for (double xi : xi_samples)
      require(xi >= 2.0 * h, kMod, ErrorCode::Geometry,
              "sample point closer than 2h to the free boundary");
    StencilOptions opt;
    opt.drift = DriftScheme::Centered;
    const int M = std::max(1, static_cast<int>(std::lround(radius / h - 0.5)));
    Stencil st(k1, h, M, opt);
    ResidualLevel level;
    level.h = h;
    for (double xi : xi_samples) {
      const double x[1] = {xi};
      const double r = std::abs(apply_at(st, du, x, g, std::max(amp, 1e-300)));
      level.per_sample.push_back(r);
      level.residual = std::max(level.residual, r);
    }
    report.levels.push_back(std::move(level));
  }
  if (report.levels.size() >= 2) {
    std::vector<double> values, hs;
    for (const auto& l : report.levels) {
      values.push_back(l.residual);
      hs.push_back(l.h);
    }
    const auto fit = fit_power_law(hs, values);
    report.order = fit.slope;
    report.order_fit_residual = fit.residual;
  }
  return report;
}

}  // namespace fbreg
