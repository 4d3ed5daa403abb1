#pragma once

#include <span>
#include <vector>

#include "fbreg/discrete_operator.hpp"
#include "fbreg/kernel.hpp"

namespace fbreg {

/// kappa (x.e + v t)_+^{1+gamma}
struct Profile1D {
  double kappa = 1.0;
  std::vector<double> e{1.0};
  double v = 0.0;
  double gamma = 0.5;
  double s = 0.5;
};

/// 1/2 + arctan((v - B(e)) / A(e)) / pi for s = 1/2. With a symmetric,
/// drift-free kernel B = 0 and this is 1/2 + arctan(v / A(e)) / pi.
double gamma_critical(const KernelSpec& kernel, std::span<const double> e, double v);

/// s - arctan(B(e) / A(e)) / pi; exactly s for symmetric drift-free kernels.
double gamma_elliptic(const KernelSpec& kernel, std::span<const double> e);

/// 1/2 - arctan(|b|) / pi
double gamma_drift(double b_norm);

/// The profile of Eq. u0 for this kernel: gamma from gamma_critical when
/// s = 1/2, gamma_elliptic (and v = 0) otherwise.
Profile1D make_profile(const KernelSpec& kernel, std::span<const double> e, double v,
                       double kappa = 1.0);

double eval_profile(const Profile1D& p, std::span<const double> x, double t);

struct ResidualLevel {
  double h = 0.0;
  double residual = 0.0;  ///< max over samples
  std::vector<double> per_sample;
};

struct ResidualReport {
  std::vector<ResidualLevel> levels;
  double order = 0.0;
  double order_fit_residual = 0.0;
  double final_residual() const { return levels.empty() ? 0.0 : levels.back().residual; }
};

/// |(d_t - L) u0| (or |L u0| when v = 0) at points xi = x.e + v t > 0,
/// evaluated through the one-dimensional operator of effective_1d_kernel.
/// The equation is checked in differentiated form, on d_xi u0, whose growth
/// is integrable against the kernel. `spacings` are the lattice steps of
/// the refinement levels; samples closer than 2h to the boundary are
/// rejected.
ResidualReport profile_residual(const KernelSpec& kernel, const Profile1D& p,
                                std::span<const double> xi_samples,
                                std::span<const double> spacings, double cube_radius = 4.0);

}  // namespace fbreg
