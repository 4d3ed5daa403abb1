#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace fbreg {

/// Angular profile of a homogeneous kernel, relative to the canonical
/// isotropic density c_{n,s}. The kernel is
///   K(y) = c_{n,s} * density(y/|y|) * |y|^{-n-2s},
/// so `Isotropic{1}` is exactly the fractional Laplacian with symbol |xi|^{2s}.
struct DensitySpec {
  enum class Kind {
    Isotropic,  ///< constant `value`
    Axial,      ///< low + (high - low) * theta_axis^2
    Fourier,    ///< n = 2 only: sum_k c_k cos(k phi) + s_k sin(k phi)
    TwoSided,   ///< n = 1 only: value at +1 and at -1
  };

  Kind kind = Kind::Isotropic;
  double value = 1.0;
  double low = 1.0;
  double high = 1.0;
  int axis = 0;
  std::vector<double> cos_coeffs;  ///< index k multiplies cos(k phi)
  std::vector<double> sin_coeffs;  ///< index k multiplies sin(k phi); [0] unused
  double plus = 1.0;
  double minus = 1.0;

  static DensitySpec isotropic(double value = 1.0);
  static DensitySpec axial(double low, double high, int axis = 0);
  static DensitySpec fourier(std::vector<double> cos_coeffs, std::vector<double> sin_coeffs);
  static DensitySpec two_sided(double plus, double minus);

  /// Relative density at a unit vector.
  double operator()(std::span<const double> theta) const;
  /// Density is even: a(theta) = a(-theta) exactly.
  bool is_even() const;
  std::string describe() const;
};

/// Quadrature of a function over S^{n-1}, with an error estimate.
struct SphereIntegral {
  double value = 0.0;
  double error = 0.0;
};

/// Integrates f over S^{n-1} (n = 1: the two points +-1; n = 2: the circle,
/// adaptively, splitting at `breaks` given as angles; n = 3: product rule).
SphereIntegral integrate_sphere(int dim, const std::function<double(std::span<const double>)>& f,
                                std::span<const double> breaks = {}, double tol = 1e-12);

/// Like integrate_sphere, but the integrand may be singular on the great
/// sphere {theta . e = 0}; the rule resolves that set with tanh-sinh nodes.
SphereIntegral integrate_sphere_about(int dim, std::span<const double> e,
                                      const std::function<double(std::span<const double>)>& f,
                                      double tol = 1e-12);

/// |S^{n-1}|
double sphere_area(int dim);

/// int_0^inf (1 - cos r) r^{-1-2s} dr
double cosine_moment(double s);
/// int_0^inf (sin r - r [s > 1/2]) r^{-1-2s} dr, s != 1/2
double sine_moment(double s);
/// Density constant making the isotropic kernel's symbol exactly |xi|^{2s}.
double isotropic_constant(int dim, double s);

/// An admissible nonlocal operator
///   L u(x) = p.v. int (u(x+y) - u(x)) K(y) dy + b . grad u(x)
/// (for s > 1/2 and odd densities the odd part carries the usual
/// -grad u(x) . y compensator). Immutable after construction.
class KernelSpec {
 public:
  double s() const noexcept { return s_; }
  double lambda() const noexcept { return lambda_; }
  double Lambda() const noexcept { return Lambda_; }
  int dim() const noexcept { return dim_; }
  /// Even density: K(y) = K(-y). A drift does not break this.
  bool symmetric() const noexcept { return symmetric_; }
  const DensitySpec& density() const noexcept { return density_; }
  const std::vector<double>& drift() const noexcept { return drift_; }
  bool has_drift() const noexcept;
  /// c_{n,s}
  double normalization() const noexcept { return normalization_; }

  /// Absolute density c_{n,s} * density(theta).
  double density_at(std::span<const double> theta) const;
  /// (a(theta) + a(-theta)) / 2, absolute.
  double even_density_at(std::span<const double> theta) const;
  /// (a(theta) - a(-theta)) / 2, absolute.
  double odd_density_at(std::span<const double> theta) const;
  /// K(y).
  double kernel(std::span<const double> y) const;

  friend KernelSpec make_kernel(double s, double lambda, double Lambda, DensitySpec density,
                                std::vector<double> drift, int dim);

 private:
  double s_ = 0.5;
  double lambda_ = 1.0;
  double Lambda_ = 1.0;
  DensitySpec density_;
  std::vector<double> drift_;
  int dim_ = 1;
  bool symmetric_ = true;
  double normalization_ = 1.0;
};

/// Validates and builds a kernel.
/// Throws E_KERNEL for s outside (0,1) or a density violating lambda <= a <= Lambda,
/// E_DRIFT_S for a drift with s != 1/2, E_ZERO_MOMENT for an odd s = 1/2 density
/// whose first moment over the sphere does not vanish.
KernelSpec make_kernel(double s, double lambda, double Lambda, DensitySpec density,
                       std::vector<double> drift = {}, int dim = 1);

/// sqrt(-Delta) (or (-Delta)^s) in dimension `dim`, plus optional drift.
KernelSpec fractional_laplacian(int dim, double s, std::vector<double> drift = {});

/// Fourier symbol of -L at xi = magnitude * e, as A + i B with the convention
///   -L e^{i xi.x} = (A(xi) - i B(xi)) e^{i xi.x},
/// so a drift b contributes B(xi) = b . xi.
struct Symbol {
  double A = 0.0;
  double B = 0.0;
  double error = 0.0;  ///< quadrature error estimate
};

Symbol symbol(const KernelSpec& kernel, std::span<const double> e, double magnitude = 1.0);

/// The one-dimensional operator that governs profiles U(x.e + v t):
/// for w(x,t) = U(x.e + v t),  (d/dt - L) w = -(L_1d U)(x.e + v t) with
/// L_1d = L restricted to direction e minus the transport v d/dx.
/// Requires v = 0 unless s = 1/2.
KernelSpec effective_1d_kernel(const KernelSpec& kernel, std::span<const double> e,
                               double v = 0.0);

}  // namespace fbreg
