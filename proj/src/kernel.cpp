#include "fbreg/kernel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "fbreg/error.hpp"

namespace fbreg {

namespace {

constexpr double kPi = std::numbers::pi;

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

// Integral over [a, b] of a smooth function on the circle.
SphereIntegral gk_arc(const std::function<double(std::span<const double>)>& f, double a,
                      double b, double tol) {
  auto g = [&](double phi) {
    const std::array<double, 2> th{std::cos(phi), std::sin(phi)};
    return f(th);
  };
  double err = 0.0;
  const double v =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(g, a, b, 15, tol, &err);
  return {v, err};
}

// Integral over [a, b] where the integrand may be singular at both ends.
SphereIntegral ts_arc(const std::function<double(double)>& g, double a, double b, double tol) {
  thread_local boost::math::quadrature::tanh_sinh<double> integrator(12);
  double err = 0.0;
  double l1 = 0.0;
  const double v = integrator.integrate(g, a, b, tol, &err, &l1);
  return {v, err * std::max(1.0, l1)};
}

// Orthonormal frame (e, u, w) in R^3.
std::array<std::array<double, 3>, 2> complete_frame(std::span<const double> e) {
  std::array<double, 3> t{1.0, 0.0, 0.0};
  if (std::abs(e[0]) > 0.9) t = {0.0, 1.0, 0.0};
  std::array<double, 3> u{};
  const double te = t[0] * e[0] + t[1] * e[1] + t[2] * e[2];
  double nu = 0.0;
  for (int i = 0; i < 3; ++i) {
    u[i] = t[i] - te * e[i];
    nu += u[i] * u[i];
  }
  nu = std::sqrt(nu);
  for (auto& c : u) c /= nu;
  const std::array<double, 3> w{e[1] * u[2] - e[2] * u[1], e[2] * u[0] - e[0] * u[2],
                                e[0] * u[1] - e[1] * u[0]};
  return {u, w};
}

SphereIntegral sphere3_about(std::span<const double> e,
                             const std::function<double(std::span<const double>)>& f,
                             double tol) {
  const auto [u, w] = complete_frame(e);
  auto at_resolution = [&](int m) {
    auto g = [&](double psi) {
      const double c = std::cos(psi);
      const double sn = std::sin(psi);
      double acc = 0.0;
      for (int k = 0; k < m; ++k) {
        const double chi = 2.0 * kPi * k / m;
        std::array<double, 3> th{};
        for (int i = 0; i < 3; ++i)
          th[i] = c * e[i] + sn * (std::cos(chi) * u[i] + std::sin(chi) * w[i]);
        acc += f(th);
      }
      return acc * sn * 2.0 * kPi / m;
    };
    const auto a = ts_arc(g, 0.0, kPi / 2, tol);
    const auto b = ts_arc(g, kPi / 2, kPi, tol);
    return SphereIntegral{a.value + b.value, a.error + b.error};
  };
  int m = 32;
  SphereIntegral prev = at_resolution(m);
  for (int level = 0; level < 6; ++level) {
    m *= 2;
    SphereIntegral next = at_resolution(m);
    const double diff = std::abs(next.value - prev.value);
    next.error += diff;
    if (diff <= tol * std::max(1.0, std::abs(next.value))) return next;
    prev = next;
  }
  return prev;
}

}  // namespace

DensitySpec DensitySpec::isotropic(double value) {
  DensitySpec d;
  d.kind = Kind::Isotropic;
  d.value = value;
  return d;
}

DensitySpec DensitySpec::axial(double low, double high, int axis) {
  DensitySpec d;
  d.kind = Kind::Axial;
  d.low = low;
  d.high = high;
  d.axis = axis;
  return d;
}

DensitySpec DensitySpec::fourier(std::vector<double> cos_coeffs,
                                 std::vector<double> sin_coeffs) {
  DensitySpec d;
  d.kind = Kind::Fourier;
  d.cos_coeffs = std::move(cos_coeffs);
  d.sin_coeffs = std::move(sin_coeffs);
  if (d.sin_coeffs.empty()) d.sin_coeffs.push_back(0.0);
  return d;
}

DensitySpec DensitySpec::two_sided(double plus, double minus) {
  DensitySpec d;
  d.kind = Kind::TwoSided;
  d.plus = plus;
  d.minus = minus;
  return d;
}

double DensitySpec::operator()(std::span<const double> theta) const {
  switch (kind) {
    case Kind::Isotropic: return value;
    case Kind::Axial: {
      const double c = theta[static_cast<std::size_t>(axis)];
      return low + (high - low) * c * c;
    }
    case Kind::Fourier: {
      const double phi = std::atan2(theta[1], theta[0]);
      double acc = 0.0;
      for (std::size_t k = 0; k < cos_coeffs.size(); ++k)
        acc += cos_coeffs[k] * std::cos(static_cast<double>(k) * phi);
      for (std::size_t k = 1; k < sin_coeffs.size(); ++k)
        acc += sin_coeffs[k] * std::sin(static_cast<double>(k) * phi);
      return acc;
    }
    case Kind::TwoSided: return theta[0] > 0.0 ? plus : minus;
  }
  return 0.0;
}

bool DensitySpec::is_even() const {
  switch (kind) {
    case Kind::Isotropic:
    case Kind::Axial: return true;
    case Kind::Fourier: {
      for (std::size_t k = 1; k < cos_coeffs.size(); k += 2)
        if (cos_coeffs[k] != 0.0) return false;
      for (std::size_t k = 1; k < sin_coeffs.size(); k += 2)
        if (sin_coeffs[k] != 0.0) return false;
      return true;
    }
    case Kind::TwoSided: return plus == minus;
  }
  return true;
}

std::string DensitySpec::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Isotropic: os << "isotropic(" << value << ")"; break;
    case Kind::Axial: os << "axial(" << low << "," << high << ",axis=" << axis << ")"; break;
    case Kind::Fourier: os << "fourier(" << cos_coeffs.size() << " cos terms)"; break;
    case Kind::TwoSided: os << "two_sided(" << plus << "," << minus << ")"; break;
  }
  return os.str();
}

double sphere_area(int dim) {
  const double n = dim;
  return 2.0 * std::pow(kPi, n / 2.0) / std::tgamma(n / 2.0);
}

double cosine_moment(double s) {
  return kPi / (2.0 * std::tgamma(1.0 + 2.0 * s) * std::sin(kPi * s));
}

double sine_moment(double s) {
  require(std::abs(s - 0.5) > 1e-14, Module::OperatorCore, ErrorCode::InvalidArgument,
          "sine moment is undefined at s = 1/2");
  return -std::tgamma(-2.0 * s) * std::sin(kPi * s);
}

double isotropic_constant(int dim, double s) {
  const double n = dim;
  const double abs_moment =
      2.0 * std::pow(kPi, (n - 1.0) / 2.0) * std::tgamma(s + 0.5) / std::tgamma((n + 2.0 * s) / 2.0);
  return 1.0 / (cosine_moment(s) * abs_moment);
}

SphereIntegral integrate_sphere(int dim, const std::function<double(std::span<const double>)>& f,
                                std::span<const double> breaks, double tol) {
  if (dim == 1) {
    const std::array<double, 1> p{1.0};
    const std::array<double, 1> m{-1.0};
    return {f(p) + f(m), 0.0};
  }
  if (dim == 2) {
    std::vector<double> cuts;
    for (double b : breaks) {
      double x = std::fmod(b, 2.0 * kPi);
      if (x < 0) x += 2.0 * kPi;
      cuts.push_back(x);
    }
    cuts.push_back(0.0);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-15; }),
               cuts.end());
    cuts.push_back(2.0 * kPi);
    SphereIntegral total;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      if (cuts[i + 1] - cuts[i] < 1e-15) continue;
      const auto part = gk_arc(f, cuts[i], cuts[i + 1], tol);
      total.value += part.value;
      total.error += part.error;
    }
    return total;
  }
  if (dim == 3) {
    const std::array<double, 3> pole{0.0, 0.0, 1.0};
    return sphere3_about(pole, f, tol);
  }
  fail(Module::OperatorCore, ErrorCode::InvalidArgument,
       "sphere quadrature supports n <= 3");
}

SphereIntegral integrate_sphere_about(int dim, std::span<const double> e,
                                      const std::function<double(std::span<const double>)>& f,
                                      double tol) {
  if (dim == 1) return integrate_sphere(1, f, {}, tol);
  if (dim == 2) {
    const double phi_e = std::atan2(e[1], e[0]);
    auto g = [&](double psi) {
      const std::array<double, 2> th{std::cos(phi_e + psi), std::sin(phi_e + psi)};
      return f(th);
    };
    const auto a = ts_arc(g, -kPi / 2, kPi / 2, tol);
    const auto b = ts_arc(g, kPi / 2, 3 * kPi / 2, tol);
    return {a.value + b.value, a.error + b.error};
  }
  if (dim == 3) return sphere3_about(e, f, tol);
  fail(Module::OperatorCore, ErrorCode::InvalidArgument,
       "sphere quadrature supports n <= 3");
}

bool KernelSpec::has_drift() const noexcept {
  return std::any_of(drift_.begin(), drift_.end(), [](double b) { return b != 0.0; });
}

double KernelSpec::density_at(std::span<const double> theta) const {
  return normalization_ * density_(theta);
}

double KernelSpec::even_density_at(std::span<const double> theta) const {
  if (symmetric_) return density_at(theta);
  std::array<double, 3> minus{};
  for (std::size_t i = 0; i < theta.size(); ++i) minus[i] = -theta[i];
  return 0.5 * (density_at(theta) + density_at(std::span<const double>(minus.data(), theta.size())));
}

double KernelSpec::odd_density_at(std::span<const double> theta) const {
  if (symmetric_) return 0.0;
  std::array<double, 3> minus{};
  for (std::size_t i = 0; i < theta.size(); ++i) minus[i] = -theta[i];
  return 0.5 * (density_at(theta) - density_at(std::span<const double>(minus.data(), theta.size())));
}

double KernelSpec::kernel(std::span<const double> y) const {
  const double r = std::sqrt(dot(y, y));
  std::array<double, 3> th{};
  for (std::size_t i = 0; i < y.size(); ++i) th[i] = y[i] / r;
  return density_at(std::span<const double>(th.data(), y.size())) *
         std::pow(r, -static_cast<double>(dim_) - 2.0 * s_);
}

KernelSpec make_kernel(double s, double lambda, double Lambda, DensitySpec density,
                       std::vector<double> drift, int dim) {
  constexpr auto M = Module::OperatorCore;
  require(dim >= 1 && dim <= 3, M, ErrorCode::KernelInvalid, "dimension must be 1, 2 or 3");
  require(s > 0.0 && s < 1.0, M, ErrorCode::KernelInvalid, "order s must lie in (0,1)");
  require(lambda > 0.0 && lambda <= Lambda, M, ErrorCode::KernelInvalid,
          "ellipticity constants need 0 < lambda <= Lambda");
  require(drift.empty() || static_cast<int>(drift.size()) == dim, M, ErrorCode::KernelInvalid,
          "drift must have one component per dimension");
  using Kind = DensitySpec::Kind;
  require(density.kind != Kind::Fourier || dim == 2, M, ErrorCode::KernelInvalid,
          "Fourier densities are defined on the circle (n = 2)");
  require(density.kind != Kind::TwoSided || dim == 1, M, ErrorCode::KernelInvalid,
          "two-sided densities are defined for n = 1");
  require(density.kind != Kind::Axial || (density.axis >= 0 && density.axis < dim), M,
          ErrorCode::KernelInvalid, "axial density axis out of range");

  const bool any_drift =
      std::any_of(drift.begin(), drift.end(), [](double b) { return b != 0.0; });
  require(!any_drift || s == 0.5, M, ErrorCode::DriftOrder,
          "a drift term is admissible only for s = 1/2");

  KernelSpec k;
  k.s_ = s;
  k.lambda_ = lambda;
  k.Lambda_ = Lambda;
  k.dim_ = dim;
  k.drift_ = drift.empty() ? std::vector<double>(static_cast<std::size_t>(dim), 0.0) : drift;
  k.normalization_ = isotropic_constant(dim, s);

  // Ellipticity and symmetry on a sampling of the sphere.
  std::vector<std::vector<double>> samples;
  if (dim == 1) {
    samples = {{1.0}, {-1.0}};
  } else if (dim == 2) {
    for (int i = 0; i < 4096; ++i) {
      const double phi = 2.0 * kPi * i / 4096;
      samples.push_back({std::cos(phi), std::sin(phi)});
    }
  } else {
    for (int i = 0; i < 64; ++i)
      for (int j = 0; j < 128; ++j) {
        const double th = kPi * (i + 0.5) / 64;
        const double ph = 2.0 * kPi * j / 128;
        samples.push_back({std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)});
      }
  }
  bool even = true;
  for (const auto& th : samples) {
    const double a = density(th);
    require(std::isfinite(a) && a >= lambda * (1 - 1e-12) && a <= Lambda * (1 + 1e-12), M,
            ErrorCode::KernelInvalid,
            "density " + density.describe() + " violates lambda <= a <= Lambda");
    std::vector<double> minus(th.size());
    for (std::size_t i = 0; i < th.size(); ++i) minus[i] = -th[i];
    if (std::abs(a - density(minus)) > 1e-12 * std::max(1.0, std::abs(a))) even = false;
  }
  k.density_ = std::move(density);
  k.symmetric_ = even;

  if (!even && s == 0.5) {
    double scale = 0.0;
    for (int i = 0; i < dim; ++i) {
      auto moment = integrate_sphere(dim, [&](std::span<const double> th) {
        return th[static_cast<std::size_t>(i)] * k.odd_density_at(th);
      });
      scale = std::max(scale, std::abs(moment.value));
    }
    const auto mass = integrate_sphere(dim, [&](std::span<const double> th) {
      return std::abs(k.density_at(th));
    });
    require(scale <= 1e-10 * mass.value, M, ErrorCode::ZeroMoment,
            "odd kernel with s = 1/2 fails the zero-moment condition");
  }
  return k;
}

KernelSpec fractional_laplacian(int dim, double s, std::vector<double> drift) {
  return make_kernel(s, 1.0, 1.0, DensitySpec::isotropic(1.0), std::move(drift), dim);
}

Symbol symbol(const KernelSpec& kernel, std::span<const double> e, double magnitude) {
  constexpr auto M = Module::OperatorCore;
  require(static_cast<int>(e.size()) == kernel.dim(), M, ErrorCode::InvalidArgument,
          "direction has wrong dimension");
  require(std::abs(dot(e, e) - 1.0) < 1e-10, M, ErrorCode::InvalidArgument,
          "direction must be a unit vector");
  require(magnitude > 0.0, M, ErrorCode::InvalidArgument, "magnitude must be positive");
  const double s = kernel.s();
  const int n = kernel.dim();
  constexpr double tol = 1e-13;

  Symbol out;
  if (kernel.density().kind == DensitySpec::Kind::Isotropic) {
    out.A = kernel.density().value;
  } else {
    const auto a = integrate_sphere_about(n, e, [&](std::span<const double> th) {
      return kernel.even_density_at(th) * std::pow(std::abs(dot(e, th)), 2.0 * s);
    }, tol);
    out.A = cosine_moment(s) * a.value;
    out.error += cosine_moment(s) * a.error;
  }

  if (!kernel.symmetric()) {
    SphereIntegral b;
    double factor = 1.0;
    if (s == 0.5) {
      b = integrate_sphere_about(n, e, [&](std::span<const double> th) {
        const double c = dot(e, th);
        return c == 0.0 ? 0.0 : -kernel.odd_density_at(th) * c * std::log(std::abs(c));
      }, tol);
    } else {
      b = integrate_sphere_about(n, e, [&](std::span<const double> th) {
        const double c = dot(e, th);
        return kernel.odd_density_at(th) * std::copysign(std::pow(std::abs(c), 2.0 * s), c);
      }, tol);
      factor = sine_moment(s);
    }
    out.B += factor * b.value;
    out.error += std::abs(factor) * b.error;
  }
  out.B += dot(kernel.drift(), e);

  require(out.error <= 1e-8 * std::max(1.0, std::abs(out.A) + std::abs(out.B)), M,
          ErrorCode::Quadrature,
          "symbol quadrature did not converge (error estimate " + std::to_string(out.error) + ")");
  const double scale = std::pow(magnitude, 2.0 * s);
  out.A *= scale;
  out.B *= scale;
  out.error *= scale;
  return out;
}

KernelSpec effective_1d_kernel(const KernelSpec& kernel, std::span<const double> e, double v) {
  constexpr auto M = Module::OperatorCore;
  require(v >= 0.0, M, ErrorCode::InvalidArgument, "profile speed must be >= 0");
  require(v == 0.0 || kernel.s() == 0.5, M, ErrorCode::DriftOrder,
          "moving profiles exist only for s = 1/2; use v = 0");
  const Symbol sym = symbol(kernel, e, 1.0);
  if (kernel.s() == 0.5) {
    const double drift = sym.B - v;
    return make_kernel(0.5, sym.A, sym.A, DensitySpec::two_sided(sym.A, sym.A),
                       std::vector<double>{drift}, 1);
  }
  // A_1d = (p + q)/2 and B_1d = S_s c_{1,s} (p - q) for the two-sided density (p, q).
  const double skew = sym.B / (sine_moment(kernel.s()) * isotropic_constant(1, kernel.s()));
  const double p = sym.A + 0.5 * skew;
  const double q = sym.A - 0.5 * skew;
  require(p > 0.0 && q > 0.0, M, ErrorCode::KernelInvalid,
          "direction's odd symbol is too strong for a positive one-dimensional kernel");
  return make_kernel(kernel.s(), std::min(p, q), std::max(p, q), DensitySpec::two_sided(p, q),
                     {}, 1);
}

}  // namespace fbreg
