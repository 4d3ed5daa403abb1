#include "fbreg/discrete_operator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <numeric>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fftw3.h>

#include "fbreg/error.hpp"

namespace fbreg {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr auto kMod = Module::OperatorCore;

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double norm2(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m += x * x;
  return std::sqrt(m);
}

// Angles where |theta|_inf has a kink on the circle.
const std::array<double, 4> kDiagonals{kPi / 4, 3 * kPi / 4, 5 * kPi / 4, 7 * kPi / 4};

std::span<const double> cube_breaks(int dim) {
  if (dim == 2) return kDiagonals;
  return {};
}

// Iterates the offsets of [-M, M]^n in row-major order.
template <class F>
void for_each_offset(int dim, int M, F&& f) {
  std::array<int, 2> k{};
  if (dim == 1) {
    for (int a = -M; a <= M; ++a) {
      k[0] = a;
      f(std::span<const int>(k.data(), 1));
    }
  } else {
    for (int a = -M; a <= M; ++a)
      for (int b = -M; b <= M; ++b) {
        k[0] = a;
        k[1] = b;
        f(std::span<const int>(k.data(), 2));
      }
  }
}

struct LatticeWeights {
  std::vector<double> w;  // (2M+1)^n, center = 0 before finishing
  int M = 0;
  int dim = 1;
  std::size_t index(std::span<const int> k) const {
    std::size_t idx = 0;
    for (int i = 0; i < dim; ++i) idx = idx * static_cast<std::size_t>(2 * M + 1) + static_cast<std::size_t>(k[i] + M);
    return idx;
  }
  double& at(std::span<const int> k) { return w[index(k)]; }
};

// Adds the second-moment correction and the drift stencil, and fills the
// center entry. `target2` is the exact second-moment matrix int y y^T K
// over the quadrature region and `drift` the drift to difference.
// Returns whether all off-center weights ended up nonnegative.
bool finish_weights(LatticeWeights& lw, double h, const std::array<std::array<double, 2>, 2>& target2,
                    std::span<const double> drift, DriftScheme requested, DriftScheme& used) {
  const int n = lw.dim;
  std::array<std::array<double, 2>, 2> lattice{};
  for_each_offset(n, lw.M, [&](std::span<const int> k) {
    bool zero = true;
    for (int i = 0; i < n; ++i) zero = zero && k[i] == 0;
    if (zero) return;
    const double w = lw.w[lw.index(k)];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) lattice[i][j] += w * k[i] * k[j] * h * h;
  });
  std::array<std::array<double, 2>, 2> delta{};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) delta[i][j] = target2[i][j] - lattice[i][j];

  std::array<int, 2> k{};
  auto kspan = std::span<const int>(k.data(), static_cast<std::size_t>(n));
  if (n == 2 && lw.M >= 1) {
    const double d = delta[0][1];
    const int sign = d >= 0 ? 1 : -1;
    const double w = std::abs(d) / (2.0 * h * h);
    for (int side : {1, -1}) {
      k = {side, side * sign};
      lw.at(kspan) += w;
    }
    delta[0][0] -= std::abs(d);
    delta[1][1] -= std::abs(d);
  }
  for (int i = 0; i < n; ++i) {
    const double w = delta[i][i] / (2.0 * h * h);
    for (int side : {1, -1}) {
      k = {0, 0};
      k[static_cast<std::size_t>(i)] = side;
      lw.at(kspan) += w;
    }
  }

  // Center weight: the kernel part annihilates constants.
  double total = 0.0;
  for (double w : lw.w) total += w;
  k = {0, 0};
  lw.at(kspan) = -total;

  auto add_drift = [&](DriftScheme scheme) {
    for (int i = 0; i < n; ++i) {
      const double b = drift[static_cast<std::size_t>(i)];
      if (b == 0.0) continue;
      std::array<int, 2> plus{0, 0}, minus{0, 0};
      plus[static_cast<std::size_t>(i)] = 1;
      minus[static_cast<std::size_t>(i)] = -1;
      auto ps = std::span<const int>(plus.data(), static_cast<std::size_t>(n));
      auto ms = std::span<const int>(minus.data(), static_cast<std::size_t>(n));
      if (scheme == DriftScheme::Centered) {
        lw.at(ps) += b / (2 * h);
        lw.at(ms) -= b / (2 * h);
      } else {
        lw.at(b > 0 ? ps : ms) += std::abs(b) / h;
        lw.at(kspan) -= std::abs(b) / h;
      }
    }
  };
  auto is_monotone = [&]() {
    const std::size_t c = lw.index(kspan);
    for (std::size_t i = 0; i < lw.w.size(); ++i)
      if (i != c && lw.w[i] < 0.0) return false;
    return true;
  };

  if (requested == DriftScheme::Auto) {
    const auto saved = lw.w;
    add_drift(DriftScheme::Centered);
    used = DriftScheme::Centered;
    if (!is_monotone()) {
      lw.w = saved;
      add_drift(DriftScheme::Upwind);
      used = DriftScheme::Upwind;
    }
  } else {
    add_drift(requested);
    used = requested;
  }
  return is_monotone();
}

}  // namespace

ExteriorRule ExteriorRule::constant(double value) {
  ExteriorRule r;
  r.kind = Kind::Constant;
  r.value = value;
  return r;
}

ExteriorRule ExteriorRule::function(SpaceTimeFunction fn, double growth, double scale) {
  ExteriorRule r;
  r.kind = Kind::Function;
  r.fn = std::move(fn);
  r.growth = growth;
  r.scale = scale;
  return r;
}

ExteriorRule ExteriorRule::periodic() {
  ExteriorRule r;
  r.kind = Kind::Periodic;
  return r;
}

double ExteriorRule::at(std::span<const double> x, double t) const {
  switch (kind) {
    case Kind::Constant: return value;
    case Kind::Function: return fn(x, t);
    case Kind::Periodic: break;
  }
  fail(kMod, ErrorCode::Extension, "periodic exteriors have no pointwise values");
}

Stencil::Stencil(const KernelSpec& kernel, double h, int half_width, const StencilOptions& options)
    : kernel_(kernel), options_(options), dim_(kernel.dim()), M_(half_width), h_(h) {
  require(dim_ == 1 || dim_ == 2, kMod, ErrorCode::InvalidArgument,
          "the lattice discretization supports n = 1 and n = 2");
  require(h > 0.0 && half_width >= 1, kMod, ErrorCode::InvalidArgument,
          "stencil needs h > 0 and at least one cell");
  const double s = kernel.s();
  const double R = radius();
  auto rc = [&](std::span<const double> th) { return R / inf_norm(th); };
  const auto breaks = cube_breaks(dim_);

  density_mass_ = integrate_sphere(dim_, [&](std::span<const double> th) {
    return std::abs(kernel.density_at(th));
  }, breaks).value;
  tail_ = integrate_sphere(dim_, [&](std::span<const double> th) {
    return kernel.density_at(th) * std::pow(rc(th), -2.0 * s) / (2.0 * s);
  }, breaks).value;

  std::array<std::array<double, 2>, 2> target2{};
  for (int i = 0; i < dim_; ++i)
    for (int j = i; j < dim_; ++j) {
      target2[i][j] = integrate_sphere(dim_, [&](std::span<const double> th) {
        return th[i] * th[j] * kernel.even_density_at(th) * std::pow(rc(th), 2.0 - 2.0 * s) /
               (2.0 - 2.0 * s);
      }, breaks).value;
      target2[j][i] = target2[i][j];
    }

  LatticeWeights lw;
  lw.M = M_;
  lw.dim = dim_;
  lw.w.assign(static_cast<std::size_t>(std::pow(2 * M_ + 1, dim_)), 0.0);
  std::array<double, 2> first{};
  {
    std::array<double, 2> y{};
    for_each_offset(dim_, M_, [&](std::span<const int> k) {
      bool zero = true;
      for (int i = 0; i < dim_; ++i) {
        y[i] = k[i] * h;
        zero = zero && k[i] == 0;
      }
      if (zero) return;
      const double w = std::pow(h, dim_) * kernel.kernel(std::span<const double>(y.data(), dim_));
      lw.at(k) = w;
      for (int i = 0; i < dim_; ++i) first[i] += w * y[i];
    });
  }

  drift_.assign(static_cast<std::size_t>(dim_), 0.0);
  for (int i = 0; i < dim_; ++i) drift_[i] = kernel.drift()[i];
  if (!kernel.symmetric()) {
    for (int i = 0; i < dim_; ++i) {
      double target = 0.0;
      if (s == 0.5) {
        target = integrate_sphere(dim_, [&](std::span<const double> th) {
          return th[i] * kernel.odd_density_at(th) * std::log(rc(th));
        }, breaks).value;
      } else {
        target = integrate_sphere(dim_, [&](std::span<const double> th) {
          return th[i] * kernel.odd_density_at(th) * std::pow(rc(th), 1.0 - 2.0 * s) /
                 (1.0 - 2.0 * s);
        }, breaks).value;
      }
      drift_[i] += target - first[i];
    }
  }

  monotone_ = finish_weights(lw, h, target2, drift_, options.drift, scheme_);
  weights_ = std::move(lw.w);
}

std::size_t Stencil::offset_index(std::span<const int> k) const {
  std::size_t idx = 0;
  for (int i = 0; i < dim_; ++i) {
    require(std::abs(k[i]) <= M_, kMod, ErrorCode::InvalidArgument, "offset outside stencil");
    idx = idx * static_cast<std::size_t>(2 * M_ + 1) + static_cast<std::size_t>(k[i] + M_);
  }
  return idx;
}

double Stencil::weight(std::span<const int> k) const { return weights_[offset_index(k)]; }

double Stencil::far_field(const SpaceFunction& g, std::span<const double> x, double growth,
                          double scale) const {
  const double s = kernel_.s();
  require(growth < 2.0 * s, kMod, ErrorCode::Extension,
          "exterior growth exponent must be below 2s for the tail to converge");
  if (scale == 0.0) return 0.0;
  const double R = radius();
  const double xnorm = norm2(x);
  // Beyond r_max the remainder is below scale 2^mu r_max^(mu - 2s) mass / (2s - mu).
  // Slowly decaying tails stop at tau = 400 when the remainder there is
  // still within tail_tol.
  const double coef = scale * std::pow(2.0, growth) * std::max(density_mass_, 1e-300) /
                      (2.0 * s - growth);
  const double log_r = std::max({std::log(1.0 + xnorm), std::log(R),
                                 std::log(0.1 * options_.tail_tol / coef) / (growth - 2.0 * s)});
  double tau_max = log_r - std::log(R) + std::log(std::sqrt(2.0)) + 1.0;
  if (tau_max > 400.0) {
    const double log_cap = std::log(R) + 400.0 - std::log(std::sqrt(2.0)) - 1.0;
    require(coef * std::exp((growth - 2.0 * s) * log_cap) <= options_.tail_tol, kMod,
            ErrorCode::Extension, "far-field cutoff cannot reach the requested tolerance");
    tau_max = 400.0;
  }
  const int panels = static_cast<int>(std::ceil(tau_max));

  std::array<double, 2> z{};
  auto radial = [&](std::span<const double> th) {
    const double rc = R / inf_norm(th);
    const double pref = kernel_.density_at(th) * std::pow(rc, -2.0 * s);
    double acc = 0.0;
    for (int p = 0; p < panels; ++p) {
      auto f = [&](double tau) {
        const double r = rc * std::exp(tau);
        for (int i = 0; i < dim_; ++i) z[i] = x[i] + r * th[i];
        return g(std::span<const double>(z.data(), static_cast<std::size_t>(dim_))) *
               std::exp(-2.0 * s * tau);
      };
      acc += boost::math::quadrature::gauss<double, 20>::integrate(f, double(p), double(p + 1));
    }
    return pref * acc;
  };

  if (dim_ == 1) {
    const std::array<double, 1> plus{1.0}, minus{-1.0};
    return radial(plus) + radial(minus);
  }
  double total = 0.0;
  for (int arc = 0; arc < 4; ++arc) {
    const double a = kDiagonals[static_cast<std::size_t>(arc)];
    auto f = [&](double phi) {
      const std::array<double, 2> th{std::cos(phi), std::sin(phi)};
      return radial(th);
    };
    total += boost::math::quadrature::gauss<double, 30>::integrate(f, a, a + kPi / 2);
  }
  return total;
}

double apply_at(const Stencil& stencil, const SpaceFunction& u, std::span<const double> x,
                double growth, double scale) {
  const int n = stencil.dim();
  const int M = stencil.half_width();
  const double h = stencil.h();
  const auto w = stencil.weights();
  // Differences against u(x): the weights sum to zero and the tail mass
  // pairs with the far field, so constants map to exactly zero.
  const double u0 = u(x);
  std::array<double, 2> z{};
  double acc = 0.0;
  std::size_t idx = 0;
  for_each_offset(n, M, [&](std::span<const int> k) {
    const double wk = w[idx++];
    if (wk == 0.0) return;
    for (int i = 0; i < n; ++i) z[i] = x[i] + k[i] * h;
    acc += wk * (u(std::span<const double>(z.data(), static_cast<std::size_t>(n))) - u0);
  });
  const SpaceFunction shifted = [&](std::span<const double> y) { return u(y) - u0; };
  acc += stencil.far_field(shifted, x, growth, scale + std::abs(u0));
  return acc;
}

// ---------------------------------------------------------------------------

struct DiscreteOperator::Fft {
  std::vector<int> n;  // transform size per axis
  std::size_t real_size = 0;
  std::size_t complex_size = 0;
  std::vector<std::complex<double>> spectrum;
  mutable std::vector<double> work_real;
  mutable std::vector<std::complex<double>> work_complex;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  Fft(int rows, int cols) : n{rows, cols} {
    real_size = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
    complex_size = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols / 2 + 1);
    work_real.assign(real_size, 0.0);
    work_complex.assign(complex_size, {});
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    forward = fftw_plan_dft_r2c_2d(rows, cols, work_real.data(),
                                   reinterpret_cast<fftw_complex*>(work_complex.data()),
                                   FFTW_ESTIMATE);
    backward = fftw_plan_dft_c2r_2d(rows, cols,
                                    reinterpret_cast<fftw_complex*>(work_complex.data()),
                                    work_real.data(), FFTW_ESTIMATE);
  }
  ~Fft() {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;
};

DiscreteOperator::DiscreteOperator(const KernelSpec& kernel, std::vector<std::size_t> extents,
                                   double h, std::vector<double> origin, ExteriorRule exterior,
                                   const StencilOptions& options)
    : kernel_(kernel),
      exterior_(std::move(exterior)),
      options_(options),
      dim_(kernel.dim()),
      extents_(std::move(extents)),
      h_(h),
      origin_(std::move(origin)) {
  require(static_cast<int>(extents_.size()) == dim_ && static_cast<int>(origin_.size()) == dim_,
          kMod, ErrorCode::InvalidArgument, "box and kernel dimensions differ");
  require(dim_ == 1 || dim_ == 2, kMod, ErrorCode::InvalidArgument,
          "the lattice discretization supports n = 1 and n = 2");
  size_ = 1;
  std::size_t widest = 0;
  for (auto e : extents_) {
    require(e >= 2, kMod, ErrorCode::InvalidArgument, "box needs at least two nodes per axis");
    size_ *= e;
    widest = std::max(widest, e);
  }
  if (exterior_.kind == ExteriorRule::Kind::Function)
    require(exterior_.growth < 2.0 * kernel.s(), kMod, ErrorCode::Extension,
            "exterior growth exponent must be below 2s");

  coupling_extent_.resize(static_cast<std::size_t>(dim_));
  if (!periodic()) {
    const int M = static_cast<int>(widest) - 1;
    stencil_ = std::make_unique<Stencil>(kernel, h, std::max(M, 1), options);
    monotone_ = stencil_->monotone();
    scheme_ = stencil_->drift_scheme();
    for (int i = 0; i < dim_; ++i) coupling_extent_[i] = static_cast<long>(extents_[i]) - 1;
    std::size_t total = 1;
    for (auto e : coupling_extent_) total *= static_cast<std::size_t>(2 * e + 1);
    couplings_.assign(total, 0.0);
    std::array<int, 2> k{};
    std::size_t idx = 0;
    if (dim_ == 1) {
      for (long a = -coupling_extent_[0]; a <= coupling_extent_[0]; ++a) {
        k[0] = static_cast<int>(a);
        couplings_[idx++] = stencil_->weight(std::span<const int>(k.data(), 1));
      }
    } else {
      for (long a = -coupling_extent_[0]; a <= coupling_extent_[0]; ++a)
        for (long b = -coupling_extent_[1]; b <= coupling_extent_[1]; ++b) {
          k = {static_cast<int>(a), static_cast<int>(b)};
          couplings_[idx++] = stencil_->weight(std::span<const int>(k.data(), 2));
        }
    }
    k = {0, 0};
    diagonal_ = stencil_->weight(std::span<const int>(k.data(), static_cast<std::size_t>(dim_))) -
                stencil_->tail_mass();
  } else {
    // Periodic box: smooth radial window chi on the lattice sum, the rest
    // of the kernel only sees the mean of u.
    require(kernel.symmetric(), kMod, ErrorCode::InvalidArgument,
            "periodic boxes need a symmetric kernel");
    const double s = kernel.s();
    double period = 0.0;
    for (auto e : extents_) period = std::max(period, static_cast<double>(e) * h);
    const double width = 2.0 * period;
    const double center = 6.0 * width;
    const double reach = center + 6.5 * width;
    auto chi = [&](double r) {
      return r < 0.5 * center ? 1.0 : 0.5 * std::erfc((r - center) / width);
    };
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    const double grow2 = std::pow(0.5 * center, 2.0 - 2.0 * s) / (2.0 - 2.0 * s) +
                         GK::integrate([&](double r) { return chi(r) * std::pow(r, 1.0 - 2.0 * s); },
                                       0.5 * center, reach, 15, 1e-14);
    const double tail_r = std::pow(reach, -2.0 * s) / (2.0 * s) +
                          GK::integrate([&](double r) { return (1.0 - chi(r)) * std::pow(r, -1.0 - 2.0 * s); },
                                        0.5 * center, reach, 15, 1e-14);
    std::array<std::array<double, 2>, 2> target2{};
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j)
        target2[i][j] = grow2 * integrate_sphere(dim_, [&](std::span<const double> th) {
                          return th[i] * th[j] * kernel.density_at(th);
                        }).value;
    const double tail = tail_r * integrate_sphere(dim_, [&](std::span<const double> th) {
                          return kernel.density_at(th);
                        }).value;

    const int M = static_cast<int>(std::ceil(reach / h));
    LatticeWeights lw;
    lw.M = M;
    lw.dim = dim_;
    lw.w.assign(static_cast<std::size_t>(std::pow(2 * M + 1, dim_)), 0.0);
    std::array<double, 2> y{};
    for_each_offset(dim_, M, [&](std::span<const int> k) {
      double r2 = 0.0;
      for (int i = 0; i < dim_; ++i) {
        y[i] = k[i] * h;
        r2 += y[i] * y[i];
      }
      if (r2 == 0.0 || r2 >= reach * reach) return;
      lw.at(k) = std::pow(h, dim_) * kernel.kernel(std::span<const double>(y.data(), dim_)) *
                 chi(std::sqrt(r2));
    });
    monotone_ = finish_weights(lw, h, target2, kernel.drift(), options.drift, scheme_);

    for (int i = 0; i < dim_; ++i) coupling_extent_[i] = static_cast<long>(extents_[i]);
    std::size_t total = 1;
    for (auto e : extents_) total *= e;
    couplings_.assign(total, 0.0);
    std::size_t idx = 0;
    for_each_offset(dim_, M, [&](std::span<const int> k) {
      const double wk = lw.w[idx++];
      if (wk == 0.0) return;
      std::size_t flat = 0;
      for (int i = 0; i < dim_; ++i) {
        const long e = static_cast<long>(extents_[i]);
        const long m = ((k[i] % e) + e) % e;
        flat = flat * extents_[i] + static_cast<std::size_t>(m);
      }
      couplings_[flat] += wk;
    });
    mean_coupling_ = tail;
    diagonal_ = couplings_[0] - tail + tail / static_cast<double>(size_);
  }

  if (dim_ == 2) {
    const int rows = periodic() ? static_cast<int>(extents_[0]) : 2 * static_cast<int>(extents_[0]);
    const int cols = periodic() ? static_cast<int>(extents_[1]) : 2 * static_cast<int>(extents_[1]);
    fft_ = std::make_unique<Fft>(rows, cols);
    // G[m] = coupling(-m), laid out circularly.
    auto& buf = fft_->work_real;
    std::fill(buf.begin(), buf.end(), 0.0);
    const long ex0 = static_cast<long>(extents_[0]);
    const long ex1 = static_cast<long>(extents_[1]);
    for (long a = 0; a < rows; ++a)
      for (long b = 0; b < cols; ++b) {
        long da = a, db = b;
        if (!periodic()) {
          if (a >= ex0 && a <= rows - ex0) continue;
          if (b >= ex1 && b <= cols - ex1) continue;
          if (da >= ex0) da -= rows;
          if (db >= ex1) db -= cols;
        }
        const std::array<long, 2> d{-da, -db};
        buf[static_cast<std::size_t>(a * cols + b)] = coupling(d);
      }
    fftw_execute_dft_r2c(fft_->forward, buf.data(),
                         reinterpret_cast<fftw_complex*>(fft_->work_complex.data()));
    fft_->spectrum = fft_->work_complex;
  }
}

DiscreteOperator::~DiscreteOperator() = default;
DiscreteOperator::DiscreteOperator(DiscreteOperator&&) noexcept = default;
DiscreteOperator& DiscreteOperator::operator=(DiscreteOperator&&) noexcept = default;

std::vector<double> DiscreteOperator::node(std::size_t i) const {
  std::vector<double> x(static_cast<std::size_t>(dim_));
  for (int a = dim_ - 1; a >= 0; --a) {
    const std::size_t e = extents_[static_cast<std::size_t>(a)];
    x[a] = origin_[a] + static_cast<double>(i % e) * h_;
    i /= e;
  }
  return x;
}

double DiscreteOperator::coupling(std::span<const long> d) const {
  std::size_t idx = 0;
  if (periodic()) {
    for (int i = 0; i < dim_; ++i) {
      const long e = coupling_extent_[i];
      idx = idx * static_cast<std::size_t>(e) + static_cast<std::size_t>(((d[i] % e) + e) % e);
    }
    return couplings_[idx];
  }
  for (int i = 0; i < dim_; ++i) {
    const long e = coupling_extent_[i];
    if (d[i] < -e || d[i] > e) return 0.0;
    idx = idx * static_cast<std::size_t>(2 * e + 1) + static_cast<std::size_t>(d[i] + e);
  }
  return couplings_[idx];
}

void DiscreteOperator::apply_linear(std::span<const double> u, std::span<double> out) const {
  require(u.size() == size_ && out.size() == size_, kMod, ErrorCode::InvalidArgument,
          "vector length does not match the box");
  const double mean = periodic() ? std::accumulate(u.begin(), u.end(), 0.0) / size_ : 0.0;
  if (dim_ == 1 && !periodic()) {
    const std::size_t N = size_;
    for (std::size_t i = 0; i < N; ++i) {
      const double* row = couplings_.data() + (N - 1 - i);
      double acc = 0.0;
      for (std::size_t j = 0; j < N; ++j) acc += row[j] * u[j];
      out[i] = acc;
    }
  } else if (dim_ == 1) {
    const long N = static_cast<long>(size_);
    for (long i = 0; i < N; ++i) {
      double acc = 0.0;
      std::array<long, 1> d{};
      for (long j = 0; j < N; ++j) {
        d[0] = j - i;
        acc += coupling(d) * u[static_cast<std::size_t>(j)];
      }
      out[static_cast<std::size_t>(i)] = acc;
    }
  } else {
    auto& f = *fft_;
    const int rows = f.n[0], cols = f.n[1];
    std::fill(f.work_real.begin(), f.work_real.end(), 0.0);
    for (std::size_t a = 0; a < extents_[0]; ++a)
      for (std::size_t b = 0; b < extents_[1]; ++b)
        f.work_real[a * static_cast<std::size_t>(cols) + b] = u[a * extents_[1] + b];
    fftw_execute_dft_r2c(f.forward, f.work_real.data(),
                         reinterpret_cast<fftw_complex*>(f.work_complex.data()));
    for (std::size_t i = 0; i < f.complex_size; ++i) f.work_complex[i] *= f.spectrum[i];
    fftw_execute_dft_c2r(f.backward, reinterpret_cast<fftw_complex*>(f.work_complex.data()),
                         f.work_real.data());
    const double scale = 1.0 / (static_cast<double>(rows) * cols);
    for (std::size_t a = 0; a < extents_[0]; ++a)
      for (std::size_t b = 0; b < extents_[1]; ++b)
        out[a * extents_[1] + b] = f.work_real[a * static_cast<std::size_t>(cols) + b] * scale;
  }
  if (periodic()) {
    for (std::size_t i = 0; i < size_; ++i) out[i] += mean_coupling_ * (mean - u[i]);
  } else {
    const double tail = stencil_->tail_mass();
    for (std::size_t i = 0; i < size_; ++i) out[i] -= tail * u[i];
  }
}

double DiscreteOperator::offdiag_dot(std::size_t i, std::span<const double> u) const {
  double acc = 0.0;
  if (!periodic()) {
    // Row i of A restricted to the box is a contiguous window of the couplings.
    if (dim_ == 1) {
      const std::size_t N = size_;
      const double* row = couplings_.data() + (N - 1 - i);
      for (std::size_t j = 0; j < N; ++j) acc += row[j] * u[j];
      acc -= row[i] * u[i];
    } else {
      const std::size_t N0 = extents_[0], N1 = extents_[1];
      const std::size_t ia = i / N1, ib = i % N1;
      const std::size_t width = 2 * N1 - 1;
      for (std::size_t a = 0; a < N0; ++a) {
        const double* row = couplings_.data() + (a + N0 - 1 - ia) * width + (N1 - 1 - ib);
        const double* ua = u.data() + a * N1;
        for (std::size_t b = 0; b < N1; ++b) acc += row[b] * ua[b];
      }
      acc -= couplings_[(N0 - 1) * width + (N1 - 1)] * u[i];
    }
    return acc;
  }
  if (dim_ == 1) {
    std::array<long, 1> d{};
    const long li = static_cast<long>(i);
    for (long j = 0; j < static_cast<long>(size_); ++j) {
      if (j == li) continue;
      d[0] = j - li;
      acc += coupling(d) * u[static_cast<std::size_t>(j)];
    }
  } else {
    const long ia = static_cast<long>(i / extents_[1]);
    const long ib = static_cast<long>(i % extents_[1]);
    std::array<long, 2> d{};
    for (long a = 0; a < static_cast<long>(extents_[0]); ++a)
      for (long b = 0; b < static_cast<long>(extents_[1]); ++b) {
        if (a == ia && b == ib) continue;
        d = {a - ia, b - ib};
        acc += coupling(d) * u[static_cast<std::size_t>(a) * extents_[1] + static_cast<std::size_t>(b)];
      }
  }
  if (periodic()) {
    const double sum = std::accumulate(u.begin(), u.end(), 0.0) - u[i];
    acc += mean_coupling_ / static_cast<double>(size_) * sum;
  }
  return acc;
}

std::vector<double> DiscreteOperator::dense() const {
  std::vector<double> A(size_ * size_, 0.0);
  std::vector<double> e(size_, 0.0), col(size_);
  for (std::size_t j = 0; j < size_; ++j) {
    e[j] = 1.0;
    apply_linear(e, col);
    for (std::size_t i = 0; i < size_; ++i) A[i * size_ + j] = col[i];
    e[j] = 0.0;
  }
  return A;
}

std::vector<double> DiscreteOperator::compute_exterior(double t) const {
  std::vector<double> c(size_, 0.0);
  if (periodic()) return c;
  if (exterior_.kind == ExteriorRule::Kind::Constant) {
    if (exterior_.value == 0.0) return c;
    std::vector<double> ones(size_, 1.0);
    apply_linear(ones, c);
    for (auto& v : c) v *= -exterior_.value;
    return c;
  }
  const int M = stencil_->half_width();
  const auto w = stencil_->weights();
  SpaceFunction g = [&](std::span<const double> z) { return exterior_.fn(z, t); };
  if (dim_ == 1) {
    const long N = static_cast<long>(extents_[0]);
    std::vector<double> pad(static_cast<std::size_t>(N + 2 * M), 0.0);
    std::array<double, 1> z{};
    for (long p = 0; p < N + 2 * M; ++p) {
      const long j = p - M;
      if (j >= 0 && j < N) continue;
      z[0] = origin_[0] + static_cast<double>(j) * h_;
      pad[static_cast<std::size_t>(p)] = g(z);
    }
    for (long i = 0; i < N; ++i) {
      double acc = 0.0;
      for (long k = -M; k <= M; ++k) {
        const long j = i + k;
        if (j >= 0 && j < N) continue;
        acc += w[static_cast<std::size_t>(k + M)] * pad[static_cast<std::size_t>(j + M)];
      }
      z[0] = origin_[0] + static_cast<double>(i) * h_;
      c[static_cast<std::size_t>(i)] = acc + stencil_->far_field(g, z, exterior_.growth, exterior_.scale);
    }
    return c;
  }
  const long N0 = static_cast<long>(extents_[0]);
  const long N1 = static_cast<long>(extents_[1]);
  const long P0 = N0 + 2 * M, P1 = N1 + 2 * M;
  const long W = 2 * M + 1;
  std::vector<double> pad(static_cast<std::size_t>(P0 * P1), 0.0);
  std::array<double, 2> z{};
  for (long p = 0; p < P0; ++p)
    for (long q = 0; q < P1; ++q) {
      const long a = p - M, b = q - M;
      if (a >= 0 && a < N0 && b >= 0 && b < N1) continue;
      z = {origin_[0] + static_cast<double>(a) * h_, origin_[1] + static_cast<double>(b) * h_};
      pad[static_cast<std::size_t>(p * P1 + q)] = g(z);
    }
  for (long a = 0; a < N0; ++a)
    for (long b = 0; b < N1; ++b) {
      double acc = 0.0;
      for (long ka = -M; ka <= M; ++ka) {
        const long pa = a + ka + M;
        const double* wrow = w.data() + (ka + M) * W;
        const double* prow = pad.data() + pa * P1 + b;
        for (long kb = 0; kb < W; ++kb) acc += wrow[kb] * prow[kb];
      }
      z = {origin_[0] + static_cast<double>(a) * h_, origin_[1] + static_cast<double>(b) * h_};
      c[static_cast<std::size_t>(a * N1 + b)] =
          acc + stencil_->far_field(g, z, exterior_.growth, exterior_.scale);
    }
  return c;
}

std::vector<double> DiscreteOperator::exterior_term(double t) const {
  if (exterior_.kind == ExteriorRule::Kind::Function) return compute_exterior(t);
  if (!exterior_cached_) {
    cached_exterior_ = compute_exterior(t);
    exterior_cached_ = true;
  }
  return cached_exterior_;
}

void DiscreteOperator::apply(std::span<const double> u, std::span<double> out, double t) const {
  apply_linear(u, out);
  const auto c = exterior_term(t);
  for (std::size_t i = 0; i < size_; ++i) out[i] += c[i];
}

std::vector<double> DiscreteOperator::apply(std::span<const double> u, double t) const {
  std::vector<double> out(size_);
  apply(u, out, t);
  return out;
}

GridFunction apply_operator(const KernelSpec& kernel, const GridFunction& u,
                            const ExteriorRule& exterior, std::size_t time_level,
                            const StencilOptions& options) {
  require(u.spatial_dim() == kernel.dim(), kMod, ErrorCode::InvalidArgument,
          "grid and kernel dimensions differ");
  require(time_level < u.time_levels(), kMod, ErrorCode::InvalidArgument,
          "time level out of range");
  DiscreteOperator op(kernel, u.spatial_extents(), u.h(), u.spatial_origin(), exterior, options);
  const double t = u.has_time() ? u.time_at(time_level) : 0.0;
  GridFunction out = GridFunction::spatial(u.spatial_extents(), u.h(), u.spatial_origin(), u.s());
  op.apply(u.slice(time_level), out.values(), t);
  return out;
}

}  // namespace fbreg
