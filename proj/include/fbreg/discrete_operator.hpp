#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "fbreg/grid.hpp"
#include "fbreg/kernel.hpp"

namespace fbreg {

/// u at a point of R^n (and a time for moving exteriors).
using SpaceTimeFunction = std::function<double(std::span<const double>, double)>;
using SpaceFunction = std::function<double(std::span<const double>)>;

/// How u continues outside the computational box.
struct ExteriorRule {
  enum class Kind { Constant, Function, Periodic };

  Kind kind = Kind::Constant;
  double value = 0.0;
  SpaceTimeFunction fn;
  /// |fn(x, t)| <= scale * (1 + |x|)^growth; growth must stay below 2s.
  double growth = 0.0;
  double scale = 1.0;

  static ExteriorRule constant(double value);
  static ExteriorRule function(SpaceTimeFunction fn, double growth, double scale = 1.0);
  static ExteriorRule periodic();

  double at(std::span<const double> x, double t) const;
};

enum class DriftScheme { Centered, Upwind, Auto };

struct StencilOptions {
  DriftScheme drift = DriftScheme::Auto;
  /// Absolute accuracy target for far-field integrals.
  double tail_tol = 1e-10;
};

/// Lattice quadrature of L on the cube [-R, R]^n with R = (M + 1/2) h:
///   L u(x) ~ sum_k w_k u(x + k h) - T u(x) + int_{|y|_inf > R} u(x + y) K(y) dy.
/// Midpoint weights h^n K(k h) off the origin, plus corrections on the
/// nearest neighbours that make the lattice reproduce the exact second
/// moments of K over the cube (and the first moments of its odd part).
/// The drift, including that first-moment correction, is differenced
/// on the nearest neighbours.
class Stencil {
 public:
  Stencil(const KernelSpec& kernel, double h, int half_width, const StencilOptions& options = {});

  int dim() const noexcept { return dim_; }
  int half_width() const noexcept { return M_; }
  double h() const noexcept { return h_; }
  double radius() const noexcept { return (M_ + 0.5) * h_; }
  /// int_{|y|_inf > R} K(y) dy
  double tail_mass() const noexcept { return tail_; }
  /// Row-major over [-M, M]^n; the center entry holds the local diagonal.
  std::span<const double> weights() const noexcept { return weights_; }
  double weight(std::span<const int> k) const;
  std::size_t offset_index(std::span<const int> k) const;
  bool monotone() const noexcept { return monotone_; }
  DriftScheme drift_scheme() const noexcept { return scheme_; }
  /// b plus the first-moment correction of the odd kernel part.
  const std::vector<double>& effective_drift() const noexcept { return drift_; }
  const KernelSpec& kernel() const noexcept { return kernel_; }

  /// int_{|y|_inf > R} g(x + y) K(y) dy for |g(z)| <= scale (1 + |z|)^growth.
  double far_field(const SpaceFunction& g, std::span<const double> x, double growth,
                   double scale) const;

 private:
  KernelSpec kernel_;
  StencilOptions options_;
  int dim_ = 1;
  int M_ = 0;
  double h_ = 0.0;
  double tail_ = 0.0;
  double density_mass_ = 0.0;
  std::vector<double> weights_;
  std::vector<double> drift_;
  bool monotone_ = true;
  DriftScheme scheme_ = DriftScheme::Centered;
};

/// The stencil applied to a function known everywhere (including outside
/// the cube). `growth`/`scale` bound |u| for the far-field integral.
double apply_at(const Stencil& stencil, const SpaceFunction& u, std::span<const double> x,
                double growth, double scale = 1.0);

/// L on a box of nodes origin + j h, j in [0, extents). All box nodes are
/// unknowns; the exterior rule supplies u elsewhere, so
///   L u = A u + c(t)
/// with A the box-restricted matrix and c the exterior contribution.
class DiscreteOperator {
 public:
  DiscreteOperator(const KernelSpec& kernel, std::vector<std::size_t> extents, double h,
                   std::vector<double> origin, ExteriorRule exterior,
                   const StencilOptions& options = {});
  ~DiscreteOperator();
  DiscreteOperator(DiscreteOperator&&) noexcept;
  DiscreteOperator& operator=(DiscreteOperator&&) noexcept;

  std::size_t size() const noexcept { return size_; }
  int dim() const noexcept { return dim_; }
  const std::vector<std::size_t>& extents() const noexcept { return extents_; }
  double h() const noexcept { return h_; }
  const std::vector<double>& origin() const noexcept { return origin_; }
  const KernelSpec& kernel() const noexcept { return kernel_; }
  const ExteriorRule& exterior() const noexcept { return exterior_; }
  bool periodic() const noexcept { return exterior_.kind == ExteriorRule::Kind::Periodic; }
  bool monotone() const noexcept { return monotone_; }
  DriftScheme drift_scheme() const noexcept { return scheme_; }
  std::vector<double> node(std::size_t i) const;

  /// out = A u
  void apply_linear(std::span<const double> u, std::span<double> out) const;
  /// c(t); cached for time-independent exteriors.
  std::vector<double> exterior_term(double t = 0.0) const;
  /// out = A u + c(t)
  void apply(std::span<const double> u, std::span<double> out, double t = 0.0) const;
  std::vector<double> apply(std::span<const double> u, double t = 0.0) const;

  /// A_ii (the same for every node).
  double diagonal() const noexcept { return diagonal_; }
  /// sum_{j != i} A_ij u_j
  double offdiag_dot(std::size_t i, std::span<const double> u) const;
  /// Dense copy of A, for small systems and tests.
  std::vector<double> dense() const;

 private:
  struct Fft;

  KernelSpec kernel_;
  ExteriorRule exterior_;
  StencilOptions options_;
  int dim_ = 1;
  std::vector<std::size_t> extents_;
  std::size_t size_ = 0;
  double h_ = 0.0;
  std::vector<double> origin_;
  std::unique_ptr<Stencil> stencil_;
  /// Box couplings: offsets in [-(N-1), N-1]^n (wrapped for periodic boxes).
  std::vector<double> couplings_;
  std::vector<long> coupling_extent_;
  double diagonal_ = 0.0;
  double mean_coupling_ = 0.0;  ///< periodic far field: T_chi (mean(u) - u(x))
  bool monotone_ = true;
  DriftScheme scheme_ = DriftScheme::Centered;
  mutable std::vector<double> cached_exterior_;
  mutable bool exterior_cached_ = false;
  std::unique_ptr<Fft> fft_;

  double coupling(std::span<const long> d) const;
  std::vector<double> compute_exterior(double t) const;
};

/// L u at every node of u (one time level for space-time grids).
GridFunction apply_operator(const KernelSpec& kernel, const GridFunction& u,
                            const ExteriorRule& exterior, std::size_t time_level = 0,
                            const StencilOptions& options = {});

}  // namespace fbreg
