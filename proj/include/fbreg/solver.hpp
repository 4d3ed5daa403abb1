#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "fbreg/discrete_operator.hpp"
#include "fbreg/grid.hpp"
#include "fbreg/kernel.hpp"

namespace fbreg {

/// Square matrix accessed row by row (for projected sweeps) or as a whole.
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;
  virtual std::size_t size() const = 0;
  virtual double diagonal(std::size_t i) const = 0;
  /// sum_{j != i} M_ij u_j
  virtual double offdiag_dot(std::size_t i, std::span<const double> u) const = 0;
  virtual void apply(std::span<const double> u, std::span<double> out) const = 0;
};

/// Row-major dense matrix.
class DenseOperator final : public LinearOperator {
 public:
  DenseOperator(std::size_t n, std::vector<double> entries);
  std::size_t size() const override { return n_; }
  double diagonal(std::size_t i) const override { return a_[i * n_ + i]; }
  double offdiag_dot(std::size_t i, std::span<const double> u) const override;
  void apply(std::span<const double> u, std::span<double> out) const override;

 private:
  std::size_t n_;
  std::vector<double> a_;
};

/// alpha I - A for the box matrix A of a discrete operator (alpha = 0 gives -A).
class ShiftedOperator final : public LinearOperator {
 public:
  ShiftedOperator(const DiscreteOperator& op, double alpha) : op_(op), alpha_(alpha) {}
  std::size_t size() const override { return op_.size(); }
  double diagonal(std::size_t) const override { return alpha_ - op_.diagonal(); }
  double offdiag_dot(std::size_t i, std::span<const double> u) const override {
    return -op_.offdiag_dot(i, u);
  }
  void apply(std::span<const double> u, std::span<double> out) const override;

 private:
  const DiscreteOperator& op_;
  double alpha_;
};

struct LcpOptions {
  double tol = 1e-10;
  std::size_t max_sweeps = 200000;
  /// Over-relaxation; 0 picks 1.0.
  double omega = 0.0;
  std::size_t stagnation_window = 50;
  double stagnation_decrease = 1e-3;
};

struct LcpResult {
  std::vector<double> u;
  std::size_t sweeps = 0;
  double residual = 0.0;  ///< max |min(M u - f, diag (u - phi))|
  bool converged = false;
};

/// Projected SOR for min{M u - f, u - phi} = 0 with symmetric
/// (forward then backward) sweeps. Throws E_STAGNATION when the residual
/// drops by less than the configured fraction over a stagnation window,
/// E_NOT_CONVERGED at the sweep cap.
LcpResult solve_lcp(const LinearOperator& M, std::span<const double> obstacle,
                    std::span<const double> rhs, const LcpOptions& options = {},
                    std::span<const double> initial = {});

/// max |min(M u - f, diag (u - phi))| computed with a full product.
double lcp_residual(const LinearOperator& M, std::span<const double> u,
                    std::span<const double> obstacle, std::span<const double> rhs);

struct ObstacleProblem {
  KernelSpec kernel;
  GridFunction obstacle;  ///< spatial grid; the box is its node set
  ExteriorRule exterior;  ///< u outside the box
  double horizon = 0.0;   ///< T > 0 for parabolic problems
  std::size_t time_steps = 0;
  StencilOptions stencil;
  /// Discrete second-difference bound of the obstacle, filled by make_obstacle_problem.
  double obstacle_c2 = 0.0;
};

/// Samples phi on the box and sets the exterior to u = phi outside it
/// (growth bound `growth`, `scale` as for ExteriorRule::function).
ObstacleProblem make_obstacle_problem(const KernelSpec& kernel, const SpaceFunction& phi,
                                      double growth, double scale,
                                      std::vector<std::size_t> extents, double h,
                                      std::vector<double> origin);

struct SolveReport {
  std::size_t iterations = 0;
  double residual = 0.0;     ///< final natural residual
  double tolerance = 0.0;    ///< tol (||L phi||_inf + 1)
  std::vector<std::size_t> active_set;  ///< contact-set size per step
  std::vector<std::size_t> active_growth_steps;
  double wall_seconds = 0.0;
  bool monotone_scheme = true;
  DriftScheme drift_scheme = DriftScheme::Centered;
};

struct SolveOptions {
  double tol = 1e-9;
  LcpOptions lcp;
  /// Start from a solve on the grid with spacing 2h when the box allows it.
  bool coarse_start = true;
  /// Contact detection threshold relative to the obstacle scale.
  double contact_tol = 1e-9;
};

/// min{-L u, u - phi} = 0.
std::pair<GridFunction, SolveReport> solve_elliptic_obstacle(const ObstacleProblem& problem,
                                                             const SolveOptions& options = {});

/// min{u_t - L u, u - phi} = 0, u(0) = phi, implicit Euler in time; the
/// result has time_steps + 1 levels.
std::pair<GridFunction, SolveReport> solve_parabolic_obstacle(const ObstacleProblem& problem,
                                                              const SolveOptions& options = {});

/// Nodes of the box that belong to the closed set A at time t.
using ZeroSetMask = std::function<std::vector<char>(double t)>;

struct LinearParabolicOptions {
  double tol = 1e-11;
  std::size_t max_iterations = 5000;
  StencilOptions stencil;
};

/// Implicit Euler for d_t v - L v = f on A(t)^c with v = 0 on A(t);
/// `initial` is v at t0, the result has steps + 1 levels.
GridFunction solve_linear_parabolic(const KernelSpec& kernel, std::vector<std::size_t> extents,
                                    double h, std::vector<double> origin,
                                    const ExteriorRule& exterior, const ZeroSetMask& mask,
                                    const SpaceTimeFunction& rhs, std::span<const double> initial,
                                    double t0, double dt, std::size_t steps,
                                    const LinearParabolicOptions& options = {});

}  // namespace fbreg
