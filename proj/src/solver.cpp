#include "fbreg/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "fbreg/error.hpp"

namespace fbreg {

namespace {

constexpr auto kMod = Module::Solver;

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

std::size_t count_contact(std::span<const double> u, std::span<const double> phi, double tol) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < u.size(); ++i)
    if (u[i] - phi[i] <= tol) ++n;
  return n;
}

// Multilinear interpolation from the grid with spacing 2h onto the fine grid
// (fine extents 2m - 1 per axis).
std::vector<double> prolongate(std::span<const double> coarse, const std::vector<std::size_t>& cext,
                               const std::vector<std::size_t>& fext) {
  std::vector<double> fine;
  if (fext.size() == 1) {
    fine.resize(fext[0]);
    for (std::size_t i = 0; i < fext[0]; ++i)
      fine[i] = i % 2 == 0 ? coarse[i / 2] : 0.5 * (coarse[i / 2] + coarse[i / 2 + 1]);
    return fine;
  }
  fine.resize(fext[0] * fext[1]);
  for (std::size_t a = 0; a < fext[0]; ++a)
    for (std::size_t b = 0; b < fext[1]; ++b) {
      const std::size_t a0 = a / 2, a1 = a % 2 == 0 ? a0 : a0 + 1;
      const std::size_t b0 = b / 2, b1 = b % 2 == 0 ? b0 : b0 + 1;
      fine[a * fext[1] + b] = 0.25 * (coarse[a0 * cext[1] + b0] + coarse[a0 * cext[1] + b1] +
                                      coarse[a1 * cext[1] + b0] + coarse[a1 * cext[1] + b1]);
    }
  return fine;
}

bool can_coarsen(const std::vector<std::size_t>& ext) {
  for (auto e : ext)
    if (e < 33 || e % 2 == 0) return false;
  return true;
}

GridFunction restrict_obstacle(const GridFunction& phi) {
  std::vector<std::size_t> cext;
  for (auto e : phi.extents()) cext.push_back((e + 1) / 2);
  GridFunction c = GridFunction::spatial(cext, 2.0 * phi.h(), phi.origin(), phi.s());
  std::vector<std::size_t> ci(cext.size()), fi(cext.size());
  for (std::size_t f = 0; f < c.size(); ++f) {
    c.unflatten(f, ci);
    for (std::size_t a = 0; a < ci.size(); ++a) fi[a] = 2 * ci[a];
    c[f] = phi[phi.flat(fi)];
  }
  return c;
}

}  // namespace

DenseOperator::DenseOperator(std::size_t n, std::vector<double> entries)
    : n_(n), a_(std::move(entries)) {
  require(a_.size() == n * n, kMod, ErrorCode::InvalidArgument, "dense matrix has wrong size");
}

double DenseOperator::offdiag_dot(std::size_t i, std::span<const double> u) const {
  double acc = 0.0;
  const double* row = a_.data() + i * n_;
  for (std::size_t j = 0; j < n_; ++j)
    if (j != i) acc += row[j] * u[j];
  return acc;
}

void DenseOperator::apply(std::span<const double> u, std::span<double> out) const {
  for (std::size_t i = 0; i < n_; ++i) {
    double acc = 0.0;
    const double* row = a_.data() + i * n_;
    for (std::size_t j = 0; j < n_; ++j) acc += row[j] * u[j];
    out[i] = acc;
  }
}

void ShiftedOperator::apply(std::span<const double> u, std::span<double> out) const {
  op_.apply_linear(u, out);
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = alpha_ * u[i] - out[i];
}

double lcp_residual(const LinearOperator& M, std::span<const double> u,
                    std::span<const double> obstacle, std::span<const double> rhs) {
  std::vector<double> mu(u.size());
  M.apply(u, mu);
  double res = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double r = std::min(mu[i] - rhs[i], M.diagonal(i) * (u[i] - obstacle[i]));
    res = std::max(res, std::abs(r));
  }
  return res;
}

LcpResult solve_lcp(const LinearOperator& M, std::span<const double> obstacle,
                    std::span<const double> rhs, const LcpOptions& options,
                    std::span<const double> initial) {
  const std::size_t n = M.size();
  require(obstacle.size() == n && rhs.size() == n, kMod, ErrorCode::InvalidArgument,
          "obstacle and right-hand side must match the operator size");
  require(initial.empty() || initial.size() == n, kMod, ErrorCode::InvalidArgument,
          "initial guess has wrong size");
  for (std::size_t i = 0; i < n; ++i)
    require(M.diagonal(i) > 0.0, kMod, ErrorCode::InvalidArgument,
            "projected SOR needs a positive diagonal");
  const double omega = options.omega > 0.0 ? options.omega : 1.0;

  LcpResult result;
  result.u.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    result.u[i] = std::max(obstacle[i], initial.empty() ? 0.0 : initial[i]);
  auto& u = result.u;

  std::vector<double> history;
  double res = 0.0;
  auto relax = [&](std::size_t i) {
    const double d = M.diagonal(i);
    const double r = d * u[i] + M.offdiag_dot(i, u) - rhs[i];
    res = std::max(res, std::abs(std::min(r, d * (u[i] - obstacle[i]))));
    u[i] = std::max(obstacle[i], u[i] - omega * r / d);
  };

  for (std::size_t sweep = 1; sweep <= options.max_sweeps; ++sweep) {
    res = 0.0;
    for (std::size_t i = 0; i < n; ++i) relax(i);
    res = 0.0;
    for (std::size_t i = n; i-- > 0;) relax(i);
    result.sweeps = sweep;
    history.push_back(res);
    if (res <= options.tol) {
      result.residual = lcp_residual(M, u, obstacle, rhs);
      if (result.residual <= options.tol) {
        result.converged = true;
        return result;
      }
    }
    const std::size_t w = options.stagnation_window;
    if (w > 0 && history.size() > w) {
      const double before = history[history.size() - 1 - w];
      if (res > (1.0 - options.stagnation_decrease) * before) {
        std::ostringstream os;
        os << "projected SOR stagnated after " << sweep << " sweeps: residual " << res
           << " vs " << before << " " << w << " sweeps earlier (tol " << options.tol << ")";
        fail(kMod, ErrorCode::Stagnation, os.str());
      }
    }
  }
  result.residual = lcp_residual(M, u, obstacle, rhs);
  std::ostringstream os;
  os << "projected SOR hit the sweep cap " << options.max_sweeps << " with residual "
     << result.residual << " (tol " << options.tol << ")";
  fail(kMod, ErrorCode::NotConverged, os.str());
}

ObstacleProblem make_obstacle_problem(const KernelSpec& kernel, const SpaceFunction& phi,
                                      double growth, double scale,
                                      std::vector<std::size_t> extents, double h,
                                      std::vector<double> origin) {
  ObstacleProblem p;
  p.kernel = kernel;
  p.obstacle = GridFunction::spatial(extents, h, origin, kernel.s());
  p.exterior = ExteriorRule::function(
      [phi](std::span<const double> x, double) { return phi(x); }, growth, scale);
  auto& g = p.obstacle;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto x = g.coordinates(i);
    g[i] = phi(x);
  }
  g.validate();
  std::vector<std::size_t> idx(extents.size());
  double c2 = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.unflatten(i, idx);
    for (std::size_t a = 0; a < idx.size(); ++a) {
      if (idx[a] == 0 || idx[a] + 1 == extents[a]) continue;
      auto j = idx;
      j[a] = idx[a] + 1;
      const double up = g[g.flat(j)];
      j[a] = idx[a] - 1;
      c2 = std::max(c2, std::abs(up - 2 * g[i] + g[g.flat(j)]) / (h * h));
    }
  }
  p.obstacle_c2 = c2;
  return p;
}

std::pair<GridFunction, SolveReport> solve_elliptic_obstacle(const ObstacleProblem& problem,
                                                             const SolveOptions& options) {
  require(options.tol > 0.0, kMod, ErrorCode::InvalidArgument, "tolerance must be positive");
  const auto start = std::chrono::steady_clock::now();
  const GridFunction& phi = problem.obstacle;
  require(!phi.has_time(), kMod, ErrorCode::InvalidArgument,
          "the elliptic problem needs a spatial obstacle grid");
  DiscreteOperator op(problem.kernel, phi.extents(), phi.h(), phi.origin(), problem.exterior,
                      problem.stencil);
  const auto c = op.exterior_term(0.0);
  const double lphi = max_abs(op.apply(phi.values()));
  const double tol = options.tol * (lphi + 1.0);

  std::vector<double> initial;
  std::size_t coarse_sweeps = 0;
  if (options.coarse_start && can_coarsen(phi.extents())) {
    ObstacleProblem coarse = problem;
    coarse.obstacle = restrict_obstacle(phi);
    auto [cu, crep] = solve_elliptic_obstacle(coarse, options);
    coarse_sweeps = crep.iterations;
    initial = prolongate(cu.values(), cu.extents(), phi.extents());
  }

  ShiftedOperator M(op, 0.0);
  LcpOptions lcp = options.lcp;
  lcp.tol = tol;
  auto res = solve_lcp(M, phi.values(), c, lcp, initial);

  GridFunction u = GridFunction::spatial(phi.extents(), phi.h(), phi.origin(), phi.s());
  std::copy(res.u.begin(), res.u.end(), u.values().begin());
  SolveReport report;
  report.iterations = res.sweeps + coarse_sweeps;
  report.residual = res.residual;
  report.tolerance = tol;
  report.active_set.push_back(
      count_contact(u.values(), phi.values(), options.contact_tol * (max_abs(phi.values()) + 1.0)));
  report.monotone_scheme = op.monotone();
  report.drift_scheme = op.drift_scheme();
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {std::move(u), std::move(report)};
}

std::pair<GridFunction, SolveReport> solve_parabolic_obstacle(const ObstacleProblem& problem,
                                                              const SolveOptions& options) {
  require(problem.horizon > 0.0 && problem.time_steps >= 1, kMod, ErrorCode::InvalidArgument,
          "parabolic problems need a horizon T > 0 and at least one step");
  const auto start = std::chrono::steady_clock::now();
  const GridFunction& phi = problem.obstacle;
  DiscreteOperator op(problem.kernel, phi.extents(), phi.h(), phi.origin(), problem.exterior,
                      problem.stencil);
  const double dt = problem.horizon / static_cast<double>(problem.time_steps);
  const double lphi = max_abs(op.apply(phi.values()));
  const double tol = options.tol * (lphi + 1.0);
  const double contact = options.contact_tol * (max_abs(phi.values()) + 1.0);

  GridFunction u = GridFunction::space_time(problem.time_steps + 1, phi.extents(), phi.h(), dt,
                                            phi.origin(), 0.0, phi.s());
  std::copy(phi.values().begin(), phi.values().end(), u.slice(0).begin());
  ShiftedOperator M(op, 1.0 / dt);
  LcpOptions lcp = options.lcp;
  lcp.tol = tol;

  SolveReport report;
  report.tolerance = tol;
  report.monotone_scheme = op.monotone();
  report.drift_scheme = op.drift_scheme();
  report.active_set.push_back(phi.size());
  std::vector<double> f(phi.size());
  for (std::size_t k = 0; k < problem.time_steps; ++k) {
    const double t = u.time_at(k + 1);
    const auto c = op.exterior_term(t);
    auto prev = u.slice(k);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = prev[i] / dt + c[i];
    auto res = solve_lcp(M, phi.values(), f, lcp, prev);
    std::copy(res.u.begin(), res.u.end(), u.slice(k + 1).begin());
    report.iterations += res.sweeps;
    report.residual = std::max(report.residual, res.residual);
    const std::size_t n = count_contact(res.u, phi.values(), contact);
    if (n > report.active_set.back()) report.active_growth_steps.push_back(k + 1);
    report.active_set.push_back(n);
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {std::move(u), std::move(report)};
}

GridFunction solve_linear_parabolic(const KernelSpec& kernel, std::vector<std::size_t> extents,
                                    double h, std::vector<double> origin,
                                    const ExteriorRule& exterior, const ZeroSetMask& mask,
                                    const SpaceTimeFunction& rhs, std::span<const double> initial,
                                    double t0, double dt, std::size_t steps,
                                    const LinearParabolicOptions& options) {
  require(dt > 0.0 && steps >= 1, kMod, ErrorCode::InvalidArgument, "need dt > 0 and steps >= 1");
  DiscreteOperator op(kernel, extents, h, origin, exterior, options.stencil);
  const std::size_t n = op.size();
  require(initial.size() == n, kMod, ErrorCode::InvalidArgument, "initial data has wrong size");
  GridFunction v = GridFunction::space_time(steps + 1, extents, h, dt, origin, t0, kernel.s());
  std::copy(initial.begin(), initial.end(), v.slice(0).begin());
  const bool symmetric = kernel.symmetric() && !kernel.has_drift();

  std::vector<char> free(n);
  std::vector<double> tmp(n);
  auto apply = [&](std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < n; ++i) tmp[i] = free[i] ? x[i] : 0.0;
    op.apply_linear(tmp, y);
    for (std::size_t i = 0; i < n; ++i) y[i] = free[i] ? tmp[i] / dt - y[i] : 0.0;
  };

  std::vector<double> b(n), x(n), r(n), p(n), q(n), s(n), t(n), r0(n);
  for (std::size_t k = 0; k < steps; ++k) {
    const double time = v.time_at(k + 1);
    const auto a = mask(time);
    require(a.size() == n, kMod, ErrorCode::InvalidArgument, "mask has wrong size");
    std::size_t nfree = 0;
    for (std::size_t i = 0; i < n; ++i) {
      free[i] = a[i] ? 0 : 1;
      nfree += free[i];
    }
    require(nfree > 0, kMod, ErrorCode::Geometry, "the complement of the zero set is empty");
    const auto c = op.exterior_term(time);
    auto prev = v.slice(k);
    for (std::size_t i = 0; i < n; ++i) {
      if (!free[i]) {
        b[i] = 0.0;
        x[i] = 0.0;
        continue;
      }
      const auto xi = op.node(i);
      b[i] = prev[i] / dt + c[i] + (rhs ? rhs(xi, time) : 0.0);
      x[i] = prev[i];
    }
    const double bnorm = std::sqrt(dot(b, b));
    const double target = options.tol * std::max(bnorm, 1e-300);
    apply(x, q);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
    double rnorm = std::sqrt(dot(r, r));
    std::size_t it = 0;
    if (symmetric) {
      p = r;
      double rr = dot(r, r);
      while (rnorm > target && it < options.max_iterations) {
        apply(p, q);
        const double alpha = rr / dot(p, q);
        for (std::size_t i = 0; i < n; ++i) {
          x[i] += alpha * p[i];
          r[i] -= alpha * q[i];
        }
        const double rr_new = dot(r, r);
        for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + (rr_new / rr) * p[i];
        rr = rr_new;
        rnorm = std::sqrt(rr);
        ++it;
      }
    } else {
      r0 = r;
      double rho = 1.0, alpha = 1.0, omega = 1.0;
      std::fill(p.begin(), p.end(), 0.0);
      std::fill(q.begin(), q.end(), 0.0);
      while (rnorm > target && it < options.max_iterations) {
        const double rho_new = dot(r0, r);
        require(rho_new != 0.0, kMod, ErrorCode::NotConverged, "BiCGSTAB breakdown");
        const double beta = (rho_new / rho) * (alpha / omega);
        for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * q[i]);
        apply(p, q);
        alpha = rho_new / dot(r0, q);
        for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * q[i];
        apply(s, t);
        const double tt = dot(t, t);
        omega = tt > 0.0 ? dot(t, s) / tt : 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          x[i] += alpha * p[i] + omega * s[i];
          r[i] = s[i] - omega * t[i];
        }
        rho = rho_new;
        rnorm = std::sqrt(dot(r, r));
        ++it;
      }
    }
    if (rnorm > target) {
      std::ostringstream os;
      os << "linear solve at step " << k + 1 << " stopped at residual " << rnorm << " (target "
         << target << ")";
      fail(kMod, ErrorCode::NotConverged, os.str());
    }
    auto next = v.slice(k + 1);
    for (std::size_t i = 0; i < n; ++i) next[i] = free[i] ? x[i] : 0.0;
  }
  return v;
}

}  // namespace fbreg
