// Acceptance suite: one PASS/FAIL line per criterion.
// usage: fbreg_acceptance <fbreg-cli> <golden-config-dir> <work-dir> [criterion...]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fbreg/barriers.hpp"
#include "fbreg/cli/config.hpp"
#include "fbreg/error.hpp"
#include "fbreg/free_boundary.hpp"
#include "fbreg/harnack.hpp"
#include "fbreg/metrics.hpp"
#include "fbreg/profiles.hpp"
#include "fbreg/solver.hpp"
#include "oracles.hpp"

using namespace fbreg;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}
std::string g4(double v) { return fmt("%.4g", v); }

struct Paths {
  fs::path cli, data, work;
};

// Shared solves.

ObstacleProblem bump(double s, std::size_t N) {
  const SpaceFunction phi = [](std::span<const double> x) {
    const double q = 1.0 - x[0] * x[0];
    return q > 0.0 ? q * q : 0.0;
  };
  return make_obstacle_problem(fractional_laplacian(1, s), phi, 0.0, 1.0, {N},
                               4.0 / static_cast<double>(N - 1), {-2.0});
}

const GridFunction& elliptic_bump(std::size_t N) {
  static std::map<std::size_t, GridFunction> cache;
  auto it = cache.find(N);
  if (it == cache.end()) it = cache.emplace(N, solve_elliptic_obstacle(bump(0.75, N)).first).first;
  return it->second;
}

struct MovingSolve {
  ObstacleProblem problem;
  GridFunction u;
  GridFunction w;
};

const MovingSolve& moving_boundary() {
  static std::optional<MovingSolve> cached;
  if (!cached) {
    const SpaceFunction phi = [](std::span<const double> x) {
      const double q = 1.0 - x[0] * x[0];
      return q > 0.0 ? q * q * (1.0 + 0.5 * x[0]) : 0.0;
    };
    MovingSolve m{make_obstacle_problem(fractional_laplacian(1, 0.5), phi, 0.0, 1.0, {513},
                                        4.0 / 512.0, {-2.0}),
                  {},
                  {}};
    m.problem.horizon = 0.5;
    m.problem.time_steps = 256;
    m.u = solve_parabolic_obstacle(m.problem).first;
    m.w = m.u;
    const std::size_t sl = m.u.slice_size();
    for (std::size_t i = 0; i < m.w.size(); ++i) m.w[i] = m.u[i] - m.problem.obstacle[i % sl];
    cached = std::move(m);
  }
  return *cached;
}

struct Probe {
  BoundaryPoint point;
  NormalEstimate normal;
  GrowthFit growth;
  Classification cls;
  bool classified = false;
};

// Evenly spaced boundary points whose r_max cylinder lies in the grid.
std::vector<Probe> probe(const GridFunction& w, const std::vector<char>& mask, double beta_guess,
                         double r_max, double normal_radius, std::size_t count,
                         const KernelSpec& kernel) {
  const auto points = extract_boundary(mask, w, beta_guess);
  std::vector<std::size_t> usable;
  for (std::size_t i = 0; i < points.size(); ++i)
    if (w.contains_cylinder(points[i].position, r_max)) usable.push_back(i);
  const auto radii = radii_ladder(4.0 * w.h(), r_max);
  const std::size_t n = std::min(count, usable.size());
  std::vector<Probe> out;
  for (std::size_t j = 0; j < n; ++j) {
    Probe p;
    p.point = points[usable[(2 * j + 1) * usable.size() / (2 * n)]];
    p.normal = estimate_normal_speed(points, p.point.position, normal_radius);
    try {
      p.growth = fit_growth_exponent(w, p.point.position, radii);
      if (p.normal.resolved) {
        p.cls = classify_point(p.growth.beta, p.normal.speed, kernel, p.normal.nu_x, {},
                               p.growth.r2);
        p.classified = true;
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Geometry && e.code() != ErrorCode::FitFailed) throw;
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<Probe> moving_probes() {
  static std::optional<std::vector<Probe>> cached;
  if (!cached) {
    const auto& m = moving_boundary();
    const auto mask = contact_set(m.u, m.problem.obstacle, 1e-9);
    cached = probe(m.w, mask, 1.6, 0.2, 0.15, 10, m.problem.kernel);
  }
  return *cached;
}

// 1. Exponent formulas.
Outcome exponent_formulas(const Paths&) {
  const KernelSpec k = fractional_laplacian(1, 0.5);
  const double e[1] = {1.0};
  const std::pair<double, double> cases[] = {
      {0.0, 0.5}, {1.0 / std::sqrt(3.0), 2.0 / 3.0}, {1.0, 0.75}, {std::sqrt(3.0), 5.0 / 6.0}};
  double worst = 0.0;
  for (auto [v, g] : cases) worst = std::max(worst, std::abs(gamma_critical(k, e, v) - g));
  const bool drift = gamma_drift(0.0) == 0.5 && gamma_drift(1.0) == 0.25;
  return {worst <= 1e-12 && drift, "max |gamma - closed form| = " + g4(worst) +
                                       ", gamma_drift(0) = " + g4(gamma_drift(0.0)) +
                                       ", gamma_drift(1) = " + g4(gamma_drift(1.0))};
}

// 2. Profile residual.
Outcome profile_residuals(const Paths&) {
  const double e[1] = {1.0};
  const double xi[] = {0.5, 1.0, 1.5};
  // Samples stay on lattice nodes at every level; the kink at xi = 0 does too.
  const double spacings[] = {0.05, 0.025, 0.0125, 0.00625};
  bool ok = true;
  std::string detail;
  auto check = [&](const KernelSpec& k, const Profile1D& p, const std::string& label) {
    const auto rep = profile_residual(k, p, xi, spacings);
    bool dec = true;
    for (std::size_t i = 1; i < rep.levels.size(); ++i)
      dec = dec && rep.levels[i].residual < rep.levels[i - 1].residual;
    double bad = std::numeric_limits<double>::infinity();
    for (double d : {-0.05, 0.05}) {
      Profile1D off = p;
      off.gamma += d;
      bad = std::min(bad, profile_residual(k, off, xi, spacings).final_residual());
    }
    const double ratio = rep.final_residual() / bad;
    const bool pass = dec && rep.order >= 0.5 && ratio <= 0.2;
    ok = ok && pass;
    detail += label + " order " + fmt("%.2f", rep.order) + " ratio " + fmt("%.3f", ratio) +
              (pass ? "" : " (fail)") + "; ";
  };
  const KernelSpec half = fractional_laplacian(1, 0.5);
  for (double v : {0.0, 1.0, 2.0}) check(half, make_profile(half, e, v), "v=" + g4(v));
  for (double s : {0.6, 0.75}) {
    const KernelSpec k = fractional_laplacian(1, s);
    check(k, make_profile(k, e, 0.0), "s=" + g4(s));
  }
  return {ok, detail};
}

// 3. L (x_1)_+^s = 0 on {x_1 > 0} for symmetric homogeneous kernels.
Outcome homogeneous_identity(const Paths&) {
  const double s = 0.6;
  const std::pair<std::string, KernelSpec> kernels[] = {
      {"isotropic", fractional_laplacian(2, s)},
      {"axial", make_kernel(s, 0.5, 2.0, DensitySpec::axial(0.5, 2.0, 1), {}, 2)},
      {"fourier", make_kernel(s, 0.3, 2.0, DensitySpec::fourier({1.0, 0.0, 0.3}, {0.0, 0.0, 0.2}),
                              {}, 2)},
  };
  const SpaceFunction u = [s](std::span<const double> x) {
    return x[0] > 0.0 ? std::pow(x[0], s) : 0.0;
  };
  const std::vector<std::vector<double>> xs{{0.5, 0.1}, {1.0, 0.0}, {1.5, -0.2}};
  bool ok = true;
  std::string detail;
  for (const auto& [name, k] : kernels) {
    std::vector<double> res;
    for (double h : {0.1, 0.05, 0.025}) {
      const Stencil st(k, h, static_cast<int>(std::lround(1.0 / h - 0.5)));
      double worst = 0.0;
      for (const auto& x : xs) worst = std::max(worst, std::abs(apply_at(st, u, x, s)));
      res.push_back(worst);
    }
    const bool pass = res[1] < res[0] && res[2] < res[1] && res[2] < 1e-2;
    ok = ok && pass;
    detail += name + " " + g4(res[0]) + " -> " + g4(res[1]) + " -> " + g4(res[2]) + "; ";
  }
  return {ok, detail};
}

// 4. Elliptic regular-point exponent.
Outcome elliptic_exponent(const Paths&) {
  const ObstacleProblem p = bump(0.75, 513);
  const GridFunction& u = elliptic_bump(513);
  GridFunction w = u;
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = u[i] - p.obstacle[i];
  const auto mask = contact_set(u, p.obstacle, 1e-9);
  const auto points = extract_boundary(mask, w, 1.75);
  if (points.size() != 2) return {false, std::to_string(points.size()) + " boundary points"};
  const auto radii = radii_ladder(4.0 * w.h(), 0.25);
  bool ok = true;
  std::string detail;
  for (const auto& pt : points) {
    const auto fit = fit_growth_exponent(w, pt.position, radii);
    ok = ok && fit.beta >= 1.65 && fit.beta <= 1.85 && fit.r2 >= 0.98;
    detail += "x=" + fmt("%.4f", pt.position[0]) + " beta " + fmt("%.3f", fit.beta) + " R2 " +
              fmt("%.4f", fit.r2) + "; ";
  }
  return {ok, detail};
}

// 5. Parabolic exponent-speed law.
Outcome exponent_speed(const Paths&) {
  const auto probes = moving_probes();
  std::size_t regular = 0;
  std::string detail;
  for (const auto& p : probes) {
    if (!p.classified) continue;
    const double gap = std::abs(p.growth.beta - (1.0 + p.cls.gamma_pred));
    if (gap <= 0.12 && p.growth.r2 >= 0.98) ++regular;
    detail += "(v0 " + fmt("%.2f", p.normal.speed) + " beta " + fmt("%.3f", p.growth.beta) +
              " 1+gamma " + fmt("%.3f", 1.0 + p.cls.gamma_pred) + ") ";
  }
  return {regular >= 5, std::to_string(regular) + "/" + std::to_string(probes.size()) +
                            " points within 0.12: " + detail};
}

// 6. Quadratic vanishing classifies as degenerate.
Outcome degenerate_control(const Paths&) {
  // w = d^2 (1 + 0.3 cos 3x), d = x + 0.5 t - 0.1, on [-1, 1] x [0, 1].
  GridFunction w = GridFunction::space_time(129, {257}, 2.0 / 256, 1.0 / 128, {-1.0}, 0.0, 0.5);
  std::vector<char> mask(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const auto p = w.coordinates(i);
    const double d = p[1] + 0.5 * p[0] - 0.1;
    w[i] = d > 0.0 ? d * d * (1.0 + 0.3 * std::cos(3.0 * p[1])) : 0.0;
    mask[i] = w[i] <= 0.0 ? 1 : 0;
  }
  const KernelSpec k = fractional_laplacian(1, 0.5);
  const auto probes = probe(w, mask, 2.0, 0.25, 0.15, 6, k);
  bool ok = !probes.empty();
  std::string detail;
  for (const auto& p : probes) {
    ok = ok && p.classified && p.cls.kind == Classification::Kind::Degenerate &&
         p.growth.beta >= 1.8;
    detail += fmt("%.3f", p.growth.beta) + "/" + to_string(p.cls.kind) + " ";
  }
  return {ok, std::to_string(probes.size()) + " points, beta/class: " + detail};
}

// 7. Blow-up fits over a radius ladder.
Outcome blowup_trend(const Paths&) {
  const auto& m = moving_boundary();
  const auto probes = moving_probes();
  std::size_t regular = 0, decreasing = 0;
  std::string detail;
  for (const auto& p : probes) {
    if (!p.classified || p.cls.kind != Classification::Kind::Regular) continue;
    ++regular;
    ProfileGuess guess;
    guess.e = p.normal.nu_x;
    guess.v = std::max(p.normal.speed, 0.0);
    double prev = std::numeric_limits<double>::infinity();
    bool mono = true;
    std::string row;
    for (double r : {0.2, 0.1, 0.05}) {
      const auto g = blow_up_rescale(m.w, p.point.position, r, NormMode::Gradient);
      const auto fit = fit_1d_profile(g, m.problem.kernel, guess);
      mono = mono && fit.lip_distance < prev;
      prev = fit.lip_distance;
      row += fmt("%.3f", fit.lip_distance) + (r > 0.05 ? ">" : "");
      if (r == 0.05)
        row += " (kappa " + fmt("%.3f", fit.profile.kappa) + " v " + fmt("%.2f", fit.profile.v) +
               " vs v0 " + fmt("%.2f", p.normal.speed) + ")";
    }
    if (mono) ++decreasing;
    detail += row + "; ";
  }
  return {regular > 0 && decreasing == regular,
          std::to_string(decreasing) + "/" + std::to_string(regular) +
              " regular points with decreasing lip_distance: " + detail};
}

// 8. Barrier certification with negative controls.
Outcome barriers(const Paths&) {
  bool ok = true;
  std::string detail;
  const double e2[2] = {0.0, 1.0};
  const KernelSpec k2 = fractional_laplacian(2, 0.5);
  const double coarse[] = {1.0 / 16, 1.0 / 32};

  {
    const auto samples = cone_samples(e2, 1.0, 0.1, 2.0 / 16, 6, 7);
    const auto res = search_cone_theta(k2, e2, 1.0, samples, coarse);
    const Barrier bad = cone_supersolution(e2, 1.0, 0.9);
    const bool control = !verify_inequality(k2, bad, samples, bad.claimed, coarse).pass;
    const bool pass = res.found && res.report.stable && res.report.constant > 0.0 && control;
    ok = ok && pass;
    detail += "(a) theta " + g4(res.value) + " margin " + g4(-res.report.constant) +
              (res.report.stable ? " stable" : " unstable") +
              (control ? ", theta 0.9 fails" : ", theta 0.9 passes") + "; ";
  }
  {
    const auto res = search_traveling_gamma(k2, e2, 1.0, kPi / 3, 0.5, 2.0 / 16, 9, 3, coarse);
    const Barrier bad = traveling_cone_subsolution(e2, 1.0, kPi / 3, 0.5, 0.5);
    const auto samples = cylinder_samples(bad, 2.0 / 16, 9, 3);
    const bool control = !verify_inequality(k2, bad, samples, bad.claimed, coarse).pass;
    const bool pass = res.found && res.report.stable && res.report.constant > 0.0 && control;
    ok = ok && pass;
    detail += "(b) gamma " + g4(res.value) + " margin " + g4(-res.report.constant) +
              (res.report.stable ? " stable" : " unstable") +
              (control ? ", gamma 0.5 fails" : ", gamma 0.5 passes") + "; ";
  }
  {
    const KernelSpec k1 = fractional_laplacian(1, 0.5);
    const double fine[] = {1.0 / 64, 1.0 / 128};
    VerifyOptions opt;
    opt.tail_tol = 1e-5;
    const GraphDomain dom{[](double t) { return -t; }, [](double) { return -1.0; }};
    const auto res = search_power_barriers(k1, dom, 0.0, 0.2, fine, opt);
    bool control = false;
    if (res.found) {
      const auto pb = power_regularized_barriers(k1, dom, 0.0, 0.2, res.M);
      std::vector<SpaceTimeSample> samples;
      const double d = res.delta0;
      for (int j = 0; j < 5; ++j) {
        const double t = -d + 0.5 * d * j * 0.999;
        for (int i = 0; i < 12; ++i) {
          const double x = -d + 2.0 * d * (i + 0.5) / 12.0;
          if (x - dom.b(t) >= 2.0 / 64) samples.push_back({{x}, t});
        }
      }
      // Signs swapped, and an exponent below gamma0 in place of Gamma-bar.
      const bool swapped =
          !verify_inequality(k1, pb.phi2, samples, Sense::at_most(-1.0), fine, opt).pass &&
          !verify_inequality(k1, pb.phi1, samples, Sense::at_least(1.0), fine, opt).pass;
      Barrier low = pb.phi1;
      const double M = res.M, beta = pb.gamma0 + pb.eps, g = pb.gamma0 - 0.2;
      low.value = [M, beta, g](std::span<const double> x, double t) {
        const double r = (x[0] + t) / std::sqrt(2.0);
        return r > 0.0 ? M * std::pow(r, g) + std::pow(r, beta) : 0.0;
      };
      const bool exponent = !verify_inequality(k1, low, samples, low.claimed, fine, opt).pass;
      control = swapped && exponent;
    }
    const bool pass =
        res.found && res.phi1.stable && res.phi2.stable && control;
    ok = ok && pass;
    detail += "(c) M " + g4(res.M) + " delta0 " + g4(res.delta0) + " Phi1 worst " +
              g4(res.phi1.levels.empty() ? NAN : res.phi1.levels.back().worst) + " Phi2 worst " +
              g4(res.phi2.levels.empty() ? NAN : res.phi2.levels.back().worst) +
              (res.phi1.stable && res.phi2.stable ? " stable" : " unstable") +
              (control ? ", controls fail" : ", a control passes");
  }
  return {ok, detail};
}

// 9. Boundary Harnack.
Outcome boundary_harnack(const Paths&) {
  bool ok = true;
  std::string detail;
  for (double omega : {0.0, 0.5}) {
    HarnackScenario sc;
    sc.kernel = fractional_laplacian(2, 0.5);
    sc.omega = omega;
    sc.nodes = 129;
    sc.steps = 64;
    const auto rep = run_harnack(sc);
    const bool pass = rep.radii.size() >= 4 && rep.monotone && rep.alpha > 0.0 &&
                      rep.min_ratio12 > 0.0 && rep.min_ratio21 > 0.0 && rep.positive;
    ok = ok && pass;
    detail += "omega " + g4(omega) + ": alpha " + fmt("%.3f", rep.alpha) + " osc " +
              g4(rep.osc.front()) + " -> " + g4(rep.osc.back()) + " min ratios " +
              fmt("%.3f", rep.min_ratio12) + "/" + fmt("%.3f", rep.min_ratio21) +
              (rep.monotone ? "" : " non-monotone") + "; ";
  }
  return {ok, detail};
}

// 10. Seminorm against all pairs.
Outcome seminorm_oracle(const Paths&) {
  std::mt19937_64 rng(20251019);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  double worst = 0.0;
  bool exact = true;
  std::size_t cases = 0;
  for (int f = 0; f < 10; ++f) {
    GridFunction w;
    switch (f % 3) {
      case 0:
        w = GridFunction::spatial({20, 20}, 0.05, {0.0, 0.0}, 0.5);
        break;
      case 1:
        w = GridFunction::space_time(20, {20, 20}, 0.05, 0.0025, {0.0, 0.0}, 0.0, 0.7);
        break;
      default:
        w = GridFunction::space_time(20, {20}, 0.05, 0.01, {0.0}, 0.0, 0.5);
    }
    const double a = U(rng), b = 4.0 * U(rng), c = U(rng);
    for (std::size_t i = 0; i < w.size(); ++i) {
      const auto p = w.coordinates(i);
      double lin = 0.0;
      for (std::size_t d = 0; d < p.size(); ++d) lin += (d % 2 ? c : 1.0) * p[d];
      w[i] = a * std::sin(b * lin) + std::sqrt(std::abs(lin - 0.3)) * c + 0.05 * U(rng);
    }
    for (double beta : {0.3, 0.5, 0.9}) {
      const double ref = oracle::brute_seminorm(w, beta, w.s());
      const auto rep = parabolic_holder_seminorm(w, beta, w.s());
      exact = exact && rep.exact;
      worst = std::max(worst, std::abs(rep.value - ref) / ref);
      ++cases;
    }
  }
  return {exact && worst <= 1e-12,
          std::to_string(cases) + " cases, max relative difference " + g4(worst)};
}

// 11. LCP enumeration and the fine-grid self-oracle.
Outcome solver_oracles(const Paths&) {
  std::mt19937_64 rng(7321);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  double lcp_err = 0.0;
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t n = 4 + static_cast<std::size_t>(trial % 9);
    const auto a = oracle::random_m_matrix(n, rng);
    std::vector<double> phi(n), f(n);
    for (std::size_t i = 0; i < n; ++i) {
      phi[i] = U(rng);
      f[i] = U(rng);
    }
    const auto ref = oracle::enumerate_lcp(n, a, phi, f);
    if (ref.size() != n) return {false, "enumeration found no solution"};
    LcpOptions opt;
    opt.tol = 1e-13;
    const auto res = solve_lcp(DenseOperator(n, a), phi, f, opt);
    for (std::size_t i = 0; i < n; ++i) lcp_err = std::max(lcp_err, std::abs(res.u[i] - ref[i]));
  }

  // u_h against u_{h/8} at the coarse nodes; truncation error estimated
  // from h, h/2, h/4 by Richardson.
  const std::size_t sizes[] = {65, 129, 257, 513};
  auto diff = [&](std::size_t a, std::size_t b) {
    const GridFunction& ua = elliptic_bump(sizes[a]);
    const GridFunction& ub = elliptic_bump(sizes[b]);
    const std::size_t stride = (sizes[b] - 1) / (sizes[a] - 1);
    double m = 0.0;
    for (std::size_t i = 0; i < sizes[0]; ++i) {
      const std::size_t ia = i * ((sizes[a] - 1) / (sizes[0] - 1));
      m = std::max(m, std::abs(ua[ia] - ub[ia * stride]));
    }
    return m;
  };
  const double d01 = diff(0, 1), d12 = diff(1, 2), actual = diff(0, 3);
  const double p = std::log2(d01 / d12);
  const double estimate = d01 / (1.0 - std::pow(2.0, -p));
  const double ratio = actual / estimate;
  const bool pass = lcp_err <= 1e-10 && ratio >= 0.5 && ratio <= 2.0;
  return {pass, "LCP max error " + g4(lcp_err) + "; coarse error " + g4(actual) +
                    " vs estimate " + g4(estimate) + " (order " + fmt("%.2f", p) + ", ratio " +
                    fmt("%.2f", ratio) + ")"};
}

// 12. Determinism through the CLI.
std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string subcommand(cli::Scenario sc) {
  switch (sc) {
    case cli::Scenario::SolveElliptic:
    case cli::Scenario::SolveParabolic:
      return "solve";
    default:
      return std::string(cli::to_string(sc));
  }
}

Outcome determinism(const Paths& paths) {
  std::vector<fs::path> configs;
  for (const auto& entry : fs::directory_iterator(paths.data))
    if (entry.path().extension() == ".ini") configs.push_back(entry.path());
  std::sort(configs.begin(), configs.end());
  std::set<std::string> scenarios;
  std::size_t files = 0;
  std::string mismatch;
  for (const auto& cfg : configs) {
    const auto parsed = cli::load_config(cfg.string());
    scenarios.insert(std::string(cli::to_string(parsed.scenario)));
    fs::path dirs[2];
    for (int r = 0; r < 2; ++r) {
      dirs[r] = paths.work / "determinism" / (cfg.stem().string() + "_" + std::to_string(r));
      fs::remove_all(dirs[r]);
      fs::create_directories(dirs[r]);
      const std::string cmd = "\"" + paths.cli.string() + "\" " + subcommand(parsed.scenario) +
                              " --config \"" + cfg.string() + "\" --out \"" + dirs[r].string() +
                              "\" > \"" + (dirs[r] / "stdout.txt").string() + "\" 2>&1";
      if (std::system(cmd.c_str()) != 0) return {false, "CLI failed on " + cfg.filename().string()};
    }
    std::vector<fs::path> a;
    for (const auto& entry : fs::directory_iterator(dirs[0]))
      if (entry.path().filename() != "stdout.txt") a.push_back(entry.path().filename());
    std::size_t b = 0;
    for (const auto& entry : fs::directory_iterator(dirs[1]))
      if (entry.path().filename() != "stdout.txt") ++b;
    if (a.size() != b) mismatch += cfg.filename().string() + " file count; ";
    for (const auto& name : a) {
      ++files;
      if (!fs::exists(dirs[1] / name) || slurp(dirs[0] / name) != slurp(dirs[1] / name))
        mismatch += (cfg.stem() / name).string() + "; ";
    }
  }
  const bool all = scenarios.size() == 8;
  return {mismatch.empty() && all,
          std::to_string(configs.size()) + " configs, " + std::to_string(scenarios.size()) +
              " scenarios, " + std::to_string(files) + " files compared" +
              (mismatch.empty() ? "" : "; differing: " + mismatch)};
}

struct Criterion {
  int id;
  const char* name;
  Outcome (*run)(const Paths&);
};

}  // namespace

int main(int argc, char** argv) {
  if (argc < 4) {
    std::fprintf(stderr, "usage: %s <fbreg-cli> <config-dir> <work-dir> [criterion...]\n",
                 argv[0]);
    return 2;
  }
  const Paths paths{argv[1], argv[2], argv[3]};
  fs::create_directories(paths.work);
  std::set<int> only;
  for (int i = 4; i < argc; ++i) only.insert(std::atoi(argv[i]));

  const Criterion criteria[] = {
      {1, "exponent formulas", exponent_formulas},
      {2, "profile residual", profile_residuals},
      {3, "homogeneous kernel identity", homogeneous_identity},
      {4, "elliptic regular-point exponent", elliptic_exponent},
      {5, "exponent-speed law", exponent_speed},
      {6, "degenerate negative control", degenerate_control},
      {7, "blow-up fit", blowup_trend},
      {8, "barriers", barriers},
      {9, "boundary Harnack", boundary_harnack},
      {10, "seminorm oracle", seminorm_oracle},
      {11, "solver oracle", solver_oracles},
      {12, "determinism", determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run(paths);
    } catch (const std::exception& e) {
      out = {false, std::string("error: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!out.pass) ++failed;
    std::printf("%s %2d %s [%.1fs]: %s\n", out.pass ? "PASS" : "FAIL", c.id, c.name, secs,
                out.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
