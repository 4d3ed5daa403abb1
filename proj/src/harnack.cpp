#include "fbreg/harnack.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fbreg/barriers.hpp"
#include "fbreg/error.hpp"
#include "fbreg/metrics.hpp"
#include "fbreg/solver.hpp"

namespace fbreg {

namespace {

constexpr auto kMod = Module::Harnack;

double dist2(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

}  // namespace

void validate_scenario(const HarnackScenario& sc) {
  const int n = sc.kernel.dim();
  require(sc.kernel.s() >= 0.5, kMod, ErrorCode::InvalidArgument,
          "boundary Harnack needs s in [1/2, 1)");
  require(n == 1 || n == 2, kMod, ErrorCode::InvalidArgument, "scenarios live in 1D or 2D");
  require(sc.e.size() == static_cast<std::size_t>(n), kMod, ErrorCode::InvalidArgument,
          "cone axis has wrong dimension");
  require(sc.theta0 > 0.0 && sc.theta0 < std::numbers::pi, kMod, ErrorCode::InvalidArgument,
          "theta0 must lie in (0, pi)");
  require(sc.omega >= 0.0 && sc.t_start < 0.0 && sc.steps >= 1 && sc.nodes >= 9, kMod,
          ErrorCode::InvalidArgument, "need omega >= 0, t_start < 0, steps >= 1, nodes >= 9");
  require(sc.radii >= 2 && sc.r_max > 0.0 && sc.floor > 0.0, kMod, ErrorCode::InvalidArgument,
          "need at least two radii, r_max > 0 and a positive floor");
}

HarnackReport run_harnack(const HarnackScenario& sc) {
  validate_scenario(sc);
  const KernelSpec& kernel = sc.kernel;
  const std::size_t n = static_cast<std::size_t>(kernel.dim());
  const double s = kernel.s();
  std::vector<double> e = sc.e;
  {
    double nn = 0.0;
    for (double c : e) nn += c * c;
    for (double& c : e) c /= std::sqrt(nn);
  }
  const std::vector<std::size_t> ext(n, sc.nodes);
  const double h = 2.0 * sc.half_width / static_cast<double>(sc.nodes - 1);
  const std::vector<double> origin(n, -sc.half_width);
  GridFunction shape = GridFunction::spatial(ext, h, origin, s);
  const std::size_t size = shape.size();
  std::vector<std::vector<double>> nodes(size);
  for (std::size_t i = 0; i < size; ++i) nodes[i] = shape.coordinates(i);

  auto profile_at = [&](std::span<const double> x, double t) {
    std::array<double, 2> y{};
    for (std::size_t a = 0; a < n; ++a) y[a] = x[a] + sc.omega * t * e[a];
    return cone_profile(e, sc.theta0, std::span<const double>(y.data(), n));
  };
  const ZeroSetMask mask = [&](double t) {
    std::vector<char> m(size);
    for (std::size_t i = 0; i < size; ++i) m[i] = profile_at(nodes[i], t) > 0.0 ? 0 : 1;
    return m;
  };

  std::vector<double> eperp(n, 0.0);
  if (n == 2) eperp = {-e[1], e[0]};
  SpaceFunction init1 = sc.initial1, init2 = sc.initial2;
  // Default data sit relative to the apex -omega t_start e at the start.
  const double lift = -sc.omega * sc.t_start;
  if (!init1)
    init1 = [e, lift](std::span<const double> x) {
      double r2 = 0.0;
      for (std::size_t a = 0; a < x.size(); ++a) {
        const double c = (lift + 0.4) * e[a];
        r2 += (x[a] - c) * (x[a] - c);
      }
      return std::exp(-r2 / 0.08);
    };
  if (!init2)
    init2 = [e, eperp, lift](std::span<const double> x) {
      double r2 = 0.0;
      for (std::size_t a = 0; a < x.size(); ++a) {
        const double c = (lift + 0.3) * e[a] + 0.2 * eperp[a];
        r2 += (x[a] - c) * (x[a] - c);
      }
      return std::exp(-r2 / 0.3);
    };
  std::vector<double> u1(size), u2(size);
  for (std::size_t i = 0; i < size; ++i) {
    const double p = profile_at(nodes[i], sc.t_start);
    u1[i] = p > 0.0 ? p * init1(nodes[i]) : 0.0;
    u2[i] = p > 0.0 ? p * init2(nodes[i]) : 0.0;
  }

  const double dt = -sc.t_start / static_cast<double>(sc.steps);
  const ExteriorRule zero = ExteriorRule::constant(0.0);
  SpaceTimeFunction rhs;
  if (sc.forcing != 0.0) rhs = [f = sc.forcing](std::span<const double>, double) { return f; };
  HarnackReport rep;
  rep.v1 = solve_linear_parabolic(kernel, ext, h, origin, zero, mask, rhs, u1, sc.t_start, dt,
                                  sc.steps);
  rep.v2 = solve_linear_parabolic(kernel, ext, h, origin, zero, mask, rhs, u2, sc.t_start, dt,
                                  sc.steps);

  // Probe on the lateral boundary at t = 0, anchor on the axis.
  std::vector<double> probe(n), anchor(n);
  const double c0 = std::cos(sc.theta0), s0 = std::sin(sc.theta0);
  for (std::size_t a = 0; a < n; ++a) {
    probe[a] = n == 2 ? sc.probe_distance * (c0 * e[a] + s0 * eperp[a]) : 0.0;
    anchor[a] = sc.anchor_distance * e[a];
  }
  rep.probe = probe;
  const std::size_t last = sc.steps;
  rep.anchor1 = rep.v1.time_slice(last).interpolate(anchor);
  rep.anchor2 = rep.v2.time_slice(last).interpolate(anchor);
  require(rep.anchor1 > 0.0 && rep.anchor2 > 0.0, kMod, ErrorCode::Geometry,
          "a solution vanishes at the anchor");

  std::vector<std::vector<char>> masks(last + 1);
  for (std::size_t k = 0; k <= last; ++k) masks[k] = mask(rep.v1.time_at(k));

  auto quotient_stats = [&](double r, double& lo, double& hi, std::size_t& excluded) {
    lo = std::numeric_limits<double>::infinity();
    hi = -lo;
    excluded = 0;
    const double window = std::pow(r, 2.0 * s);
    for (std::size_t k = 1; k <= last; ++k) {
      const double t = rep.v1.time_at(k);
      if (t <= -window) continue;
      auto a = rep.v1.slice(k), b = rep.v2.slice(k);
      for (std::size_t i = 0; i < size; ++i) {
        if (masks[k][i] || dist2(nodes[i], probe) >= r * r) continue;
        const double w1 = a[i] / rep.anchor1, w2 = b[i] / rep.anchor2;
        if (w2 < sc.floor || w1 < sc.floor) {
          ++excluded;
          continue;
        }
        const double q = w1 / w2;
        lo = std::min(lo, q);
        hi = std::max(hi, q);
      }
    }
  };

  for (std::size_t j = 0; j < sc.radii; ++j) {
    const double r = sc.r_max / std::pow(2.0, static_cast<double>(j));
    double lo, hi;
    std::size_t excl;
    quotient_stats(r, lo, hi, excl);
    require(hi >= lo, kMod, ErrorCode::Geometry, "no usable quotient nodes in a cylinder");
    rep.radii.push_back(r);
    rep.osc.push_back(hi - lo);
    rep.excluded.push_back(excl);
  }
  for (std::size_t j = 1; j < rep.osc.size(); ++j)
    if (rep.osc[j] > rep.osc[j - 1] + 1e-9) rep.monotone = false;
  const double top = *std::max_element(rep.osc.begin(), rep.osc.end());
  if (top <= 1e-9) {
    rep.exact = true;
    rep.alpha = std::numeric_limits<double>::infinity();
    rep.r2 = 1.0;
  } else if (std::all_of(rep.osc.begin(), rep.osc.end(), [](double o) { return o > 0.0; })) {
    const auto fit = fit_power_law(rep.radii, rep.osc);
    rep.alpha = fit.slope;
    rep.r2 = fit.r2;
  }

  // Comparability over Q_1 cap A^c.
  rep.min_ratio12 = rep.min_ratio21 = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k <= last; ++k) {
    const double t = rep.v1.time_at(k);
    if (t <= -1.0) continue;
    auto a = rep.v1.slice(k), b = rep.v2.slice(k);
    for (std::size_t i = 0; i < size; ++i) {
      if (masks[k][i] || dist2(nodes[i], probe) >= 1.0) continue;
      const double w1 = a[i] / rep.anchor1, w2 = b[i] / rep.anchor2;
      if (k == last && (w1 <= 0.0 || w2 <= 0.0)) rep.positive = false;
      if (w1 < sc.floor || w2 < sc.floor) continue;
      rep.min_ratio12 = std::min(rep.min_ratio12, w1 / w2);
      rep.min_ratio21 = std::min(rep.min_ratio21, w2 / w1);
    }
  }
  return rep;
}

}  // namespace fbreg
