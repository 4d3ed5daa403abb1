#include "fbreg/barriers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fbreg/error.hpp"
#include "fbreg/metrics.hpp"
#include "fbreg/profiles.hpp"
#include "fbreg/solver.hpp"

namespace fbreg {

namespace {

constexpr auto kMod = Module::Barriers;
constexpr double kPi = std::numbers::pi;

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

std::vector<double> unit(std::span<const double> e) {
  const double n = norm(e);
  require(n > 0.0 && (e.size() == 1 || e.size() == 2), kMod, ErrorCode::InvalidArgument,
          "direction must be a nonzero vector in dimension 1 or 2");
  std::vector<double> u(e.begin(), e.end());
  for (double& c : u) c /= n;
  return u;
}

// Signed angle of y measured from e (2D), in [0, pi] for |alpha|.
double angle_from(std::span<const double> e, std::span<const double> y) {
  const double c = e[0] * y[0] + e[1] * y[1];
  const double s = e[0] * y[1] - e[1] * y[0];
  return std::abs(std::atan2(s, c));
}

// Distance from y to the boundary of the cone {angle(e, y) <= a} (2D).
double distance_to_cone_boundary(std::span<const double> e, double a, std::span<const double> y) {
  const double r = norm(y);
  if (r == 0.0) return 0.0;
  const double gap = std::abs(angle_from(e, y) - a);
  return gap >= kPi / 2 ? r : r * std::sin(gap);
}

// Half-opening of C_eta: cos a = -eta sin^2 a.
double cone_eta_opening(double eta) {
  if (eta == 0.0) return kPi / 2;
  return std::acos((1.0 - std::sqrt(1.0 + 4.0 * eta * eta)) / (2.0 * eta));
}

Sense make_sense(Sense::Relation r, double bound, bool strict) {
  Sense s;
  s.relation = r;
  s.bound = bound;
  s.strict = strict;
  return s;
}

bool upper(const Sense& s) {
  return s.relation == Sense::Relation::LessEqual || s.relation == Sense::Relation::BoundedAbove;
}

}  // namespace

Sense Sense::at_most(double bound, bool strict) {
  return make_sense(Relation::LessEqual, bound, strict);
}
Sense Sense::at_least(double bound, bool strict) {
  return make_sense(Relation::GreaterEqual, bound, strict);
}
Sense Sense::bounded_above() { return make_sense(Relation::BoundedAbove, 0.0, false); }
Sense Sense::bounded_below() { return make_sense(Relation::BoundedBelow, 0.0, false); }

std::string to_string(Barrier::Kind kind) {
  switch (kind) {
    case Barrier::Kind::ExpCusp:
      return "exp-cusp";
    case Barrier::Kind::ConeSuper:
      return "cone-super";
    case Barrier::Kind::TravelingConeSub:
      return "traveling-cone-sub";
    case Barrier::Kind::PowerRegularized:
      return "power-regularized";
    case Barrier::Kind::HeatTailSuper:
      break;
  }
  return "heat-tail-super";
}

Barrier exp_cusp_barrier(std::span<const double> e_in, double theta, double v, bool parabolic) {
  require(theta > 0.0 && theta <= 0.25, kMod, ErrorCode::InvalidArgument,
          "theta must lie in (0, 1/4]");
  require(v >= 0.0, kMod, ErrorCode::InvalidArgument, "speed must be >= 0");
  require(parabolic || v == 0.0, kMod, ErrorCode::InvalidArgument,
          "a speed needs the parabolic variant");
  const auto e = unit(e_in);
  Barrier b;
  b.kind = Barrier::Kind::ExpCusp;
  b.name = parabolic ? "exp-cusp-parabolic" : "exp-cusp";
  b.params = {{"theta", theta}, {"v", v}};
  b.dim = static_cast<int>(e.size());
  b.parabolic = parabolic;
  b.value = [e, theta, v](std::span<const double> x, double t) {
    return std::exp(-std::pow(std::abs(dot(e, x) + v * t), 1.0 - theta));
  };
  b.valid = [](std::span<const double>, double) { return true; };
  b.singular_distance = [e, v](std::span<const double> x, double t) {
    return std::abs(dot(e, x) + v * t);
  };
  b.claimed = parabolic ? Sense::bounded_below() : Sense::bounded_above();
  return b;
}

bool in_cone(std::span<const double> e_in, double eta, std::span<const double> x) {
  const auto e = unit(e_in);
  const double r = norm(x);
  if (r == 0.0) return true;
  const double c = dot(e, x) / r;
  return c >= -eta * (1.0 - c * c);
}

Barrier cone_supersolution(std::span<const double> e_in, double eta, double theta) {
  require(eta > 0.0, kMod, ErrorCode::InvalidArgument, "eta must be positive");
  require(theta > 0.0 && theta < 1.0, kMod, ErrorCode::InvalidArgument,
          "theta must lie in (0, 1)");
  const auto e = unit(e_in);
  const double opening = cone_eta_opening(eta);
  Barrier b;
  b.kind = Barrier::Kind::ConeSuper;
  b.name = "cone-super";
  b.params = {{"eta", eta}, {"theta", theta}};
  b.dim = static_cast<int>(e.size());
  b.value = [e, eta, theta](std::span<const double> x, double) {
    const double r = norm(x);
    if (r == 0.0) return 0.0;
    const double c = dot(e, x);
    const double arg = c + eta * r * (1.0 - (c / r) * (c / r));
    return arg > 0.0 ? std::pow(arg, theta) : 0.0;
  };
  b.growth = theta;
  b.scale = std::pow(1.0 + eta, theta);
  b.valid = [e, eta](std::span<const double> x, double) {
    return norm(x) < 2.0 && in_cone(e, eta, x);
  };
  b.singular_distance = [e, opening](std::span<const double> x, double) {
    if (e.size() == 1) return std::abs(x[0]);
    return std::min(norm(x), distance_to_cone_boundary(e, opening, x));
  };
  b.claimed = Sense::at_most(0.0, true);
  return b;
}

double cone_profile(std::span<const double> e_in, double theta0, std::span<const double> y) {
  if (e_in.size() == 1) return std::max(e_in[0] >= 0 ? y[0] : -y[0], 0.0);
  const double e0 = e_in[0], e1 = e_in[1];
  const double r = std::hypot(y[0], y[1]);
  if (r == 0.0) return 0.0;
  const double alpha = std::abs(std::atan2(e0 * y[1] - e1 * y[0], e0 * y[0] + e1 * y[1]));
  if (alpha >= theta0) return 0.0;
  const double collar = 0.9 * theta0;
  double m = alpha;
  if (alpha < collar) {
    const double z = alpha / collar;
    m = collar * (0.375 + 0.75 * z * z - 0.125 * z * z * z * z);
  }
  return r * std::sin(theta0 - m);
}

Barrier traveling_cone_subsolution(std::span<const double> e_in, double omega, double theta0,
                                   double gamma, double s) {
  require(s >= 0.5 && s < 1.0, kMod, ErrorCode::InvalidArgument, "needs s in [1/2, 1)");
  require(omega >= 0.0, kMod, ErrorCode::InvalidArgument, "omega must be >= 0");
  require(theta0 > 0.0 && theta0 < kPi, kMod, ErrorCode::InvalidArgument,
          "theta0 must lie in (0, pi)");
  require(gamma > 0.0 && gamma < 2.0 * s, kMod, ErrorCode::InvalidArgument,
          "gamma must lie in (0, 2s)");
  const auto e = unit(e_in);
  const double p = 2.0 * s - gamma;
  Barrier b;
  b.kind = Barrier::Kind::TravelingConeSub;
  b.name = "traveling-cone-sub";
  b.params = {{"omega", omega}, {"theta0", theta0}, {"gamma", gamma}};
  b.dim = static_cast<int>(e.size());
  b.parabolic = true;
  b.value = [e, omega, theta0, p](std::span<const double> x, double t) {
    std::array<double, 2> y{};
    for (std::size_t i = 0; i < e.size(); ++i) y[i] = x[i] + omega * t * e[i];
    const double psi = cone_profile(e, theta0, std::span<const double>(y.data(), e.size()));
    return psi > 0.0 ? std::pow(psi, p) : 0.0;
  };
  b.growth = p;
  b.scale = std::pow(1.0 + omega, p);
  b.valid = [](std::span<const double> x, double t) { return norm(x) < 1.0 && t > -1.0 && t < 0.0; };
  b.singular_distance = [e, omega, theta0](std::span<const double> x, double t) {
    std::array<double, 2> y{};
    for (std::size_t i = 0; i < e.size(); ++i) y[i] = x[i] + omega * t * e[i];
    std::span<const double> ys(y.data(), e.size());
    if (e.size() == 1) return std::abs(y[0]);
    return std::min(norm(ys), distance_to_cone_boundary(e, theta0, ys));
  };
  b.claimed = Sense::at_most(0.0, true);
  return b;
}

PowerBarriers power_regularized_barriers(const KernelSpec& kernel, const GraphDomain& domain,
                                         double t_base, double eps, double M) {
  require(kernel.s() == 0.5 && kernel.dim() == 1, kMod, ErrorCode::InvalidArgument,
          "power-regularized barriers need s = 1/2 in one space dimension");
  require(static_cast<bool>(domain.b) && static_cast<bool>(domain.db), kMod, ErrorCode::Geometry,
          "the domain needs a graph representation b(t) with derivative");
  require(M > 0.0, kMod, ErrorCode::InvalidArgument, "M must be positive");
  const std::array<double, 1> e{1.0};
  auto gamma_at = [kernel, domain, e](double t) {
    const double v = -domain.db(t);
    require(v >= 0.0, kMod, ErrorCode::Geometry, "the domain must not recede (b' <= 0)");
    return gamma_critical(kernel, e, v);
  };
  PowerBarriers out;
  out.gamma0 = gamma_at(t_base);
  out.eps = eps;
  out.M = M;
  require(eps > 0.0 && eps < out.gamma0 / 2 && out.gamma0 + eps < 1.0, kMod,
          ErrorCode::InvalidArgument, "eps must lie in (0, gamma0/2) with gamma0 + eps < 2s");
  out.rho = [domain](std::span<const double> x, double t) {
    const double d = domain.db(t);
    return (x[0] - domain.b(t)) / std::sqrt(1.0 + d * d);
  };
  out.gamma_bar = [gamma_at](std::span<const double>, double t) { return gamma_at(t); };

  const double beta = out.gamma0 + eps;
  auto make = [&](double sign, const std::string& name) {
    Barrier b;
    b.kind = Barrier::Kind::PowerRegularized;
    b.name = name;
    b.params = {{"gamma0", out.gamma0}, {"eps", eps}, {"M", M}};
    b.dim = 1;
    b.parabolic = true;
    auto rho = out.rho;
    auto gb = out.gamma_bar;
    b.value = [rho, gb, M, beta, sign](std::span<const double> x, double t) {
      const double r = rho(x, t);
      if (r <= 0.0) return 0.0;
      return M * std::pow(r, gb(x, t)) + sign * std::pow(r, beta);
    };
    b.growth = std::max(beta, out.gamma0);
    b.scale = (M + 1.0) * (2.0 + std::abs(domain.b(t_base)) + std::abs(domain.db(t_base)));
    b.valid = [rho](std::span<const double> x, double t) { return rho(x, t) > 0.0; };
    b.singular_distance = [domain](std::span<const double> x, double t) {
      return x[0] - domain.b(t);
    };
    return b;
  };
  out.phi1 = make(1.0, "power-regularized-1");
  out.phi1.claimed = Sense::at_most(-1.0);
  out.phi2 = make(-1.0, "power-regularized-2");
  out.phi2.claimed = Sense::at_least(1.0);
  return out;
}

double barrier_defect(const KernelSpec&, const Barrier& barrier, const Stencil& stencil,
                      const SpaceTimeSample& p, const VerifyOptions& options) {
  const double t = p.t;
  const SpaceFunction slice = [&](std::span<const double> y) { return barrier.value(y, t); };
  const double L = apply_at(stencil, slice, p.x, barrier.growth, barrier.scale);
  if (!barrier.parabolic) return L;
  const double dt = options.time_step;
  const double ut = (barrier.value(p.x, t + dt) - barrier.value(p.x, t - dt)) / (2.0 * dt);
  return ut - L;
}

VerificationReport verify_inequality(const KernelSpec& kernel, const Barrier& barrier,
                                     std::span<const SpaceTimeSample> samples, const Sense& sense,
                                     std::span<const double> spacings,
                                     const VerifyOptions& options) {
  require(!samples.empty() && !spacings.empty(), kMod, ErrorCode::InvalidArgument,
          "need samples and at least one spacing");
  require(barrier.dim == kernel.dim(), kMod, ErrorCode::InvalidArgument,
          "barrier and kernel dimensions differ");
  const double hmax = *std::max_element(spacings.begin(), spacings.end());
  for (const auto& p : samples) {
    require(p.x.size() == static_cast<std::size_t>(barrier.dim), kMod, ErrorCode::InvalidArgument,
            "sample has wrong dimension");
    require(barrier.valid(p.x, p.t), kMod, ErrorCode::Geometry,
            "sample outside the barrier's validity region");
    require(barrier.singular_distance(p.x, p.t) >= 2.0 * hmax, kMod, ErrorCode::Geometry,
            "sample closer than 2h to the singular set");
  }

  VerificationReport rep;
  rep.barrier = barrier.name;
  const bool up = upper(sense);
  StencilOptions so;
  so.tail_tol = options.tail_tol;
  for (double h : spacings) {
    const int M = std::max(1, static_cast<int>(std::lround(options.cube_radius / h - 0.5)));
    Stencil stencil(kernel, h, M, so);
    VerificationLevel lvl;
    lvl.h = h;
    lvl.worst = up ? -std::numeric_limits<double>::infinity()
                   : std::numeric_limits<double>::infinity();
    for (const auto& p : samples) {
      const double d = barrier_defect(kernel, barrier, stencil, p, options);
      if (up ? d > lvl.worst : d < lvl.worst) {
        lvl.worst = d;
        lvl.worst_at = p;
      }
    }
    switch (sense.relation) {
      case Sense::Relation::LessEqual:
        lvl.pass = sense.strict ? lvl.worst < sense.bound : lvl.worst <= sense.bound;
        break;
      case Sense::Relation::GreaterEqual:
        lvl.pass = sense.strict ? lvl.worst > sense.bound : lvl.worst >= sense.bound;
        break;
      default:
        lvl.pass = std::isfinite(lvl.worst);
    }
    rep.levels.push_back(std::move(lvl));
  }

  const auto& L = rep.levels;
  rep.stable = true;
  if (L.size() >= 2) {
    const double a = L[L.size() - 2].worst, b = L.back().worst;
    rep.stable = std::abs(b - a) <= options.stability * std::max(std::abs(a), 1e-300);
  }
  rep.order = std::numeric_limits<double>::quiet_NaN();
  if (L.size() >= 3) {
    std::vector<double> hs, diffs;
    for (std::size_t k = 0; k + 1 < L.size(); ++k) {
      hs.push_back(L[k].h);
      diffs.push_back(std::abs(L[k + 1].worst - L[k].worst));
    }
    if (std::all_of(diffs.begin(), diffs.end(), [](double d) { return d > 0.0; }))
      rep.order = fit_power_law(hs, diffs).slope;
    else
      rep.order = std::numeric_limits<double>::infinity();
  }
  rep.pass = std::all_of(L.begin(), L.end(), [](const auto& l) { return l.pass; });
  if (sense.relation == Sense::Relation::BoundedAbove ||
      sense.relation == Sense::Relation::BoundedBelow)
    rep.pass = rep.pass && rep.stable;
  rep.constant = std::abs(L.back().worst);
  return rep;
}

std::vector<SpaceTimeSample> cone_samples(std::span<const double> e_in, double eta, double r_min,
                                          double clearance, std::size_t radial,
                                          std::size_t angular) {
  require(radial >= 1 && r_min > 0.0 && r_min < 1.9, kMod, ErrorCode::InvalidArgument,
          "need radial >= 1 and r_min in (0, 1.9)");
  const auto e = unit(e_in);
  std::vector<SpaceTimeSample> out;
  auto radius = [&](std::size_t i) {
    return radial == 1 ? r_min
                       : r_min + (1.9 - r_min) * static_cast<double>(i) /
                                     static_cast<double>(radial - 1);
  };
  if (e.size() == 1) {
    for (std::size_t i = 0; i < radial; ++i) {
      const double r = radius(i);
      if (r >= clearance) out.push_back({{r * e[0]}, 0.0});
    }
    return out;
  }
  require(angular >= 1, kMod, ErrorCode::InvalidArgument, "need angular >= 1");
  const double a = cone_eta_opening(eta);
  const double base = std::atan2(e[1], e[0]);
  for (std::size_t i = 0; i < radial; ++i) {
    const double r = radius(i);
    for (std::size_t j = 0; j < angular; ++j) {
      const double f = angular == 1 ? 0.0
                                    : -1.0 + 2.0 * static_cast<double>(j) /
                                                 static_cast<double>(angular - 1);
      const double ang = base + f * a;
      std::vector<double> x{r * std::cos(ang), r * std::sin(ang)};
      if (std::min(r, distance_to_cone_boundary(e, a, x)) >= clearance && in_cone(e, eta, x))
        out.push_back({std::move(x), 0.0});
    }
  }
  return out;
}

std::vector<SpaceTimeSample> cylinder_samples(const Barrier& barrier, double clearance,
                                              std::size_t per_axis, std::size_t times) {
  require(per_axis >= 2 && times >= 1, kMod, ErrorCode::InvalidArgument,
          "need per_axis >= 2 and times >= 1");
  std::vector<SpaceTimeSample> out;
  auto coord = [&](std::size_t i) {
    return -0.95 + 1.9 * static_cast<double>(i) / static_cast<double>(per_axis - 1);
  };
  for (std::size_t k = 0; k < times; ++k) {
    const double t = -(static_cast<double>(k) + 0.5) / static_cast<double>(times);
    if (barrier.dim == 1) {
      for (std::size_t i = 0; i < per_axis; ++i) {
        std::vector<double> x{coord(i)};
        if (barrier.valid(x, t) && barrier.singular_distance(x, t) >= clearance)
          out.push_back({std::move(x), t});
      }
    } else {
      for (std::size_t i = 0; i < per_axis; ++i)
        for (std::size_t j = 0; j < per_axis; ++j) {
          std::vector<double> x{coord(i), coord(j)};
          if (barrier.valid(x, t) && barrier.singular_distance(x, t) >= clearance)
            out.push_back({std::move(x), t});
        }
    }
  }
  return out;
}

SearchResult search_cone_theta(const KernelSpec& kernel, std::span<const double> e, double eta,
                               std::span<const SpaceTimeSample> samples,
                               std::span<const double> spacings, const VerifyOptions& options) {
  SearchResult res;
  for (double theta : {0.4, 0.2, 0.1, 0.05}) {
    const Barrier b = cone_supersolution(e, eta, theta);
    auto rep = verify_inequality(kernel, b, samples, b.claimed, spacings, options);
    res.trail.emplace_back(theta, rep.levels.back().worst);
    if (rep.pass) {
      res.value = theta;
      res.found = true;
      rep.searched["theta"] = theta;
      res.report = std::move(rep);
      return res;
    }
    res.report = std::move(rep);
  }
  return res;
}

SearchResult search_traveling_gamma(const KernelSpec& kernel, std::span<const double> e,
                                    double omega, double theta0, double gamma_start,
                                    double clearance, std::size_t per_axis, std::size_t times,
                                    std::span<const double> spacings,
                                    const VerifyOptions& options) {
  SearchResult res;
  for (double gamma = gamma_start; gamma >= 1e-3; gamma /= 2.0) {
    const Barrier b = traveling_cone_subsolution(e, omega, theta0, gamma, kernel.s());
    const auto samples = cylinder_samples(b, clearance, per_axis, times);
    auto rep = verify_inequality(kernel, b, samples, b.claimed, spacings, options);
    res.trail.emplace_back(gamma, rep.levels.back().worst);
    if (rep.pass) {
      res.value = gamma;
      res.found = true;
      rep.searched["gamma"] = gamma;
      res.report = std::move(rep);
      return res;
    }
    res.report = std::move(rep);
  }
  return res;
}

PowerSearch search_power_barriers(const KernelSpec& kernel, const GraphDomain& domain,
                                  double t_base, double eps, std::span<const double> spacings,
                                  const VerifyOptions& options) {
  PowerSearch out;
  const double x_base = domain.b(t_base);
  const double hmax = *std::max_element(spacings.begin(), spacings.end());

  // Q_1 samples inside the domain for the growth sandwich.
  std::vector<SpaceTimeSample> q1;
  for (int k = 0; k < 9; ++k) {
    const double t = t_base - 0.8 + 0.2 * k;
    for (int i = 1; i <= 40; ++i) {
      const double x = x_base - 1.0 + 0.05 * i;
      if (x - domain.b(t) > 1e-3 && std::abs(x - x_base) < 1.0) q1.push_back({{x}, t});
    }
  }
  auto sandwich = [&](const PowerBarriers& pb, double& lo, double& hi) {
    lo = std::numeric_limits<double>::infinity();
    hi = 0.0;
    for (const auto& p : q1) {
      const double d = p.x[0] - domain.b(p.t);
      const double g = std::pow(d, pb.gamma_bar(p.x, p.t));
      for (const Barrier* b : {&pb.phi1, &pb.phi2}) {
        const double r = b->value(p.x, p.t) / g;
        lo = std::min(lo, r);
        hi = std::max(hi, r);
      }
    }
  };

  double M = 1.0;
  for (; M <= 1024.0; M *= 2.0) {
    const auto pb = power_regularized_barriers(kernel, domain, t_base, eps, M);
    sandwich(pb, out.sandwich_low, out.sandwich_high);
    if (out.sandwich_low >= 1.0) break;
  }
  if (M > 1024.0) return out;
  out.M = M;
  const auto pb = power_regularized_barriers(kernel, domain, t_base, eps, M);

  for (double delta = 0.5; delta >= 4.0 * hmax; delta /= 2.0) {
    std::vector<SpaceTimeSample> samples;
    for (int k = 0; k < 5; ++k) {
      const double t = t_base - delta + 0.5 * delta * k * 0.999;
      for (int i = 0; i < 12; ++i) {
        const double x = x_base - delta + 2.0 * delta * (i + 0.5) / 12.0;
        if (x - domain.b(t) >= 2.0 * hmax) samples.push_back({{x}, t});
      }
    }
    if (samples.empty()) continue;
    auto r1 = verify_inequality(kernel, pb.phi1, samples, pb.phi1.claimed, spacings, options);
    auto r2 = verify_inequality(kernel, pb.phi2, samples, pb.phi2.claimed, spacings, options);
    out.delta0 = delta;
    out.phi1 = std::move(r1);
    out.phi2 = std::move(r2);
    out.phi1.searched = {{"M", M}, {"delta0", delta}};
    out.phi2.searched = out.phi1.searched;
    if (out.phi1.pass && out.phi2.pass) {
      out.found = true;
      return out;
    }
  }
  return out;
}

HeatTailReport heat_tail_supersolution(const KernelSpec& kernel, double R, double gamma0,
                                       std::size_t nodes, std::size_t steps) {
  const double s = kernel.s();
  require(kernel.dim() == 1 && s >= 0.5, kMod, ErrorCode::InvalidArgument,
          "the heat-tail supersolution is built in one dimension with s >= 1/2");
  require(R >= 1.0 && gamma0 > 0.0 && gamma0 < 2.0 * s, kMod, ErrorCode::InvalidArgument,
          "needs R >= 1 and gamma0 in (0, 2s)");
  require(nodes >= 9 && steps >= 1, kMod, ErrorCode::InvalidArgument, "grid too small");
  const double p = 2.0 * s - gamma0;
  auto init = [R, p](std::span<const double> x) {
    const double a = std::abs(x[0]);
    return a > R / 2 ? std::pow(a, p) : 0.0;
  };
  const double L = 4.0 * R, h = 2.0 * L / static_cast<double>(nodes - 1);
  const std::vector<std::size_t> ext{nodes};
  const std::vector<double> origin{-L};
  std::vector<double> u0(nodes);
  for (std::size_t i = 0; i < nodes; ++i) {
    const std::array<double, 1> x{-L + h * static_cast<double>(i)};
    u0[i] = init(x);
  }
  const auto exterior =
      ExteriorRule::function([init](std::span<const double> x, double) { return init(x); }, p);
  const ZeroSetMask none = [nodes](double) { return std::vector<char>(nodes, 0); };
  const double dt = 1.0 / static_cast<double>(steps);
  GridFunction hsol =
      solve_linear_parabolic(kernel, ext, h, origin, exterior, none, {}, u0, -1.0, dt, steps);

  HeatTailReport rep;
  rep.lower = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k <= steps; ++k) {
    const double t = hsol.time_at(k);
    auto lvl = hsol.slice(k);
    for (std::size_t i = 0; i < nodes; ++i) {
      lvl[i] += std::pow(R, -gamma0) * (t + 1.0);
      const double x = std::abs(-L + h * static_cast<double>(i));
      if (x <= R / 4) rep.upper = std::max(rep.upper, lvl[i] * std::pow(R, gamma0));
      if (x >= R) rep.lower = std::min(rep.lower, lvl[i] / std::pow(x, p));
    }
  }
  rep.s1 = std::move(hsol);
  return rep;
}

}  // namespace fbreg
