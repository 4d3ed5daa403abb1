#include "fbreg/free_boundary.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>
#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

#include "fbreg/error.hpp"
#include "fbreg/metrics.hpp"

namespace fbreg {

namespace {

constexpr auto kMod = Module::FreeBoundary;

std::size_t time_axes(const GridFunction& g) { return g.has_time() ? 1 : 0; }

}  // namespace

std::vector<char> contact_set(const GridFunction& u, const GridFunction& phi, double gap_tol) {
  require(gap_tol >= 0.0, kMod, ErrorCode::InvalidArgument, "gap tolerance must be >= 0");
  const bool broadcast = phi.size() != u.size();
  require(!broadcast || phi.size() == u.slice_size(), kMod, ErrorCode::InvalidArgument,
          "u and phi live on different grids");
  std::vector<char> mask(u.size());
  const std::size_t m = u.slice_size();
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double p = phi[broadcast ? i % m : i];
    mask[i] = u[i] - p <= gap_tol * (1.0 + std::abs(p)) ? 1 : 0;
  }
  return mask;
}

std::vector<BoundaryPoint> extract_boundary(const std::vector<char>& mask, const GridFunction& w,
                                            double beta_guess) {
  require(mask.size() == w.size(), kMod, ErrorCode::InvalidArgument, "mask and w differ in size");
  require(beta_guess >= 1.0, kMod, ErrorCode::InvalidArgument, "beta_guess must be >= 1");
  const auto contact = std::count(mask.begin(), mask.end(), 1);
  require(contact > 0 && static_cast<std::size_t>(contact) < mask.size(), kMod,
          ErrorCode::Geometry, "the contact mask is empty or full");

  const std::size_t d = w.axis_count(), t0 = time_axes(w), n = d - t0;
  const auto& ext = w.extents();
  auto g = [&](std::size_t i) { return std::pow(std::max(w[i], 0.0), 1.0 / beta_guess); };

  std::vector<BoundaryPoint> out;
  std::vector<std::size_t> idx(d), nb(d);
  for (std::size_t i = 0; i < w.size(); ++i) {
    w.unflatten(i, idx);
    for (std::size_t a = t0; a < d; ++a) {
      if (idx[a] + 1 >= ext[a]) continue;
      nb = idx;
      nb[a] += 1;
      const std::size_t j = w.flat(nb);
      if (mask[i] == mask[j]) continue;
      const std::size_t c = mask[i] ? i : j, f = mask[i] ? j : i;
      const long dir = mask[i] ? 1 : -1;
      auto pc = w.coordinates(c), pf = w.coordinates(f);
      const double h = w.spacing(a);
      double offset = 0.0;  // distance from the contact node towards f
      std::vector<std::size_t> fi(d);
      w.unflatten(f, fi);
      const long next = static_cast<long>(fi[a]) + dir;
      if (next >= 0 && next < static_cast<long>(ext[a])) {
        auto ff = fi;
        ff[a] = static_cast<std::size_t>(next);
        const std::size_t k = w.flat(ff);
        const double slope = g(k) - g(f);
        if (!mask[k] && slope > 0.0) offset = std::clamp(h - h * g(f) / slope, 0.0, h);
      }
      BoundaryPoint p;
      p.position = pc;
      p.position[a] += static_cast<double>(dir) * offset;
      p.inward.assign(n, 0.0);
      p.inward[a - t0] = static_cast<double>(dir);
      out.push_back(std::move(p));
    }
  }
  return out;
}

NormalEstimate estimate_normal_speed(std::span<const BoundaryPoint> points,
                                     std::span<const double> center, double radius) {
  NormalEstimate est;
  require(radius > 0.0, kMod, ErrorCode::InvalidArgument, "radius must be positive");
  std::vector<const BoundaryPoint*> near;
  for (const auto& p : points) {
    require(p.position.size() == center.size(), kMod, ErrorCode::InvalidArgument,
            "point and center dimensions differ");
    double r2 = 0.0;
    for (std::size_t a = 0; a < center.size(); ++a)
      r2 += (p.position[a] - center[a]) * (p.position[a] - center[a]);
    if (r2 <= radius * radius) near.push_back(&p);
  }
  est.points = near.size();
  const std::size_t d = center.size();
  if (near.empty()) {
    est.reason = "no boundary points in the ball";
    return est;
  }
  const std::size_t n = near.front()->inward.size();
  const bool timed = d > n;
  Eigen::VectorXd mean_in = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (const auto* p : near)
    for (std::size_t a = 0; a < n; ++a) mean_in[static_cast<Eigen::Index>(a)] += p->inward[a];

  Eigen::VectorXd nu(static_cast<Eigen::Index>(d));
  if (d == 1) {
    nu[0] = mean_in[0] >= 0.0 ? 1.0 : -1.0;
  } else {
    if (near.size() < d + 1) {
      est.reason = "too few boundary points for a hyperplane fit";
      return est;
    }
    Eigen::MatrixXd P(static_cast<Eigen::Index>(near.size()), static_cast<Eigen::Index>(d));
    for (std::size_t k = 0; k < near.size(); ++k)
      for (std::size_t a = 0; a < d; ++a)
        P(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(a)) = near[k]->position[a];
    const Eigen::RowVectorXd centroid = P.colwise().mean();
    P.rowwise() -= centroid;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(P.transpose() * P);
    const auto& ev = eig.eigenvalues();
    if (ev[static_cast<Eigen::Index>(d) - 1] <= 0.0 ||
        ev[1] <= 1e-12 * ev[static_cast<Eigen::Index>(d) - 1]) {
      est.reason = "rank-deficient boundary point cloud";
      return est;
    }
    nu = eig.eigenvectors().col(0);
    double dir = 0.0;
    for (std::size_t a = 0; a < n; ++a)
      dir += nu[static_cast<Eigen::Index>(a + (timed ? 1 : 0))] * mean_in[static_cast<Eigen::Index>(a)];
    if (dir < 0.0) nu = -nu;
  }
  nu.normalize();
  est.nu.assign(nu.data(), nu.data() + d);
  est.nu_x.assign(est.nu.begin() + (timed ? 1 : 0), est.nu.end());
  double nx = 0.0;
  for (double c : est.nu_x) nx += c * c;
  nx = std::sqrt(nx);
  if (timed)
    est.speed = nx < 1e-8 ? std::numeric_limits<double>::infinity() : est.nu[0] / nx;
  if (nx > 0.0)
    for (double& c : est.nu_x) c /= nx;
  est.resolved = true;
  return est;
}

std::vector<double> radii_ladder(double r_min, double r_max) {
  require(r_min > 0.0 && r_max >= r_min, kMod, ErrorCode::InvalidArgument,
          "radii need 0 < r_min <= r_max");
  std::vector<double> r;
  for (double x = r_min; x <= r_max * (1 + 1e-12); x *= std::numbers::sqrt2) r.push_back(x);
  return r;
}

GrowthFit fit_growth_exponent(const GridFunction& w, std::span<const double> point, double r_min,
                              double r_max, std::size_t n_radii) {
  require(n_radii >= 2 && r_min > 0.0 && r_max > r_min, kMod, ErrorCode::InvalidArgument,
          "need at least two radii with 0 < r_min < r_max");
  std::vector<double> radii(n_radii);
  const double q = std::pow(r_max / r_min, 1.0 / static_cast<double>(n_radii - 1));
  for (std::size_t k = 0; k < n_radii; ++k) radii[k] = r_min * std::pow(q, static_cast<double>(k));
  radii.back() = r_max;
  return fit_growth_exponent(w, point, radii);
}

GrowthFit fit_growth_exponent(const GridFunction& w, std::span<const double> point,
                              std::span<const double> radii) {
  require(radii.size() >= 2, kMod, ErrorCode::InvalidArgument, "need at least two radii");
  const double r_min = *std::min_element(radii.begin(), radii.end());
  const double r_max = *std::max_element(radii.begin(), radii.end());
  require(r_min >= 4.0 * w.h() * (1 - 1e-12), kMod, ErrorCode::InvalidArgument,
          "the smallest radius must be at least 4h");
  require(w.contains_cylinder(point, r_max), kMod, ErrorCode::Geometry,
          "the largest cylinder leaves the grid");
  GrowthFit fit;
  fit.radii.assign(radii.begin(), radii.end());
  for (double r : radii) {
    double sup = 0.0;
    for (auto i : w.cylinder_nodes(point, r)) sup = std::max(sup, w[i]);
    require(sup > 0.0, kMod, ErrorCode::Geometry,
            "u - phi vanishes on a whole cylinder; the point is inside the contact set");
    fit.sups.push_back(sup);
  }
  const PowerFit pf = fit_power_law(fit.radii, fit.sups);
  fit.beta = pf.slope;
  fit.r2 = pf.r2;
  fit.narrow = r_max < 10.0 * r_min;
  return fit;
}

std::string to_string(Classification::Kind kind) {
  switch (kind) {
    case Classification::Kind::Regular:
      return "regular";
    case Classification::Kind::Degenerate:
      return "degenerate";
    case Classification::Kind::Unresolved:
      break;
  }
  return "unresolved";
}

Classification classify_point(double beta, double v0, const KernelSpec& kernel,
                              std::span<const double> e, const ClassifyThresholds& th,
                              double r2) {
  Classification c;
  if (kernel.s() == 0.5) {
    c.gamma_pred = std::isfinite(v0) ? gamma_critical(kernel, e, std::max(v0, 0.0)) : 1.0;
  } else {
    c.gamma_pred = gamma_elliptic(kernel, e);
  }
  if (!std::isfinite(beta) || r2 < th.min_r2) return c;
  if (std::abs(beta - (1.0 + c.gamma_pred)) <= th.delta)
    c.kind = Classification::Kind::Regular;
  else if (beta >= 2.0 - th.eps_c)
    c.kind = Classification::Kind::Degenerate;
  return c;
}

GridFunction blow_up_rescale(const GridFunction& w, std::span<const double> point, double r,
                             NormMode mode, std::size_t nodes) {
  require(r > 0.0 && nodes >= 3, kMod, ErrorCode::InvalidArgument,
          "need r > 0 and at least 3 nodes per axis");
  require(w.contains_cylinder(point, r), kMod, ErrorCode::Geometry,
          "the rescaling cylinder leaves the grid");
  const std::size_t d = w.axis_count(), t0 = time_axes(w);
  const double s = w.s();
  const double tr = std::pow(r, 2.0 * s);

  double grad = 0.0, dtime = 0.0, sup = 0.0;
  std::vector<std::size_t> idx(d), nb(d);
  const auto& ext = w.extents();
  for (auto i : w.cylinder_nodes(point, r)) {
    sup = std::max(sup, std::abs(w[i]));
    w.unflatten(i, idx);
    double g2 = 0.0;
    for (std::size_t a = 0; a < d; ++a) {
      nb = idx;
      std::size_t lo = i, hi = i;
      double span = 0.0;
      if (idx[a] > 0) {
        nb[a] = idx[a] - 1;
        lo = w.flat(nb);
        span += w.spacing(a);
      }
      if (idx[a] + 1 < ext[a]) {
        nb[a] = idx[a] + 1;
        hi = w.flat(nb);
        span += w.spacing(a);
      }
      const double der = span > 0.0 ? (w[hi] - w[lo]) / span : 0.0;
      if (a < t0)
        dtime = std::max(dtime, std::abs(der));
      else
        g2 += der * der;
    }
    grad = std::max(grad, std::sqrt(g2));
  }
  const double denom = mode == NormMode::Gradient ? r * grad + tr * dtime : sup;
  require(denom > 0.0, kMod, ErrorCode::Geometry,
          "zero normalization: the cylinder lies inside the contact set");

  const std::size_t n = d - t0;
  const double step = 2.0 / static_cast<double>(nodes - 1);
  std::vector<std::size_t> sext(n, nodes);
  std::vector<double> sorig(n, -1.0);
  GridFunction out = t0 ? GridFunction::space_time(nodes, sext, step, step, sorig, -1.0, s)
                        : GridFunction::spatial(sext, step, sorig, s);
  std::vector<double> q(d);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto x = out.coordinates(i);
    for (std::size_t a = 0; a < d; ++a) q[a] = point[a] + (a < t0 ? tr : r) * x[a];
    out[i] = w.interpolate(q) / denom;
  }
  return out;
}

double lip_distance(const GridFunction& data, const Profile1D& profile) {
  const std::size_t d = data.axis_count(), t0 = time_axes(data);
  std::vector<double> model(data.size());
  std::vector<char> inside(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto c = data.coordinates(i);
    std::span<const double> x(c.data() + t0, d - t0);
    double r2 = 0.0;
    for (double v : x) r2 += v * v;
    inside[i] = r2 <= 1.0 + 1e-12;
    model[i] = eval_profile(profile, x, t0 ? c[0] : 0.0);
  }
  double dist = 0.0;
  std::vector<std::size_t> idx(d), nb(d);
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!inside[i]) continue;
    dist = std::max(dist, std::abs(data[i] - model[i]));
    data.unflatten(i, idx);
    for (std::size_t a = 0; a < d; ++a) {
      if (idx[a] + 1 >= data.extents()[a]) continue;
      nb = idx;
      nb[a] += 1;
      const std::size_t j = data.flat(nb);
      if (!inside[j]) continue;
      const double q = ((data[j] - model[j]) - (data[i] - model[i])) / data.spacing(a);
      dist = std::max(dist, std::abs(q));
    }
  }
  return dist;
}

namespace {

// Parameters: kappa, [angle of e in 2D], [speed for s = 1/2 space-time data].
struct ProfileModel {
  const GridFunction& data;
  const KernelSpec& kernel;
  std::size_t dim;
  bool timed;
  double e1d;
  std::vector<std::size_t> nodes;

  Profile1D profile(const Eigen::VectorXd& p) const {
    std::vector<double> e;
    Eigen::Index k = 1;
    if (dim == 2) {
      e = {std::cos(p[k]), std::sin(p[k])};
      ++k;
    } else {
      e = {e1d};
    }
    const double v = timed ? std::abs(p[k]) : 0.0;
    return make_profile(kernel, e, v, std::abs(p[0]));
  }
};

struct ProfileFunctor {
  using Scalar = double;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;

  const ProfileModel* model;
  int params;
  ProfileFunctor(const ProfileModel& m, int p) : model(&m), params(p) {}
  int inputs() const { return params; }
  int values() const { return static_cast<int>(model->nodes.size()); }
  int operator()(const InputType& p, ValueType& r) const {
    const Profile1D prof = model->profile(p);
    const std::size_t t0 = model->timed ? 1 : 0;
    for (std::size_t k = 0; k < model->nodes.size(); ++k) {
      const std::size_t i = model->nodes[k];
      const auto c = model->data.coordinates(i);
      std::span<const double> x(c.data() + t0, c.size() - t0);
      r[static_cast<Eigen::Index>(k)] = eval_profile(prof, x, t0 ? c[0] : 0.0) - model->data[i];
    }
    return 0;
  }
};

}  // namespace

ProfileFit fit_1d_profile(const GridFunction& rescaled, const KernelSpec& kernel,
                          const ProfileGuess& guess) {
  const std::size_t t0 = time_axes(rescaled);
  const std::size_t n = rescaled.axis_count() - t0;
  require(static_cast<int>(n) == kernel.dim(), kMod, ErrorCode::InvalidArgument,
          "data and kernel dimensions differ");
  require(n <= 2, kMod, ErrorCode::InvalidArgument, "profile fits support n <= 2");
  const bool timed = t0 == 1 && kernel.s() == 0.5;

  double sup = 0.0;
  for (double v : rescaled.values()) sup = std::max(sup, std::abs(v));
  require(sup > 0.0, kMod, ErrorCode::FitFailed, "the rescaled data vanish");

  std::vector<double> e0 = guess.e;
  if (e0.empty()) e0.assign(n, 0.0), e0[0] = 1.0;
  require(e0.size() == n, kMod, ErrorCode::InvalidArgument, "guess direction has wrong size");

  ProfileModel model{rescaled, kernel, n, timed, e0[0] >= 0.0 ? 1.0 : -1.0, {}};
  for (std::size_t i = 0; i < rescaled.size(); ++i) {
    const auto c = rescaled.coordinates(i);
    double r2 = 0.0;
    for (std::size_t a = t0; a < c.size(); ++a) r2 += c[a] * c[a];
    if (r2 <= 1.0 + 1e-12) model.nodes.push_back(i);
  }

  const int params = 1 + (n == 2 ? 1 : 0) + (timed ? 1 : 0);
  const double angle0 = n == 2 ? std::atan2(e0[1], e0[0]) : 0.0;
  const double v0 = std::max(guess.v, 0.0);

  auto start = [&](int k) {
    static constexpr std::array<double, 8> da{0.0, 0.15, -0.15, 0.0, 0.3, -0.3, 0.0, 0.1};
    static constexpr std::array<double, 8> fv{1.0, 1.0, 1.0, 1.5, 0.7, 1.3, 0.4, 2.0};
    Eigen::VectorXd p(params);
    Eigen::Index j = 1;
    if (n == 2) p[j++] = angle0 + da[static_cast<std::size_t>(k)];
    if (timed) p[j] = std::max(v0 * fv[static_cast<std::size_t>(k)], 0.05 * k);
    p[0] = 1.0;
    if (guess.kappa > 0.0) {
      p[0] = guess.kappa;
    } else {
      const Profile1D unit = model.profile(p);
      double usup = 0.0;
      for (auto i : model.nodes) {
        const auto c = rescaled.coordinates(i);
        std::span<const double> x(c.data() + t0, n);
        usup = std::max(usup, eval_profile(unit, x, t0 ? c[0] : 0.0));
      }
      double dsup = 0.0;
      for (auto i : model.nodes) dsup = std::max(dsup, std::abs(rescaled[i]));
      p[0] = usup > 0.0 ? dsup / usup : 1.0;
    }
    return p;
  };

  ProfileFit best;
  double best_cost = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 8; ++k) {
    Eigen::VectorXd p = start(k);
    ProfileFunctor f(model, params);
    Eigen::NumericalDiff<ProfileFunctor> nd(f);
    Eigen::LevenbergMarquardt<Eigen::NumericalDiff<ProfileFunctor>> lm(nd);
    lm.parameters.maxfev = 400;
    lm.parameters.xtol = 1e-10;
    lm.parameters.ftol = 1e-12;
    const auto status = lm.minimize(p);
    best.restarts = static_cast<std::size_t>(k + 1);
    if (status == Eigen::LevenbergMarquardtSpace::ImproperInputParameters || !p.allFinite())
      continue;
    Eigen::VectorXd r(static_cast<Eigen::Index>(model.nodes.size()));
    f(p, r);
    const double cost = r.squaredNorm();
    if (cost < best_cost) {
      best_cost = cost;
      best.profile = model.profile(p);
      best.resolved = true;
    }
    if (best.resolved && std::sqrt(best_cost / static_cast<double>(model.nodes.size())) < 1e-10 * sup)
      break;
  }
  if (!best.resolved) return best;
  best.rms = std::sqrt(best_cost / static_cast<double>(model.nodes.size()));
  best.lip_distance = lip_distance(rescaled, best.profile);
  best.one_dimensional = best.lip_distance <= 0.2;
  return best;
}

}  // namespace fbreg
