#include "fbreg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "fbreg/error.hpp"

namespace fbreg {

namespace {

constexpr auto kMod = Module::Metrics;

// Nodes of a rectangular index region together with the per-axis tables
// needed to evaluate quotient denominators from index differences.
class RegionView {
 public:
  RegionView(const GridFunction& w, const Region& region, double beta, double s) : w_(w) {
    const auto& ext = w.extents();
    axes_ = ext.size();
    lo_.resize(axes_);
    len_.resize(axes_);
    if (region.ranges.empty()) {
      for (std::size_t a = 0; a < axes_; ++a) {
        lo_[a] = 0;
        len_[a] = ext[a];
      }
    } else {
      require(region.ranges.size() == axes_, kMod, ErrorCode::InvalidArgument,
              "region needs one range per grid axis");
      for (std::size_t a = 0; a < axes_; ++a) {
        const auto [l, h] = region.ranges[a];
        require(l <= h && h < ext[a], kMod, ErrorCode::InvalidArgument,
                "region outside the grid or empty");
        lo_[a] = l;
        len_[a] = h - l + 1;
      }
    }
    count_ = 1;
    for (auto l : len_) count_ *= l;
    require(count_ >= 1, kMod, ErrorCode::InvalidArgument, "empty region");

    const bool timed = w.has_time();
    const double h = w.h();
    const double dt = w.dt();
    const double time_beta = beta / (2.0 * s);
    // Denominator indexed by absolute index differences.
    table_.assign(count_, 0.0);
    std::vector<std::size_t> d(axes_, 0);
    for (std::size_t idx = 0; idx < count_; ++idx) {
      std::size_t rest = idx;
      for (std::size_t a = axes_; a-- > 0;) {
        d[a] = rest % len_[a];
        rest /= len_[a];
      }
      double r2 = 0.0;
      double tau = 0.0;
      for (std::size_t a = 0; a < axes_; ++a) {
        if (timed && a == 0) {
          tau = static_cast<double>(d[a]) * dt;
        } else {
          const double x = static_cast<double>(d[a]) * h;
          r2 += x * x;
        }
      }
      double den = std::pow(std::sqrt(r2), beta);
      if (timed) den += std::pow(tau, time_beta);
      table_[idx] = den;
    }
    values_.resize(count_);
    coords_.assign(count_ * axes_, 0);
    std::vector<std::size_t> full(axes_);
    for (std::size_t idx = 0; idx < count_; ++idx) {
      std::size_t rest = idx;
      for (std::size_t a = axes_; a-- > 0;) {
        const std::size_t c = rest % len_[a];
        rest /= len_[a];
        coords_[idx * axes_ + a] = c;
        full[a] = lo_[a] + c;
      }
      values_[idx] = w[w.flat(full)];
    }
  }

  std::size_t count() const { return count_; }
  double value(std::size_t i) const { return values_[i]; }

  double denominator(std::size_t i, std::size_t j) const {
    std::size_t idx = 0;
    for (std::size_t a = 0; a < axes_; ++a) {
      const std::size_t ci = coords_[i * axes_ + a];
      const std::size_t cj = coords_[j * axes_ + a];
      idx = idx * len_[a] + (ci > cj ? ci - cj : cj - ci);
    }
    return table_[idx];
  }

  std::size_t grid_flat(std::size_t i) const {
    std::vector<std::size_t> full(axes_);
    for (std::size_t a = 0; a < axes_; ++a) full[a] = lo_[a] + coords_[i * axes_ + a];
    return w_.flat(full);
  }

  std::size_t axes() const { return axes_; }
  std::size_t len(std::size_t a) const { return len_[a]; }
  std::size_t coord(std::size_t i, std::size_t a) const { return coords_[i * axes_ + a]; }
  std::size_t local(std::span<const std::size_t> c) const {
    std::size_t idx = 0;
    for (std::size_t a = 0; a < axes_; ++a) idx = idx * len_[a] + c[a];
    return idx;
  }

 private:
  const GridFunction& w_;
  std::size_t axes_ = 0;
  std::vector<std::size_t> lo_, len_;
  std::size_t count_ = 0;
  std::vector<double> table_;
  std::vector<double> values_;
  std::vector<std::size_t> coords_;
};

struct Best {
  double num = 0.0;
  double den = 1.0;
  std::size_t i = 0, j = 0;
  bool better(double n, double d) const { return n * den > num * d; }
};

}  // namespace

PowerFit fit_power_law(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size() && x.size() >= 2, kMod, ErrorCode::InvalidArgument,
          "power fit needs at least two matching samples");
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    require(x[i] > 0.0 && y[i] > 0.0, kMod, ErrorCode::FitFailed,
            "power fit needs positive samples");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double dn = static_cast<double>(n);
  const double denom = dn * sxx - sx * sx;
  require(std::abs(denom) > 1e-300, kMod, ErrorCode::FitFailed, "degenerate abscissae");
  PowerFit fit;
  fit.slope = (dn * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / dn;
  const double mean = sy / dn;
  double ss_res = 0, ss_tot = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
    ss_res += r * r;
    ss_tot += (ly[i] - mean) * (ly[i] - mean);
  }
  fit.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  fit.residual = std::sqrt(ss_res / dn);
  return fit;
}

OrderEstimate convergence_order(std::span<const double> values, std::span<const double> spacings) {
  require(values.size() == spacings.size() && values.size() >= 3, kMod,
          ErrorCode::InvalidArgument, "convergence order needs at least three levels");
  const auto fit = fit_power_law(spacings, values);
  OrderEstimate est;
  est.order = fit.slope;
  est.residual = fit.residual;
  std::vector<std::size_t> order(values.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return spacings[a] > spacings[b]; });
  for (std::size_t k = 1; k < order.size(); ++k)
    if (values[order[k]] > values[order[k - 1]]) est.monotone = false;
  return est;
}

HolderReport parabolic_holder_seminorm(const GridFunction& w, double beta, double s,
                                       const Region& region, const SeminormOptions& options) {
  require(beta > 0.0 && beta < 1.0, kMod, ErrorCode::InvalidArgument, "beta must lie in (0,1)");
  require(s > 0.0 && s < 1.0, kMod, ErrorCode::InvalidArgument, "s must lie in (0,1)");
  const RegionView view(w, region, beta, s);
  const std::size_t n = view.count();

  HolderReport report;
  report.beta = beta;
  report.mode = w.has_time() ? HolderReport::Mode::Parabolic : HolderReport::Mode::Spatial;
  report.seed = options.seed;
  Best best;
  std::uint64_t examined = 0;

  auto consider = [&](std::size_t i, std::size_t j) {
    if (i == j) return;
    ++examined;
    const double num = std::abs(view.value(i) - view.value(j));
    const double den = view.denominator(i, j);
    if (best.better(num, den)) best = {num, den, i, j};
  };

  if (n <= options.exact_limit && !options.force_sampled) {
    for (std::size_t i = 0; i < n; ++i) {
      const double vi = view.value(i);
      for (std::size_t j = i + 1; j < n; ++j) {
        const double num = std::abs(vi - view.value(j));
        if (num == 0.0) continue;
        const double den = view.denominator(i, j);
        if (best.better(num, den)) best = {num, den, i, j};
      }
    }
    examined = static_cast<std::uint64_t>(n) * (n - 1) / 2;
    report.exact = true;
  } else {
    report.exact = false;
    const std::size_t axes = view.axes();
    std::vector<std::size_t> c(axes);
    // Short-range pairs: every offset with |d|_inf <= 2.
    constexpr long kReach = 2;
    std::vector<long> offs(axes, -kReach);
    std::vector<std::vector<long>> offsets;
    while (true) {
      bool positive = false;
      for (std::size_t a = 0; a < axes; ++a) {
        if (offs[a] != 0) {
          positive = offs[a] > 0;
          break;
        }
      }
      if (positive) offsets.push_back(offs);
      std::size_t a = axes;
      while (a-- > 0) {
        if (++offs[a] <= kReach) break;
        offs[a] = -kReach;
      }
      if (a == static_cast<std::size_t>(-1)) break;
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (const auto& d : offsets) {
        bool inside = true;
        for (std::size_t a = 0; a < axes; ++a) {
          const long x = static_cast<long>(view.coord(i, a)) + d[a];
          if (x < 0 || x >= static_cast<long>(view.len(a))) {
            inside = false;
            break;
          }
          c[a] = static_cast<std::size_t>(x);
        }
        if (inside) consider(i, view.local(c));
      }
    }
    // Long-range random pairs.
    std::mt19937_64 rng(options.seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    const std::uint64_t budget = options.pair_budget > examined ? options.pair_budget - examined : 0;
    std::vector<Best> top;
    for (std::uint64_t k = 0; k < budget; ++k) {
      const std::size_t i = pick(rng), j = pick(rng);
      if (i == j) continue;
      ++examined;
      const double num = std::abs(view.value(i) - view.value(j));
      const double den = view.denominator(i, j);
      if (best.better(num, den)) best = {num, den, i, j};
      if (top.size() < 16) {
        top.push_back({num, den, i, j});
      } else {
        auto worst = std::min_element(top.begin(), top.end(), [](const Best& a, const Best& b) {
          return a.num * b.den < b.num * a.den;
        });
        if (worst->better(num, den)) *worst = {num, den, i, j};
      }
    }
    top.push_back(best);
    // Local refinement: move either endpoint to a neighbour while the quotient grows.
    for (Best cand : top) {
      bool improved = true;
      while (improved) {
        improved = false;
        for (int end = 0; end < 2 && !improved; ++end) {
          const std::size_t p = end == 0 ? cand.i : cand.j;
          for (std::size_t a = 0; a < axes && !improved; ++a)
            for (long step : {-1L, 1L}) {
              const long x = static_cast<long>(view.coord(p, a)) + step;
              if (x < 0 || x >= static_cast<long>(view.len(a))) continue;
              for (std::size_t b = 0; b < axes; ++b) c[b] = view.coord(p, b);
              c[a] = static_cast<std::size_t>(x);
              const std::size_t q = view.local(c);
              const std::size_t i = end == 0 ? q : cand.i;
              const std::size_t j = end == 0 ? cand.j : q;
              if (i == j) continue;
              ++examined;
              const double num = std::abs(view.value(i) - view.value(j));
              const double den = view.denominator(i, j);
              if (cand.better(num, den)) {
                cand = {num, den, i, j};
                improved = true;
                break;
              }
            }
        }
      }
      if (best.better(cand.num, cand.den)) best = cand;
    }
  }
  report.pairs_examined = examined;
  report.value = best.num == 0.0 ? 0.0 : best.num / best.den;
  report.first = view.grid_flat(best.i);
  report.second = view.grid_flat(best.j);
  return report;
}

HolderReport global_gradient_holder(const GridFunction& u, double beta, const Region& region,
                                    const SeminormOptions& options) {
  require(!u.has_time(), kMod, ErrorCode::InvalidArgument,
          "gradient seminorm works on spatial grids; slice space-time data first");
  const auto& ext = u.extents();
  const std::size_t axes = ext.size();
  HolderReport best;
  best.beta = beta;
  std::vector<std::size_t> idx(axes);
  for (std::size_t a = 0; a < axes; ++a) {
    GridFunction g = GridFunction::spatial(ext, u.h(), u.origin(), u.s());
    for (std::size_t f = 0; f < u.size(); ++f) {
      u.unflatten(f, idx);
      const std::size_t i = idx[a];
      double d;
      if (ext[a] < 2) {
        d = 0.0;
      } else if (i == 0) {
        idx[a] = 1;
        d = (u[u.flat(idx)] - u[f]) / u.h();
      } else if (i + 1 == ext[a]) {
        idx[a] = i - 1;
        d = (u[f] - u[u.flat(idx)]) / u.h();
      } else {
        idx[a] = i + 1;
        const double up = u[u.flat(idx)];
        idx[a] = i - 1;
        d = (up - u[u.flat(idx)]) / (2.0 * u.h());
      }
      g[f] = d;
    }
    const auto r = parabolic_holder_seminorm(g, beta, 0.5, region, options);
    if (a == 0 || r.value > best.value) best = r;
  }
  return best;
}

double predicted_time_exponent(double s, double eps) {
  return std::min(s, 1.0 / s - 1.0 - eps);
}

TimeRegularityReport fit_time_regularity(const GridFunction& u, double s, double eps, double t1,
                                         double t2) {
  require(u.has_time(), kMod, ErrorCode::InvalidArgument, "time regularity needs a space-time grid");
  require(t1 < t2, kMod, ErrorCode::InvalidArgument, "empty time window");
  const std::size_t K = u.time_levels();
  std::size_t k1 = K, k2 = 0;
  for (std::size_t k = 0; k + 1 < K; ++k) {
    const double t = u.time_at(k);
    if (t >= t1 - 1e-12 && t <= t2 + 1e-12) {
      k1 = std::min(k1, k);
      k2 = std::max(k2, k);
    }
  }
  require(k1 < K && k2 >= k1 && k2 - k1 + 1 >= 32, kMod, ErrorCode::InvalidArgument,
          "need at least 32 time steps in the window");
  const std::size_t m = u.slice_size();
  const double dt = u.dt();
  // Forward differences d_t u at levels k1..k2.
  std::vector<std::vector<double>> du;
  for (std::size_t k = k1; k <= k2; ++k) {
    auto a = u.slice(k), b = u.slice(k + 1);
    std::vector<double> d(m);
    for (std::size_t i = 0; i < m; ++i) d[i] = (b[i] - a[i]) / dt;
    du.push_back(std::move(d));
  }
  TimeRegularityReport report;
  report.predicted = predicted_time_exponent(s, eps);
  const std::size_t window = du.size();
  for (std::size_t lag = 1; lag <= window / 4; lag *= 2) {
    double mod = 0.0;
    for (std::size_t k = 0; k + lag < window; ++k)
      for (std::size_t i = 0; i < m; ++i) mod = std::max(mod, std::abs(du[k + lag][i] - du[k][i]));
    if (mod <= 0.0) continue;
    report.lags.push_back(static_cast<double>(lag) * dt);
    report.modulus.push_back(mod);
  }
  require(report.lags.size() >= 2, kMod, ErrorCode::FitFailed,
          "time modulus vanishes; nothing to fit");
  const auto fit = fit_power_law(report.lags, report.modulus);
  report.measured = fit.slope;
  report.r2 = fit.r2;
  return report;
}

}  // namespace fbreg
