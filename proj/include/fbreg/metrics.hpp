#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "fbreg/grid.hpp"

namespace fbreg {

/// Least-squares fit of log y = slope log x + intercept.
struct PowerFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double residual = 0.0;  ///< rms of the log residuals
};

PowerFit fit_power_law(std::span<const double> x, std::span<const double> y);

struct OrderEstimate {
  double order = 0.0;
  double residual = 0.0;
  bool monotone = true;  ///< values decrease with the spacing
};

/// Observed order of values ~ C h^p; needs at least three levels.
OrderEstimate convergence_order(std::span<const double> values, std::span<const double> spacings);

/// Inclusive index ranges per grid axis (time first for space-time grids).
/// An empty region means the whole grid.
struct Region {
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
};

struct HolderReport {
  enum class Mode { Spatial, Parabolic };
  double beta = 0.0;
  double value = 0.0;
  std::size_t first = 0;  ///< flat indices of the arg-max pair
  std::size_t second = 0;
  Mode mode = Mode::Spatial;
  bool exact = true;
  std::uint64_t pairs_examined = 0;
  std::uint64_t seed = 0;
};

struct SeminormOptions {
  /// Exact all-pairs search up to this many nodes.
  std::size_t exact_limit = 10000;
  std::uint64_t pair_budget = 2000000;
  std::uint64_t seed = 1;
  bool force_sampled = false;
};

/// sup |w(p) - w(q)| / (|x - y|^beta + |t - tau|^{beta / 2s}) over node
/// pairs of the region (the time term is absent on spatial grids).
HolderReport parabolic_holder_seminorm(const GridFunction& w, double beta, double s,
                                       const Region& region = {},
                                       const SeminormOptions& options = {});

/// Centered-difference gradient (one-sided at faces) followed by the
/// spatial C^beta seminorm, maximized over gradient components.
HolderReport global_gradient_holder(const GridFunction& u, double beta, const Region& region = {},
                                    const SeminormOptions& options = {});

struct TimeRegularityReport {
  double measured = 0.0;
  double predicted = 0.0;  ///< min{s, 1/s - 1 - eps}
  double r2 = 0.0;
  std::vector<double> lags;
  std::vector<double> modulus;
};

/// Time modulus of continuity of d_t u on [t1, t2], fitted in log-log.
TimeRegularityReport fit_time_regularity(const GridFunction& u, double s, double eps, double t1,
                                         double t2);

/// The golden-ratio exponent min{s, 1/s - 1 - eps}.
double predicted_time_exponent(double s, double eps);

}  // namespace fbreg
