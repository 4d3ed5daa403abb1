#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fbreg/grid.hpp"
#include "fbreg/kernel.hpp"
#include "fbreg/profiles.hpp"

namespace fbreg {

/// Nodes with u - phi <= gap_tol (1 + |phi|). u and phi share the grid
/// shape; phi may also be a single spatial level broadcast over time.
std::vector<char> contact_set(const GridFunction& u, const GridFunction& phi, double gap_tol);

struct BoundaryPoint {
  std::vector<double> position;  ///< grid axis order (time first on space-time grids)
  std::vector<double> inward;    ///< spatial unit vector into {w > 0} along the crossed edge
};

/// Sub-grid crossings on spatial grid edges whose endpoints differ in the
/// mask. w^{1/beta_guess} is treated as piecewise linear: the crossing is
/// extrapolated from the two nearest free nodes when both exist, and
/// interpolated along the edge otherwise. beta_guess = 1 is plain linear
/// interpolation of w.
std::vector<BoundaryPoint> extract_boundary(const std::vector<char>& mask, const GridFunction& w,
                                            double beta_guess = 1.5);

struct NormalEstimate {
  bool resolved = false;
  /// Unit normal in grid axis order: (nu_t, nu_x) on space-time grids, nu_x otherwise.
  std::vector<double> nu;
  std::vector<double> nu_x;  ///< spatial part normalized to unit length
  double speed = 0.0;        ///< nu_t / |nu_x|, +inf if |nu_x| < 1e-8
  std::size_t points = 0;
  std::string reason;
};

/// Total-least-squares hyperplane through the boundary points within
/// `radius` of `center` (grid axis order), oriented into {w > 0}.
NormalEstimate estimate_normal_speed(std::span<const BoundaryPoint> points,
                                     std::span<const double> center, double radius);

struct GrowthFit {
  double beta = 0.0;
  double r2 = 0.0;
  std::vector<double> radii;
  std::vector<double> sups;
  bool narrow = false;  ///< radii span less than one decade
};

/// Geometric radii with ratio sqrt 2 from r_min up to at most r_max.
std::vector<double> radii_ladder(double r_min, double r_max);

/// Slope of log sup_{Q_r(point)} w against log r over n_radii geometric
/// radii; parabolic cylinders on space-time grids.
GrowthFit fit_growth_exponent(const GridFunction& w, std::span<const double> point, double r_min,
                              double r_max, std::size_t n_radii);
GrowthFit fit_growth_exponent(const GridFunction& w, std::span<const double> point,
                              std::span<const double> radii);

struct ClassifyThresholds {
  double delta = 0.12;    ///< |beta - (1 + gamma)| for Regular
  double eps_c = 0.2;     ///< Degenerate when beta >= 2 - eps_c
  double min_r2 = 0.98;
};

struct Classification {
  enum class Kind { Regular, Degenerate, Unresolved };
  Kind kind = Kind::Unresolved;
  double gamma_pred = 0.0;
};

std::string to_string(Classification::Kind kind);

/// gamma_pred is gamma_critical(kernel, e, v0) when s = 1/2 and s otherwise.
Classification classify_point(double beta, double v0, const KernelSpec& kernel,
                              std::span<const double> e, const ClassifyThresholds& thresholds = {},
                              double r2 = 1.0);

enum class NormMode { Gradient, Sup };

/// w(p + r x, t0 + r^{2s} t) / D on the unit cylinder [-1,1]^n x [-1,1]
/// (time axis only for space-time input), `nodes` per axis. D is
/// r sup|grad w| + r^{2s} sup|d_t w| over Q_r (Gradient) or sup|w| (Sup).
GridFunction blow_up_rescale(const GridFunction& w, std::span<const double> point, double r,
                             NormMode mode = NormMode::Gradient, std::size_t nodes = 33);

struct ProfileFit {
  Profile1D profile;
  double lip_distance = 0.0;
  double rms = 0.0;
  bool resolved = false;
  bool one_dimensional = false;  ///< lip_distance <= 0.2
  std::size_t restarts = 0;
};

struct ProfileGuess {
  std::vector<double> e;
  double v = 0.0;
  double kappa = 0.0;  ///< 0: matched to the data's sup
};

/// Nonlinear least squares over (kappa, e, v) with gamma tied to (e, v)
/// as in make_profile, from up to 8 perturbed starts. lip_distance is the
/// sup over Q_1 nodes of the value and difference-quotient deviations.
ProfileFit fit_1d_profile(const GridFunction& rescaled, const KernelSpec& kernel,
                          const ProfileGuess& guess = {});

/// Discrete Lipschitz distance between grid data and a profile.
double lip_distance(const GridFunction& data, const Profile1D& profile);

}  // namespace fbreg
