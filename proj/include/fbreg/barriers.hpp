#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fbreg/discrete_operator.hpp"
#include "fbreg/grid.hpp"
#include "fbreg/kernel.hpp"

namespace fbreg {

/// Claimed inequality for the defect D = L Phi (elliptic barriers) or
/// D = (d_t - L) Phi (parabolic ones).
struct Sense {
  enum class Relation {
    LessEqual,     ///< D <= bound
    GreaterEqual,  ///< D >= bound
    BoundedAbove,  ///< D <= C for some grid-stable C
    BoundedBelow,  ///< D >= -C for some grid-stable C
  };
  Relation relation = Relation::LessEqual;
  double bound = 0.0;
  /// For bound = 0: require D < 0 (resp. > 0) strictly.
  bool strict = false;

  static Sense at_most(double bound, bool strict = false);
  static Sense at_least(double bound, bool strict = false);
  static Sense bounded_above();
  static Sense bounded_below();
};

struct Barrier {
  enum class Kind { ExpCusp, ConeSuper, TravelingConeSub, PowerRegularized, HeatTailSuper };

  Kind kind = Kind::ExpCusp;
  std::string name;
  std::map<std::string, double> params;
  int dim = 1;
  bool parabolic = false;
  SpaceTimeFunction value;
  /// |value(x, t)| <= scale (1 + |x|)^growth, for the far field.
  double growth = 0.0;
  double scale = 1.0;
  std::function<bool(std::span<const double>, double)> valid;
  /// Distance from (x, t) to the set where the barrier is not smooth.
  SpaceTimeFunction singular_distance;
  Sense claimed;

  double operator()(std::span<const double> x, double t = 0.0) const { return value(x, t); }
};

std::string to_string(Barrier::Kind kind);

/// exp(-|x.e + v t|^{1 - theta}); parabolic when `parabolic` is set (s = 1/2).
Barrier exp_cusp_barrier(std::span<const double> e, double theta, double v = 0.0,
                         bool parabolic = false);

/// (x.e + eta |x| (1 - (x.e / |x|)^2))_+^theta on the cone C_eta intersected with B_2.
Barrier cone_supersolution(std::span<const double> e, double eta, double theta);

/// True when x lies in C_eta.
bool in_cone(std::span<const double> e, double eta, std::span<const double> x);

/// The 1-homogeneous profile psi on Sigma_0 = {angle(e, x) <= theta0}:
/// |y| sin(theta0 - m(alpha)) with m(alpha) = alpha on the collar
/// alpha >= 0.9 theta0 and a C^2 even blend inside. Zero outside Sigma_0.
double cone_profile(std::span<const double> e, double theta0, std::span<const double> y);

/// psi(x + omega t e)_+^{2s - gamma}, claimed (d_t - L) phi <= -c on B_1 x (-1, 0).
Barrier traveling_cone_subsolution(std::span<const double> e, double omega, double theta0,
                                   double gamma, double s);

/// Moving domain {x > b(t)} in one space dimension.
struct GraphDomain {
  std::function<double(double)> b;
  std::function<double(double)> db;  ///< b'(t)
};

struct PowerBarriers {
  Barrier phi1;  ///< (d_t - L) <= -1
  Barrier phi2;  ///< (d_t - L) >= 1
  double gamma0 = 0.0;
  double eps = 0.0;
  double M = 1.0;
  /// rho(x, t) = (x - b(t)) / sqrt(1 + b'(t)^2); comparable to the distance.
  SpaceTimeFunction rho;
  /// Gamma-bar(x, t) = gamma_critical at the normal of the boundary point at time t.
  SpaceTimeFunction gamma_bar;
};

/// Phi_1 = M phi + rho^{gamma0 + eps} and Phi_2 = M phi - rho^{gamma0 + eps}
/// with phi = rho^{Gamma-bar}; gamma0 is taken at time t_base.
PowerBarriers power_regularized_barriers(const KernelSpec& kernel, const GraphDomain& domain,
                                         double t_base, double eps, double M);

struct SpaceTimeSample {
  std::vector<double> x;
  double t = 0.0;
};

struct VerificationLevel {
  double h = 0.0;
  /// Worst defect: max D for upper senses, min D for lower ones.
  double worst = 0.0;
  SpaceTimeSample worst_at;
  bool pass = false;
};

struct VerificationReport {
  std::string barrier;
  std::vector<VerificationLevel> levels;
  double order = 0.0;  ///< decay rate of successive worst-defect changes
  bool stable = false;  ///< last two levels within 20%
  bool pass = false;
  /// Observed constant: -worst for D <= -c, worst for D >= c, |worst| for bounded senses.
  double constant = 0.0;
  std::map<std::string, double> searched;
};

struct VerifyOptions {
  double cube_radius = 0.5;
  double tail_tol = 1e-7;
  /// Time step of the centered difference for d_t.
  double time_step = 1e-6;
  double stability = 0.2;
};

/// Defect of the barrier at one point with the stencil of spacing h.
double barrier_defect(const KernelSpec& kernel, const Barrier& barrier, const Stencil& stencil,
                      const SpaceTimeSample& p, const VerifyOptions& options = {});

/// Evaluates the defect on the samples for every spacing and checks the
/// claimed sense. Samples must lie in the validity region and at least
/// 2 max(h) from the singular set.
VerificationReport verify_inequality(const KernelSpec& kernel, const Barrier& barrier,
                                     std::span<const SpaceTimeSample> samples, const Sense& sense,
                                     std::span<const double> spacings,
                                     const VerifyOptions& options = {});

/// Deterministic samples: C_eta cap B_2 minus B_{r_min} (2D polar lattice
/// or 1D segment), at least `clearance` from the cone boundary.
std::vector<SpaceTimeSample> cone_samples(std::span<const double> e, double eta, double r_min,
                                          double clearance, std::size_t radial,
                                          std::size_t angular);

/// Deterministic samples of B_1 x (-1, 0) kept `clearance` away from the
/// barrier's singular set.
std::vector<SpaceTimeSample> cylinder_samples(const Barrier& barrier, double clearance,
                                              std::size_t per_axis, std::size_t times);

struct SearchResult {
  double value = 0.0;
  bool found = false;
  VerificationReport report;
  std::vector<std::pair<double, double>> trail;  ///< (parameter, worst defect)
};

/// theta over the halving ladder {0.4, 0.2, 0.1, 0.05}; first passing value.
SearchResult search_cone_theta(const KernelSpec& kernel, std::span<const double> e, double eta,
                               std::span<const SpaceTimeSample> samples,
                               std::span<const double> spacings, const VerifyOptions& options = {});

/// gamma halved from gamma_start until (d_t - L) phi <= -c holds.
SearchResult search_traveling_gamma(const KernelSpec& kernel, std::span<const double> e,
                                    double omega, double theta0, double gamma_start,
                                    double clearance, std::size_t per_axis, std::size_t times,
                                    std::span<const double> spacings,
                                    const VerifyOptions& options = {});

struct PowerSearch {
  double M = 0.0;
  double delta0 = 0.0;
  double sandwich_low = 0.0;   ///< min Phi_i / d^{Gamma-bar} over Q_1 samples
  double sandwich_high = 0.0;  ///< max Phi_i / d^{Gamma-bar}
  VerificationReport phi1;
  VerificationReport phi2;
  bool found = false;
};

/// Doubles M from 1 until both barriers sit between d^{Gamma-bar}/C and
/// C d^{Gamma-bar} on Q_1, and halves delta0 from 1/2 until both defect
/// signs hold on samples of Q_{delta0} inside the domain.
PowerSearch search_power_barriers(const KernelSpec& kernel, const GraphDomain& domain,
                                  double t_base, double eps, std::span<const double> spacings,
                                  const VerifyOptions& options = {});

struct HeatTailReport {
  GridFunction s1;
  double upper = 0.0;  ///< max over B_{R/4} x (-1, 0) of S^1 R^{gamma0}
  double lower = 0.0;  ///< min over |x| >= R of S^1 / |x|^{2s - gamma0}
};

/// S^1 = h + R^{-gamma0} (t + 1), h the caloric extension of
/// |x|^{2s - gamma0} 1_{|x| > R/2} from t = -1, on a 1D box [-4R, 4R].
HeatTailReport heat_tail_supersolution(const KernelSpec& kernel, double R, double gamma0,
                                       std::size_t nodes, std::size_t steps);

}  // namespace fbreg
