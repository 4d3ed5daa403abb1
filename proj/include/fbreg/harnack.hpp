#pragma once

#include <cstddef>
#include <numbers>
#include <vector>

#include "fbreg/discrete_operator.hpp"
#include "fbreg/grid.hpp"
#include "fbreg/kernel.hpp"

namespace fbreg {

/// Two linear solutions vanishing outside the traveling cone
/// Sigma_t = {angle(e, x + omega t e) < theta0}, started at t_start and
/// observed at t = 0.
struct HarnackScenario {
  KernelSpec kernel;
  std::vector<double> e{0.0, 1.0};
  double theta0 = std::numbers::pi / 4;
  double omega = 0.0;
  /// Constant forcing f = forcing on the complement of A.
  double forcing = 0.0;
  std::size_t nodes = 97;  ///< per axis on [-half_width, half_width]^n
  double half_width = 1.0;
  double t_start = -1.0;
  std::size_t steps = 64;
  /// Probe on the lateral boundary at this distance from the apex; anchor
  /// on the axis at anchor_distance.
  double probe_distance = 0.5;
  double anchor_distance = 0.5;
  double r_max = 0.5;
  std::size_t radii = 4;  ///< dyadic radii r_max, r_max / 2, ...
  double floor = 1e-6;    ///< quotient only where v2 >= floor * anchor
  /// Initial data before restriction to Sigma_{t_start}; the default pair
  /// is used when empty.
  SpaceFunction initial1;
  SpaceFunction initial2;
};

struct HarnackReport {
  std::vector<double> radii;
  std::vector<double> osc;
  std::vector<std::size_t> excluded;  ///< nodes of A^c cap Q_r below the floor
  double alpha = 0.0;  ///< fitted decay exponent of osc against r
  double r2 = 0.0;
  bool monotone = true;  ///< osc nonincreasing as r shrinks (1e-9 slack)
  bool exact = false;    ///< all oscillations below 1e-9 (proportional data)
  double min_ratio12 = 0.0;  ///< min v1/v2 over Q_1 cap A^c
  double min_ratio21 = 0.0;
  bool positive = true;  ///< v_i > 0 on Q_1 cap A^c at the final time
  double anchor1 = 0.0;
  double anchor2 = 0.0;
  std::vector<double> probe;
  GridFunction v1;
  GridFunction v2;
};

/// Rejects s < 1/2 and dimensions other than 1 and 2.
void validate_scenario(const HarnackScenario& scenario);

HarnackReport run_harnack(const HarnackScenario& scenario);

}  // namespace fbreg
