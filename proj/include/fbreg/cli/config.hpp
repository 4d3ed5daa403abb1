#pragma once

#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "fbreg/error.hpp"

namespace fbreg::cli {

enum class Scenario {
  SolveElliptic,
  SolveParabolic,
  FitExponent,
  Blowup,
  VerifyBarrier,
  Gamma,
  Harnack,
  Regularity,
};

std::string_view to_string(Scenario scenario);

struct KernelConfig {
  double s = 0.5;
  int dim = 1;
  double lambda = 1.0;
  double Lambda = 1.0;
  std::string density = "isotropic";  ///< isotropic | axial | two-sided
  double value = 1.0;                 ///< isotropic level
  double low = 1.0;                   ///< axial
  double high = 1.0;
  int axis = 0;
  double plus = 1.0;                  ///< two-sided
  double minus = 1.0;
  std::vector<double> drift;
};

/// Box [-half_width, half_width]^dim with `nodes` per axis.
struct GridConfig {
  std::size_t nodes = 129;
  double half_width = 2.0;
  std::size_t time_steps = 0;
  double horizon = 0.0;
};

struct ObstacleConfig {
  std::string expr = "pos(1 - x^2)^2";
  double growth = 0.0;  ///< |phi| <= scale (1 + |x|)^growth outside the box
  double scale = 1.0;
};

struct SolverConfig {
  double tol = 1e-9;
  std::size_t max_sweeps = 200000;
  bool coarse_start = true;
};

struct AnalysisConfig {
  double gap_tol = 1e-9;
  double beta_guess = 1.5;
  double r_min = 0.0;  ///< 0 picks 4h
  double r_max = 0.25;
  double normal_radius = 0.15;
  std::size_t probes = 10;
  std::size_t blowup_radii = 3;
};

struct GammaConfig {
  std::vector<double> e{1.0};
  std::vector<double> v{0.0, 0.5, 1.0, 2.0};
};

struct BarrierConfig {
  std::string kind = "cone-super";  ///< cone-super | traveling-cone | exp-cusp | power
  std::vector<double> e{0.0, 1.0};
  double eta = 1.0;
  /// Cone exponent (0 searches the ladder) or cusp exponent (0 picks 1/4).
  double theta = 0.0;
  double omega = 1.0;
  double theta0 = std::numbers::pi / 3;
  double gamma = 0.0;  ///< 0 searches by halving from gamma_start
  double gamma_start = 0.5;
  double v = 1.0;
  bool parabolic = false;
  double eps = 0.2;
  std::vector<double> spacings{0.0625, 0.03125};
  double clearance = 0.0;  ///< 0 picks 2 max(spacings)
  double r_min = 0.1;      ///< inner radius of the cone samples
  std::size_t radial = 6;
  std::size_t angular = 7;
  std::size_t per_axis = 9;
  std::size_t times = 3;
  double tail_tol = 1e-7;
};

struct HarnackConfig {
  std::vector<double> e{0.0, 1.0};
  double theta0 = std::numbers::pi / 4;
  double omega = 0.0;
  double forcing = 0.0;
  std::size_t nodes = 97;
  double half_width = 1.0;
  double t_start = -1.0;
  std::size_t steps = 64;
  double probe_distance = 0.5;
  double anchor_distance = 0.5;
  double r_max = 0.5;
  std::size_t radii = 4;
  double floor = 1e-6;
};

struct RegularityConfig {
  double eps = 0.05;
  double t1 = 0.0;  ///< 0 picks horizon / 4
  double t2 = 0.0;  ///< 0 picks horizon
  double beta = 0.0;  ///< gradient Hölder exponent; 0 picks s
  std::uint64_t pair_budget = 2000000;
};

struct ExperimentConfig {
  Scenario scenario = Scenario::SolveElliptic;
  std::uint64_t seed = 1;
  KernelConfig kernel;
  GridConfig grid;
  ObstacleConfig obstacle;
  SolverConfig solver;
  AnalysisConfig analysis;
  GammaConfig gamma;
  BarrierConfig barrier;
  HarnackConfig harnack;
  RegularityConfig regularity;
};

/// Parse failure: `code` is one of E_SYNTAX, E_UNKNOWN_KEY, E_TYPE, E_RANGE,
/// E_MISSING, E_DRIFT_S; `line` is 1-based (0 when no line applies).
class ConfigError : public Error {
 public:
  ConfigError(std::string code, std::size_t line, const std::string& message);
  const std::string& code_name() const noexcept { return code_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string code_;
  std::size_t line_;
};

/// Sections and keys used by a scenario, in serialization order.
std::vector<std::string> sections_for(Scenario scenario);

/// key = value lines under [section] headers; '#' and ';' start comments.
/// Missing keys take their defaults; keys in sections the scenario does
/// not read are rejected as unknown.
ExperimentConfig parse_config(std::string_view text);

/// Canonical text: every key of the scenario's sections in schema order,
/// defaults included. parse_config(serialize_config(c)) reproduces c.
std::string serialize_config(const ExperimentConfig& config);

/// Lowercase hex SHA-256 of serialize_config(config).
std::string config_hash(const ExperimentConfig& config);

/// Reads a file and parses it; E_IO when the file cannot be read.
ExperimentConfig load_config(const std::string& path);

}  // namespace fbreg::cli
