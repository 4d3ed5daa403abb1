#include "fbreg/cli/config.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

#include "fbreg/cli/expression.hpp"

namespace fbreg::cli {

namespace {

constexpr std::array<std::pair<Scenario, std::string_view>, 8> kScenarioNames{{
    {Scenario::SolveElliptic, "solve-elliptic"},
    {Scenario::SolveParabolic, "solve-parabolic"},
    {Scenario::FitExponent, "fit-exponent"},
    {Scenario::Blowup, "blowup"},
    {Scenario::VerifyBarrier, "verify-barrier"},
    {Scenario::Gamma, "gamma"},
    {Scenario::Harnack, "harnack"},
    {Scenario::Regularity, "regularity"},
}};

std::optional<Scenario> scenario_from(std::string_view name) {
  for (const auto& [sc, n] : kScenarioNames)
    if (n == name) return sc;
  return std::nullopt;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Value codecs. Parsing returns nullopt on a type mismatch.

std::optional<double> parse_real(std::string_view raw) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
  if (ec != std::errc() || ptr != raw.data() + raw.size() || !std::isfinite(v))
    return std::nullopt;
  return v;
}

template <class Int>
std::optional<Int> parse_int(std::string_view raw) {
  Int v{};
  const auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
  if (ec != std::errc() || ptr != raw.data() + raw.size()) return std::nullopt;
  return v;
}

std::string format_real(double v) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

template <class T>
std::optional<T> decode(std::string_view raw);

template <>
std::optional<double> decode<double>(std::string_view raw) {
  return parse_real(raw);
}
template <>
std::optional<int> decode<int>(std::string_view raw) {
  return parse_int<int>(raw);
}
template <>
std::optional<std::size_t> decode<std::size_t>(std::string_view raw) {
  return parse_int<std::size_t>(raw);
}
template <>
std::optional<bool> decode<bool>(std::string_view raw) {
  if (raw == "true") return true;
  if (raw == "false") return false;
  return std::nullopt;
}
template <>
std::optional<std::string> decode<std::string>(std::string_view raw) {
  if (raw.empty()) return std::nullopt;
  return std::string(raw);
}
template <>
std::optional<std::vector<double>> decode<std::vector<double>>(std::string_view raw) {
  std::vector<double> out;
  if (raw.empty()) return out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = raw.find(',', start);
    const auto item = trim(raw.substr(start, comma == std::string_view::npos ? raw.npos
                                                                              : comma - start));
    const auto v = parse_real(item);
    if (!v) return std::nullopt;
    out.push_back(*v);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string encode(double v) { return format_real(v); }
std::string encode(int v) { return std::to_string(v); }
std::string encode(std::size_t v) { return std::to_string(v); }
std::string encode(bool v) { return v ? "true" : "false"; }
std::string encode(const std::string& v) { return v; }
std::string encode(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_real(v[i]);
  }
  return out;
}

constexpr std::string_view type_name(const double*) { return "a real number"; }
constexpr std::string_view type_name(const int*) { return "an integer"; }
constexpr std::string_view type_name(const std::size_t*) { return "a nonnegative integer"; }
constexpr std::string_view type_name(const bool*) { return "true or false"; }
constexpr std::string_view type_name(const std::string*) { return "a nonempty string"; }
constexpr std::string_view type_name(const std::vector<double>*) {
  return "a comma-separated list of reals";
}

struct Field {
  std::string_view section;
  std::string_view key;
  std::function<void(ExperimentConfig&, std::string_view, std::size_t)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <class T>
using Check = std::function<std::string(const T&)>;

template <class Sec, class T>
Field field(std::string_view section, std::string_view key, Sec ExperimentConfig::*sec,
            T Sec::*mem, Check<T> check = {}) {
  Field f{section, key, {}, {}};
  f.set = [=](ExperimentConfig& c, std::string_view raw, std::size_t line) {
    const auto v = decode<T>(raw);
    if (!v)
      throw ConfigError("E_TYPE", line,
                        std::string(section) + "." + std::string(key) + " must be " +
                            std::string(type_name(static_cast<const T*>(nullptr))));
    if (check) {
      const std::string msg = check(*v);
      if (!msg.empty())
        throw ConfigError("E_RANGE", line,
                          std::string(section) + "." + std::string(key) + " " + msg);
    }
    (c.*sec).*mem = *v;
  };
  f.get = [=](const ExperimentConfig& c) { return encode((c.*sec).*mem); };
  return f;
}

Check<double> positive() {
  return [](const double& v) { return v > 0.0 ? "" : "must be positive"; };
}
Check<double> nonnegative() {
  return [](const double& v) { return v >= 0.0 ? "" : "must be nonnegative"; };
}
Check<std::size_t> at_least(std::size_t lo) {
  return [lo](const std::size_t& v) {
    return v >= lo ? std::string() : "must be at least " + std::to_string(lo);
  };
}
Check<std::string> one_of(std::vector<std::string> choices) {
  return [choices](const std::string& v) {
    if (std::find(choices.begin(), choices.end(), v) != choices.end()) return std::string();
    std::string msg = "must be one of";
    for (const auto& c : choices) msg += " " + c;
    return msg;
  };
}
Check<std::vector<double>> nonempty_list() {
  return [](const std::vector<double>& v) { return v.empty() ? "must not be empty" : ""; };
}

const std::vector<Field>& schema() {
  using C = ExperimentConfig;
  static const std::vector<Field> fields = [] {
    std::vector<Field> f;
    f.push_back(field("kernel", "s", &C::kernel, &KernelConfig::s, Check<double>([](const double& s) {
                        return s > 0.0 && s < 1.0 ? "" : "must lie in (0, 1)";
                      })));
    f.push_back(field("kernel", "dim", &C::kernel, &KernelConfig::dim, Check<int>([](const int& d) {
                        return d == 1 || d == 2 ? "" : "must be 1 or 2";
                      })));
    f.push_back(field("kernel", "lambda", &C::kernel, &KernelConfig::lambda, positive()));
    f.push_back(field("kernel", "Lambda", &C::kernel, &KernelConfig::Lambda, positive()));
    f.push_back(field("kernel", "density", &C::kernel, &KernelConfig::density,
                      one_of({"isotropic", "axial", "two-sided"})));
    f.push_back(field("kernel", "value", &C::kernel, &KernelConfig::value, positive()));
    f.push_back(field("kernel", "low", &C::kernel, &KernelConfig::low, positive()));
    f.push_back(field("kernel", "high", &C::kernel, &KernelConfig::high, positive()));
    f.push_back(field("kernel", "axis", &C::kernel, &KernelConfig::axis, Check<int>([](const int& a) {
                        return a == 0 || a == 1 ? "" : "must be 0 or 1";
                      })));
    f.push_back(field("kernel", "plus", &C::kernel, &KernelConfig::plus, positive()));
    f.push_back(field("kernel", "minus", &C::kernel, &KernelConfig::minus, positive()));
    f.push_back(field("kernel", "drift", &C::kernel, &KernelConfig::drift));

    f.push_back(field("grid", "nodes", &C::grid, &GridConfig::nodes, at_least(9)));
    f.push_back(field("grid", "half_width", &C::grid, &GridConfig::half_width, positive()));
    f.push_back(field("grid", "time_steps", &C::grid, &GridConfig::time_steps));
    f.push_back(field("grid", "horizon", &C::grid, &GridConfig::horizon, nonnegative()));

    f.push_back(field("obstacle", "expr", &C::obstacle, &ObstacleConfig::expr,
                      Check<std::string>([](const std::string& text) {
                        Expression::parse(text);
                        return std::string();
                      })));
    f.push_back(field("obstacle", "growth", &C::obstacle, &ObstacleConfig::growth, nonnegative()));
    f.push_back(field("obstacle", "scale", &C::obstacle, &ObstacleConfig::scale, positive()));

    f.push_back(field("solver", "tol", &C::solver, &SolverConfig::tol, positive()));
    f.push_back(field("solver", "max_sweeps", &C::solver, &SolverConfig::max_sweeps, at_least(1)));
    f.push_back(field("solver", "coarse_start", &C::solver, &SolverConfig::coarse_start));

    f.push_back(field("analysis", "gap_tol", &C::analysis, &AnalysisConfig::gap_tol, positive()));
    f.push_back(
        field("analysis", "beta_guess", &C::analysis, &AnalysisConfig::beta_guess, positive()));
    f.push_back(field("analysis", "r_min", &C::analysis, &AnalysisConfig::r_min, nonnegative()));
    f.push_back(field("analysis", "r_max", &C::analysis, &AnalysisConfig::r_max, positive()));
    f.push_back(field("analysis", "normal_radius", &C::analysis, &AnalysisConfig::normal_radius,
                      positive()));
    f.push_back(field("analysis", "probes", &C::analysis, &AnalysisConfig::probes, at_least(1)));
    f.push_back(field("analysis", "blowup_radii", &C::analysis, &AnalysisConfig::blowup_radii,
                      at_least(1)));

    f.push_back(field("gamma", "e", &C::gamma, &GammaConfig::e, nonempty_list()));
    f.push_back(field("gamma", "v", &C::gamma, &GammaConfig::v, nonempty_list()));

    f.push_back(field("barrier", "kind", &C::barrier, &BarrierConfig::kind,
                      one_of({"cone-super", "traveling-cone", "exp-cusp", "power"})));
    f.push_back(field("barrier", "e", &C::barrier, &BarrierConfig::e, nonempty_list()));
    f.push_back(field("barrier", "eta", &C::barrier, &BarrierConfig::eta, positive()));
    f.push_back(field("barrier", "theta", &C::barrier, &BarrierConfig::theta, nonnegative()));
    f.push_back(field("barrier", "omega", &C::barrier, &BarrierConfig::omega, nonnegative()));
    f.push_back(field("barrier", "theta0", &C::barrier, &BarrierConfig::theta0, positive()));
    f.push_back(field("barrier", "gamma", &C::barrier, &BarrierConfig::gamma, nonnegative()));
    f.push_back(
        field("barrier", "gamma_start", &C::barrier, &BarrierConfig::gamma_start, positive()));
    f.push_back(field("barrier", "v", &C::barrier, &BarrierConfig::v));
    f.push_back(field("barrier", "parabolic", &C::barrier, &BarrierConfig::parabolic));
    f.push_back(field("barrier", "eps", &C::barrier, &BarrierConfig::eps, positive()));
    f.push_back(field("barrier", "spacings", &C::barrier, &BarrierConfig::spacings,
                      Check<std::vector<double>>([](const std::vector<double>& v) {
                        if (v.empty()) return "must not be empty";
                        for (double h : v)
                          if (!(h > 0.0)) return "must be positive";
                        return "";
                      })));
    f.push_back(field("barrier", "clearance", &C::barrier, &BarrierConfig::clearance,
                      nonnegative()));
    f.push_back(field("barrier", "r_min", &C::barrier, &BarrierConfig::r_min, positive()));
    f.push_back(field("barrier", "radial", &C::barrier, &BarrierConfig::radial, at_least(1)));
    f.push_back(field("barrier", "angular", &C::barrier, &BarrierConfig::angular, at_least(1)));
    f.push_back(field("barrier", "per_axis", &C::barrier, &BarrierConfig::per_axis, at_least(1)));
    f.push_back(field("barrier", "times", &C::barrier, &BarrierConfig::times, at_least(1)));
    f.push_back(field("barrier", "tail_tol", &C::barrier, &BarrierConfig::tail_tol, positive()));

    f.push_back(field("harnack", "e", &C::harnack, &HarnackConfig::e, nonempty_list()));
    f.push_back(field("harnack", "theta0", &C::harnack, &HarnackConfig::theta0, positive()));
    f.push_back(field("harnack", "omega", &C::harnack, &HarnackConfig::omega, nonnegative()));
    f.push_back(field("harnack", "forcing", &C::harnack, &HarnackConfig::forcing));
    f.push_back(field("harnack", "nodes", &C::harnack, &HarnackConfig::nodes, at_least(9)));
    f.push_back(
        field("harnack", "half_width", &C::harnack, &HarnackConfig::half_width, positive()));
    f.push_back(field("harnack", "t_start", &C::harnack, &HarnackConfig::t_start,
                      Check<double>([](const double& t) { return t < 0.0 ? "" : "must be negative"; })));
    f.push_back(field("harnack", "steps", &C::harnack, &HarnackConfig::steps, at_least(1)));
    f.push_back(field("harnack", "probe_distance", &C::harnack, &HarnackConfig::probe_distance,
                      positive()));
    f.push_back(field("harnack", "anchor_distance", &C::harnack, &HarnackConfig::anchor_distance,
                      positive()));
    f.push_back(field("harnack", "r_max", &C::harnack, &HarnackConfig::r_max, positive()));
    f.push_back(field("harnack", "radii", &C::harnack, &HarnackConfig::radii, at_least(2)));
    f.push_back(field("harnack", "floor", &C::harnack, &HarnackConfig::floor, positive()));

    f.push_back(field("regularity", "eps", &C::regularity, &RegularityConfig::eps, nonnegative()));
    f.push_back(field("regularity", "t1", &C::regularity, &RegularityConfig::t1, nonnegative()));
    f.push_back(field("regularity", "t2", &C::regularity, &RegularityConfig::t2, nonnegative()));
    f.push_back(field("regularity", "beta", &C::regularity, &RegularityConfig::beta,
                      Check<double>([](const double& b) {
                        return b >= 0.0 && b < 1.0 ? "" : "must lie in [0, 1)";
                      })));
    f.push_back(field("regularity", "pair_budget", &C::regularity, &RegularityConfig::pair_budget,
                      Check<std::uint64_t>([](const std::uint64_t& n) {
                        return n >= 1 ? "" : "must be at least 1";
                      })));
    return f;
  }();
  return fields;
}

const Field* find_field(std::string_view section, std::string_view key) {
  for (const auto& f : schema())
    if (f.section == section && f.key == key) return &f;
  return nullptr;
}

bool is_section(std::string_view name) {
  if (name == "run") return true;
  for (const auto& f : schema())
    if (f.section == name) return true;
  return false;
}

struct Entry {
  std::string section;
  std::string key;
  std::string value;
  std::size_t line = 0;
};

void check_dimension(const std::vector<double>& v, int dim, std::string_view name,
                     std::size_t line) {
  if (v.size() != static_cast<std::size_t>(dim))
    throw ConfigError("E_RANGE", line,
                      std::string(name) + " needs " + std::to_string(dim) + " components");
}

}  // namespace

ConfigError::ConfigError(std::string code, std::size_t line, const std::string& message)
    : Error(Module::Cli, code == "E_DRIFT_S" ? ErrorCode::DriftOrder : ErrorCode::Config,
            (line ? "line " + std::to_string(line) + ": " : std::string()) + code + ": " +
                message),
      code_(std::move(code)),
      line_(line) {}

std::string_view to_string(Scenario scenario) {
  for (const auto& [sc, n] : kScenarioNames)
    if (sc == scenario) return n;
  return "unknown";
}

std::vector<std::string> sections_for(Scenario scenario) {
  std::vector<std::string> out{"run", "kernel"};
  switch (scenario) {
    case Scenario::SolveElliptic:
    case Scenario::SolveParabolic:
      out.insert(out.end(), {"grid", "obstacle", "solver"});
      break;
    case Scenario::FitExponent:
    case Scenario::Blowup:
      out.insert(out.end(), {"grid", "obstacle", "solver", "analysis"});
      break;
    case Scenario::Regularity:
      out.insert(out.end(), {"grid", "obstacle", "solver", "regularity"});
      break;
    case Scenario::VerifyBarrier: out.push_back("barrier"); break;
    case Scenario::Gamma: out.push_back("gamma"); break;
    case Scenario::Harnack: out.push_back("harnack"); break;
  }
  return out;
}

ExperimentConfig parse_config(std::string_view text) {
  std::vector<Entry> entries;
  std::string section;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty() || line.front() == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("E_SYNTAX", line_no, "unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (!is_section(section))
        throw ConfigError("E_UNKNOWN_KEY", line_no, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("E_SYNTAX", line_no, "expected key = value");
    if (section.empty()) throw ConfigError("E_SYNTAX", line_no, "key outside any section");
    Entry e{section, std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))),
            line_no};
    if (e.key.empty()) throw ConfigError("E_SYNTAX", line_no, "missing key name");
    for (const auto& prev : entries)
      if (prev.section == e.section && prev.key == e.key)
        throw ConfigError("E_SYNTAX", line_no,
                          "duplicate key " + e.section + "." + e.key + " (first on line " +
                              std::to_string(prev.line) + ")");
    entries.push_back(std::move(e));
  }

  ExperimentConfig cfg;
  const Entry* scenario_entry = nullptr;
  for (const auto& e : entries) {
    if (e.section != "run") continue;
    if (e.key == "scenario") {
      const auto sc = scenario_from(e.value);
      if (!sc) throw ConfigError("E_RANGE", e.line, "unknown scenario '" + e.value + "'");
      cfg.scenario = *sc;
      scenario_entry = &e;
    } else if (e.key == "seed") {
      const auto v = parse_int<std::uint64_t>(e.value);
      if (!v) throw ConfigError("E_TYPE", e.line, "run.seed must be an unsigned 64-bit integer");
      cfg.seed = *v;
    } else {
      throw ConfigError("E_UNKNOWN_KEY", e.line, "unknown key run." + e.key);
    }
  }
  if (!scenario_entry) throw ConfigError("E_MISSING", 0, "run.scenario is required");

  const auto allowed = sections_for(cfg.scenario);
  std::map<std::string, std::size_t> lines;
  for (const auto& e : entries) {
    if (e.section == "run") continue;
    if (std::find(allowed.begin(), allowed.end(), e.section) == allowed.end())
      throw ConfigError("E_UNKNOWN_KEY", e.line,
                        "section [" + e.section + "] is not read by scenario " +
                            std::string(to_string(cfg.scenario)));
    const Field* f = find_field(e.section, e.key);
    if (!f) throw ConfigError("E_UNKNOWN_KEY", e.line, "unknown key " + e.section + "." + e.key);
    try {
      f->set(cfg, e.value, e.line);
    } catch (const ExpressionError& err) {
      throw ConfigError("E_SYNTAX", e.line,
                        e.section + "." + e.key + ": column " + std::to_string(err.column()) +
                            ": " + err.detail());
    }
    lines[e.section + "." + e.key] = e.line;
  }
  auto line_of = [&](const std::string& key) {
    const auto it = lines.find(key);
    return it == lines.end() ? std::size_t{0} : it->second;
  };

  const KernelConfig& k = cfg.kernel;
  if (!k.drift.empty()) {
    if (k.s != 0.5)
      throw ConfigError("E_DRIFT_S", line_of("kernel.drift"),
                        "a drift requires s = 0.5 (got s = " + format_real(k.s) + ")");
    check_dimension(k.drift, k.dim, "kernel.drift", line_of("kernel.drift"));
  }
  if (k.density == "two-sided" && k.dim != 1)
    throw ConfigError("E_RANGE", line_of("kernel.density"), "two-sided densities need dim = 1");
  if (k.axis >= k.dim)
    throw ConfigError("E_RANGE", line_of("kernel.axis"), "kernel.axis exceeds the dimension");

  const GridConfig& g = cfg.grid;
  const bool uses_grid = cfg.scenario == Scenario::SolveElliptic ||
                         cfg.scenario == Scenario::SolveParabolic ||
                         cfg.scenario == Scenario::FitExponent ||
                         cfg.scenario == Scenario::Blowup || cfg.scenario == Scenario::Regularity;
  if (uses_grid) {
    const bool needs_time =
        cfg.scenario == Scenario::SolveParabolic || cfg.scenario == Scenario::Regularity;
    if (needs_time && (g.time_steps == 0 || g.horizon <= 0.0))
      throw ConfigError("E_MISSING", line_of("grid.time_steps"),
                        "scenario " + std::string(to_string(cfg.scenario)) +
                            " needs grid.time_steps >= 1 and grid.horizon > 0");
    if (cfg.scenario == Scenario::SolveElliptic && g.time_steps != 0)
      throw ConfigError("E_RANGE", line_of("grid.time_steps"),
                        "solve-elliptic takes no time steps");
    if ((g.time_steps == 0) != (g.horizon == 0.0))
      throw ConfigError("E_RANGE", line_of("grid.horizon"),
                        "grid.time_steps and grid.horizon must both be zero or both positive");
  }
  if (cfg.scenario == Scenario::Gamma) {
    check_dimension(cfg.gamma.e, k.dim, "gamma.e", line_of("gamma.e"));
    if (k.s != 0.5)
      for (double v : cfg.gamma.v)
        if (v != 0.0)
          throw ConfigError("E_RANGE", line_of("gamma.v"),
                            "moving profiles (v != 0) need s = 0.5");
  }
  if (cfg.scenario == Scenario::VerifyBarrier)
    check_dimension(cfg.barrier.e, k.dim, "barrier.e", line_of("barrier.e"));
  if (cfg.scenario == Scenario::Harnack)
    check_dimension(cfg.harnack.e, k.dim, "harnack.e", line_of("harnack.e"));
  if (cfg.scenario == Scenario::Regularity && cfg.regularity.t2 != 0.0 &&
      cfg.regularity.t2 <= cfg.regularity.t1)
    throw ConfigError("E_RANGE", line_of("regularity.t2"), "regularity.t2 must exceed t1");
  return cfg;
}

std::string serialize_config(const ExperimentConfig& config) {
  std::ostringstream out;
  out << "[run]\nscenario = " << to_string(config.scenario) << "\nseed = " << config.seed << "\n";
  for (const auto& section : sections_for(config.scenario)) {
    if (section == "run") continue;
    out << "\n[" << section << "]\n";
    for (const auto& f : schema())
      if (f.section == section) {
        const std::string v = f.get(config);
        out << f.key << (v.empty() ? " =" : " = ") << v << "\n";
      }
  }
  return out.str();
}

std::string config_hash(const ExperimentConfig& config) {
  const std::string text = serialize_config(config);
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  require(EVP_Digest(text.data(), text.size(), md.data(), &len, EVP_sha256(), nullptr) == 1,
          Module::Cli, ErrorCode::Io, "SHA-256 failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex += kHex[md[i] >> 4];
    hex += kHex[md[i] & 15];
  }
  return hex;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), Module::Cli, ErrorCode::Io, "cannot read config " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

}  // namespace fbreg::cli
