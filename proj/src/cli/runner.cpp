#include "fbreg/cli/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "fbreg/barriers.hpp"
#include "fbreg/cli/csv.hpp"
#include "fbreg/cli/expression.hpp"
#include "fbreg/free_boundary.hpp"
#include "fbreg/harnack.hpp"
#include "fbreg/metrics.hpp"
#include "fbreg/profiles.hpp"
#include "fbreg/solver.hpp"

namespace fbreg::cli {

namespace {

constexpr auto kMod = Module::Cli;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Cell num(double v) {
  if (std::isnan(v)) return std::monostate{};
  return v;
}
Cell count(std::size_t n) { return static_cast<std::int64_t>(n); }

std::string short_num(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

struct Context {
  const ExperimentConfig& cfg;
  KernelSpec kernel;
  std::string hash;
  std::filesystem::path dir;
  std::string base;
  RunResult result;

  CsvTable table(std::vector<std::string> columns) const {
    return CsvTable(hash, cfg.seed, std::string(to_string(cfg.scenario)), std::move(columns));
  }
  std::string path(const std::string& suffix) const { return (dir / (base + suffix)).string(); }
  void save(const CsvTable& t) {
    const std::string p = path(".csv");
    t.write(p);
    result.csv = t.str();
    result.files.insert(result.files.begin(), p);
  }
  void save(const GridFunction& g, const std::string& suffix) {
    const std::string p = path(suffix);
    write_grid(p, g);
    result.files.push_back(p);
  }
};

// Obstacle problems shared by the grid scenarios.

struct Solved {
  ObstacleProblem problem;
  GridFunction u;
  SolveReport report;
};

Solved solve(const ExperimentConfig& cfg, const KernelSpec& kernel) {
  const Expression expr = Expression::parse(cfg.obstacle.expr);
  const SpaceFunction phi = [expr](std::span<const double> x) {
    return expr(x[0], x.size() > 1 ? x[1] : 0.0, 0.0);
  };
  const auto dim = static_cast<std::size_t>(cfg.kernel.dim);
  const double h = 2.0 * cfg.grid.half_width / static_cast<double>(cfg.grid.nodes - 1);
  Solved out{make_obstacle_problem(kernel, phi, cfg.obstacle.growth, cfg.obstacle.scale,
                                   std::vector<std::size_t>(dim, cfg.grid.nodes), h,
                                   std::vector<double>(dim, -cfg.grid.half_width)),
             {},
             {}};
  SolveOptions opts;
  opts.tol = cfg.solver.tol;
  opts.lcp.max_sweeps = cfg.solver.max_sweeps;
  opts.coarse_start = cfg.solver.coarse_start;
  if (cfg.grid.time_steps > 0) {
    out.problem.horizon = cfg.grid.horizon;
    out.problem.time_steps = cfg.grid.time_steps;
    std::tie(out.u, out.report) = solve_parabolic_obstacle(out.problem, opts);
  } else {
    std::tie(out.u, out.report) = solve_elliptic_obstacle(out.problem, opts);
  }
  return out;
}

GridFunction gap(const Solved& s) {
  GridFunction w = s.u;
  const std::size_t m = s.u.slice_size();
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = s.u[i] - s.problem.obstacle[i % m];
  return w;
}

void note_solve(CsvTable& t, const Solved& s) {
  t.note("iterations", std::to_string(s.report.iterations));
  t.note("residual", s.report.residual);
  t.note("tolerance", s.report.tolerance);
  t.note("monotone-scheme", s.report.monotone_scheme ? "true" : "false");
}

std::string run_solve(Context& ctx) {
  const Solved s = solve(ctx.cfg, ctx.kernel);
  CsvTable t = ctx.table({"step", "t", "contact_nodes", "grown"});
  note_solve(t, s);
  const auto& growth = s.report.active_growth_steps;
  for (std::size_t k = 0; k < s.report.active_set.size(); ++k) {
    const bool grown = std::find(growth.begin(), growth.end(), k) != growth.end();
    t.add_row({count(k), s.u.has_time() ? s.u.time_at(k) : 0.0, count(s.report.active_set[k]),
               count(grown ? 1 : 0)});
  }
  ctx.save(t);
  ctx.save(s.u, ".fbrg");
  return std::to_string(s.report.iterations) + " sweeps, residual " +
         short_num(s.report.residual) + ", contact set " +
         std::to_string(s.report.active_set.back()) + " nodes";
}

// Free-boundary probes.

struct Probe {
  BoundaryPoint point;
  NormalEstimate normal;
  GrowthFit growth;
  Classification cls;
  bool fitted = false;
};

std::vector<Probe> probe_boundary(const ExperimentConfig& cfg, const KernelSpec& kernel,
                                  const Solved& s, const GridFunction& w) {
  const AnalysisConfig& a = cfg.analysis;
  const auto mask = contact_set(s.u, s.problem.obstacle, a.gap_tol);
  const auto points = extract_boundary(mask, w, a.beta_guess);
  std::vector<std::size_t> usable;
  for (std::size_t i = 0; i < points.size(); ++i)
    if (w.contains_cylinder(points[i].position, a.r_max)) usable.push_back(i);
  require(!usable.empty(), kMod, ErrorCode::Geometry,
          "no free-boundary point admits a cylinder of radius analysis.r_max inside the box");
  const std::size_t n = std::min(a.probes, usable.size());
  const double r_min = a.r_min > 0.0 ? a.r_min : 4.0 * w.h();
  const auto radii = radii_ladder(r_min, a.r_max);
  std::vector<Probe> out;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t pick =
        usable[static_cast<std::size_t>((static_cast<double>(j) + 0.5) *
                                        static_cast<double>(usable.size()) /
                                        static_cast<double>(n))];
    Probe p;
    p.point = points[pick];
    p.normal = estimate_normal_speed(points, p.point.position, a.normal_radius);
    try {
      p.growth = fit_growth_exponent(w, p.point.position, radii);
      p.fitted = true;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Geometry && e.code() != ErrorCode::FitFailed) throw;
    }
    if (p.fitted && p.normal.resolved)
      p.cls = classify_point(p.growth.beta, p.normal.speed, kernel, p.normal.nu_x, {},
                             p.growth.r2);
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<std::string> point_columns(int dim, bool time) {
  std::vector<std::string> c{"x0"};
  if (dim == 2) c.push_back("y0");
  if (time) c.push_back("t0");
  c.push_back("nu_x");
  if (dim == 2) c.push_back("nu_y");
  for (const char* k : {"v0", "beta", "r2", "class", "gamma_pred"}) c.push_back(k);
  return c;
}

void point_cells(std::vector<Cell>& row, const Probe& p, int dim, bool time) {
  const auto& pos = p.point.position;
  const std::size_t off = time ? 1 : 0;
  for (int a = 0; a < dim; ++a) row.push_back(pos[off + static_cast<std::size_t>(a)]);
  if (time) row.push_back(pos[0]);
  for (int a = 0; a < dim; ++a)
    row.push_back(p.normal.resolved ? num(p.normal.nu_x[static_cast<std::size_t>(a)])
                                    : Cell{});
  row.push_back(p.normal.resolved ? num(p.normal.speed) : Cell{});
  row.push_back(p.fitted ? num(p.growth.beta) : Cell{});
  row.push_back(p.fitted ? num(p.growth.r2) : Cell{});
  const bool classified = p.fitted && p.normal.resolved;
  row.push_back(to_string(classified ? p.cls.kind : Classification::Kind::Unresolved));
  row.push_back(classified ? num(p.cls.gamma_pred) : Cell{});
}

std::string tally(const std::vector<Probe>& probes) {
  std::size_t reg = 0, deg = 0;
  for (const auto& p : probes) {
    if (!p.fitted || !p.normal.resolved) continue;
    if (p.cls.kind == Classification::Kind::Regular) ++reg;
    if (p.cls.kind == Classification::Kind::Degenerate) ++deg;
  }
  return std::to_string(probes.size()) + " points: " + std::to_string(reg) + " regular, " +
         std::to_string(deg) + " degenerate";
}

std::string run_fit_exponent(Context& ctx) {
  const Solved s = solve(ctx.cfg, ctx.kernel);
  const GridFunction w = gap(s);
  const auto probes = probe_boundary(ctx.cfg, ctx.kernel, s, w);
  const int dim = ctx.cfg.kernel.dim;
  const bool time = s.u.has_time();
  auto cols = point_columns(dim, time);
  cols.push_back("kappa");
  cols.push_back("lip_distance");
  CsvTable t = ctx.table(cols);
  note_solve(t, s);
  for (const auto& p : probes) {
    std::vector<Cell> row;
    point_cells(row, p, dim, time);
    row.emplace_back();  // kappa and lip_distance come from the blowup scenario
    row.emplace_back();
    t.add_row(std::move(row));
  }
  ctx.save(t);
  ctx.save(s.u, ".fbrg");
  return tally(probes);
}

std::string run_blowup(Context& ctx) {
  const Solved s = solve(ctx.cfg, ctx.kernel);
  const GridFunction w = gap(s);
  const auto probes = probe_boundary(ctx.cfg, ctx.kernel, s, w);
  const int dim = ctx.cfg.kernel.dim;
  const bool time = s.u.has_time();
  std::vector<std::string> cols{"point", "r"};
  for (auto& c : point_columns(dim, time)) cols.push_back(c);
  cols.push_back("kappa");
  cols.push_back("e_x");
  if (dim == 2) cols.push_back("e_y");
  for (const char* k : {"v_fit", "gamma_fit", "lip_distance", "one_dimensional"})
    cols.push_back(k);
  CsvTable t = ctx.table(cols);
  note_solve(t, s);
  std::size_t decreasing = 0;
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const Probe& p = probes[i];
    ProfileGuess guess;
    guess.e = p.normal.resolved ? p.normal.nu_x : p.point.inward;
    guess.v = p.normal.resolved && std::isfinite(p.normal.speed) ? std::max(p.normal.speed, 0.0)
                                                                 : 0.0;
    double prev = std::numeric_limits<double>::infinity();
    bool monotone = true;
    for (std::size_t j = 0; j < ctx.cfg.analysis.blowup_radii; ++j) {
      const double r = ctx.cfg.analysis.r_max / std::pow(2.0, static_cast<double>(j));
      std::vector<Cell> row{count(i), r};
      point_cells(row, p, dim, time);
      try {
        const GridFunction g = blow_up_rescale(w, p.point.position, r, NormMode::Gradient);
        const ProfileFit fit = fit_1d_profile(g, ctx.kernel, guess);
        row.push_back(fit.profile.kappa);
        for (int a = 0; a < dim; ++a) row.push_back(fit.profile.e[static_cast<std::size_t>(a)]);
        row.push_back(fit.profile.v);
        row.push_back(fit.profile.gamma);
        row.push_back(fit.lip_distance);
        row.push_back(count(fit.one_dimensional ? 1 : 0));
        if (fit.lip_distance > prev) monotone = false;
        prev = fit.lip_distance;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::Geometry && e.code() != ErrorCode::FitFailed) throw;
        for (int k = 0; k < dim + 5; ++k) row.emplace_back();
        monotone = false;
      }
      t.add_row(std::move(row));
    }
    if (monotone) ++decreasing;
  }
  ctx.save(t);
  ctx.save(s.u, ".fbrg");
  return tally(probes) + "; lip_distance decreasing at " + std::to_string(decreasing);
}

// Barriers.

void add_report(CsvTable& t, const VerificationReport& rep) {
  for (std::size_t l = 0; l < rep.levels.size(); ++l) {
    const auto& lv = rep.levels[l];
    t.add_row({rep.barrier, count(l), lv.h, lv.worst, count(lv.pass ? 1 : 0), num(rep.order),
               count(rep.stable ? 1 : 0), rep.constant, count(rep.pass ? 1 : 0)});
  }
  for (const auto& [k, v] : rep.searched) t.note("searched " + rep.barrier + " " + k, v);
}

std::string trail_text(const SearchResult& r) {
  std::string out;
  for (const auto& [p, worst] : r.trail) {
    if (!out.empty()) out += "; ";
    out += format_number(p) + " -> " + format_number(worst);
  }
  return out;
}

std::string run_verify_barrier(Context& ctx) {
  const BarrierConfig& b = ctx.cfg.barrier;
  const double s = ctx.cfg.kernel.s;
  VerifyOptions opts;
  opts.tail_tol = b.tail_tol;
  const double clearance =
      b.clearance > 0.0 ? b.clearance : 2.0 * *std::max_element(b.spacings.begin(), b.spacings.end());
  CsvTable t = ctx.table(
      {"barrier", "level", "h", "margin", "level_pass", "order", "stable", "constant", "pass"});
  bool pass = false;
  if (b.kind == "cone-super") {
    const auto samples = cone_samples(b.e, b.eta, b.r_min, clearance, b.radial, b.angular);
    if (b.theta > 0.0) {
      const Barrier bar = cone_supersolution(b.e, b.eta, b.theta);
      const auto rep = verify_inequality(ctx.kernel, bar, samples, bar.claimed, b.spacings, opts);
      add_report(t, rep);
      pass = rep.pass;
    } else {
      const auto res = search_cone_theta(ctx.kernel, b.e, b.eta, samples, b.spacings, opts);
      t.note("search trail", trail_text(res));
      add_report(t, res.report);
      pass = res.found;
    }
  } else if (b.kind == "traveling-cone") {
    if (b.gamma > 0.0) {
      const Barrier bar = traveling_cone_subsolution(b.e, b.omega, b.theta0, b.gamma, s);
      const auto samples = cylinder_samples(bar, clearance, b.per_axis, b.times);
      const auto rep = verify_inequality(ctx.kernel, bar, samples, bar.claimed, b.spacings, opts);
      add_report(t, rep);
      pass = rep.pass;
    } else {
      const auto res = search_traveling_gamma(ctx.kernel, b.e, b.omega, b.theta0, b.gamma_start,
                                              clearance, b.per_axis, b.times, b.spacings, opts);
      t.note("search trail", trail_text(res));
      add_report(t, res.report);
      pass = res.found;
    }
  } else if (b.kind == "exp-cusp") {
    const Barrier bar =
        exp_cusp_barrier(b.e, b.theta > 0.0 ? b.theta : 0.25, b.parabolic ? b.v : 0.0, b.parabolic);
    const auto samples = cylinder_samples(bar, clearance, b.per_axis, b.times);
    const auto rep = verify_inequality(ctx.kernel, bar, samples, bar.claimed, b.spacings, opts);
    add_report(t, rep);
    pass = rep.pass;
  } else {
    const double v = b.v;
    GraphDomain dom{[v](double tt) { return -v * tt; }, [v](double) { return -v; }};
    const auto res = search_power_barriers(ctx.kernel, dom, 0.0, b.eps, b.spacings, opts);
    t.note("searched M", res.M);
    t.note("searched delta0", res.delta0);
    t.note("sandwich low", res.sandwich_low);
    t.note("sandwich high", res.sandwich_high);
    add_report(t, res.phi1);
    add_report(t, res.phi2);
    pass = res.found;
  }
  ctx.save(t);
  return b.kind + (pass ? " certified" : " not certified");
}

std::string run_gamma(Context& ctx) {
  const auto& g = ctx.cfg.gamma;
  const int dim = ctx.cfg.kernel.dim;
  std::vector<std::string> cols{"e_x"};
  if (dim == 2) cols.push_back("e_y");
  for (const char* k : {"v", "A", "B", "gamma"}) cols.push_back(k);
  CsvTable t = ctx.table(cols);
  const Symbol sym = symbol(ctx.kernel, g.e);
  for (double v : g.v) {
    std::vector<Cell> row;
    for (double c : g.e) row.push_back(c);
    const double gamma = ctx.kernel.s() == 0.5 ? gamma_critical(ctx.kernel, g.e, v)
                                               : gamma_elliptic(ctx.kernel, g.e);
    row.push_back(v);
    row.push_back(sym.A);
    row.push_back(sym.B);
    row.push_back(gamma);
    t.add_row(std::move(row));
  }
  ctx.save(t);
  return std::to_string(g.v.size()) + " speeds";
}

std::string run_harnack_scenario(Context& ctx) {
  const HarnackConfig& h = ctx.cfg.harnack;
  HarnackScenario sc;
  sc.kernel = ctx.kernel;
  sc.e = h.e;
  sc.theta0 = h.theta0;
  sc.omega = h.omega;
  sc.forcing = h.forcing;
  sc.nodes = h.nodes;
  sc.half_width = h.half_width;
  sc.t_start = h.t_start;
  sc.steps = h.steps;
  sc.probe_distance = h.probe_distance;
  sc.anchor_distance = h.anchor_distance;
  sc.r_max = h.r_max;
  sc.radii = h.radii;
  sc.floor = h.floor;
  const HarnackReport rep = run_harnack(sc);
  CsvTable t = ctx.table(
      {"r", "osc", "excluded", "alpha_obs", "r2", "min_ratio12", "min_ratio21", "monotone"});
  for (std::size_t j = 0; j < rep.radii.size(); ++j)
    t.add_row({rep.radii[j], rep.osc[j], count(rep.excluded[j]), rep.alpha, rep.r2,
               rep.min_ratio12, rep.min_ratio21, count(rep.monotone ? 1 : 0)});
  t.note("anchor1", rep.anchor1);
  t.note("anchor2", rep.anchor2);
  ctx.save(t);
  ctx.save(rep.v1, "_v1.fbrg");
  ctx.save(rep.v2, "_v2.fbrg");
  return "alpha_obs " + short_num(rep.alpha) + ", comparability " + short_num(rep.min_ratio12) +
         " / " + short_num(rep.min_ratio21);
}

std::string run_regularity(Context& ctx) {
  const RegularityConfig& r = ctx.cfg.regularity;
  const Solved s = solve(ctx.cfg, ctx.kernel);
  const double T = ctx.cfg.grid.horizon;
  const TimeRegularityReport tr = fit_time_regularity(
      s.u, ctx.kernel.s(), r.eps, r.t1 > 0.0 ? r.t1 : T / 4.0, r.t2 > 0.0 ? r.t2 : T);
  SeminormOptions so;
  so.seed = ctx.cfg.seed;
  so.pair_budget = r.pair_budget;
  const double beta = r.beta > 0.0 ? r.beta : ctx.kernel.s();
  const HolderReport hr =
      global_gradient_holder(s.u.time_slice(s.u.time_levels() - 1), beta, {}, so);
  CsvTable t = ctx.table({"lag", "modulus"});
  note_solve(t, s);
  t.note("time exponent measured", tr.measured);
  t.note("time exponent predicted", tr.predicted);
  t.note("time fit r2", tr.r2);
  t.note("gradient holder beta", beta);
  t.note("gradient holder seminorm", hr.value);
  t.note("gradient holder exact", hr.exact ? "true" : "false");
  for (std::size_t i = 0; i < tr.lags.size(); ++i) t.add_row({tr.lags[i], tr.modulus[i]});
  ctx.save(t);
  ctx.save(s.u, ".fbrg");
  return "time exponent " + short_num(tr.measured) + " (predicted " + short_num(tr.predicted) +
         ")";
}

}  // namespace

KernelSpec build_kernel(const KernelConfig& c) {
  DensitySpec density = DensitySpec::isotropic(c.value);
  if (c.density == "axial")
    density = DensitySpec::axial(c.low, c.high, c.axis);
  else if (c.density == "two-sided")
    density = DensitySpec::two_sided(c.plus, c.minus);
  return make_kernel(c.s, c.lambda, c.Lambda, density, c.drift, c.dim);
}

bool subcommand_accepts(std::string_view sub, Scenario sc) {
  if (sub == "solve") return sc == Scenario::SolveElliptic || sc == Scenario::SolveParabolic;
  if (sub == "symbol") return sc == Scenario::Gamma;
  return sub == to_string(sc);
}

RunResult run(const ExperimentConfig& config, const RunOptions& options) {
  Context ctx{config, build_kernel(config.kernel), config_hash(config), options.out_dir, {}, {}};
  ctx.base = std::string(to_string(config.scenario)) + "_" + ctx.hash.substr(0, 12);
  std::error_code ec;
  std::filesystem::create_directories(ctx.dir, ec);
  require(!ec, kMod, ErrorCode::Io, "cannot create " + ctx.dir.string());

  std::string what;
  switch (config.scenario) {
    case Scenario::SolveElliptic:
    case Scenario::SolveParabolic: what = run_solve(ctx); break;
    case Scenario::FitExponent: what = run_fit_exponent(ctx); break;
    case Scenario::Blowup: what = run_blowup(ctx); break;
    case Scenario::VerifyBarrier: what = run_verify_barrier(ctx); break;
    case Scenario::Gamma: what = run_gamma(ctx); break;
    case Scenario::Harnack: what = run_harnack_scenario(ctx); break;
    case Scenario::Regularity: what = run_regularity(ctx); break;
  }

  const std::string ini = ctx.path(".ini");
  {
    std::ofstream f(ini, std::ios::binary);
    f << serialize_config(config);
    require(static_cast<bool>(f), kMod, ErrorCode::Io, "cannot write " + ini);
  }
  ctx.result.files.push_back(ini);
  ctx.result.base = ctx.base;
  ctx.result.summary = std::string(to_string(config.scenario)) + " " + ctx.hash.substr(0, 12) +
                       " seed " + std::to_string(config.seed) + ": " + what + " -> " +
                       ctx.result.files.front();
  return ctx.result;
}

int exit_status(const std::exception& error) {
  if (const auto* e = dynamic_cast<const Error*>(&error)) return static_cast<int>(e->code());
  return 1;
}

}  // namespace fbreg::cli
