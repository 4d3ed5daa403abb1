#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "fbreg/cli/config.hpp"
#include "fbreg/cli/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Obstacle problems for nonlocal operators: solvers, free-boundary analysis, "
               "barrier checks"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  unsigned threads = 1;
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_path, "experiment config (key = value sections)")
      ->required()
      ->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--threads", threads, "worker threads (runs are sequential)")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "overrides run.seed");

  const char* subs[][2] = {
      {"solve", "elliptic or parabolic obstacle solve"},
      {"fit-exponent", "growth exponents and classification at free-boundary points"},
      {"blowup", "blow-up rescaling and 1D profile fits"},
      {"verify-barrier", "certify a barrier inequality under refinement"},
      {"gamma", "critical exponents per speed"},
      {"symbol", "symbol values and exponents per speed"},
      {"harnack", "boundary Harnack quotient decay"},
      {"regularity", "time and gradient regularity of a parabolic solve"},
  };
  for (const auto& s : subs) app.add_subcommand(s[0], s[1])->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  const std::string sub = app.get_subcommands().front()->get_name();

  try {
    fbreg::cli::ExperimentConfig cfg = fbreg::cli::load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (!fbreg::cli::subcommand_accepts(sub, cfg.scenario))
      throw fbreg::Error(fbreg::Module::Cli, fbreg::ErrorCode::Config,
                         "subcommand " + sub + " cannot run scenario " +
                             std::string(fbreg::cli::to_string(cfg.scenario)));
    const auto result = fbreg::cli::run(cfg, {out_dir});
    if (sub == "gamma" || sub == "symbol") std::cout << result.csv;
    std::cout << result.summary << "\n";
  } catch (const std::exception& e) {
    std::cerr << "fbreg: " << e.what() << "\n";
    return fbreg::cli::exit_status(e);
  }
  return 0;
}
