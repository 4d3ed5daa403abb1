#pragma once

#include <exception>
#include <string>
#include <string_view>
#include <vector>

#include "fbreg/cli/config.hpp"
#include "fbreg/kernel.hpp"

namespace fbreg::cli {

struct RunOptions {
  std::string out_dir = ".";
};

struct RunResult {
  std::string summary;             ///< one line
  std::string base;                ///< <scenario>_<first 12 hex digits of the hash>
  std::string csv;                 ///< text of the CSV report
  std::vector<std::string> files;  ///< paths written, CSV first
};

KernelSpec build_kernel(const KernelConfig& config);

/// True when `subcommand` may run this scenario: `solve` takes both solve
/// scenarios, `symbol` and `gamma` take gamma, the rest match by name.
bool subcommand_accepts(std::string_view subcommand, Scenario scenario);

/// Runs the scenario and writes <out_dir>/<base>.csv, <base>.ini (the
/// canonical config) and any grid files. Errors propagate as fbreg::Error.
RunResult run(const ExperimentConfig& config, const RunOptions& options = {});

/// Process exit status for an exception: the ErrorCode value for
/// fbreg::Error, 1 for anything else.
int exit_status(const std::exception& error);

}  // namespace fbreg::cli
