#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fbreg {

/// Failure classes. The CLI maps each class to a distinct exit status.
enum class ErrorCode {
  InvalidArgument = 2,
  KernelInvalid = 3,
  DriftOrder = 4,
  ZeroMoment = 5,
  Quadrature = 6,
  Extension = 7,
  NotConverged = 8,
  Stagnation = 9,
  Geometry = 10,
  FitFailed = 11,
  Io = 12,
  Config = 13,
};

/// Module that raised the error; part of the reported code.
enum class Module {
  OperatorCore,
  Profiles,
  Solver,
  FreeBoundary,
  Barriers,
  Metrics,
  Harnack,
  Cli,
};

std::string_view to_string(ErrorCode code);
std::string_view to_string(Module module);

class Error : public std::runtime_error {
 public:
  Error(Module module, ErrorCode code, const std::string& message);

  Module module() const noexcept { return module_; }
  ErrorCode code() const noexcept { return code_; }
  /// e.g. "solver/E_NOT_CONVERGED"
  std::string tag() const;

 private:
  Module module_;
  ErrorCode code_;
};

[[noreturn]] void fail(Module module, ErrorCode code, const std::string& message);

inline void require(bool condition, Module module, ErrorCode code,
                    const std::string& message) {
  if (!condition) fail(module, code, message);
}

}  // namespace fbreg
