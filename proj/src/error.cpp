#include "fbreg/error.hpp"

namespace fbreg {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "E_INVALID_ARGUMENT";
    case ErrorCode::KernelInvalid: return "E_KERNEL";
    case ErrorCode::DriftOrder: return "E_DRIFT_S";
    case ErrorCode::ZeroMoment: return "E_ZERO_MOMENT";
    case ErrorCode::Quadrature: return "E_QUADRATURE";
    case ErrorCode::Extension: return "E_EXTENSION";
    case ErrorCode::NotConverged: return "E_NOT_CONVERGED";
    case ErrorCode::Stagnation: return "E_STAGNATION";
    case ErrorCode::Geometry: return "E_GEOMETRY";
    case ErrorCode::FitFailed: return "E_FIT";
    case ErrorCode::Io: return "E_IO";
    case ErrorCode::Config: return "E_CONFIG";
  }
  return "E_UNKNOWN";
}

std::string_view to_string(Module module) {
  switch (module) {
    case Module::OperatorCore: return "operator_core";
    case Module::Profiles: return "profiles";
    case Module::Solver: return "solver";
    case Module::FreeBoundary: return "free_boundary";
    case Module::Barriers: return "barriers";
    case Module::Metrics: return "metrics";
    case Module::Harnack: return "harnack";
    case Module::Cli: return "cli";
  }
  return "unknown";
}

Error::Error(Module module, ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(module)) + "/" +
                         std::string(to_string(code)) + ": " + message),
      module_(module),
      code_(code) {}

std::string Error::tag() const {
  return std::string(to_string(module_)) + "/" + std::string(to_string(code_));
}

void fail(Module module, ErrorCode code, const std::string& message) {
  throw Error(module, code, message);
}

}  // namespace fbreg
