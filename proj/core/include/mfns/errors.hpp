#pragma once

#include <stdexcept>
#include <string>

namespace mfns {

/// Invalid or inconsistent run configuration (maps to exit code 2 in the CLI).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Failure while advancing a solver (maps to exit code 3 in the CLI).
struct SolverError : std::runtime_error {
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

/// A density fell to (or below) the vacuum floor; names the first offending cell.
struct VacuumError : SolverError {
  VacuumError(const std::string& what, int cell) : SolverError(what), cell(cell) {}
  int cell;
};

}  // namespace mfns
