#pragma once

#include <filesystem>
#include <iosfwd>

#include "mfns/config.hpp"

namespace mfns::driver {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSolver = 3;
inline constexpr int kExitAssertion = 4;

/// Each subcommand writes its artifacts (frames/diagnostics CSVs and
/// manifest.json) under `outdir` and returns the process exit code. Partial
/// artifacts are retained when a solver aborts. ConfigError propagates to the
/// caller (the CLI maps it to exit code 2).
int run_ns(const RunConfig& config, const std::filesystem::path& outdir, std::ostream& log);
int run_mf(const RunConfig& config, const std::filesystem::path& outdir, std::ostream& log);
int run_homog(const RunConfig& config, const std::filesystem::path& outdir, std::ostream& log);
int run_equiv(const RunConfig& config, const std::filesystem::path& outdir, std::ostream& log);

}  // namespace mfns::driver
