#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mfns/constitutive.hpp"
#include "mfns/profiles.hpp"
#include "mfns/young.hpp"

namespace mfns {

struct GridConfig {
  double L = 1.0;
  int N = 128;
};

/// Parsed law selection; keeps the raw parameters for manifest echoes.
struct LawsSelection {
  std::string pressure_type = "powerlaw_pressure";
  double a = 1.0;
  double gamma = 2.0;
  std::string viscosity_type = "powerlaw_viscosity";
  double c = 1.0;
  double d = 1.0;
  double mu0 = -1.0;  // < 0: derived
  LawMode mode = LawMode::strict;

  ConstitutiveLaws build() const;
};

struct NSInitial {
  Profile rho;
  Profile u;
};

struct MFInitial {
  std::vector<Profile> alpha;
  std::vector<Profile> rho;
  Profile u;
};

struct HomogSection {
  YoungMeasureSpec spec;
  std::vector<int> n_list;
  int cells_per_mode = 32;
  int checkpoints = 8;
  bool assert_mode = true;
};

struct EquivSection {
  long samples = 100000;
  bool serre_check = false;
};

/// One JSON document drives every subcommand; unknown keys are rejected.
struct RunConfig {
  LawsSelection laws;
  GridConfig grid;
  double T = 0.0;
  double cfl = 0.5;
  double dt_max = 1.0;
  int output_every = 1;
  std::string output_dir = "out";
  std::uint64_t seed = 1;
  int threads = 1;

  std::optional<NSInitial> ns_initial;
  std::optional<MFInitial> mf_initial;
  std::optional<HomogSection> homog;
  std::optional<EquivSection> equiv;
};

/// Throws ConfigError naming the offending field.
RunConfig parse_config_json(const std::string& text);
RunConfig parse_config_file(const std::filesystem::path& path);

/// Canonical JSON echo of a parsed configuration (for manifests).
std::string config_to_json(const RunConfig& config);

}  // namespace mfns
