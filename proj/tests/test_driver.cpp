#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>

#include "mfns/config.hpp"
#include "mfns/csv.hpp"
#include "mfns/driver.hpp"
#include "mfns/errors.hpp"

using namespace mfns;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("mfns_test_" + tag);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

RunConfig base_ns_config() {
  return parse_config_json(R"({
    "laws": {
      "pressure": {"type": "powerlaw_pressure", "a": 1.0, "gamma": 2.0},
      "viscosity": {"type": "powerlaw_viscosity", "c": 1.0, "d": 1.0},
      "mu0": 1.0
    },
    "grid": {"L": 1.0, "N": 64},
    "T": 0.01,
    "output_every": 8,
    "initial": {
      "rho": {"type": "sine", "mean": 1.0, "amplitude": 0.1},
      "u": {"type": "sine", "mean": 0.0, "amplitude": 0.1}
    }
  })");
}

}  // namespace

TEST_CASE("run_ns writes frames, diagnostics, and a complete manifest") {
  const fs::path dir = temp_dir("ns");
  std::ostringstream log;
  const int rc = driver::run_ns(base_ns_config(), dir, log);
  CHECK(rc == driver::kExitOk);
  CHECK(fs::exists(dir / "frames.csv"));
  CHECK(fs::exists(dir / "diagnostics.csv"));
  CHECK(fs::exists(dir / "manifest.json"));

  const std::string frames = slurp(dir / "frames.csv");
  CHECK(frames.rfind("t,x,rho,u,z\n", 0) == 0);
  const std::string manifest = slurp(dir / "manifest.json");
  CHECK(manifest.find("\"horizon_estimate\"") != std::string::npos);
  CHECK(manifest.find("\"K_u0\"") != std::string::npos);
  CHECK(manifest.find("\"invariants\"") != std::string::npos);
  CHECK(manifest.find("\"status\": \"ok\"") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("run_ns with T = 0 emits exactly one frame") {
  const fs::path dir = temp_dir("ns_t0");
  RunConfig cfg = base_ns_config();
  cfg.T = 0.0;
  std::ostringstream log;
  CHECK(driver::run_ns(cfg, dir, log) == driver::kExitOk);
  const std::string frames = slurp(dir / "frames.csv");
  // header + N rows
  CHECK(std::count(frames.begin(), frames.end(), '\n') == 1 + 64);
  fs::remove_all(dir);
}

TEST_CASE("run_ns is byte-deterministic") {
  const fs::path a = temp_dir("ns_det_a"), b = temp_dir("ns_det_b");
  std::ostringstream log;
  driver::run_ns(base_ns_config(), a, log);
  driver::run_ns(base_ns_config(), b, log);
  CHECK(slurp(a / "frames.csv") == slurp(b / "frames.csv"));
  CHECK(slurp(a / "diagnostics.csv") == slurp(b / "diagnostics.csv"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("run_ns rejects missing initial data") {
  RunConfig cfg = base_ns_config();
  cfg.ns_initial.reset();
  std::ostringstream log;
  CHECK_THROWS_AS(driver::run_ns(cfg, "unused_dir", log), ConfigError);
}

TEST_CASE("run_mf writes the multifluid schema and conserves the simplex") {
  const fs::path dir = temp_dir("mf");
  const RunConfig cfg = parse_config_json(R"({
    "laws": {
      "pressure": {"type": "powerlaw_pressure", "a": 1.0, "gamma": 2.0},
      "viscosity": {"type": "powerlaw_viscosity", "c": 1.0, "d": 1.0}
    },
    "grid": {"L": 1.0, "N": 64},
    "T": 0.01,
    "output_every": 8,
    "initial": {
      "alpha": [{"type": "constant", "value": 0.5}, {"type": "constant", "value": 0.5}],
      "rho": [{"type": "constant", "value": 1.0}, {"type": "constant", "value": 2.0}],
      "u": {"type": "sine", "mean": 0.0, "amplitude": 0.1}
    }
  })");
  std::ostringstream log;
  CHECK(driver::run_mf(cfg, dir, log) == driver::kExitOk);
  const std::string frames = slurp(dir / "frames.csv");
  CHECK(frames.rfind("t,x,u,rho_bar,m,pi,alpha_1,alpha_2,rho_1,rho_2\n", 0) == 0);
  const std::string diag = slurp(dir / "diagnostics.csv");
  CHECK(diag.rfind("t,sum_alpha_drift,mass_1,mass_2,closure_identity_residual\n", 0) == 0);

  // every recorded drift is within the per-step budget
  std::istringstream lines(diag);
  std::string line;
  std::getline(lines, line);  // header
  while (std::getline(lines, line)) {
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    const double drift = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
    CHECK(drift <= 1e-10);
  }
  fs::remove_all(dir);
}

TEST_CASE("run_mf rejects ns-style initial data") {
  RunConfig cfg = base_ns_config();
  std::ostringstream log;
  CHECK_THROWS_AS(driver::run_mf(cfg, "unused_dir", log), ConfigError);
}

TEST_CASE("run_equiv passes on the reference laws and writes its manifest") {
  const fs::path dir = temp_dir("equiv");
  RunConfig cfg = base_ns_config();
  cfg.equiv = EquivSection{5000, false};
  std::ostringstream log;
  CHECK(driver::run_equiv(cfg, dir, log) == driver::kExitOk);
  CHECK(slurp(dir / "manifest.json").find("max_abs_difference") != std::string::npos);
  CHECK(log.str().find("max absolute difference") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("run_homog on a small study") {
  const fs::path dir = temp_dir("homog");
  const RunConfig cfg = parse_config_json(R"({
    "laws": {
      "pressure": {"type": "powerlaw_pressure", "a": 1.0, "gamma": 2.0},
      "viscosity": {"type": "powerlaw_viscosity", "c": 1.0, "d": 1.0}
    },
    "grid": {"L": 1.0, "N": 64},
    "T": 0.01,
    "homog": {
      "alpha0": [{"type": "constant", "value": 0.5}, {"type": "constant", "value": 0.5}],
      "rho0": [{"type": "constant", "value": 1.0}, {"type": "constant", "value": 2.0}],
      "u0": {"type": "sine", "mean": 0.0, "amplitude": 0.1},
      "n_list": [2, 4, 8],
      "cells_per_mode": 8,
      "checkpoints": 2,
      "assert": false
    }
  })");
  std::ostringstream log;
  const int rc = driver::run_homog(cfg, dir, log);
  CHECK(rc == driver::kExitOk);
  CHECK(fs::exists(dir / "study.json"));
  CHECK(fs::exists(dir / "errors.csv"));
  CHECK(fs::exists(dir / "error_curves.csv"));
  CHECK(fs::exists(dir / "manifest.json"));
  CHECK(log.str().find("monotone") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("field CSV serialization round-trips through 17 digits") {
  const fs::path dir = temp_dir("field_csv");
  fs::create_directories(dir);
  const PeriodicGrid g(2.0, 8);
  const ScalarField f =
      ScalarField::sample(g, [](double x) { return std::sin(x) / 3.0 + 1e-17; });
  write_field_csv(dir / "field.csv", f);
  std::ifstream in(dir / "field.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line == "x,value");
  for (int j = 0; j < g.N; ++j) {
    REQUIRE(std::getline(in, line));
    const auto comma = line.find(',');
    CHECK(std::stod(line.substr(0, comma)) == g.center(j));
    CHECK(std::stod(line.substr(comma + 1)) == f[j]);  // bit-exact round trip
  }
  fs::remove_all(dir);
}

TEST_CASE("run_homog with a single n reports without asserting") {
  const fs::path dir = temp_dir("homog1");
  const RunConfig cfg = parse_config_json(R"({
    "laws": {
      "pressure": {"type": "powerlaw_pressure", "a": 1.0, "gamma": 2.0},
      "viscosity": {"type": "powerlaw_viscosity", "c": 1.0, "d": 1.0}
    },
    "grid": {"L": 1.0, "N": 64},
    "T": 0.005,
    "homog": {
      "alpha0": [{"type": "constant", "value": 0.5}, {"type": "constant", "value": 0.5}],
      "rho0": [{"type": "constant", "value": 1.0}, {"type": "constant", "value": 2.0}],
      "u0": {"type": "constant", "value": 0.0},
      "n_list": [4],
      "cells_per_mode": 8,
      "checkpoints": 2
    }
  })");
  std::ostringstream log;
  CHECK(driver::run_homog(cfg, dir, log) == driver::kExitOk);
  CHECK(log.str().find("warning") != std::string::npos);
  fs::remove_all(dir);
}
