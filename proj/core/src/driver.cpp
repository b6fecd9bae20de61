#include "mfns/driver.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>

#include <json.hpp>

#include "mfns/csv.hpp"
#include "mfns/errors.hpp"
#include "mfns/multifluid.hpp"
#include "mfns/ns_solver.hpp"
#include "mfns/version.hpp"
#include "mfns/young.hpp"

namespace mfns::driver {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

class WallClock {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void write_manifest(const fs::path& outdir, const RunConfig& config, json extra,
                    const std::string& status, double wall_seconds) {
  json manifest;
  manifest["version"] = std::string(kVersion);
  manifest["config"] = json::parse(config_to_json(config));
  manifest["status"] = status;
  manifest["wall_time_seconds"] = wall_seconds;
  for (auto& item : extra.items()) {
    manifest[item.key()] = item.value();
  }
  std::ofstream out(outdir / "manifest.json", std::ios::binary | std::ios::trunc);
  out << manifest.dump(2) << '\n';
}

/// Law admissibility gate shared by the run subcommands.
ConstitutiveLaws build_checked_laws(const RunConfig& config, double rho_hint) {
  ConstitutiveLaws laws = config.laws.build();
  const ValidationReport report = validate_laws(laws, 0.0, 2.0 * rho_hint, 257);
  if (!report.admissible()) {
    throw ConfigError("laws not admissible in the declared mode: " + report.summary());
  }
  return laws;
}

}  // namespace

int run_ns(const RunConfig& config, const fs::path& outdir, std::ostream& log) {
  if (!config.ns_initial) {
    throw ConfigError("missing field 'initial' (rho, u profiles) for the ns subcommand");
  }
  const PeriodicGrid grid(config.grid.L, config.grid.N);
  const ScalarField rho0 = sample_profile(config.ns_initial->rho, grid);
  const ScalarField u0 = sample_profile(config.ns_initial->u, grid);
  if (!(min_value(rho0) > 0.0)) {
    throw ConfigError("field 'initial.rho' must sample to positive values");
  }
  const ConstitutiveLaws laws = build_checked_laws(config, max_value(rho0));

  WallClock clock;
  fs::create_directories(outdir);

  json horizon = nullptr;
  if (laws.mode == LawMode::strict) {
    const HorizonEstimate est = horizon_estimate(rho0, u0, laws);
    horizon = {{"K_u0", est.K_u0},
               {"K_d0", est.K_d0},
               {"T0_rho", est.T0_rho},
               {"T0", est.T0},
               {"T0_u_separately_computable", est.T0_u_separate}};
    log << "horizon estimate: K_u0=" << est.K_u0 << " K_d0=" << est.K_d0
        << " T0_rho=" << est.T0_rho << " T0=" << est.T0 << "\n";
  }

  NSRunOptions opts;
  opts.T = config.T;
  opts.cfl = config.cfl;
  opts.dt_max = config.dt_max;
  opts.output_every = config.output_every;
  const NSTrajectory traj = ns_run(rho0, u0, laws, opts);

  {
    CsvWriter frames(outdir / "frames.csv", {"t", "x", "rho", "u", "z"});
    for (const auto& frame : traj.frames) {
      const ScalarField z = effective_flux(frame, laws);
      for (int j = 0; j < grid.N; ++j) {
        const double row[5] = {frame.time, grid.center(j), frame.rho[j], frame.u[j], z[j]};
        frames.row(row);
      }
    }
  }
  {
    CsvWriter diag(outdir / "diagnostics.csv",
                   {"t", "kinetic", "potential", "dissipation", "bd_entropy", "max_haspot_v",
                    "min_rho", "max_rho"});
    for (const auto& frame : traj.frames) {
      const EnergyReport energy = energy_report(frame, laws);
      const double row[8] = {frame.time,
                             energy.kinetic,
                             energy.potential,
                             frame.dissipation_integral,
                             bd_entropy(frame, laws),
                             norms(haspot_v(frame, laws)).linf,
                             min_value(frame.rho),
                             max_value(frame.rho)};
      diag.row(row);
    }
  }

  const double mass0 = integrate(traj.frames.front().rho);
  const double mass1 = integrate(traj.frames.back().rho);
  const EnergyReport e0 = energy_report(traj.frames.front(), laws);
  const EnergyReport e1 = energy_report(traj.frames.back(), laws);
  json invariants = {
      {"mass_initial", mass0},
      {"mass_final", mass1},
      {"mass_relative_drift", std::abs(mass1 - mass0) / std::abs(mass0)},
      {"energy_initial", e0.total_plus_dissipation},
      {"energy_final_plus_dissipation", e1.total_plus_dissipation},
      {"energy_inequality_ok",
       e1.total_plus_dissipation <= e0.total_plus_dissipation * (1.0 + 1e-8)},
      {"steps", traj.total_steps},
      {"frames", traj.frames.size()}};

  const std::string status = traj.aborted ? "aborted: " + traj.abort_reason : "ok";
  write_manifest(outdir, config,
                 {{"subcommand", "ns"}, {"horizon_estimate", horizon}, {"invariants", invariants}},
                 status, clock.seconds());

  if (traj.aborted) {
    log << "ns run aborted: " << traj.abort_reason << "\n";
    return kExitSolver;
  }
  log << "ns run complete: " << traj.total_steps << " steps, " << traj.frames.size()
      << " frames -> " << outdir.string() << "\n";
  return kExitOk;
}

int run_mf(const RunConfig& config, const fs::path& outdir, std::ostream& log) {
  if (!config.mf_initial) {
    throw ConfigError(
        "missing field 'initial.alpha' (multifluid initial data) for the mf subcommand");
  }
  const PeriodicGrid grid(config.grid.L, config.grid.N);
  const int k = static_cast<int>(config.mf_initial->alpha.size());

  MultifluidState initial;
  initial.u = sample_profile(config.mf_initial->u, grid);
  double rho_hint = 0.0;
  for (int i = 0; i < k; ++i) {
    initial.alpha.push_back(sample_profile(config.mf_initial->alpha[i], grid));
    initial.rho_phase.push_back(sample_profile(config.mf_initial->rho[i], grid));
    rho_hint = std::max(rho_hint, max_value(initial.rho_phase.back()));
  }
  const ConstitutiveLaws laws = build_checked_laws(config, rho_hint);
  try {
    check_state(initial);
  } catch (const SolverError& err) {
    throw ConfigError(std::string("initial multifluid data invalid: ") + err.what());
  }

  WallClock clock;
  fs::create_directories(outdir);

  MfRunOptions opts;
  opts.T = config.T;
  opts.cfl = config.cfl;
  opts.dt_max = config.dt_max;
  opts.output_every = config.output_every;
  const MfTrajectory traj = mf_run(initial, laws, opts);

  {
    std::vector<std::string> header = {"t", "x", "u", "rho_bar", "m", "pi"};
    for (int i = 0; i < k; ++i) header.push_back("alpha_" + std::to_string(i + 1));
    for (int i = 0; i < k; ++i) header.push_back("rho_" + std::to_string(i + 1));
    CsvWriter frames(outdir / "frames.csv", header);
    std::vector<double> row(header.size());
    for (const auto& frame : traj.frames) {
      const MixtureClosures clo = mixture(frame, laws);
      for (int j = 0; j < grid.N; ++j) {
        row[0] = frame.time;
        row[1] = grid.center(j);
        row[2] = frame.u[j];
        row[3] = clo.rho_bar[j];
        row[4] = clo.m[j];
        row[5] = clo.pi[j];
        for (int i = 0; i < k; ++i) row[6 + i] = frame.alpha[i][j];
        for (int i = 0; i < k; ++i) row[6 + k + i] = frame.rho_phase[i][j];
        frames.row(row);
      }
    }
  }

  double max_closure_residual = 0.0;
  {
    std::vector<std::string> header = {"t", "sum_alpha_drift"};
    for (int i = 0; i < k; ++i) header.push_back("mass_" + std::to_string(i + 1));
    header.push_back("closure_identity_residual");
    CsvWriter diag(outdir / "diagnostics.csv", header);
    std::vector<double> row(header.size());
    for (std::size_t f = 0; f < traj.frames.size(); ++f) {
      const auto& frame = traj.frames[f];
      row[0] = frame.time;
      row[1] = traj.frame_stats[f].alpha_drift;
      for (int i = 0; i < k; ++i) {
        ScalarField mass(grid);
        for (int j = 0; j < grid.N; ++j) mass[j] = frame.alpha[i][j] * frame.rho_phase[i][j];
        row[2 + i] = integrate(mass);
      }
      const double residual = closure_identity_residual(frame, laws);
      max_closure_residual = std::max(max_closure_residual, residual);
      row[2 + k] = residual;
      diag.row(row);
    }
  }

  json invariants = {{"max_alpha_drift", traj.max_alpha_drift},
                     {"max_closure_identity_residual", max_closure_residual},
                     {"steps", traj.total_steps},
                     {"frames", traj.frames.size()}};
  const std::string status = traj.aborted ? "aborted: " + traj.abort_reason : "ok";
  write_manifest(outdir, config, {{"subcommand", "mf"}, {"invariants", invariants}}, status,
                 clock.seconds());

  if (traj.aborted) {
    log << "mf run aborted: " << traj.abort_reason << "\n";
    return kExitSolver;
  }
  log << "mf run complete: " << traj.total_steps << " steps, " << traj.frames.size()
      << " frames -> " << outdir.string() << "\n";
  return kExitOk;
}

int run_homog(const RunConfig& config, const fs::path& outdir, std::ostream& log) {
  if (!config.homog) {
    throw ConfigError("missing field 'homog' (study section) for the homog subcommand");
  }
  const HomogSection& section = *config.homog;
  double rho_hint = 1.0;
  for (const auto& atom : section.spec.rho0) {
    for (double x : {0.0, 0.25, 0.5, 0.75}) {
      rho_hint = std::max(rho_hint, atom.eval(x * config.grid.L, config.grid.L));
    }
  }
  const ConstitutiveLaws laws = build_checked_laws(config, rho_hint);

  WallClock clock;
  fs::create_directories(outdir);

  const std::vector<MomentProbe> probes = default_probes(laws, config.grid.L);
  StudyOptions opts;
  opts.L = config.grid.L;
  opts.cells_per_mode = section.cells_per_mode;
  opts.checkpoints = section.checkpoints;
  opts.cfl = config.cfl;
  opts.dt_max = config.dt_max;
  opts.threads = config.threads;

  const ConvergenceStudy study =
      convergence_study(section.spec, laws, config.T, section.n_list, probes, opts);

  if (study.horizon_warning) {
    log << "warning: T=" << config.T << " exceeds the estimated horizon T0=" << study.horizon_T0
        << " of the synthesized data\n";
  }

  {
    CsvWriter errors(outdir / "errors.csv", {"probe", "n", "N", "e_final"});
    // probe column is written as its index; labels live in study.json
    for (std::size_t p = 0; p < study.probe_labels.size(); ++p) {
      for (std::size_t r = 0; r < study.runs.size(); ++r) {
        const double row[4] = {static_cast<double>(p), static_cast<double>(study.runs[r].n),
                               static_cast<double>(study.runs[r].N), study.final_error(r, p)};
        errors.row(row);
      }
    }
  }
  {
    CsvWriter curves(outdir / "error_curves.csv", {"probe", "n", "t", "e"});
    for (std::size_t p = 0; p < study.probe_labels.size(); ++p) {
      for (std::size_t r = 0; r < study.runs.size(); ++r) {
        for (std::size_t c = 0; c < study.checkpoint_times.size(); ++c) {
          const double row[4] = {static_cast<double>(p), static_cast<double>(study.runs[r].n),
                                 study.checkpoint_times[c], study.error_at(r, p, c)};
          curves.row(row);
        }
      }
    }
  }

  json study_json;
  study_json["config"] = json::parse(config_to_json(config));
  study_json["T"] = study.T;
  study_json["checkpoint_times"] = study.checkpoint_times;
  study_json["probes"] = study.probe_labels;
  study_json["mf_N"] = study.mf_N;
  study_json["horizon_warning"] = study.horizon_warning;
  if (std::isfinite(study.horizon_T0)) study_json["horizon_T0"] = study.horizon_T0;
  json runs = json::array();
  for (std::size_t r = 0; r < study.runs.size(); ++r) {
    const auto& run = study.runs[r];
    json jr = {{"n", run.n}, {"N", run.N}, {"ok", run.ok}};
    if (!run.ok) {
      jr["error"] = run.error;
    } else {
      jr["frame_hash"] = run.frame_hash;
      json errs = json::array();
      for (std::size_t p = 0; p < study.probe_labels.size(); ++p) {
        errs.push_back(study.final_error(r, p));
      }
      jr["e_final"] = errs;
    }
    runs.push_back(jr);
  }
  study_json["runs"] = runs;

  int exit_code = kExitOk;
  int ok_runs = 0;
  for (const auto& r : study.runs) ok_runs += r.ok ? 1 : 0;
  if (ok_runs < 3) {
    log << "warning: only " << ok_runs
        << " successful runs; reporting without the monotone-decrease assertion\n";
    if (section.assert_mode && section.n_list.size() >= 3) {
      exit_code = kExitAssertion;
    }
  } else {
    const WeakLimitSummary summary = weak_limit_report(study);
    json jprobes = json::array();
    for (const auto& probe : summary.probes) {
      log << "probe " << probe.label << ": e = [";
      for (std::size_t i = 0; i < probe.errors.size(); ++i) {
        log << (i ? ", " : "") << probe.errors[i];
      }
      log << "], orders = [";
      for (std::size_t i = 0; i < probe.orders.size(); ++i) {
        log << (i ? ", " : "") << probe.orders[i];
      }
      log << "], " << (probe.monotone ? "monotone" : "NOT monotone") << "\n";
      jprobes.push_back({{"label", probe.label},
                         {"errors", probe.errors},
                         {"orders", probe.orders},
                         {"monotone", probe.monotone},
                         {"exact", probe.exact}});
    }
    study_json["report"] = {{"probes", jprobes},
                            {"all_monotone", summary.all_monotone},
                            {"exact_floor", summary.exact_floor}};
    if (section.assert_mode && !summary.all_monotone) {
      log << "monotone-decrease assertion failed\n";
      exit_code = kExitAssertion;
    }
  }

  {
    std::ofstream out(outdir / "study.json", std::ios::binary | std::ios::trunc);
    out << study_json.dump(2) << '\n';
  }
  write_manifest(outdir, config, {{"subcommand", "homog"}, {"study", study_json["report"]}},
                 exit_code == kExitOk ? "ok" : "assertion failed", clock.seconds());
  return exit_code;
}

int run_equiv(const RunConfig& config, const fs::path& outdir, std::ostream& log) {
  if (!config.equiv) {
    throw ConfigError("missing field 'equiv' (samples section) for the equiv subcommand");
  }
  const ConstitutiveLaws laws = config.laws.build();
  WallClock clock;
  fs::create_directories(outdir);

  const EquivalenceResult res =
      equivalence_check_k2(laws, config.equiv->samples, config.seed, config.equiv->serre_check);

  log << "equivalence over " << res.samples << " samples:\n";
  log << "  max |general - bifluid| relaxation: " << res.max_relaxation_diff << "\n";
  log << "  max |m_general - m_bifluid|:        " << res.max_m_diff << "\n";
  log << "  max |pi_general - pi_bifluid|:      " << res.max_pi_diff << "\n";
  log << "  max absolute difference:            " << res.max_abs_difference << "\n";
  if (config.equiv->serre_check) {
    log << "  max |bifluid - constant-mu form|:   " << res.serre_reduction_diff << "\n";
  }

  bool pass = res.max_abs_difference <= 1e-12;
  if (config.equiv->serre_check) {
    pass = pass && res.serre_reduction_diff <= 1e-14;
  }

  json results = {{"samples", res.samples},
                  {"max_abs_difference", res.max_abs_difference},
                  {"max_relaxation_diff", res.max_relaxation_diff},
                  {"max_m_diff", res.max_m_diff},
                  {"max_pi_diff", res.max_pi_diff},
                  {"pass", pass}};
  if (config.equiv->serre_check) {
    results["serre_reduction_diff"] = res.serre_reduction_diff;
  }
  write_manifest(outdir, config, {{"subcommand", "equiv"}, {"equivalence", results}},
                 pass ? "ok" : "assertion failed", clock.seconds());
  return pass ? kExitOk : kExitAssertion;
}

}  // namespace mfns::driver
