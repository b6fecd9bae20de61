// Acceptance suite: runs each acceptance criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion. Exit code = number of
// failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "mfns/config.hpp"
#include "mfns/driver.hpp"
#include "mfns/multifluid.hpp"
#include "mfns/ns_solver.hpp"
#include "mfns/young.hpp"

using namespace mfns;
namespace fs = std::filesystem;

namespace {

const auto kLaws =
    make_laws(PowerlawPressure{1.0, 2.0}, PowerlawViscosity{1.0, 1.0}, LawMode::strict, 1.0);
constexpr double kExactFloor = 1e-12;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

YoungMeasureSpec canonical_spec() {
  YoungMeasureSpec spec;
  spec.alpha0 = {Profile::constant(0.5), Profile::constant(0.5)};
  spec.rho0 = {Profile::constant(1.0), Profile::constant(2.0)};
  spec.u0 = Profile::sine(0.0, 0.1);
  spec.C0 = 10.0;
  return spec;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

// --- criterion 1: Appendix-B equivalence, 1e5 seeded samples, <= 1e-12 ---
Outcome criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  const EquivalenceResult res = equivalence_check_k2(kLaws, 100000, 1);
  const double wall = seconds_since(t0);
  Outcome out;
  out.pass = res.max_abs_difference <= 1e-12 && wall < 5.0;
  out.detail = "max diff " + fmt(res.max_abs_difference) + " (tol 1e-12), " + fmt(wall) + " s";
  return out;
}

// --- criterion 2: constant-viscosity reduction, 1e4 samples, <= 1e-14 ---
Outcome criterion2() {
  const auto mu_const =
      make_laws(PowerlawPressure{1.0, 2.0}, PowerlawViscosity{2.0, 0.0}, LawMode::relaxed, 2.0);
  const EquivalenceResult res = equivalence_check_k2(mu_const, 10000, 1, true);
  Outcome out;
  out.pass = res.serre_reduction_diff <= 1e-14;
  out.detail = "max |bifluid - alpha+alpha-(p+-p-)/mu| = " + fmt(res.serre_reduction_diff) +
               " (tol 1e-14)";
  return out;
}

// shared canonical multifluid long run (criteria 3 and 4)
struct LongRun {
  MfTrajectory traj;
  double mass0[2] = {0.0, 0.0};
};

const LongRun& long_mf_run() {
  static LongRun cache = [] {
    const PeriodicGrid g(1.0, 128);
    const MultifluidState init = initial_state_from_spec(canonical_spec(), g);
    MfRunOptions opts;
    opts.T = 0.25;
    opts.dt_max = 0.25 / 10000.0;  // forces >= 1e4 steps
    opts.output_every = 500;
    LongRun run;
    run.traj = mf_run(init, kLaws, opts);
    for (int i = 0; i < 2; ++i) {
      ScalarField m(g);
      for (int j = 0; j < g.N; ++j) m[j] = init.alpha[i][j] * init.rho_phase[i][j];
      run.mass0[i] = integrate(m);
    }
    return run;
  }();
  return cache;
}

// --- criterion 3: closure identity <= 1e-12 on every mf frame ---
Outcome criterion3() {
  Outcome out;
  double worst = 0.0;
  const auto& traj = long_mf_run().traj;
  if (traj.aborted) {
    out.detail = "run aborted: " + traj.abort_reason;
    return out;
  }
  for (const auto& frame : traj.frames) {
    worst = std::max(worst, closure_identity_residual(frame, kLaws));
  }
  // plus the canonical bifluid run at study resolution
  const PeriodicGrid g(1.0, 1024);
  MfRunOptions opts;
  opts.T = 0.05;
  opts.output_every = 100;
  const MfTrajectory traj2 = mf_run(initial_state_from_spec(canonical_spec(), g), kLaws, opts);
  if (traj2.aborted) {
    out.detail = "study-resolution run aborted: " + traj2.abort_reason;
    return out;
  }
  for (const auto& frame : traj2.frames) {
    worst = std::max(worst, closure_identity_residual(frame, kLaws));
  }
  out.pass = worst <= 1e-12;
  out.detail = "max |sum (alpha_i/mu_i) f_i - dx u| = " + fmt(worst) + " (tol 1e-12)";
  return out;
}

// --- criterion 4: simplex each step + phase masses over >= 1e4 steps ---
Outcome criterion4() {
  Outcome out;
  const LongRun& run = long_mf_run();
  if (run.traj.aborted) {
    out.detail = "run aborted: " + run.traj.abort_reason;
    return out;
  }
  if (run.traj.total_steps < 10000) {
    out.detail = "only " + std::to_string(run.traj.total_steps) + " steps";
    return out;
  }
  double simplex = 0.0;
  for (const auto& frame : run.traj.frames) {
    for (int j = 0; j < frame.u.size(); ++j) {
      simplex = std::max(simplex,
                         std::abs(frame.alpha[0][j] + frame.alpha[1][j] - 1.0));
    }
  }
  double mass_rel = 0.0;
  const auto& last = run.traj.frames.back();
  for (int i = 0; i < 2; ++i) {
    ScalarField m(last.u.grid());
    for (int j = 0; j < last.u.size(); ++j) m[j] = last.alpha[i][j] * last.rho_phase[i][j];
    mass_rel = std::max(mass_rel,
                        std::abs(integrate(m) - run.mass0[i]) / std::abs(run.mass0[i]));
  }
  out.pass = simplex <= 1e-12 && run.traj.max_alpha_drift <= 1e-10 && mass_rel <= 1e-8;
  out.detail = "simplex " + fmt(simplex) + " (tol 1e-12), drift/step " +
               fmt(run.traj.max_alpha_drift) + " (tol 1e-10), mass drift " + fmt(mass_rel) +
               " (tol 1e-8) over " + std::to_string(run.traj.total_steps) + " steps";
  return out;
}

// shared smooth strict-mode run for criteria 5 and 6
const NSTrajectory& smooth_ns_run() {
  static NSTrajectory cache = [] {
    const PeriodicGrid g(1.0, 512);
    const ScalarField rho0 =
        ScalarField::sample(g, [](double x) { return 1.0 + 0.1 * std::sin(2.0 * M_PI * x); });
    const ScalarField u0 =
        ScalarField::sample(g, [](double x) { return 0.1 * std::sin(2.0 * M_PI * x); });
    NSRunOptions opts;
    opts.T = 0.1;
    opts.output_every = 1;  // every step is a frame
    return ns_run(rho0, u0, kLaws, opts);
  }();
  return cache;
}

// --- criterion 5: discrete energy inequality on N=512, T=0.1 ---
Outcome criterion5() {
  const auto t0 = std::chrono::steady_clock::now();
  const NSTrajectory& traj = smooth_ns_run();
  const double wall = seconds_since(t0);
  Outcome out;
  if (traj.aborted) {
    out.detail = "run aborted: " + traj.abort_reason;
    return out;
  }
  const double e0 = energy_report(traj.frames.front(), kLaws).total_plus_dissipation;
  double worst = -1e300;
  for (const auto& frame : traj.frames) {
    worst = std::max(worst,
                     energy_report(frame, kLaws).total_plus_dissipation / e0 - 1.0);
  }
  out.pass = worst <= 1e-8 && wall < 30.0;
  out.detail = "max E(t)+D(t) over E(0) - 1 = " + fmt(worst) + " (tol 1e-8), " +
               std::to_string(traj.frames.size()) + " frames, " + fmt(wall) + " s";
  return out;
}

// --- criterion 6: BD entropy nonincreasing within 1e-6 relative slack ---
Outcome criterion6() {
  const NSTrajectory& traj = smooth_ns_run();
  Outcome out;
  if (traj.aborted) {
    out.detail = "run aborted: " + traj.abort_reason;
    return out;
  }
  const double bd0 = bd_entropy(traj.frames.front(), kLaws);
  double prev = bd0;
  double worst = -1e300;
  for (std::size_t i = 1; i < traj.frames.size(); ++i) {
    const double bd = bd_entropy(traj.frames[i], kLaws);
    worst = std::max(worst, (bd - prev) / bd0);
    prev = bd;
  }
  out.pass = worst <= 1e-6;
  out.detail = "max frame-to-frame increase / BD(0) = " + fmt(worst) + " (tol 1e-6)";
  return out;
}

// --- criterion 7: k=1 cross-solver convergence, factor >= 1.8 per halving ---
Outcome criterion7() {
  auto diff_at = [](int N) {
    const PeriodicGrid g(1.0, N);
    const ScalarField rho =
        ScalarField::sample(g, [](double x) { return 1.0 + 0.2 * std::sin(2.0 * M_PI * x); });
    const ScalarField u =
        ScalarField::sample(g, [](double x) { return 0.1 * std::cos(2.0 * M_PI * x); });
    NSRunOptions nopts;
    nopts.T = 0.04;
    const NSTrajectory nst = ns_run(rho, u, kLaws, nopts);
    MultifluidState mf0;
    mf0.u = u;
    mf0.alpha = {ScalarField(g, 1.0)};
    mf0.rho_phase = {rho};
    MfRunOptions mopts;
    mopts.T = 0.04;
    const MfTrajectory mft = mf_run(mf0, kLaws, mopts);
    double s = 0.0;
    const auto& a = nst.frames.back();
    const auto& b = mft.frames.back();
    for (int j = 0; j < N; ++j) {
      s += (a.rho[j] - b.rho_phase[0][j]) * (a.rho[j] - b.rho_phase[0][j]);
      s += (a.u[j] - b.u[j]) * (a.u[j] - b.u[j]);
    }
    return std::sqrt(g.dx * s);
  };
  const double d128 = diff_at(128), d256 = diff_at(256), d512 = diff_at(512);
  Outcome out;
  const bool exact = d128 <= kExactFloor && d256 <= kExactFloor && d512 <= kExactFloor;
  out.pass = exact || (d128 / d256 >= 1.8 && d256 / d512 >= 1.8);
  out.detail = "L2 diff " + fmt(d128) + " / " + fmt(d256) + " / " + fmt(d512) +
               ", ratios " + fmt(d128 / d256) + ", " + fmt(d256 / d512) + " (>= 1.8)";
  return out;
}

// --- criterion 8: canonical homogenization study ---
Outcome criterion8() {
  const YoungMeasureSpec spec = canonical_spec();
  const auto probes = default_probes(kLaws, 1.0);
  const std::vector<int> n_list = {8, 16, 32, 64};
  StudyOptions opts;
  opts.L = 1.0;
  opts.cells_per_mode = 32;  // N = 32 n k = 64 n

  const auto t0 = std::chrono::steady_clock::now();
  const ConvergenceStudy study = convergence_study(spec, kLaws, 0.05, n_list, probes, opts);
  const double wall_single = seconds_since(t0);

  const auto t1 = std::chrono::steady_clock::now();
  StudyOptions par = opts;
  par.threads = 4;
  const ConvergenceStudy study_par =
      convergence_study(spec, kLaws, 0.05, n_list, probes, par);
  const double wall_par = seconds_since(t1);

  Outcome out;
  for (const auto& run : study.runs) {
    if (!run.ok) {
      out.detail = "member n=" + std::to_string(run.n) + " failed: " + run.error;
      return out;
    }
  }

  bool pass = wall_single < 15.0 * 60.0 && wall_par < 5.0 * 60.0;
  std::ostringstream detail;
  // the six default beta probes with phi == 1 are the first six
  for (int p = 0; p < 6; ++p) {
    const double e8 = study.final_error(0, p);
    const double e64 = study.final_error(3, p);
    const bool at_floor = e8 <= kExactFloor && e64 <= kExactFloor;
    bool ok = at_floor || e64 < e8;
    if (study.probe_labels[p] == "xi*1") {
      ok = at_floor || e64 <= 0.5 * e8;
    }
    pass = pass && ok;
    detail << study.probe_labels[p] << ": e8=" << fmt(e8) << " e64=" << fmt(e64)
           << (at_floor ? " (exact)" : "") << (ok ? "" : " [FAIL]") << "; ";
  }
  // identical results regardless of the thread count
  for (std::size_t r = 0; r < study.runs.size(); ++r) {
    pass = pass && study.runs[r].frame_hash == study_par.runs[r].frame_hash;
  }
  detail << fmt(wall_single) << " s single, " << fmt(wall_par) << " s with 4 threads";

  // Supplementary evidence for the limit itself: extrapolate the fine xi^2
  // moment in cells-per-oscillation (Aitken on 32/128/512) at fixed n and
  // compare with the multifluid prediction. The gap is the homogenization
  // distance with the grid error removed; it shrinks with n even though the
  // pinned-policy errors above cannot (a mid-cell contact costs a Jensen gap
  // ~ 0.2 dx per interface, and n dx is constant under N = 32 n k).
  {
    const MomentProbe& xi2 = probes[2];
    const PeriodicGrid gmf(1.0, 8192);
    MfRunOptions mopts;
    mopts.T = 0.05;
    mopts.output_every = 1 << 30;
    const MfTrajectory mft = mf_run(initial_state_from_spec(spec, gmf), kLaws, mopts);
    const double mf_moment = young_moment_mf(mft.frames.back(), xi2);
    detail << "\n    note: resolved-limit check (beta=xi^2): mf moment " << fmt(mf_moment);
    for (int n : {8, 32}) {
      double m[3];
      int idx = 0;
      for (int cpm : {32, 128, 512}) {
        const PeriodicGrid g(1.0, cpm * n * 2);
        NSRunOptions nopts;
        nopts.T = 0.05;
        nopts.output_every = 1 << 30;
        const NSTrajectory t =
            ns_run(synthesize_microstructure(spec, n, g), sample_profile(spec.u0, g), kLaws, nopts);
        m[idx++] = young_moment_fine(t.frames.back().rho, xi2);
      }
      const double d1 = m[1] - m[0], d2 = m[2] - m[1];
      const double extrap = m[2] + d2 * d2 / (d1 - d2);  // Aitken
      detail << ", n=" << n << " fine extrapolates to " << fmt(extrap) << " (gap "
             << fmt(std::abs(extrap - mf_moment)) << ")";
    }
  }
  out.pass = pass;
  out.detail = detail.str();
  return out;
}

// --- criterion 9: horizon constants ---
Outcome criterion9() {
  const PeriodicGrid g(1.0, 256);
  Outcome out;

  const HorizonEstimate est = horizon_estimate(ScalarField(g, 1.0), ScalarField(g, 0.0), kLaws);
  const double kk = 4.0 / (1.0 + std::sqrt(2.0));
  const double expected_Ku0 = 36.0 * 2.0 * (0.25 + 1.0 + kk * kk);
  const double r = std::log(1.5) / (2.0 * est.K_d0);
  const double expected_T0rho = std::min(0.5, r * r);
  const bool arithmetic_ok =
      std::abs(est.K_u0 - expected_Ku0) <= 1e-12 * expected_Ku0 &&
      std::abs(est.T0_rho - expected_T0rho) <= 1e-15 * std::max(expected_T0rho, 1e-300);

  const ScalarField step = ScalarField::sample(g, [](double x) { return x < 0.5 ? 1.0 : 2.0; });
  const ScalarField u0(g, 0.0);
  const HorizonEstimate est_step = horizon_estimate(step, u0, kLaws);
  NSRunOptions opts;
  opts.T = est_step.T0;
  const NSTrajectory traj = ns_run(step, u0, kLaws, opts);
  bool bounds_ok = !traj.aborted;
  for (const auto& frame : traj.frames) {
    bounds_ok = bounds_ok && min_value(frame.rho) >= 0.5 && max_value(frame.rho) <= 4.0;
  }
  out.pass = arithmetic_ok && bounds_ok;
  out.detail = "K_u0 = " + fmt(est.K_u0) + " (expected " + fmt(expected_Ku0) + "), T0_rho = " +
               fmt(est.T0_rho) + ", step-data bounds " + (bounds_ok ? "hold" : "VIOLATED") +
               " up to T0 = " + fmt(est_step.T0);
  return out;
}

// --- criterion 10: kinetic residual ---
Outcome criterion10() {
  const YoungMeasureSpec spec = canonical_spec();
  const auto probes = default_probes(kLaws, 1.0);
  const double T = 0.05;

  auto residuals_at = [&](int N, int frames, double dt) {
    const PeriodicGrid g(1.0, N);
    MfRunOptions opts;
    opts.T = T;
    opts.dt_max = dt;
    opts.output_every = 1 << 30;
    for (int c = 1; c <= frames; ++c) opts.stop_times.push_back(T * c / frames);
    const MfTrajectory traj = mf_run(initial_state_from_spec(spec, g), kLaws, opts);
    return kinetic_residual(traj, kLaws, probes);
  };

  const auto coarse = residuals_at(512, 16, T / 1024.0);
  const auto fine = residuals_at(1024, 32, T / 2048.0);

  Outcome out;
  bool pass = coarse[0].max_abs <= 1e-8 && coarse[1].max_abs <= 1e-8;
  std::ostringstream detail;
  detail << "R(1,1)=" << fmt(coarse[0].max_abs) << " R(1,xi)=" << fmt(coarse[1].max_abs)
         << " (tol 1e-8); orders:";
  const double floor = 1e-10;
  for (std::size_t p = 0; p < probes.size(); ++p) {
    if (coarse[p].max_abs <= floor && fine[p].max_abs <= floor) {
      detail << " " << probes[p].label << "=exact";
      continue;
    }
    const double order = std::log2(coarse[p].max_abs / fine[p].max_abs);
    pass = pass && order >= 1.0;
    detail << " " << probes[p].label << "=" << fmt(order) << (order >= 1.0 ? "" : "[FAIL]");
  }
  out.pass = pass;
  out.detail = detail.str();
  return out;
}

// --- criterion 11: byte-identical CSVs on re-run ---
Outcome criterion11() {
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  };
  const fs::path base = fs::temp_directory_path() / "mfns_acceptance_det";
  fs::remove_all(base);
  std::ostringstream sink;

  const RunConfig ns_cfg = parse_config_json(R"({
    "laws": {"pressure": {"type": "powerlaw_pressure", "a": 1.0, "gamma": 2.0},
             "viscosity": {"type": "powerlaw_viscosity", "c": 1.0, "d": 1.0}, "mu0": 1.0},
    "grid": {"L": 1.0, "N": 512},
    "T": 0.1, "output_every": 20, "seed": 1,
    "initial": {"rho": {"type": "sine", "mean": 1.0, "amplitude": 0.1},
                "u": {"type": "sine", "mean": 0.0, "amplitude": 0.1}}
  })");
  driver::run_ns(ns_cfg, base / "ns_a", sink);
  driver::run_ns(ns_cfg, base / "ns_b", sink);

  const RunConfig mf_cfg = parse_config_json(R"({
    "laws": {"pressure": {"type": "powerlaw_pressure", "a": 1.0, "gamma": 2.0},
             "viscosity": {"type": "powerlaw_viscosity", "c": 1.0, "d": 1.0}, "mu0": 1.0},
    "grid": {"L": 1.0, "N": 256},
    "T": 0.05, "output_every": 50, "seed": 1,
    "initial": {
      "alpha": [{"type": "constant", "value": 0.5}, {"type": "constant", "value": 0.5}],
      "rho": [{"type": "constant", "value": 1.0}, {"type": "constant", "value": 2.0}],
      "u": {"type": "sine", "mean": 0.0, "amplitude": 0.1}}
  })");
  driver::run_mf(mf_cfg, base / "mf_a", sink);
  driver::run_mf(mf_cfg, base / "mf_b", sink);

  RunConfig homog_cfg = parse_config_json(R"({
    "laws": {"pressure": {"type": "powerlaw_pressure", "a": 1.0, "gamma": 2.0},
             "viscosity": {"type": "powerlaw_viscosity", "c": 1.0, "d": 1.0}, "mu0": 1.0},
    "grid": {"L": 1.0, "N": 512},
    "T": 0.05, "seed": 1,
    "homog": {
      "alpha0": [{"type": "constant", "value": 0.5}, {"type": "constant", "value": 0.5}],
      "rho0": [{"type": "constant", "value": 1.0}, {"type": "constant", "value": 2.0}],
      "u0": {"type": "sine", "mean": 0.0, "amplitude": 0.1},
      "n_list": [8, 16, 32], "cells_per_mode": 32, "assert": false}
  })");
  driver::run_homog(homog_cfg, base / "h_a", sink);
  homog_cfg.threads = 4;  // thread count must not change the bytes
  driver::run_homog(homog_cfg, base / "h_b", sink);

  Outcome out;
  out.pass = true;
  const std::vector<std::tuple<std::string, std::string, std::string>> comparisons = {
      {"ns_a", "ns_b", "frames.csv"},      {"ns_a", "ns_b", "diagnostics.csv"},
      {"mf_a", "mf_b", "frames.csv"},      {"mf_a", "mf_b", "diagnostics.csv"},
      {"h_a", "h_b", "errors.csv"},        {"h_a", "h_b", "error_curves.csv"}};
  for (const auto& [a, b, file] : comparisons) {
    const std::string ca = slurp(base / a / file), cb = slurp(base / b / file);
    if (ca.empty() || ca != cb) {
      out.pass = false;
      out.detail += file + " differs between " + a + " and " + b + "; ";
    }
  }
  if (out.pass) {
    out.detail = "ns/mf/homog CSVs byte-identical across re-runs (homog also across threads)";
  }
  fs::remove_all(base);
  return out;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"Appendix-B equivalence (1e5 samples, <= 1e-12, < 5 s)", criterion1},
      {"constant-viscosity reduction (1e4 samples, <= 1e-14)", criterion2},
      {"closure identity on every mf frame (<= 1e-12)", criterion3},
      {"simplex each step + phase masses over >= 1e4 steps", criterion4},
      {"discrete energy inequality (N=512, T=0.1, < 30 s)", criterion5},
      {"BD entropy nonincreasing (1e-6 relative slack)", criterion6},
      {"k=1 mf/ns L2 gap shrinks >= 1.8x per dx-halving", criterion7},
      {"homogenization convergence (canonical bifluid study)", criterion8},
      {"horizon constants exact + step-data density bounds", criterion9},
      {"kinetic residual (<= 1e-8 conserved probes, order >= 1)", criterion10},
      {"determinism: byte-identical CSVs on re-run", criterion11},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& err) {
      out.pass = false;
      out.detail = std::string("exception: ") + err.what();
    }
    if (!out.pass) ++failures;
    std::cout << (out.pass ? "[PASS]" : "[FAIL]") << " criterion " << i + 1 << ": "
              << criteria[i].first << " -- " << out.detail << "\n";
  }
  std::cout << (failures == 0 ? "ACCEPTANCE: all criteria passed"
                              : "ACCEPTANCE: " + std::to_string(failures) + " criteria FAILED")
            << "\n";
  return failures;
}
