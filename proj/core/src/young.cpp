#include "mfns/young.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <sstream>

#include "mfns/errors.hpp"
#include "mfns/ns_solver.hpp"

namespace mfns {

void validate_spec(const YoungMeasureSpec& spec, double L, int samples) {
  const int k = spec.phases();
  if (k < 1 || static_cast<int>(spec.rho0.size()) != k) {
    throw ConfigError("YoungMeasureSpec: need k >= 1 atoms with matching alpha0/rho0");
  }
  if (!(spec.C0 > 0.0)) {
    throw ConfigError("YoungMeasureSpec: C0 must be positive");
  }
  for (int s = 0; s < samples; ++s) {
    const double x = L * (s + 0.5) / samples;
    double sum = 0.0;
    for (int i = 0; i < k; ++i) {
      const double a = spec.alpha0[i].eval(x, L);
      if (a < -1e-12) {
        std::ostringstream msg;
        msg << "YoungMeasureSpec: alpha0[" << i << "](" << x << ")=" << a << " negative";
        throw ConfigError(msg.str());
      }
      sum += a;
      const double r = spec.rho0[i].eval(x, L);
      if (!(r >= 1.0 / spec.C0) || !(r <= spec.C0)) {
        std::ostringstream msg;
        msg << "YoungMeasureSpec: rho0[" << i << "](" << x << ")=" << r
            << " outside [1/C0, C0] = [" << 1.0 / spec.C0 << ", " << spec.C0 << "]";
        throw ConfigError(msg.str());
      }
    }
    if (std::abs(sum - 1.0) > 1e-12) {
      std::ostringstream msg;
      msg << "YoungMeasureSpec: sum alpha0(" << x << ") = " << sum << " != 1";
      throw ConfigError(msg.str());
    }
  }
}

std::vector<MomentProbe> default_probes(const ConstitutiveLaws& laws, double L) {
  struct Beta {
    const char* name;
    std::function<double(double)> f, df;
  };
  const auto p = laws.pressure;
  const auto dp = laws.pressure_derivative;
  const auto mu = laws.viscosity;
  const auto dmu = laws.viscosity_derivative;
  const std::vector<Beta> betas = {
      {"1", [](double) { return 1.0; }, [](double) { return 0.0; }},
      {"xi", [](double x) { return x; }, [](double) { return 1.0; }},
      {"xi^2", [](double x) { return x * x; }, [](double x) { return 2.0 * x; }},
      {"p", p, dp},
      {"1/mu", [mu](double x) { return 1.0 / mu(x); },
       [mu, dmu](double x) { const double m = mu(x); return -dmu(x) / (m * m); }},
      {"p/mu", [p, mu](double x) { return p(x) / mu(x); },
       [p, dp, mu, dmu](double x) {
         const double m = mu(x);
         return (dp(x) * m - p(x) * dmu(x)) / (m * m);
       }},
  };

  struct Phi {
    const char* name;
    std::function<double(double)> f, df;
  };
  const double w = 2.0 * M_PI / L;
  const std::vector<Phi> phis = {
      {"1", [](double) { return 1.0; }, [](double) { return 0.0; }},
      {"sin", [w](double x) { return std::sin(w * x); },
       [w](double x) { return w * std::cos(w * x); }},
      {"cos", [w](double x) { return std::cos(w * x); },
       [w](double x) { return -w * std::sin(w * x); }},
  };

  std::vector<MomentProbe> probes;
  for (const auto& phi : phis) {
    for (const auto& beta : betas) {
      MomentProbe probe;
      probe.label = std::string(beta.name) + "*" + phi.name;
      probe.beta = beta.f;
      probe.beta_derivative = beta.df;
      probe.phi = phi.f;
      probe.phi_derivative = phi.df;
      probes.push_back(std::move(probe));
    }
  }
  return probes;
}

ScalarField synthesize_microstructure(const YoungMeasureSpec& spec, int n,
                                      const PeriodicGrid& grid) {
  const int k = spec.phases();
  if (n < 1) {
    throw std::invalid_argument("synthesize_microstructure: n must be >= 1");
  }
  if (grid.N < 8 * n * k) {
    std::ostringstream msg;
    msg << "synthesize_microstructure: grid under-resolved, need N >= 8*n*k = "
        << 8 * n * k << ", got N = " << grid.N;
    throw std::invalid_argument(msg.str());
  }
  validate_spec(spec, grid.L);

  ScalarField rho(grid);
  std::vector<double> weights(k), atoms(k), target(k), remainder(k);
  std::vector<double> carry(k, 0.0);
  std::vector<int> counts(k), order(k);
  for (int c = 0; c < n; ++c) {
    const int begin = static_cast<int>(static_cast<long long>(c) * grid.N / n);
    const int end = static_cast<int>(static_cast<long long>(c + 1) * grid.N / n);
    const int cells = end - begin;
    const double xc = 0.5 * (begin + end) * grid.dx;

    double wsum = 0.0;
    for (int i = 0; i < k; ++i) {
      weights[i] = std::max(spec.alpha0[i].eval(xc, grid.L), 0.0);
      atoms[i] = spec.rho0[i].eval(xc, grid.L);
      wsum += weights[i];
    }

    // Whole-cell apportionment by largest remainder keeps the per-macro-cell
    // totals exact (beta = 1 moments match the spec exactly). Each phase's
    // fractional remainder is carried into the next macro-cell so cumulative
    // count errors stay below one cell per phase.
    int assigned = 0;
    for (int i = 0; i < k; ++i) {
      target[i] = weights[i] / wsum * cells + carry[i];
      counts[i] = std::max(static_cast<int>(std::floor(target[i])), 0);
      counts[i] = std::min(counts[i], cells);
      remainder[i] = target[i] - counts[i];
      assigned += counts[i];
    }
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return remainder[a] > remainder[b]; });
    for (int r = 0; r < cells - assigned; ++r) {
      ++counts[order[r % k]];
    }
    for (int i = 0; i < k; ++i) {
      carry[i] = target[i] - counts[i];
    }

    int j = begin;
    for (int i = 0; i < k; ++i) {
      for (int c2 = 0; c2 < counts[i]; ++c2) {
        rho[j++] = atoms[i];
      }
    }
  }
  return rho;
}

double young_moment_fine(const ScalarField& rho, const MomentProbe& probe) {
  const auto& g = rho.grid();
  double sum = 0.0;
  for (int j = 0; j < g.N; ++j) {
    sum += probe.beta(rho[j]) * probe.phi(g.center(j));
  }
  return g.dx * sum;
}

double young_moment_mf(const MultifluidState& state, const MomentProbe& probe) {
  const auto& g = state.u.grid();
  const int k = state.phases();
  double sum = 0.0;
  for (int j = 0; j < g.N; ++j) {
    double cell = 0.0;
    for (int i = 0; i < k; ++i) {
      cell += state.alpha[i][j] * probe.beta(state.rho_phase[i][j]);
    }
    sum += cell * probe.phi(g.center(j));
  }
  return g.dx * sum;
}

MultifluidState initial_state_from_spec(const YoungMeasureSpec& spec,
                                        const PeriodicGrid& grid) {
  validate_spec(spec, grid.L);
  MultifluidState state;
  state.time = 0.0;
  state.u = sample_profile(spec.u0, grid);
  for (int i = 0; i < spec.phases(); ++i) {
    state.alpha.push_back(sample_profile(spec.alpha0[i], grid));
    state.rho_phase.push_back(sample_profile(spec.rho0[i], grid));
  }
  return state;
}

double ConvergenceStudy::error_at(std::size_t run, std::size_t probe,
                                  std::size_t checkpoint) const {
  if (!runs[run].ok) return std::numeric_limits<double>::quiet_NaN();
  return std::abs(runs[run].fine_moments[probe][checkpoint] - mf_moments[probe][checkpoint]);
}

double ConvergenceStudy::final_error(std::size_t run, std::size_t probe) const {
  return error_at(run, probe, checkpoint_times.size() - 1);
}

namespace {

std::uint64_t fnv1a(std::uint64_t h, const double* data, std::size_t count) {
  const unsigned char* bytes = reinterpret_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < count * sizeof(double); ++i) {
    h ^= bytes[i];
    h *= 1099511628211ULL;
  }
  return h;
}

StudyRun run_fine_member(const YoungMeasureSpec& spec, const ConstitutiveLaws& laws,
                         double T, int n, const std::vector<MomentProbe>& probes,
                         const StudyOptions& options,
                         const std::vector<double>& checkpoints) {
  StudyRun run;
  run.n = n;
  run.N = options.cells_per_mode * n * spec.phases();
  try {
    const PeriodicGrid grid(options.L, run.N);
    const ScalarField rho0 = synthesize_microstructure(spec, n, grid);
    const ScalarField u0 = sample_profile(spec.u0, grid);

    NSRunOptions opts;
    opts.T = T;
    opts.cfl = options.cfl;
    opts.dt_max = options.dt_max;
    opts.output_every = std::numeric_limits<int>::max();
    opts.stop_times = checkpoints;
    const NSTrajectory traj = ns_run(rho0, u0, laws, opts);
    if (traj.aborted) {
      run.error = traj.abort_reason;
      return run;
    }
    if (traj.frames.size() != checkpoints.size() + 1) {
      run.error = "unexpected frame count";
      return run;
    }

    run.fine_moments.assign(probes.size(), std::vector<double>(checkpoints.size() + 1));
    std::uint64_t h = 1469598103934665603ULL;
    for (std::size_t c = 0; c < traj.frames.size(); ++c) {
      const auto& frame = traj.frames[c];
      for (std::size_t p = 0; p < probes.size(); ++p) {
        run.fine_moments[p][c] = young_moment_fine(frame.rho, probes[p]);
      }
      h = fnv1a(h, frame.rho.values().data(), frame.rho.values().size());
      h = fnv1a(h, frame.u.values().data(), frame.u.values().size());
    }
    run.frame_hash = h;
    run.ok = true;
  } catch (const std::exception& err) {
    run.error = err.what();
  }
  return run;
}

}  // namespace

ConvergenceStudy convergence_study(const YoungMeasureSpec& spec, const ConstitutiveLaws& laws,
                                   double T, const std::vector<int>& n_list,
                                   const std::vector<MomentProbe>& probes,
                                   const StudyOptions& options) {
  if (n_list.empty() || !std::is_sorted(n_list.begin(), n_list.end()) ||
      std::adjacent_find(n_list.begin(), n_list.end()) != n_list.end()) {
    throw std::invalid_argument("convergence_study: n_list must be strictly increasing");
  }
  if (!(T > 0.0)) {
    throw std::invalid_argument("convergence_study: T must be positive");
  }
  validate_spec(spec, options.L);

  ConvergenceStudy study;
  study.T = T;
  const int stops = options.checkpoints + 1;
  for (int c = 0; c <= stops; ++c) {
    study.checkpoint_times.push_back(T * c / stops);
  }
  const std::vector<double> interior(study.checkpoint_times.begin() + 1,
                                     study.checkpoint_times.end());
  for (const auto& p : probes) study.probe_labels.push_back(p.label);

  // Horizon of the synthesized fine data (representative member, first n).
  if (laws.mode == LawMode::strict) {
    try {
      const PeriodicGrid g0(options.L, options.cells_per_mode * n_list.front() * spec.phases());
      const HorizonEstimate est = horizon_estimate(
          synthesize_microstructure(spec, n_list.front(), g0), sample_profile(spec.u0, g0), laws);
      study.horizon_T0 = est.T0;
      study.horizon_warning = T > est.T0;
    } catch (const std::exception&) {
      // estimator unavailable for these laws/data; no warning
    }
  }

  // One multifluid reference on the finest member's resolution.
  study.mf_N = options.cells_per_mode * n_list.back() * spec.phases();
  {
    const PeriodicGrid grid(options.L, study.mf_N);
    MfRunOptions opts;
    opts.T = T;
    opts.cfl = options.cfl;
    opts.dt_max = options.dt_max;
    opts.output_every = std::numeric_limits<int>::max();
    opts.stop_times = interior;
    const MfTrajectory traj = mf_run(initial_state_from_spec(spec, grid), laws, opts);
    if (traj.aborted) {
      throw SolverError("convergence_study: multifluid reference run failed: " +
                        traj.abort_reason);
    }
    study.mf_moments.assign(probes.size(), std::vector<double>(study.checkpoint_times.size()));
    for (std::size_t c = 0; c < traj.frames.size(); ++c) {
      for (std::size_t p = 0; p < probes.size(); ++p) {
        study.mf_moments[p][c] = young_moment_mf(traj.frames[c], probes[p]);
      }
    }
  }

  if (options.threads > 1) {
    std::vector<std::future<StudyRun>> futures;
    futures.reserve(n_list.size());
    for (int n : n_list) {
      futures.push_back(std::async(std::launch::async, run_fine_member, std::cref(spec),
                                   std::cref(laws), T, n, std::cref(probes),
                                   std::cref(options), std::cref(interior)));
    }
    for (auto& f : futures) study.runs.push_back(f.get());
  } else {
    for (int n : n_list) {
      study.runs.push_back(run_fine_member(spec, laws, T, n, probes, options, interior));
    }
  }
  // run_fine_member records moments for checkpoints 0..stops with the initial
  // frame first, matching checkpoint_times.
  return study;
}

WeakLimitSummary weak_limit_report(const ConvergenceStudy& study, double exact_floor) {
  int ok_runs = 0;
  for (const auto& r : study.runs) ok_runs += r.ok ? 1 : 0;
  if (ok_runs < 3) {
    throw std::invalid_argument("weak_limit_report: need >= 3 successful runs");
  }

  WeakLimitSummary summary;
  summary.exact_floor = exact_floor;
  summary.all_monotone = true;
  for (std::size_t p = 0; p < study.probe_labels.size(); ++p) {
    ProbeSummary row;
    row.label = study.probe_labels[p];
    for (std::size_t r = 0; r < study.runs.size(); ++r) {
      row.errors.push_back(study.final_error(r, p));
    }

    row.exact = true;
    for (std::size_t r = 0; r < study.runs.size(); ++r) {
      if (!study.runs[r].ok) continue;
      if (!(row.errors[r] <= exact_floor)) row.exact = false;
    }

    for (std::size_t r = 0; r + 1 < study.runs.size(); ++r) {
      if (!study.runs[r].ok || !study.runs[r + 1].ok) {
        row.orders.push_back("n/a");
        continue;
      }
      const double e0 = row.errors[r], e1 = row.errors[r + 1];
      if (e0 <= exact_floor && e1 <= exact_floor) {
        row.orders.push_back("exact");
        continue;
      }
      const double ratio = static_cast<double>(study.runs[r + 1].n) / study.runs[r].n;
      std::ostringstream ord;
      ord.precision(3);
      ord << std::log(e0 / e1) / std::log(ratio);
      row.orders.push_back(ord.str());
    }

    const StudyRun* first = nullptr;
    const StudyRun* last = nullptr;
    double e_first = 0.0, e_last = 0.0;
    for (std::size_t r = 0; r < study.runs.size(); ++r) {
      if (!study.runs[r].ok) continue;
      if (!first) {
        first = &study.runs[r];
        e_first = row.errors[r];
      }
      last = &study.runs[r];
      e_last = row.errors[r];
    }
    (void)first;
    (void)last;
    row.monotone = e_last < e_first || e_last <= exact_floor;
    summary.all_monotone = summary.all_monotone && row.monotone;
    summary.probes.push_back(std::move(row));
  }
  return summary;
}

std::vector<KineticResidualRow> kinetic_residual(const MfTrajectory& trajectory,
                                                 const ConstitutiveLaws& laws,
                                                 const std::vector<MomentProbe>& probes) {
  const auto& frames = trajectory.frames;
  if (frames.size() < 3) {
    throw std::invalid_argument("kinetic_residual: need at least 3 frames");
  }
  for (const auto& probe : probes) {
    if (!probe.beta_derivative || !probe.phi_derivative) {
      throw std::invalid_argument("kinetic_residual: probe '" + probe.label +
                                  "' lacks beta/phi derivatives");
    }
  }

  // Range check: every phase density across the trajectory must stay inside
  // each probe's declared beta domain.
  double rho_lo = std::numeric_limits<double>::infinity(), rho_hi = 0.0;
  for (const auto& frame : frames) {
    for (const auto& rp : frame.rho_phase) {
      rho_lo = std::min(rho_lo, min_value(rp));
      rho_hi = std::max(rho_hi, max_value(rp));
    }
  }
  for (const auto& probe : probes) {
    if (rho_lo < probe.xi_lo || rho_hi > probe.xi_hi) {
      std::ostringstream msg;
      msg << "kinetic_residual: trajectory densities [" << rho_lo << ", " << rho_hi
          << "] leave the beta domain of probe '" << probe.label << "'";
      throw std::invalid_argument(msg.str());
    }
  }

  const std::size_t M = frames.size();
  std::vector<KineticResidualRow> rows;
  rows.reserve(probes.size());
  for (const auto& probe : probes) {
    KineticResidualRow row;
    row.label = probe.label;

    std::vector<double> moments(M);
    for (std::size_t m = 0; m < M; ++m) {
      moments[m] = young_moment_mf(frames[m], probe);
    }

    for (std::size_t m = 1; m + 1 < M; ++m) {
      const auto& st = frames[m];
      const auto& g = st.u.grid();
      const int k = st.phases(), n = g.N;
      const double mdot =
          (moments[m + 1] - moments[m - 1]) / (frames[m + 1].time - frames[m - 1].time);

      const ScalarField dudx = ddx_central(st.u);
      double t1 = 0.0, t2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double x = g.center(j);
        double s1 = 0.0, s2 = 0.0;
        for (int i = 0; i < k; ++i) {
          const double mu = laws.viscosity(st.rho_phase[i][j]);
          s1 += st.alpha[i][j] / mu;
          s2 += st.alpha[i][j] * laws.pressure(st.rho_phase[i][j]) / mu;
        }
        const double z_inf = (dudx[j] - s2) / s1;

        double beta_sum = 0.0, src_sum = 0.0;
        for (int i = 0; i < k; ++i) {
          const double xi = st.rho_phase[i][j];
          const double b = probe.beta(xi);
          beta_sum += st.alpha[i][j] * b;
          src_sum += st.alpha[i][j] * (z_inf + laws.pressure(xi)) / laws.viscosity(xi) *
                     (b - xi * probe.beta_derivative(xi));
        }
        t1 += beta_sum * st.u[j] * probe.phi_derivative(x);
        t2 += src_sum * probe.phi(x);
      }
      t1 *= g.dx;
      t2 *= g.dx;

      const double r = mdot - t1 - t2;
      row.residuals.push_back(r);
      row.max_abs = std::max(row.max_abs, std::abs(r));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace mfns
