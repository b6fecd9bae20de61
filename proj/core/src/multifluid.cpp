#include "mfns/multifluid.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "mfns/errors.hpp"
#include "mfns/tridiag.hpp"

namespace mfns {
namespace {

inline double upwind_face(double left, double right, double uf) {
  if (uf > 0.0) return left;
  if (uf < 0.0) return right;
  return 0.5 * (left + right);
}

constexpr double kFractionSlack = 1e-9;

// mt19937_64 with an explicit bit mapping so draws are identical across
// standard libraries.
struct Rng {
  std::mt19937_64 engine;
  explicit Rng(std::uint64_t seed) : engine(seed) {}
  double uniform() { return static_cast<double>(engine() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
};

}  // namespace

void check_state(const MultifluidState& state, double simplex_tol) {
  const int k = state.phases();
  if (k < 1 || static_cast<int>(state.rho_phase.size()) != k) {
    throw std::invalid_argument("MultifluidState: need k >= 1 with matching alpha/rho");
  }
  for (int i = 0; i < k; ++i) {
    require_same_grid(state.alpha[i], state.u);
    require_same_grid(state.rho_phase[i], state.u);
  }
  const int n = state.u.size();
  for (int j = 0; j < n; ++j) {
    double sum = 0.0;
    for (int i = 0; i < k; ++i) {
      const double a = state.alpha[i][j];
      if (a < -1e-12) {
        std::ostringstream msg;
        msg << "alpha[" << i << "][" << j << "]=" << a << " negative";
        throw SolverError(msg.str());
      }
      if (!(state.rho_phase[i][j] > 0.0)) {
        std::ostringstream msg;
        msg << "rho_phase[" << i << "][" << j << "]=" << state.rho_phase[i][j]
            << " not positive";
        throw SolverError(msg.str());
      }
      sum += a;
    }
    if (std::abs(sum - 1.0) > simplex_tol) {
      std::ostringstream msg;
      msg << "sum alpha at cell " << j << " = " << sum << " deviates from 1";
      throw SolverError(msg.str());
    }
  }
}

MixtureClosures mixture(const MultifluidState& state, const ConstitutiveLaws& laws) {
  const auto& g = state.u.grid();
  const int k = state.phases(), n = g.N;
  MixtureClosures out{ScalarField(g), ScalarField(g), ScalarField(g)};
  for (int j = 0; j < n; ++j) {
    double rb = 0.0, s1 = 0.0, s2 = 0.0;
    for (int i = 0; i < k; ++i) {
      const double a = state.alpha[i][j];
      const double r = state.rho_phase[i][j];
      const double mu = laws.viscosity(r);
      if (!(mu > 0.0)) {
        throw SolverError("mixture: nonpositive phase viscosity");
      }
      rb += a * r;
      s1 += a / mu;
      s2 += a * laws.pressure(r) / mu;
    }
    out.rho_bar[j] = rb;
    out.m[j] = 1.0 / s1;
    out.pi[j] = s2 / s1;
  }
  return out;
}

std::vector<ScalarField> relaxation_rates(const MultifluidState& state,
                                          const ConstitutiveLaws& laws,
                                          const ScalarField& dudx) {
  require_same_grid(state.u, dudx);
  const auto& g = state.u.grid();
  const int k = state.phases(), n = g.N;
  std::vector<ScalarField> f(k, ScalarField(g));
  for (int j = 0; j < n; ++j) {
    double s1 = 0.0, s2 = 0.0;
    for (int i = 0; i < k; ++i) {
      const double mu = laws.viscosity(state.rho_phase[i][j]);
      if (!(mu > 0.0)) {
        throw SolverError("relaxation_rates: nonpositive phase viscosity");
      }
      s1 += state.alpha[i][j] / mu;
      s2 += state.alpha[i][j] * laws.pressure(state.rho_phase[i][j]) / mu;
    }
    const double common = (dudx[j] - s2) / s1;
    for (int i = 0; i < k; ++i) {
      f[i][j] = common + laws.pressure(state.rho_phase[i][j]);
    }
  }
  return f;
}

double closure_identity_residual(const MultifluidState& state,
                                 const ConstitutiveLaws& laws) {
  const ScalarField dudx = ddx_central(state.u);
  const auto f = relaxation_rates(state, laws, dudx);
  const int k = state.phases(), n = state.u.size();
  double worst = 0.0;
  for (int j = 0; j < n; ++j) {
    double sum = 0.0;
    for (int i = 0; i < k; ++i) {
      sum += state.alpha[i][j] * f[i][j] / laws.viscosity(state.rho_phase[i][j]);
    }
    worst = std::max(worst, std::abs(sum - dudx[j]));
  }
  return worst;
}

MultifluidState mf_step(const MultifluidState& state, const ConstitutiveLaws& laws,
                        double dt, MfStepStats* stats, double vacuum_floor) {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("mf_step: dt must be positive");
  }
  const auto& g = state.u.grid();
  const int k = state.phases(), n = g.N;
  const double lambda = dt / g.dx;
  const ScalarField& u = state.u;

  // --- (i) conservative upwind transport of alpha_i and alpha_i rho_i ---
  std::vector<double> uf(n);
  for (int j = 0; j < n; ++j) {
    const int jp = j == n - 1 ? 0 : j + 1;
    uf[j] = 0.5 * (u[j] + u[jp]);
  }

  MultifluidState next;
  next.time = state.time + dt;
  next.u = ScalarField(g);
  next.alpha.assign(k, ScalarField(g));
  next.rho_phase.assign(k, ScalarField(g));

  std::vector<double> total_mass_flux(n, 0.0);
  std::vector<std::vector<double>> mass(k, std::vector<double>(n));
  for (int i = 0; i < k; ++i) {
    const ScalarField& a = state.alpha[i];
    const ScalarField& r = state.rho_phase[i];
    std::vector<double> fa(n), fm(n);
    for (int j = 0; j < n; ++j) {
      const int jp = j == n - 1 ? 0 : j + 1;
      fa[j] = upwind_face(a[j], a[jp], uf[j]) * uf[j];
      fm[j] = upwind_face(a[j] * r[j], a[jp] * r[jp], uf[j]) * uf[j];
      total_mass_flux[j] += fm[j];
    }
    // Transport may leave the simplex transiently (the fraction equation is
    // a conservation law, not a maximum principle); the relaxation substep
    // brings the sum back, so range checks happen after both.
    for (int j = 0; j < n; ++j) {
      const int jm = j == 0 ? n - 1 : j - 1;
      const double anew = a[j] - lambda * (fa[j] - fa[jm]);
      const double mnew = a[j] * r[j] - lambda * (fm[j] - fm[jm]);
      next.alpha[i][j] = anew;
      mass[i][j] = mnew;
      next.rho_phase[i][j] = anew > kAlphaFloor ? mnew / anew : r[j];
      if (!(next.rho_phase[i][j] > vacuum_floor)) {
        std::ostringstream msg;
        msg << "mf_step: vacuum approach in phase " << i << ", rho=" << next.rho_phase[i][j]
            << " at cell " << j;
        throw VacuumError(msg.str(), j);
      }
    }
  }

  // --- (ii) cell-local relaxation with frozen dudx, sub-cycled when stiff ---
  const ScalarField dudx = ddx_central(u);
  double drift = 0.0;
  int max_substeps = 1;
  std::vector<double> av(k), rv(k), muv(k), pv(k);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < k; ++i) {
      av[i] = next.alpha[i][j];
      rv[i] = next.rho_phase[i][j];
    }
    const double D = dudx[j];

    auto max_rate = [&]() {
      double s1 = 0.0, s2 = 0.0;
      for (int i = 0; i < k; ++i) {
        muv[i] = laws.viscosity(rv[i]);
        pv[i] = laws.pressure(rv[i]);
        s1 += av[i] / muv[i];
        s2 += av[i] * pv[i] / muv[i];
      }
      const double common = (D - s2) / s1;
      double worst = 0.0;
      for (int i = 0; i < k; ++i) {
        worst = std::max(worst, std::abs((common + pv[i]) / muv[i]));
      }
      return worst;
    };

    int nsub = 1;
    double rate0 = max_rate();
    while (rate0 * dt / nsub > 0.1 && nsub < (1 << 20)) nsub *= 2;
    max_substeps = std::max(max_substeps, nsub);
    const double h = dt / nsub;
    for (int step = 0; step < nsub; ++step) {
      double s1 = 0.0, s2 = 0.0;
      for (int i = 0; i < k; ++i) {
        muv[i] = laws.viscosity(rv[i]);
        pv[i] = laws.pressure(rv[i]);
        s1 += av[i] / muv[i];
        s2 += av[i] * pv[i] / muv[i];
      }
      const double common = (D - s2) / s1;
      for (int i = 0; i < k; ++i) {
        const double anew = av[i] * (1.0 + h * (common + pv[i]) / muv[i]);
        if (anew > kAlphaFloor) {
          rv[i] = mass[i][j] / anew;  // relaxation preserves alpha_i rho_i
          if (!(rv[i] > vacuum_floor)) {
            std::ostringstream msg;
            msg << "mf_step: vacuum approach in phase " << i << " at cell " << j;
            throw VacuumError(msg.str(), j);
          }
        }
        av[i] = anew;
      }
    }

    // The combined transport + relaxation update must respect the simplex.
    for (int i = 0; i < k; ++i) {
      if (av[i] < -kFractionSlack || av[i] > 1.0 + kFractionSlack) {
        std::ostringstream msg;
        msg << "mf_step: fraction " << av[i] << " of phase " << i << " at cell " << j
            << " left [-1e-9, 1+1e-9] before clamping";
        throw SolverError(msg.str());
      }
      av[i] = std::clamp(av[i], 0.0, 1.0);
    }

    // Renormalize the simplex by uniform scaling; rho_i scales inversely so
    // the phase masses alpha_i rho_i are untouched.
    double sum = 0.0;
    for (int i = 0; i < k; ++i) sum += av[i];
    if (!(sum > 0.5)) {
      std::ostringstream msg;
      msg << "mf_step: simplex collapsed at cell " << j << ", sum alpha = " << sum;
      throw SolverError(msg.str());
    }
    drift = std::max(drift, std::abs(sum - 1.0));
    for (int i = 0; i < k; ++i) {
      next.alpha[i][j] = av[i] / sum;
      next.rho_phase[i][j] = rv[i] * sum;
    }
  }

  // --- (iii) mixture momentum update ---
  // The advective momentum flux reuses the phase-mass fluxes times the
  // interface velocity, so momentum is carried consistently with the
  // transported mixture mass. As in ns_step, the mixture pressure gradient
  // enters the implicit viscous solve's right-hand side.
  const MixtureClosures clo = mixture(next, laws);
  const double inv2dx = 1.0 / (2.0 * g.dx);
  std::vector<double> mstar(n);
  for (int j = 0; j < n; ++j) {
    const int jm = j == 0 ? n - 1 : j - 1;
    const int jp = j == n - 1 ? 0 : j + 1;
    double rb_old = 0.0;
    for (int i = 0; i < k; ++i) rb_old += state.alpha[i][j] * state.rho_phase[i][j];
    const double gj = total_mass_flux[j] * uf[j];
    const double gm = total_mass_flux[jm] * uf[jm];
    mstar[j] = rb_old * u[j] - lambda * (gj - gm) - dt * (clo.pi[jp] - clo.pi[jm]) * inv2dx;
  }

  const double theta = dt / (g.dx * g.dx);
  std::vector<double> m_face(n), sub(n), diag(n), sup(n);
  for (int j = 0; j < n; ++j) {
    const int jp = j == n - 1 ? 0 : j + 1;
    m_face[j] = 0.5 * (clo.m[j] + clo.m[jp]);
  }
  for (int j = 0; j < n; ++j) {
    const int jm = j == 0 ? n - 1 : j - 1;
    sub[j] = -theta * m_face[jm];
    sup[j] = -theta * m_face[j];
    diag[j] = clo.rho_bar[j] + theta * (m_face[jm] + m_face[j]);
  }
  const std::vector<double> uvis = solve_cyclic_tridiagonal(sub, diag, sup, mstar);
  for (int j = 0; j < n; ++j) {
    next.u[j] = uvis[j];
  }

  if (!all_finite(next.u)) {
    throw SolverError("mf_step: non-finite state");
  }
  if (stats) {
    stats->alpha_drift = drift;
    stats->relaxation_substeps = max_substeps;
  }
  return next;
}

double mf_stable_dt(const MultifluidState& state, const ConstitutiveLaws& laws,
                    double cfl, double dt_max) {
  if (!(cfl > 0.0) || cfl > 1.0) {
    throw std::invalid_argument("mf_stable_dt: cfl must lie in (0, 1]");
  }
  double speed = 0.0;
  const int k = state.phases(), n = state.u.size();
  for (int j = 0; j < n; ++j) {
    double c2 = 0.0;
    for (int i = 0; i < k; ++i) {
      c2 = std::max(c2, laws.pressure_derivative(state.rho_phase[i][j]));
    }
    speed = std::max(speed, std::abs(state.u[j]) + std::sqrt(std::max(c2, 0.0)));
  }
  if (speed == 0.0) return dt_max;
  return std::min(cfl * state.u.grid().dx / speed, dt_max);
}

MfTrajectory mf_run(const MultifluidState& initial, const ConstitutiveLaws& laws,
                    const MfRunOptions& options) {
  check_state(initial);
  if (!(options.T >= 0.0)) {
    throw std::invalid_argument("mf_run: T must be >= 0");
  }

  MfTrajectory traj;
  MultifluidState state = initial;
  state.time = 0.0;
  traj.frames.push_back(state);
  traj.frame_stats.push_back({});
  if (options.T == 0.0) return traj;

  size_t next_stop = 0;
  const double t_eps = 1e-12 * std::max(options.T, 1.0);
  int steps_since_output = 0;
  double drift_since_output = 0.0;
  while (state.time < options.T - t_eps) {
    double dt = mf_stable_dt(state, laws, options.cfl, options.dt_max);
    bool at_stop = false;
    while (next_stop < options.stop_times.size() &&
           options.stop_times[next_stop] <= state.time + t_eps) {
      ++next_stop;
    }
    if (next_stop < options.stop_times.size() &&
        state.time + dt >= options.stop_times[next_stop] - t_eps) {
      dt = options.stop_times[next_stop] - state.time;
      at_stop = true;
      ++next_stop;
    }
    if (state.time + dt > options.T) {
      dt = options.T - state.time;
    }
    if (!(dt > 0.0)) break;

    MfStepStats stats;
    try {
      state = mf_step(state, laws, dt, &stats, options.vacuum_floor);
    } catch (const SolverError& err) {
      traj.aborted = true;
      traj.abort_reason = err.what();
      return traj;
    }
    ++traj.total_steps;
    ++steps_since_output;
    drift_since_output = std::max(drift_since_output, stats.alpha_drift);
    traj.max_alpha_drift = std::max(traj.max_alpha_drift, stats.alpha_drift);

    const bool final_frame = state.time >= options.T - t_eps;
    if (final_frame || at_stop || steps_since_output >= options.output_every) {
      traj.frames.push_back(state);
      traj.frame_stats.push_back({drift_since_output});
      steps_since_output = 0;
      drift_since_output = 0.0;
    }
    if (final_frame) break;
  }
  return traj;
}

ScalarField bifluid_rhs(const ScalarField& alpha_plus, const ScalarField& rho_plus,
                        const ScalarField& rho_minus, const ScalarField& dudx,
                        const ConstitutiveLaws& laws) {
  require_same_grid(alpha_plus, rho_plus);
  require_same_grid(alpha_plus, rho_minus);
  require_same_grid(alpha_plus, dudx);
  ScalarField out(alpha_plus.grid());
  for (int j = 0; j < out.size(); ++j) {
    const double ap = alpha_plus[j];
    const double am = 1.0 - ap;
    const double mup = laws.viscosity(rho_plus[j]);
    const double mum = laws.viscosity(rho_minus[j]);
    const double pp = laws.pressure(rho_plus[j]);
    const double pm = laws.pressure(rho_minus[j]);
    out[j] = ap * am / (ap * mum + am * mup) * ((pp - pm) - dudx[j] * (mup - mum));
  }
  return out;
}

EquivalenceResult equivalence_check_k2(const ConstitutiveLaws& laws, long samples,
                                       std::uint64_t seed, bool serre_check) {
  if (samples < 1) {
    throw std::invalid_argument("equivalence_check_k2: samples must be >= 1");
  }
  Rng rng(seed);
  EquivalenceResult res;
  res.samples = samples;
  for (long s = 0; s < samples; ++s) {
    double ap = rng.uniform();
    while (ap == 0.0) ap = rng.uniform();
    const double rp = rng.uniform(0.1, 10.0);
    const double rm = rng.uniform(0.1, 10.0);
    const double D = rng.uniform(-5.0, 5.0);

    const double am = 1.0 - ap;
    const double mup = laws.viscosity(rp), mum = laws.viscosity(rm);
    const double pp = laws.pressure(rp), pm = laws.pressure(rm);

    // General-k relaxation, k = 2, advective form of the fraction equation.
    const double s1 = ap / mup + am / mum;
    const double s2 = ap * pp / mup + am * pm / mum;
    const double fplus = (D - s2) / s1 + pp;
    const double general = ap * fplus / mup - ap * D;

    const double denom = ap * mum + am * mup;
    const double bifluid = ap * am / denom * ((pp - pm) - D * (mup - mum));

    const double m_general = 1.0 / s1;
    const double m_bifluid = mup * mum / denom;
    const double pi_general = s2 / s1;
    const double pi_bifluid = (ap * pp * mum + am * pm * mup) / denom;

    res.max_relaxation_diff = std::max(res.max_relaxation_diff, std::abs(general - bifluid));
    res.max_m_diff = std::max(res.max_m_diff, std::abs(m_general - m_bifluid));
    res.max_pi_diff = std::max(res.max_pi_diff, std::abs(pi_general - pi_bifluid));

    if (serre_check) {
      const double mu_const = laws.viscosity(1.0);
      const double serre = ap * am * (pp - pm) / mu_const;
      res.serre_reduction_diff = std::max(res.serre_reduction_diff, std::abs(bifluid - serre));
    }
  }
  res.max_abs_difference =
      std::max({res.max_relaxation_diff, res.max_m_diff, res.max_pi_diff});
  return res;
}

}  // namespace mfns
