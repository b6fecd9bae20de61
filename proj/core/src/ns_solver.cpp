#include "mfns/ns_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
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

void check_positive(const ScalarField& rho, double floor, const char* context) {
  const int n = rho.size();
  for (int j = 0; j < n; ++j) {
    if (!(rho[j] > floor)) {
      std::ostringstream msg;
      msg << context << ": vacuum approach, rho[" << j << "]=" << rho[j]
          << " at x=" << rho.grid().center(j);
      throw VacuumError(msg.str(), j);
    }
  }
}

}  // namespace

NSState ns_step(const NSState& state, const ConstitutiveLaws& laws, double dt,
                const NSForcing* forcing, double vacuum_floor) {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("ns_step: dt must be positive");
  }
  const auto& g = state.rho.grid();
  require_same_grid(state.rho, state.u);
  const int n = g.N;
  const double lambda = dt / g.dx;

  const ScalarField& rho = state.rho;
  const ScalarField& u = state.u;

  // Interface velocities and donor-cell upwind fluxes; face j sits between
  // cells j and j+1.
  std::vector<double> mom(n);
  for (int j = 0; j < n; ++j) mom[j] = rho[j] * u[j];
  std::vector<double> uf(n), frho(n), fmom(n);
  for (int j = 0; j < n; ++j) {
    const int jp = j == n - 1 ? 0 : j + 1;
    uf[j] = 0.5 * (u[j] + u[jp]);
    frho[j] = upwind_face(rho[j], rho[jp], uf[j]) * uf[j];
    fmom[j] = upwind_face(mom[j], mom[jp], uf[j]) * uf[j];
  }

  NSState next;
  next.time = state.time + dt;
  next.rho = ScalarField(g);
  next.u = ScalarField(g);

  for (int j = 0; j < n; ++j) {
    const int jm = j == 0 ? n - 1 : j - 1;
    next.rho[j] = rho[j] - lambda * (frho[j] - frho[jm]);
    if (forcing && forcing->mass) {
      next.rho[j] += dt * forcing->mass(state.time, g.center(j));
    }
  }
  check_positive(next.rho, vacuum_floor, "ns_step");

  // Explicit pressure gradient at the new density enters before the viscous
  // solve, so the implicit operator damps the interface kick it creates on
  // under-resolved density jumps within the same step.
  std::vector<double> p(n);
  for (int j = 0; j < n; ++j) p[j] = laws.pressure(next.rho[j]);
  const double inv2dx = 1.0 / (2.0 * g.dx);
  std::vector<double> mstar(n);
  for (int j = 0; j < n; ++j) {
    const int jm = j == 0 ? n - 1 : j - 1;
    const int jp = j == n - 1 ? 0 : j + 1;
    mstar[j] = mom[j] - lambda * (fmom[j] - fmom[jm]) - dt * (p[jp] - p[jm]) * inv2dx;
    if (forcing && forcing->momentum) {
      mstar[j] += dt * forcing->momentum(state.time, g.center(j));
    }
  }

  // Implicit viscous solve with mu frozen at the new density:
  //   rho_new u - dt/dx^2 [mu_{j+1/2}(u_{j+1}-u_j) - mu_{j-1/2}(u_j-u_{j-1})] = mstar.
  std::vector<double> mu_face(n);
  {
    std::vector<double> mu_cell(n);
    for (int j = 0; j < n; ++j) mu_cell[j] = laws.viscosity(next.rho[j]);
    for (int j = 0; j < n; ++j) {
      const int jp = j == n - 1 ? 0 : j + 1;
      mu_face[j] = 0.5 * (mu_cell[j] + mu_cell[jp]);
    }
  }
  const double theta = dt / (g.dx * g.dx);
  std::vector<double> sub(n), diag(n), sup(n);
  for (int j = 0; j < n; ++j) {
    const int jm = j == 0 ? n - 1 : j - 1;
    sub[j] = -theta * mu_face[jm];
    sup[j] = -theta * mu_face[j];
    diag[j] = next.rho[j] + theta * (mu_face[jm] + mu_face[j]);
  }
  const std::vector<double> uvis = solve_cyclic_tridiagonal(sub, diag, sup, mstar);
  for (int j = 0; j < n; ++j) {
    next.u[j] = uvis[j];
  }

  double dissip = 0.0;
  for (int j = 0; j < n; ++j) {
    const int jp = j == n - 1 ? 0 : j + 1;
    const double grad = (uvis[jp] - uvis[j]) / g.dx;
    dissip += mu_face[j] * grad * grad;
  }
  next.dissipation_integral = state.dissipation_integral + dt * g.dx * dissip;

  if (!all_finite(next.rho) || !all_finite(next.u)) {
    throw SolverError("ns_step: non-finite state");
  }
  return next;
}

double stable_dt(const NSState& state, const ConstitutiveLaws& laws, double cfl,
                 double dt_max) {
  if (!(cfl > 0.0) || cfl > 1.0) {
    throw std::invalid_argument("stable_dt: cfl must lie in (0, 1]");
  }
  double speed = 0.0;
  const int n = state.rho.size();
  for (int j = 0; j < n; ++j) {
    const double c2 = std::max(laws.pressure_derivative(state.rho[j]), 0.0);
    speed = std::max(speed, std::abs(state.u[j]) + std::sqrt(c2));
  }
  if (speed == 0.0) return dt_max;
  return std::min(cfl * state.rho.grid().dx / speed, dt_max);
}

ScalarField effective_flux(const NSState& state, const ConstitutiveLaws& laws) {
  ScalarField z = ddx_central(state.u);
  for (int j = 0; j < z.size(); ++j) {
    const double r = state.rho[j];
    z[j] = laws.viscosity(r) * z[j] - laws.pressure(r);
  }
  return z;
}

EnergyReport energy_report(const NSState& state, const ConstitutiveLaws& laws) {
  EnergyReport out;
  const double dx = state.rho.grid().dx;
  double kin = 0.0, pot = 0.0;
  for (int j = 0; j < state.rho.size(); ++j) {
    kin += 0.5 * state.rho[j] * state.u[j] * state.u[j];
    pot += energy_potential(laws, state.rho[j]);
  }
  out.kinetic = dx * kin;
  out.potential = dx * pot;
  out.total_plus_dissipation = out.kinetic + out.potential + state.dissipation_integral;
  return out;
}

double bd_entropy(const NSState& state, const ConstitutiveLaws& laws) {
  const auto& g = state.rho.grid();
  ScalarField phi(g);
  for (int j = 0; j < g.N; ++j) phi[j] = bd_potential(laws, state.rho[j]);
  const ScalarField phix = ddx_central(phi);
  double sum = 0.0;
  for (int j = 0; j < g.N; ++j) {
    const double v = state.u[j] + phix[j];
    sum += 0.5 * state.rho[j] * v * v + energy_potential(laws, state.rho[j]);
  }
  return g.dx * sum;
}

ScalarField haspot_v(const NSState& state, const ConstitutiveLaws& laws) {
  const auto& g = state.rho.grid();
  ScalarField phi(g);
  for (int j = 0; j < g.N; ++j) phi[j] = bd_potential(laws, state.rho[j]);
  ScalarField v = ddx_central(phi);
  for (int j = 0; j < g.N; ++j) v[j] += state.u[j];
  return v;
}

HorizonEstimate horizon_estimate(const ScalarField& rho0, const ScalarField& u0,
                                 const ConstitutiveLaws& laws) {
  require_same_grid(rho0, u0);
  const double rho_lo = min_value(rho0);
  const double rho_hi = max_value(rho0);
  if (!(rho_lo > 0.0)) {
    throw std::invalid_argument("horizon_estimate: initial density must be positive");
  }
  if (laws.mode != LawMode::strict) {
    throw std::invalid_argument(
        "horizon_estimate: the explicit constants require strict-mode laws");
  }
  const ValidationReport check = validate_laws(laws, 0.0, 2.0 * rho_hi, 257);
  if (!check.admissible()) {
    throw std::invalid_argument("horizon_estimate: laws not admissible: " + check.summary());
  }

  const double L = rho0.grid().L;

  // K^0_beta = max of beta over [rho_lo/2, 2 rho_hi], by dense sampling
  // (exact at the endpoints, which is where monotone laws peak).
  auto range_max = [&](const std::function<double(double)>& f) {
    const double lo = 0.5 * rho_lo, hi = 2.0 * rho_hi;
    double best = -std::numeric_limits<double>::infinity();
    const int samples = 4097;
    for (int i = 0; i < samples; ++i) {
      best = std::max(best, f(lo + (hi - lo) * i / (samples - 1.0)));
    }
    return best;
  };
  const double K_kappa = range_max([&](double s) { return kappa(laws, s); });
  const double K_mu = range_max(laws.viscosity);
  const double K_p = range_max(laws.pressure);

  // || sqrt(mu(rho0)) dx u0 - kappa(rho0) ||_{L2}^2
  const ScalarField dux = ddx_central(u0);
  double knorm = 0.0;
  for (int j = 0; j < rho0.size(); ++j) {
    const double w = std::sqrt(laws.viscosity(rho0[j])) * dux[j] - kappa(laws, rho0[j]);
    knorm += w * w;
  }
  knorm *= rho0.grid().dx;

  // E_c^0 = int rho_hi |u0|^2/2 + L * max q over the initial density range.
  double ke = 0.0;
  for (int j = 0; j < u0.size(); ++j) ke += u0[j] * u0[j];
  double q_max = -std::numeric_limits<double>::infinity();
  {
    const int samples = 4097;
    for (int i = 0; i < samples; ++i) {
      const double s = rho_lo + (rho_hi - rho_lo) * i / (samples - 1.0);
      q_max = std::max(q_max, energy_potential(laws, s));
    }
  }
  const double E_c0 = 0.5 * rho_hi * rho0.grid().dx * ke + L * q_max;

  HorizonEstimate est;
  est.K_u0 = 36.0 * (1.0 / laws.mu0 + rho_hi) * (knorm + 1.0 + L * K_kappa * K_kappa);
  est.K_d0 = (std::sqrt(L) + 1.0 / std::sqrt(L)) / laws.mu0 *
                 std::sqrt(2.0 * K_mu * E_c0 + 2.0 * L * K_p * K_p + est.K_u0) +
             K_p / laws.mu0;
  const double r = std::log(1.5) / (2.0 * est.K_d0);
  est.T0_rho = std::min(0.5, r * r);
  const double T0_u = est.T0_rho;  // not separately computable from the estimates
  est.T0 = std::min({1.0, est.T0_rho, T0_u}) / 2.0;
  est.T0_u_separate = false;

  if (!(est.K_u0 > 0.0) || !(est.K_d0 > 0.0) || !(est.T0 > 0.0) ||
      !std::isfinite(est.K_u0 + est.K_d0 + est.T0)) {
    throw SolverError("horizon_estimate: constants are not positive finite");
  }
  return est;
}

NSTrajectory ns_run(const ScalarField& rho0, const ScalarField& u0,
                    const ConstitutiveLaws& laws, const NSRunOptions& options) {
  require_same_grid(rho0, u0);
  if (!(options.T >= 0.0)) {
    throw std::invalid_argument("ns_run: T must be >= 0");
  }
  if (!(min_value(rho0) > 0.0)) {
    throw std::invalid_argument("ns_run: initial density must be positive");
  }

  NSTrajectory traj;
  NSState state{0.0, rho0, u0, 0.0};
  traj.frames.push_back(state);
  if (options.T == 0.0) return traj;

  size_t next_stop = 0;
  const double t_eps = 1e-12 * std::max(options.T, 1.0);
  int steps_since_output = 0;
  while (state.time < options.T - t_eps) {
    double dt = stable_dt(state, laws, options.cfl, options.dt_max);
    bool at_stop = false;
    while (next_stop < options.stop_times.size() &&
           options.stop_times[next_stop] <= state.time + t_eps) {
      ++next_stop;  // already passed (or t=0)
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

    try {
      state = ns_step(state, laws, dt, options.forcing, options.vacuum_floor);
    } catch (const SolverError& err) {
      traj.aborted = true;
      traj.abort_reason = err.what();
      return traj;
    }
    ++traj.total_steps;
    ++steps_since_output;

    const bool final_frame = state.time >= options.T - t_eps;
    if (final_frame || at_stop || steps_since_output >= options.output_every) {
      traj.frames.push_back(state);
      steps_since_output = 0;
    }
    if (final_frame) break;
  }
  return traj;
}

}  // namespace mfns
