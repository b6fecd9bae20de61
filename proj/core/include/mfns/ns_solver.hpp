#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mfns/constitutive.hpp"
#include "mfns/grid.hpp"

namespace mfns {

/// Fine-scale state (rho, u) at a time instant plus the running viscous
/// dissipation integral int_0^t int mu(rho) |dx u|^2.
struct NSState {
  double time = 0.0;
  ScalarField rho;
  ScalarField u;
  double dissipation_integral = 0.0;
};

/// Explicit constants of the a priori estimates. T0_u is not separately
/// computable from the estimates' statement and is reported equal to T0_rho.
struct HorizonEstimate {
  double K_u0 = 0.0;
  double K_d0 = 0.0;
  double T0_rho = 0.0;
  double T0 = 0.0;
  bool T0_u_separate = false;
};

struct EnergyReport {
  double kinetic = 0.0;
  double potential = 0.0;
  double total_plus_dissipation = 0.0;
};

/// Optional manufactured-solution sources (t, x) -> value, applied to the
/// continuity and momentum updates; used by the convergence tests.
struct NSForcing {
  std::function<double(double, double)> mass;
  std::function<double(double, double)> momentum;
};

inline constexpr double kVacuumFloor = 1e-10;

/// One step of the operator-split scheme: explicit conservative upwind
/// advection of rho and rho*u, implicit viscous solve with mu frozen at the
/// new density (cyclic tridiagonal), explicit pressure gradient at the new
/// density. The dissipation integral accumulates the same discrete
/// mu |dx u|^2 the implicit solve uses.
NSState ns_step(const NSState& state, const ConstitutiveLaws& laws, double dt,
                const NSForcing* forcing = nullptr, double vacuum_floor = kVacuumFloor);

/// Advisory acoustic CFL bound cfl * min_j dx/(|u_j| + c_j), c = sqrt(max(p',0)),
/// clamped to dt_max. The implicit viscous term imposes no restriction.
double stable_dt(const NSState& state, const ConstitutiveLaws& laws, double cfl,
                 double dt_max);

/// Effective viscous flux z = mu(rho) dx u - p(rho) (centered derivative).
ScalarField effective_flux(const NSState& state, const ConstitutiveLaws& laws);

EnergyReport energy_report(const NSState& state, const ConstitutiveLaws& laws);

/// BD entropy functional int rho |u + dx phi(rho)|^2 / 2 + q(rho).
double bd_entropy(const NSState& state, const ConstitutiveLaws& laws);

/// Haspot damped variable v = u + dx phi(rho).
ScalarField haspot_v(const NSState& state, const ConstitutiveLaws& laws);

/// Explicit time-horizon constants from the initial data. Requires
/// admissible strict-mode laws.
HorizonEstimate horizon_estimate(const ScalarField& rho0, const ScalarField& u0,
                                 const ConstitutiveLaws& laws);

struct NSRunOptions {
  double T = 0.0;
  double cfl = 0.5;
  double dt_max = 1.0;
  int output_every = 1;
  double vacuum_floor = kVacuumFloor;
  /// Extra times the run must land on exactly (sorted, within [0, T]).
  std::vector<double> stop_times;
  const NSForcing* forcing = nullptr;
};

struct NSTrajectory {
  std::vector<NSState> frames;
  int total_steps = 0;
  bool aborted = false;
  std::string abort_reason;
};

/// Advances with stable_dt until T, emitting a frame every output_every
/// steps (plus t = 0, all stop_times, and the final time). On vacuum
/// approach or non-finite state the partial trajectory is returned with
/// `aborted` set.
NSTrajectory ns_run(const ScalarField& rho0, const ScalarField& u0,
                    const ConstitutiveLaws& laws, const NSRunOptions& options);

}  // namespace mfns
