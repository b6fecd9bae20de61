#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace mfns {

/// Admissibility class for the equations of state. `strict` demands a
/// monotone pressure and a viscosity bounded below by mu0*(1+sqrt(rho));
/// `relaxed` admits shallow-water-type laws (mu > 0 with mu <= C + C*p).
enum class LawMode { strict, relaxed };

/// Equations of state p(rho), mu(rho) with their derivatives, plus the
/// derived potentials used by the diagnostics. Immutable after construction;
/// safe to share across threads.
struct ConstitutiveLaws {
  std::function<double(double)> pressure;
  std::function<double(double)> pressure_derivative;
  std::function<double(double)> viscosity;
  std::function<double(double)> viscosity_derivative;

  /// Lower-bound constant in the strict viscosity assumption mu >= mu0*(1+sqrt(rho)).
  double mu0 = 1.0;
  LawMode mode = LawMode::strict;

  /// Closed forms for the potentials, registered by the factories below.
  /// When empty the potentials fall back to adaptive quadrature.
  std::function<double(double)> energy_potential_closed;
  std::function<double(double)> bd_potential_closed;

  std::string pressure_name = "custom";
  std::string viscosity_name = "custom";
};

/// p(rho) = a * rho^gamma.
struct PowerlawPressure {
  double a = 1.0;
  double gamma = 2.0;
};

/// mu(rho) = c + d * sqrt(rho).
struct PowerlawViscosity {
  double c = 1.0;
  double d = 1.0;
};

/// mu(rho) = c * rho (shallow-water type; relaxed mode only).
struct LinearViscosity {
  double c = 1.0;
};

/// mu0 < 0 means "derive it": min(c, d) for a power-law viscosity.
ConstitutiveLaws make_laws(const PowerlawPressure& p, const PowerlawViscosity& mu,
                           LawMode mode = LawMode::strict, double mu0 = -1.0);
ConstitutiveLaws make_laws(const PowerlawPressure& p, const LinearViscosity& mu);

struct LawViolation {
  std::string invariant;
  double sample = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::vector<LawViolation> violations;
  /// Smallest sampled C with mu(s) <= C + C*p(s) (relaxed mode only).
  double relaxed_damping_constant = std::numeric_limits<double>::quiet_NaN();
  bool admissible() const { return violations.empty(); }
  std::string summary() const;
};

/// Samples [rho_lo, rho_hi] uniformly (endpoints included) and reports every
/// violated invariant of the declared mode. Non-finite law evaluations are
/// reported as violations, never thrown.
ValidationReport validate_laws(const ConstitutiveLaws& laws, double rho_lo, double rho_hi,
                               int samples);

/// q(rho) = rho * int_1^rho p(s)/s^2 ds  (base point 1, so q(1) = 0).
double energy_potential(const ConstitutiveLaws& laws, double rho);

/// phi(rho) = int_1^rho mu(s)/s^2 ds  (base point 1, so phi(1) = 0).
double bd_potential(const ConstitutiveLaws& laws, double rho);

/// kappa(rho) = p(rho)/mu(rho).
double kappa(const ConstitutiveLaws& laws, double rho);

}  // namespace mfns
