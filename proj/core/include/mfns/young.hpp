#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "mfns/constitutive.hpp"
#include "mfns/grid.hpp"
#include "mfns/multifluid.hpp"
#include "mfns/profiles.hpp"

namespace mfns {

/// Target Young measure nu0 = sum_i alpha0_i(x) delta_{rho0_i(x)} plus the
/// shared initial velocity. Atom values must stay within [1/C0, C0].
struct YoungMeasureSpec {
  std::vector<Profile> alpha0;
  std::vector<Profile> rho0;
  Profile u0;
  double C0 = 10.0;

  int phases() const { return static_cast<int>(alpha0.size()); }
};

/// Checks the simplex/positivity/range invariants at sampled x; throws on
/// violation.
void validate_spec(const YoungMeasureSpec& spec, double L, int samples = 1024);

/// Test pair for moment probing: beta acts on the density variable, phi on x.
/// beta_derivative/phi_derivative are only needed by the kinetic residual.
struct MomentProbe {
  std::string label;
  std::function<double(double)> beta;
  std::function<double(double)> phi;
  std::function<double(double)> beta_derivative;
  std::function<double(double)> phi_derivative;
  double xi_lo = 0.0;
  double xi_hi = std::numeric_limits<double>::infinity();
};

/// The default probe family: beta in {1, xi, xi^2, p, 1/mu, p/mu} crossed
/// with phi in {1, sin(2 pi x/L), cos(2 pi x/L)}. The first six entries are
/// the beta family with phi == 1.
std::vector<MomentProbe> default_probes(const ConstitutiveLaws& laws, double L);

/// Layered piecewise-constant microstructure converging to the spec's Young
/// measure: n macro-cells, each split into k runs of whole grid cells
/// apportioned to alpha0_i (largest remainder), valued at rho0_i at the
/// macro-cell center. Requires N >= 8 n k.
ScalarField synthesize_microstructure(const YoungMeasureSpec& spec, int n,
                                      const PeriodicGrid& grid);

/// <nu_rho, beta phi> = int beta(rho(x)) phi(x) dx for the fine field.
double young_moment_fine(const ScalarField& rho, const MomentProbe& probe);

/// <nu, beta phi> = int sum_i alpha_i beta(rho_i) phi dx for the mf state.
double young_moment_mf(const MultifluidState& state, const MomentProbe& probe);

/// Samples the spec onto a grid as a multifluid initial state.
MultifluidState initial_state_from_spec(const YoungMeasureSpec& spec,
                                        const PeriodicGrid& grid);

struct StudyRun {
  int n = 0;
  int N = 0;
  bool ok = false;
  std::string error;
  std::uint64_t frame_hash = 0;
  /// fine_moments[probe][checkpoint]
  std::vector<std::vector<double>> fine_moments;
};

struct ConvergenceStudy {
  double T = 0.0;
  std::vector<double> checkpoint_times;
  std::vector<std::string> probe_labels;
  int mf_N = 0;
  /// mf_moments[probe][checkpoint]
  std::vector<std::vector<double>> mf_moments;
  std::vector<StudyRun> runs;
  bool horizon_warning = false;
  double horizon_T0 = std::numeric_limits<double>::quiet_NaN();

  /// |fine - mf| at a checkpoint; NaN when the run failed.
  double error_at(std::size_t run, std::size_t probe, std::size_t checkpoint) const;
  /// Final-time error.
  double final_error(std::size_t run, std::size_t probe) const;
};

struct StudyOptions {
  double L = 1.0;
  int cells_per_mode = 32;   // N = cells_per_mode * n * k
  int checkpoints = 8;       // intermediate checkpoints between 0 and T
  double cfl = 0.5;
  double dt_max = 1.0;
  int threads = 1;
};

/// For each n: synthesize the microstructure, run the fine solver to T, and
/// compare Young-measure moments against one multifluid reference run.
/// Individual run failures are recorded and the study continues.
ConvergenceStudy convergence_study(const YoungMeasureSpec& spec, const ConstitutiveLaws& laws,
                                   double T, const std::vector<int>& n_list,
                                   const std::vector<MomentProbe>& probes,
                                   const StudyOptions& options);

struct ProbeSummary {
  std::string label;
  std::vector<double> errors;       // final-time error per n (NaN on failure)
  std::vector<std::string> orders;  // empirical order per consecutive pair, or "exact"
  bool monotone = false;            // e_last < e_first, or all at the exact floor
  bool exact = false;               // every error at or below the exact floor
};

struct WeakLimitSummary {
  std::vector<ProbeSummary> probes;
  bool all_monotone = false;
  double exact_floor = 0.0;
};

/// Requires >= 3 successful runs. Errors at or below exact_floor are treated
/// as converged-to-roundoff and reported as "exact".
WeakLimitSummary weak_limit_report(const ConvergenceStudy& study, double exact_floor = 1e-12);

struct KineticResidualRow {
  std::string label;
  std::vector<double> residuals;  // per interior frame
  double max_abs = 0.0;
};

/// Weak residual of the limit kinetic equation for nu = sum alpha_i
/// delta_{rho_i} on an mf trajectory, per tensorized test psi(x) beta(xi):
///   R = d/dt<nu, psi beta> - <nu, u psi' beta>
///       - <nu, (z_inf + p(xi))/mu(xi) (beta - xi beta') psi>,
/// with z_inf = m (dx u - sum alpha_j p_j/mu_j) and the time derivative by
/// centered differencing of consecutive frames.
std::vector<KineticResidualRow> kinetic_residual(const MfTrajectory& trajectory,
                                                 const ConstitutiveLaws& laws,
                                                 const std::vector<MomentProbe>& probes);

}  // namespace mfns
