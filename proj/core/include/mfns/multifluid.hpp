#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mfns/constitutive.hpp"
#include "mfns/grid.hpp"

namespace mfns {

/// Homogenized k-phase state: volume fractions alpha_i on the probability
/// simplex, phase densities rho_i > 0, and the common velocity u.
struct MultifluidState {
  double time = 0.0;
  std::vector<ScalarField> alpha;
  std::vector<ScalarField> rho_phase;
  ScalarField u;

  int phases() const { return static_cast<int>(alpha.size()); }
};

/// Throws when the simplex or positivity invariants fail.
void check_state(const MultifluidState& state, double simplex_tol = 1e-12);

struct MixtureClosures {
  ScalarField rho_bar;  // sum alpha_j rho_j
  ScalarField m;        // [sum alpha_j / mu(rho_j)]^-1
  ScalarField pi;       // m * sum alpha_j p(rho_j)/mu(rho_j)
};

MixtureClosures mixture(const MultifluidState& state, const ConstitutiveLaws& laws);

/// Relaxation sources f_i = m (dudx - sum_j alpha_j p_j/mu_j) + p(rho_i).
std::vector<ScalarField> relaxation_rates(const MultifluidState& state,
                                          const ConstitutiveLaws& laws,
                                          const ScalarField& dudx);

inline constexpr double kAlphaFloor = 1e-8;

struct MfStepStats {
  /// Worst per-cell |sum_i alpha_i - 1| before renormalization.
  double alpha_drift = 0.0;
  int relaxation_substeps = 1;
};

/// One step of the split scheme: conservative upwind transport of alpha_i and
/// the phase masses alpha_i rho_i, cell-local explicit relaxation (sub-cycled
/// when stiff) holding dudx frozen, then the mixture momentum update with an
/// implicit viscous solve of coefficient m. The simplex is renormalized by
/// uniform scaling with the drift logged; phase masses are preserved exactly
/// by scaling rho_i inversely.
MultifluidState mf_step(const MultifluidState& state, const ConstitutiveLaws& laws,
                        double dt, MfStepStats* stats = nullptr,
                        double vacuum_floor = 1e-10);

/// CFL bound with the wave speed taken over all phases.
double mf_stable_dt(const MultifluidState& state, const ConstitutiveLaws& laws,
                    double cfl, double dt_max);

struct MfRunOptions {
  double T = 0.0;
  double cfl = 0.5;
  double dt_max = 1.0;
  int output_every = 1;
  double vacuum_floor = 1e-10;
  std::vector<double> stop_times;
};

struct MfFrameStats {
  /// Max pre-renormalization drift across the steps since the previous frame.
  double alpha_drift = 0.0;
};

struct MfTrajectory {
  std::vector<MultifluidState> frames;
  std::vector<MfFrameStats> frame_stats;  // parallel to frames
  double max_alpha_drift = 0.0;
  int total_steps = 0;
  bool aborted = false;
  std::string abort_reason;
};

MfTrajectory mf_run(const MultifluidState& initial, const ConstitutiveLaws& laws,
                    const MfRunOptions& options);

/// Max over cells of |sum_i (alpha_i/mu_i) f_i - dudx| for a frame; an
/// algebraic identity of the closures, so it should sit at roundoff.
double closure_identity_residual(const MultifluidState& state, const ConstitutiveLaws& laws);

/// Right-hand side of the bifluid volume-fraction equation
///   dt alpha+ + u dx alpha+ =
///     alpha+ alpha- / (alpha+ mu- + alpha- mu+) * [(p+ - p-) - dudx (mu+ - mu-)].
ScalarField bifluid_rhs(const ScalarField& alpha_plus, const ScalarField& rho_plus,
                        const ScalarField& rho_minus, const ScalarField& dudx,
                        const ConstitutiveLaws& laws);

struct EquivalenceResult {
  double max_abs_difference = 0.0;   // general-k k=2 forms vs bifluid forms
  double max_relaxation_diff = 0.0;
  double max_m_diff = 0.0;
  double max_pi_diff = 0.0;
  /// Max |bifluid rhs - alpha+ alpha- (p+ - p-)/mu| over the draws; only
  /// meaningful for constant viscosity laws.
  double serre_reduction_diff = 0.0;
  long samples = 0;
};

/// Draws seeded random states (alpha+ in (0,1), rho in [0.1, 10], dudx in
/// [-5, 5]) and compares the k=2 instance of the general relaxation/closures
/// against the bifluid forms.
EquivalenceResult equivalence_check_k2(const ConstitutiveLaws& laws, long samples,
                                       std::uint64_t seed, bool serre_check = false);

}  // namespace mfns
