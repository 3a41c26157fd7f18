#pragma once

#include <string>
#include <vector>

#include "dtebell/distribution.hpp"
#include "dtebell/scenario.hpp"

namespace dtebell {

// p0^2/m = mu_res (B0 + dB - B_res) - 2 U_T - hbar omega_G, in joule.
double threshold_bracket(const Scenario& scenario);

// Relative momentum released by the pulse. Throws BelowThresholdError when
// the bracket above is not positive.
double p0_from_fields(const Scenario& scenario);

// Lorentzian scale, p_bar^2 = m mu_res dB.
double p_bar_from_fields(const Scenario& scenario);
// Spectral width of a pulse of duration T, delta_p^2 = 2 m hbar / T.
double delta_p_from_pulse(const Scenario& scenario);
// Ground state of the trapped molecule (mass 2m): sigma^2 = hbar omega_T m.
GaussianMode trapped_cm_state(const Species& species, const TrapGuide& trap);

FeshbachDistribution feshbach_distribution(const Scenario& scenario);

double feshbach_density(const FeshbachDistribution& dist, double p_cm, double p_rel);

// sigma_rel = kRelSpreadFactor * m hbar / (p0 T).
inline constexpr double kRelSpreadFactor = 1.196;

struct GaussianApproximation {
    GaussianMode rel;  // centred at +p0
    GaussianMode cm;   // centred at 0
};

GaussianApproximation gaussian_approximation(const FeshbachDistribution& dist,
                                             const Species& species, const TrapGuide& trap);
GaussianApproximation gaussian_approximation(const Scenario& scenario);

// Least-squares fit of exp(-y^2 / 2 f^2) to sinc^2(y) over the main lobe
// |y| <= pi, where y = 2 p0 (p_rel - p0) / delta_p^2 is the linearised
// shell coordinate. Reports f and the implied spread f * m hbar / (p0 T).
struct SpreadFit {
    double factor = 0.0;
    double sigma_p = 0.0;
    double rms_residual = 0.0;
};
SpreadFit fit_rel_spread(const FeshbachDistribution& dist);

// Relative phase of the early and late components,
//   [2 U_T tau - mu dB T + mu (B_res - B0) tau] / hbar + omega_G tau.
// Unwrapped unless `wrap` is set, in which case it is reduced to (-pi, pi].
double phi_tau(const Scenario& scenario, bool wrap = false);

// Shot-to-shot relative reproducibility of each parameter entering phi_tau.
struct RelativeErrors {
    double base_field = 0.0;
    double pulse_height = 0.0;
    double resonance_position = 0.0;
    double pulse_duration = 0.0;
    double pulse_separation = 0.0;
    double trap_depth = 0.0;
};

struct PhaseTerm {
    std::string parameter;
    double value = 0.0;         // SI
    double derivative = 0.0;    // rad per SI unit
    double delta = 0.0;         // absolute error, SI
    double contribution = 0.0;  // rad
    bool within_budget = false;
};

struct PhaseBudget {
    std::vector<PhaseTerm> terms;
    double total = 0.0;  // rad, first-order sum of |contributions|
    double budget = 0.0;
    bool within_budget = false;
};

inline constexpr double kPhaseBudget = 0.05;  // rad

// Throws DomainError for negative relative errors.
PhaseBudget phase_stability(const Scenario& scenario, const RelativeErrors& errors,
                            double budget = kPhaseBudget);

// |C_bg|^2 = omega_G a_bg mu_res dB_res ||C~||^2 / (pi hbar^2). The norm
// ||C~||^2 is supplied by the caller in SI units (s^2 kg m / s).
double dissociation_probability(const Scenario& scenario, double c_tilde_norm_sq);

// ||C~||^2 for which `molecules` molecules dissociate `mean_count` on average.
double c_tilde_for_mean_count(const Scenario& scenario, double molecules, double mean_count = 1.0);

// P(two or more dissociated | at least one) for `molecules` independent
// molecules each dissociating with `probability`.
double multi_dissociation_fraction(double probability, double molecules);

}  // namespace dtebell
