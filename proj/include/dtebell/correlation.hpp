#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "dtebell/constants.hpp"
#include "dtebell/dissociation.hpp"
#include "dtebell/distribution.hpp"
#include "dtebell/scenario.hpp"

namespace dtebell {

enum class SwitchMode { Switched, BeamSplitter };
enum class SwitchState { On, Off };

struct InterferometerSetting {
    double ell = 0.0;                      // m, arm-length variation
    double theta = constants::pi / 4.0;    // rad, mirror transmission angle
    SwitchMode switch_mode = SwitchMode::Switched;

    void validate() const;  // theta in [0, pi/2]
};

// Port-projected S-matrix element acting on momentum p. "On" routes into the
// long arm and carries exp(i p ell / hbar); "off" carries no momentum phase.
std::complex<double> smatrix_amplitude(const InterferometerSetting& setting, int port,
                                       SwitchState state, double p);

// Two-particle state with early and late components separated by tau.
struct DtePair {
    MomentumDistribution distribution;
    double tau = 0.0;      // s
    double phi_tau = 0.0;  // rad
    Species species;

    // Particle-1 distance between early and late packet over its
    // dispersion-broadened width at t = tau.
    double separation_margin() const;
    // Throws DomainError for tau <= 0 or a margin below 2; returns
    // warnings (margin below 10).
    std::vector<std::string> validate() const;
};

DtePair gaussian_pair_from_scenario(const Scenario& scenario);
DtePair feshbach_pair_from_scenario(const Scenario& scenario);

enum class CorrelationMethod { Quadrature, ClosedForm, Reference, Empirical };
std::string to_string(CorrelationMethod method);

struct CorrelationResult {
    // Port probabilities in the order (+,+), (+,-), (-,+), (-,-).
    std::array<double, 4> p{};
    double e_value = 0.0;
    CorrelationMethod method = CorrelationMethod::ClosedForm;
    double quadrature_error_estimate = 0.0;
    // Set when a mirror angle differs from pi/4 (generalised weights).
    bool extension = false;
    std::size_t nodes = 0;

    double probability(int sigma1, int sigma2) const;
};

inline constexpr std::size_t port_index(int sigma1, int sigma2) {
    return (sigma1 > 0 ? 0u : 2u) + (sigma2 > 0 ? 0u : 1u);
}

// Port probabilities from the complex interference term
//   I = exp(-i phi_tau) * integral exp(i p.l/hbar - i p^2 tau / 2 m hbar) pr(p).
// Validates normalisation and bounds.
CorrelationResult correlation_from_interference(std::complex<double> interference,
                                                const InterferometerSetting& s1,
                                                const InterferometerSetting& s2,
                                                CorrelationMethod method, double error_estimate = 0.0);

struct QuadratureOptions {
    double tolerance = 1e-6;         // absolute, per port probability
    double nodes_per_radian = 8.0;   // initial sampling of the phase excursion
    double min_nodes_per_radian = 2.0;
    std::size_t max_nodes = std::size_t{4096} * 4096;  // per tensor grid
    int max_refinements = 6;
    bool exploit_separability = true;
    bool check_separation = true;
};

// Tensor-product Gauss-Legendre evaluation of the time-integrated port
// probabilities. The two relative-momentum branches are integrated
// separately, the negative one with the interferometer roles exchanged.
// Throws QuadratureError when the estimate stays above the tolerance.
CorrelationResult correlate_quadrature(const DtePair& pair, const InterferometerSetting& s1,
                                       const InterferometerSetting& s2,
                                       const QuadratureOptions& options = {});

// The interference term alone, with its error estimate.
struct InterferenceIntegral {
    std::complex<double> value;
    std::complex<double> positive_branch;
    std::complex<double> negative_branch;
    double error_estimate = 0.0;  // on |value|
    double truncation_bound = 0.0;
    std::size_t nodes = 0;
    int refinements = 0;
};
InterferenceIntegral interference_quadrature(const DtePair& pair, double ell1, double ell2,
                                             const QuadratureOptions& options = {});

// Closed-form correlation for Gaussian centre-of-mass and relative states.
struct ClosedFormModel {
    GaussianApproximation gaussians;
    Species species;
    double tau = 0.0;
    double phi_tau = 0.0;

    static ClosedFormModel from_scenario(const Scenario& scenario);

    TimescaleSummary scales() const;
    // Arm lengths of the envelope centre: l1 - l2 = tau v_rel, l1 + l2 = 0.
    double center_ell1() const;
    double center_ell2() const;
    double visibility() const;
    double envelope(double ell1, double ell2) const;
    double fringe_phase(double ell1, double ell2) const;
    // visibility * envelope * cos(fringe_phase)
    double interference(double ell1, double ell2) const;
    CorrelationResult correlate(const InterferometerSetting& s1, const InterferometerSetting& s2) const;

    void validate() const;
};

CorrelationResult correlate_closed_form(const GaussianApproximation& gaussians,
                                        const Species& species, double tau, double phi_tau,
                                        double ell1, double ell2);

double fringe_phase(const GaussianApproximation& gaussians, const Species& species, double tau,
                    double phi_tau, double ell1, double ell2);

}  // namespace dtebell
