#include "dtebell/dissociation.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/minima.hpp>
#include <cmath>

#include "dtebell/constants.hpp"
#include "dtebell/errors.hpp"

namespace dtebell {

using constants::hbar;

double threshold_bracket(const Scenario& scenario) {
    return scenario.resonance.moment_diff * scenario.over_resonance() -
           2.0 * scenario.trap.trap_depth - hbar * scenario.trap.omega_guide;
}

double p0_from_fields(const Scenario& scenario) {
    const double bracket = threshold_bracket(scenario);
    if (!(bracket > 0.0)) throw BelowThresholdError(bracket);
    return std::sqrt(scenario.species.atom_mass * bracket);
}

double p_bar_from_fields(const Scenario& scenario) {
    const double e = scenario.resonance.moment_diff * scenario.pulses.pulse_height;
    if (!(e > 0.0)) throw DomainError("pulse_height", "must be positive");
    return std::sqrt(scenario.species.atom_mass * e);
}

double delta_p_from_pulse(const Scenario& scenario) {
    return std::sqrt(2.0 * scenario.species.atom_mass * hbar / scenario.pulses.pulse_duration);
}

GaussianMode trapped_cm_state(const Species& species, const TrapGuide& trap) {
    if (!(trap.omega_trap > 0.0)) throw DomainError("omega_trap", "must be positive for a trapped state");
    return GaussianMode{0.0, std::sqrt(0.5 * hbar * trap.omega_trap * species.molecule_mass())};
}

FeshbachDistribution feshbach_distribution(const Scenario& scenario) {
    scenario.validate();
    return FeshbachDistribution(p0_from_fields(scenario), p_bar_from_fields(scenario),
                                delta_p_from_pulse(scenario),
                                trapped_cm_state(scenario.species, scenario.trap));
}

double feshbach_density(const FeshbachDistribution& dist, double p_cm, double p_rel) {
    return dist.density(p_cm, p_rel);
}

namespace {

GaussianApproximation approximate(double p0, double delta_p, const Species& species,
                                  const TrapGuide& trap) {
    // m hbar / (p0 T) = delta_p^2 / (2 p0)
    const double sigma_rel = kRelSpreadFactor * delta_p * delta_p / (2.0 * p0);
    return GaussianApproximation{GaussianMode{p0, sigma_rel}, trapped_cm_state(species, trap)};
}

}  // namespace

GaussianApproximation gaussian_approximation(const FeshbachDistribution& dist,
                                             const Species& species, const TrapGuide& trap) {
    return approximate(dist.p0(), dist.delta_p(), species, trap);
}

GaussianApproximation gaussian_approximation(const Scenario& scenario) {
    scenario.validate();
    return approximate(p0_from_fields(scenario), delta_p_from_pulse(scenario), scenario.species,
                       scenario.trap);
}

SpreadFit fit_rel_spread(const FeshbachDistribution& dist) {
    using Gauss = boost::math::quadrature::gauss<double, 30>;
    const double pi = constants::pi;
    auto sinc2 = [](double y) {
        if (std::abs(y) < 1e-8) return 1.0;
        const double s = std::sin(y) / y;
        return s * s;
    };
    auto cost = [&](double f) {
        double sum = 0.0;
        for (int k = 0; k < 8; ++k) {
            const double a = k * pi / 8.0;
            sum += Gauss::integrate(
                [&](double y) {
                    const double r = sinc2(y) - std::exp(-0.5 * y * y / (f * f));
                    return r * r;
                },
                a, a + pi / 8.0);
        }
        return 2.0 * sum;  // symmetric lobe
    };
    const auto [factor, residual] = boost::math::tools::brent_find_minima(cost, 0.5, 3.0, 50);
    SpreadFit fit;
    fit.factor = factor;
    fit.sigma_p = factor * dist.delta_p() * dist.delta_p() / (2.0 * dist.p0());
    fit.rms_residual = std::sqrt(residual / (2.0 * pi));
    return fit;
}

double phi_tau(const Scenario& scenario, bool wrap) {
    const auto& p = scenario.pulses;
    const double mu = scenario.resonance.moment_diff;
    const double phase =
        (2.0 * scenario.trap.trap_depth * p.pulse_separation - mu * p.pulse_height * p.pulse_duration +
         mu * (scenario.resonance.position - p.base_field) * p.pulse_separation) /
            hbar +
        scenario.trap.omega_guide * p.pulse_separation;
    if (!wrap) return phase;
    double r = std::remainder(phase, 2.0 * constants::pi);
    if (r <= -constants::pi) r += 2.0 * constants::pi;
    return r;
}

PhaseBudget phase_stability(const Scenario& scenario, const RelativeErrors& errors, double budget) {
    const auto& p = scenario.pulses;
    const double mu = scenario.resonance.moment_diff;
    const double tau = p.pulse_separation;

    struct Entry {
        const char* name;
        double value;
        double derivative;
        double relative;
    };
    const Entry entries[] = {
        {"base_field", p.base_field, -mu * tau / hbar, errors.base_field},
        {"pulse_height", p.pulse_height, -mu * p.pulse_duration / hbar, errors.pulse_height},
        {"resonance_position", scenario.resonance.position, mu * tau / hbar, errors.resonance_position},
        {"pulse_duration", p.pulse_duration, -mu * p.pulse_height / hbar, errors.pulse_duration},
        {"pulse_separation", tau,
         (2.0 * scenario.trap.trap_depth + mu * (scenario.resonance.position - p.base_field)) / hbar +
             scenario.trap.omega_guide,
         errors.pulse_separation},
        {"trap_depth", scenario.trap.trap_depth, 2.0 * tau / hbar, errors.trap_depth},
    };

    PhaseBudget out;
    out.budget = budget;
    for (const auto& e : entries) {
        if (!(e.relative >= 0.0)) throw DomainError(e.name, "relative error must be non-negative");
        PhaseTerm term;
        term.parameter = e.name;
        term.value = e.value;
        term.derivative = e.derivative;
        term.delta = e.relative * std::abs(e.value);
        term.contribution = std::abs(e.derivative) * term.delta;
        term.within_budget = term.contribution <= budget;
        out.total += term.contribution;
        out.terms.push_back(std::move(term));
    }
    out.within_budget = out.total <= budget;
    return out;
}

double dissociation_probability(const Scenario& scenario, double c_tilde_norm_sq) {
    if (!(c_tilde_norm_sq >= 0.0)) throw DomainError("c_tilde_norm_sq", "must be non-negative");
    const auto& r = scenario.resonance;
    return scenario.trap.omega_guide * r.background_length * r.moment_diff * r.width *
           c_tilde_norm_sq / (constants::pi * hbar * hbar);
}

double c_tilde_for_mean_count(const Scenario& scenario, double molecules, double mean_count) {
    if (!(molecules > 0.0)) throw DomainError("molecules", "must be positive");
    const double per_unit = dissociation_probability(scenario, 1.0);
    if (!(per_unit > 0.0)) throw DomainError("omega_guide", "dissociation rate vanishes");
    return mean_count / molecules / per_unit;
}

double multi_dissociation_fraction(double probability, double molecules) {
    if (!(probability >= 0.0 && probability <= 1.0)) {
        throw DomainError("probability", "must lie in [0, 1]");
    }
    if (probability == 0.0) return 0.0;
    const double none = std::pow(1.0 - probability, molecules);
    const double one = molecules * probability * std::pow(1.0 - probability, molecules - 1.0);
    const double at_least_one = 1.0 - none;
    return at_least_one > 0.0 ? (at_least_one - one) / at_least_one : 0.0;
}

}  // namespace dtebell
