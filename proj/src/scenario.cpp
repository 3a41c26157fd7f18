#include "dtebell/scenario.hpp"

#include <cmath>

#include "dtebell/constants.hpp"
#include "dtebell/dissociation.hpp"
#include "dtebell/errors.hpp"

namespace dtebell {

namespace {

void require_positive(double value, const char* field) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw DomainError(field, "must be positive and finite");
    }
}

void require_nonnegative(double value, const char* field) {
    if (!(value >= 0.0) || !std::isfinite(value)) {
        throw DomainError(field, "must be non-negative and finite");
    }
}

}  // namespace

Species Species::from_amu(double amu) { return Species{amu * constants::atomic_mass_unit}; }

Scenario Scenario::lithium6() {
    using namespace constants;
    constexpr double milligauss = 1e-7;  // T
    Scenario s;
    s.species = Species::from_amu(li6_mass_amu);
    s.trap.omega_guide = 2.0 * pi * 300.0;
    s.trap.omega_trap = 2.0 * pi * 0.5;
    s.trap.trap_depth = boltzmann * 100e-9;
    s.resonance.width = 1.0 * milligauss;
    s.resonance.moment_diff = 0.01 * bohr_magneton;
    s.resonance.background_length = 100.0 * bohr_radius;
    // Absolute field placement near the narrow 6Li line; only the offsets
    // below enter the kinematics.
    s.resonance.position = 543300.0 * milligauss;
    s.pulses.base_field = s.resonance.position - 50.0 * milligauss;
    s.pulses.pulse_height = 400.0 * milligauss;
    s.pulses.pulse_duration = 60e-3;
    s.pulses.pulse_separation = 1.0;
    return s;
}

void Scenario::validate() const {
    require_positive(species.atom_mass, "atom_mass");
    require_nonnegative(trap.omega_guide, "omega_guide");
    require_nonnegative(trap.omega_trap, "omega_trap");
    require_nonnegative(trap.trap_depth, "trap_depth");
    require_positive(resonance.width, "resonance_width");
    require_positive(resonance.moment_diff, "moment_diff");
    require_positive(resonance.background_length, "background_length");
    if (!std::isfinite(resonance.position)) throw DomainError("resonance_position", "must be finite");
    if (!std::isfinite(pulses.base_field)) throw DomainError("base_field", "must be finite");
    if (!std::isfinite(pulses.pulse_height)) throw DomainError("pulse_height", "must be finite");
    require_positive(pulses.pulse_duration, "pulse_duration");
    require_positive(pulses.pulse_separation, "pulse_separation");
    if (!(pulses.pulse_separation > pulses.pulse_duration)) {
        throw DomainError("pulse_separation", "must exceed pulse_duration (pulses overlap)");
    }
}

std::vector<std::string> Scenario::warnings() const {
    std::vector<std::string> out;
    if (trap.omega_guide > 0.0 && trap.omega_trap > 0.1 * trap.omega_guide) {
        out.emplace_back("omega_trap is not much smaller than omega_guide");
    }
    return out;
}

double TimescaleSummary::lambda_rel() const noexcept { return 2.0 * constants::pi * lambda_bar_rel; }

TimescaleSummary derive_scales(const Species& species, double sigma_p_cm, double sigma_p_rel,
                               double p0_rel) {
    require_positive(species.atom_mass, "atom_mass");
    require_positive(sigma_p_cm, "sigma_p_cm");
    require_positive(sigma_p_rel, "sigma_p_rel");
    require_positive(p0_rel, "p0_rel");

    const double m = species.atom_mass;
    const double hbar = constants::hbar;
    TimescaleSummary s;
    s.sigma_p_cm = sigma_p_cm;
    s.sigma_p_rel = sigma_p_rel;
    s.p0_rel = p0_rel;
    s.t_cm = 2.0 * m * hbar / (sigma_p_cm * sigma_p_cm);
    s.t_rel = m * hbar / (2.0 * sigma_p_rel * sigma_p_rel);
    s.lambda_bar_rel = hbar / p0_rel;
    s.v_rel = 2.0 * p0_rel / m;
    return s;
}

TimescaleSummary scales_from_scenario(const Scenario& scenario) {
    scenario.validate();
    const auto gaussians = gaussian_approximation(scenario);
    return derive_scales(scenario.species, gaussians.cm.sigma_p, gaussians.rel.sigma_p,
                         gaussians.rel.mean_p);
}

UnitSystem UnitSystem::adapted(double p0_rel, double tau) {
    require_positive(p0_rel, "p0_rel");
    require_positive(tau, "tau");
    UnitSystem u;
    u.momentum = p0_rel;
    u.time = tau;
    u.length = constants::hbar / p0_rel;
    return u;
}

}  // namespace dtebell
