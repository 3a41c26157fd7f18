#pragma once

#include <string>
#include <vector>

namespace dtebell {

struct Species {
    double atom_mass = 0.0;  // kg

    static Species from_amu(double amu);
    double molecule_mass() const noexcept { return 2.0 * atom_mass; }

    bool operator==(const Species&) const = default;
};

struct TrapGuide {
    double omega_guide = 0.0;  // rad/s, transverse guide frequency
    double omega_trap = 0.0;   // rad/s, longitudinal dipole-trap frequency
    double trap_depth = 0.0;   // J

    bool operator==(const TrapGuide&) const = default;
};

struct Resonance {
    double width = 0.0;              // T
    double moment_diff = 0.0;        // J/T
    double background_length = 0.0;  // m
    double position = 0.0;           // T

    bool operator==(const Resonance&) const = default;
};

struct PulseSequence {
    double base_field = 0.0;        // T
    double pulse_height = 0.0;      // T
    double pulse_duration = 0.0;    // s
    double pulse_separation = 0.0;  // s

    bool operator==(const PulseSequence&) const = default;
};

// Physical inputs of one dissociation experiment, SI units throughout.
struct Scenario {
    Species species;
    TrapGuide trap;
    Resonance resonance;
    PulseSequence pulses;

    // 6Li2 in a 300 Hz guide, 0.5 Hz / 100 nK trap, 1 mG narrow resonance,
    // two 60 ms pulses 1 s apart, 350 mG above resonance.
    static Scenario lithium6();

    // Throws DomainError naming the first invalid field.
    void validate() const;
    // Non-fatal consistency notes (e.g. trap not much softer than the guide).
    std::vector<std::string> warnings() const;

    // Field reached during the pulse, measured from the resonance.
    double over_resonance() const noexcept {
        return pulses.base_field + pulses.pulse_height - resonance.position;
    }

    bool operator==(const Scenario&) const = default;
};

struct TimescaleSummary {
    double t_cm = 0.0;            // s
    double t_rel = 0.0;           // s
    double lambda_bar_rel = 0.0;  // m
    double v_rel = 0.0;           // m/s
    double sigma_p_cm = 0.0;      // kg m/s
    double sigma_p_rel = 0.0;     // kg m/s
    double p0_rel = 0.0;          // kg m/s

    double lambda_rel() const noexcept;  // 2 pi lambda_bar_rel
};

// T_cm = 2 m hbar / sigma_cm^2, T_rel = m hbar / (2 sigma_rel^2),
// lambda_bar = hbar / p0, v_rel = 2 p0 / m. Throws DomainError for
// non-positive inputs.
TimescaleSummary derive_scales(const Species& species, double sigma_p_cm, double sigma_p_rel,
                               double p0_rel);

// Composes p0_from_fields with the Gaussian-approximation spreads.
// Throws BelowThresholdError when the pulse does not reach the guide threshold.
TimescaleSummary scales_from_scenario(const Scenario& scenario);

// Scenario-adapted units: momentum in p0_rel, time in tau, length in
// lambda_bar_rel. hbar is exactly 1 in this system.
struct UnitSystem {
    double momentum = 1.0;
    double time = 1.0;
    double length = 1.0;

    static UnitSystem adapted(double p0_rel, double tau);

    double mass() const noexcept { return momentum * time / length; }
    double velocity() const noexcept { return length / time; }

    double momentum_in(double p) const noexcept { return p / momentum; }
    double momentum_out(double u) const noexcept { return u * momentum; }
    double time_in(double t) const noexcept { return t / time; }
    double time_out(double t) const noexcept { return t * time; }
    double length_in(double l) const noexcept { return l / length; }
    double length_out(double l) const noexcept { return l * length; }
    double mass_in(double m) const noexcept { return m / mass(); }
    double mass_out(double m) const noexcept { return m * mass(); }
};

}  // namespace dtebell
