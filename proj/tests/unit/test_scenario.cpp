#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dtebell/constants.hpp"
#include "dtebell/errors.hpp"
#include "dtebell/scenario.hpp"

using namespace dtebell;

namespace {

const double kLi6Mass = 6.0151228 * 1.66053906660e-27;

}  // namespace

TEST(Constants, MatchReferenceTable) {
    const Constants& c = kCodata2018;
    EXPECT_NEAR(c.hbar / 1.054571817e-34, 1.0, 1e-9);
    EXPECT_NEAR(c.boltzmann / 1.380649e-23, 1.0, 1e-9);
    EXPECT_NEAR(c.bohr_magneton / 9.2740100783e-24, 1.0, 1e-9);
    EXPECT_NEAR(c.bohr_radius / 5.29177210903e-11, 1.0, 1e-9);
    EXPECT_NEAR(c.atomic_mass_unit / 1.66053906660e-27, 1.0, 1e-9);
    for (double v : {c.hbar, c.boltzmann, c.bohr_magneton, c.bohr_radius, c.atomic_mass_unit}) EXPECT_GT(v, 0.0);
}

TEST(Constants, Lithium6Mass) {
    EXPECT_NEAR(Species::from_amu(constants::li6_mass_amu).atom_mass, 9.98834e-27, 1e-31);
}

TEST(Species, MoleculeIsTwoAtoms) {
    const auto s = Species::from_amu(6.0151228);
    EXPECT_EQ(s.molecule_mass(), 2.0 * s.atom_mass);
}

TEST(DeriveScales, TrappedMoleculeGivesTwoOverOmega) {
    const Species li{kLi6Mass};
    const double omega = constants::pi;  // 2 pi x 0.5 Hz
    const double sigma_cm = std::sqrt(constants::hbar * omega * 2.0 * li.atom_mass / 2.0);
    const auto s = derive_scales(li, sigma_cm, 1e-31, 5e-29);
    EXPECT_NEAR(s.t_cm, 2.0 / omega, 1e-12);
    EXPECT_NEAR(s.t_cm, 0.64, 0.01);
}

TEST(DeriveScales, WavelengthAtOneCentimetrePerSecond) {
    const Species li{9.988e-27};
    const double p0 = li.atom_mass * 0.01 / 2.0;
    const auto s = derive_scales(li, 1e-30, 1e-31, p0);
    EXPECT_NEAR(s.lambda_rel() * 1e6, 13.3, 0.05);
    EXPECT_NEAR(s.v_rel, 0.01, 1e-15);
    EXPECT_DOUBLE_EQ(s.lambda_bar_rel, constants::hbar / p0);
}

TEST(DeriveScales, DoublingRelativeSpreadQuartersTime) {
    const Species li{kLi6Mass};
    const auto a = derive_scales(li, 1e-30, 2e-31, 5e-29);
    const auto b = derive_scales(li, 1e-30, 4e-31, 5e-29);
    EXPECT_DOUBLE_EQ(a.t_rel / b.t_rel, 4.0);
}

TEST(DeriveScales, RejectsNonPositiveInputsByName) {
    const Species li{kLi6Mass};
    try {
        derive_scales(li, 1e-30, 0.0, 5e-29);
        FAIL() << "expected DomainError";
    } catch (const DomainError& e) {
        EXPECT_EQ(e.field(), "sigma_p_rel");
    }
    EXPECT_THROW(derive_scales(li, -1.0, 1e-31, 5e-29), DomainError);
    EXPECT_THROW(derive_scales(li, 1e-30, 1e-31, 0.0), DomainError);
    EXPECT_THROW(derive_scales(Species{0.0}, 1e-30, 1e-31, 5e-29), DomainError);
}

TEST(DeriveScales, SpreadsRecoverableFromTimes) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> f(0.5, 2.0);
    for (int i = 0; i < 200; ++i) {
        const Species sp{kLi6Mass * f(rng)};
        const double sc = 1.8e-30 * f(rng), sr = 3.9e-31 * f(rng), p0 = 5.3e-29 * f(rng);
        const auto s = derive_scales(sp, sc, sr, p0);
        const double m = sp.atom_mass, hbar = constants::hbar;
        EXPECT_NEAR(std::sqrt(2.0 * m * hbar / s.t_cm) / sc, 1.0, 1e-12);
        EXPECT_NEAR(std::sqrt(m * hbar / (2.0 * s.t_rel)) / sr, 1.0, 1e-12);
        EXPECT_NEAR(hbar / s.lambda_bar_rel / p0, 1.0, 1e-12);
        EXPECT_NEAR(s.v_rel * m / 2.0 / p0, 1.0, 1e-12);
    }
}

TEST(DeriveScales, MassScaling) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> f(0.5, 2.0);
    for (int i = 0; i < 100; ++i) {
        const double k = f(rng);
        const auto a = derive_scales(Species{kLi6Mass}, 1.8e-30, 3.9e-31, 5.3e-29);
        const auto b = derive_scales(Species{kLi6Mass * k}, 1.8e-30, 3.9e-31, 5.3e-29);
        EXPECT_NEAR(b.t_cm / a.t_cm, k, 1e-12 * k);
        EXPECT_NEAR(b.t_rel / a.t_rel, k, 1e-12 * k);
        EXPECT_NEAR(b.v_rel / a.v_rel, 1.0 / k, 1e-12 / k);
        EXPECT_DOUBLE_EQ(b.lambda_bar_rel, a.lambda_bar_rel);
    }
}

TEST(ScalesFromScenario, ReproducesLithiumNumbers) {
    const auto s = scales_from_scenario(Scenario::lithium6());
    EXPECT_NEAR(s.t_rel, 3.4, 0.1);
    EXPECT_NEAR(s.t_cm, 0.64, 0.01);

    // Independent arithmetic for p0 with the table constants.
    const double m = kLi6Mass;
    const double bracket = 0.01 * 9.2740100783e-24 * 350e-7 - 2.0 * 1.380649e-23 * 100e-9 -
                           1.054571817e-34 * 2.0 * M_PI * 300.0;
    const double p0 = std::sqrt(m * bracket);
    EXPECT_NEAR(s.p0_rel / p0, 1.0, 1e-9);
    EXPECT_NEAR(p0, 5.34e-29, 0.01e-29);
    EXPECT_NEAR(s.v_rel * 100.0, 1.07, 0.005);
}

TEST(Scenario, ValidationNamesFields) {
    auto s = Scenario::lithium6();
    EXPECT_NO_THROW(s.validate());
    s.pulses.pulse_separation = s.pulses.pulse_duration;
    try {
        s.validate();
        FAIL();
    } catch (const DomainError& e) {
        EXPECT_EQ(e.field(), "pulse_separation");
    }
    s = Scenario::lithium6();
    s.resonance.width = 0.0;
    EXPECT_THROW(s.validate(), DomainError);
    s = Scenario::lithium6();
    s.trap.trap_depth = -1.0;
    EXPECT_THROW(s.validate(), DomainError);
}

TEST(Scenario, StiffTrapWarns) {
    auto s = Scenario::lithium6();
    EXPECT_TRUE(s.warnings().empty());
    s.trap.omega_trap = s.trap.omega_guide;
    EXPECT_FALSE(s.warnings().empty());
    EXPECT_NO_THROW(s.validate());
}

TEST(UnitSystem, HbarIsOneAndConversionsRoundTrip) {
    const auto u = UnitSystem::adapted(5.343e-29, 1.0);
    EXPECT_NEAR(u.momentum * u.length / constants::hbar, 1.0, 1e-15);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> f(-10.0, 10.0);
    for (int i = 0; i < 100; ++i) {
        const double p = 1e-29 * f(rng), t = f(rng), l = 1e-5 * f(rng), m = 1e-26 * f(rng);
        EXPECT_NEAR(u.momentum_out(u.momentum_in(p)), p, 1e-12 * std::abs(p));
        EXPECT_NEAR(u.time_out(u.time_in(t)), t, 1e-12 * std::abs(t));
        EXPECT_NEAR(u.length_out(u.length_in(l)), l, 1e-12 * std::abs(l));
        EXPECT_NEAR(u.mass_out(u.mass_in(m)), m, 1e-12 * std::abs(m));
    }
    EXPECT_THROW(UnitSystem::adapted(0.0, 1.0), DomainError);
}
