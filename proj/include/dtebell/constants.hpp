#pragma once

namespace dtebell {

// CODATA 2018 values, SI units.
struct Constants {
    double hbar;              // J s
    double boltzmann;         // J / K
    double bohr_magneton;     // J / T
    double bohr_radius;       // m
    double atomic_mass_unit;  // kg
};

inline constexpr Constants kCodata2018{
    1.054571817e-34,
    1.380649e-23,
    9.2740100783e-24,
    5.29177210903e-11,
    1.66053906660e-27,
};

namespace constants {
inline constexpr double hbar = kCodata2018.hbar;
inline constexpr double boltzmann = kCodata2018.boltzmann;
inline constexpr double bohr_magneton = kCodata2018.bohr_magneton;
inline constexpr double bohr_radius = kCodata2018.bohr_radius;
inline constexpr double atomic_mass_unit = kCodata2018.atomic_mass_unit;

// 6Li atomic mass in u (AME 2016).
inline constexpr double li6_mass_amu = 6.0151228;

inline constexpr double pi = 3.141592653589793238462643383279502884;
}  // namespace constants

}  // namespace dtebell
