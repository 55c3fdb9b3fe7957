#pragma once

#include <numbers>

namespace combnoise::constants {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

inline constexpr double elementary_charge = 1.602176634e-19; // C
inline constexpr double planck = 6.62607015e-34;              // J s
inline constexpr double hbar = planck / two_pi;
inline constexpr double speed_of_light = 299792458.0;        // m/s

// Default comb grid: 1550 nm carrier, 1 GHz repetition rate.
inline constexpr double default_wavelength = 1550e-9;
inline constexpr double default_omega0 = two_pi * speed_of_light / default_wavelength;
inline constexpr double default_omega_rep = two_pi * 1e9;

} // namespace combnoise::constants
