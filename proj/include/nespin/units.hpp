// units.hpp — Unit conventions and physical constants.
//
// Internal units everywhere in the library:
//   angular frequency  rad/us
//   magnetic field     tesla
//   time               us
// Linear frequencies (MHz, GHz) appear only at the I/O boundary; the
// conversion is a single factor of 2*pi kept in this header so it cannot
// drift between modules.

#pragma once

#include <numbers>

namespace nespin::units {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

// 1 MHz linear == 2*pi rad/us angular.
inline constexpr double mhz_to_rad_us(double f_mhz) { return f_mhz * two_pi; }
inline constexpr double ghz_to_rad_us(double f_ghz) { return f_ghz * 1e3 * two_pi; }
inline constexpr double rad_us_to_mhz(double w) { return w / two_pi; }
inline constexpr double rad_us_to_ghz(double w) { return w / (1e3 * two_pi); }

// Boltzmann constant, 20.8366 GHz/K in linear-frequency units.
inline constexpr double boltzmann_ghz_per_k = 20.8366;
inline constexpr double boltzmann_rad_us_per_k = ghz_to_rad_us(boltzmann_ghz_per_k);

} // namespace nespin::units
