#pragma once
#include <cmath>

// Unit conventions used throughout:
//  * energies, frequencies and rates are angular (rad/s) internally
//  * file and CLI I/O is in ordinary Hz (the /2pi convention)
//  * temperatures in kelvin, times in seconds
namespace kerrcat {

inline constexpr double two_pi = 6.283185307179586476925286766559;

// hbar/kB in kelvin*seconds: converts angular frequency to temperature scale
inline constexpr double hbar_over_kB = 7.638232577577646e-12;

// e^2/(2 hbar) in rad/s * farad: charging energy E_C = this / C
inline constexpr double e_sq_over_2hbar =
    1.602176634e-19 * 1.602176634e-19 / (2.0 * 1.054571817e-34);

inline constexpr double from_hz(double f) { return two_pi * f; }
inline constexpr double to_hz(double w) { return w / two_pi; }
inline constexpr double ghz(double f) { return two_pi * f * 1e9; }
inline constexpr double mhz(double f) { return two_pi * f * 1e6; }
inline constexpr double khz(double f) { return two_pi * f * 1e3; }

}  // namespace kerrcat
