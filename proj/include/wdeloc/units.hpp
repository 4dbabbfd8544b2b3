#pragma once

#include <numbers>

// Unit conventions: energies and frequencies in wavenumbers (cm^-1), time
// in fs, temperature in K.  Everything that crosses between them goes
// through these constants.
namespace wdeloc::units {

inline constexpr double kBoltzmannCmPerK = 0.695034800;

inline constexpr double kSpeedOfLightCmPerFs = 2.99792458e-5;

/// 1 cm^-1 expressed as an angular frequency in rad/fs (2 pi c).
inline constexpr double kRadPerFsPerCm =
    2.0 * std::numbers::pi_v<double> * kSpeedOfLightCmPerFs;

/// 1 / (k_B T) in (cm^-1)^-1.
inline double inverse_temperature_cm(double temperature_kelvin) {
  return 1.0 / (kBoltzmannCmPerK * temperature_kelvin);
}

}  // namespace wdeloc::units
