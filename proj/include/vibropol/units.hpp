#pragma once

#include <cmath>
#include <stdexcept>

namespace vibropol {

// All public interfaces speak cm^-1 / ps / Debye / nm / K.  Internally,
// generators and propagators run on angular frequencies in rad/ps.

/// Angular frequency of a 1 cm^-1 quantum: 2*pi*c with c in cm/ps.
inline constexpr double kRadPerPsPerWavenumber = 0.18836515673088532;

/// k_B/(h c) in cm^-1 per kelvin.
inline constexpr double kWavenumberPerKelvin = 0.6950348004;

inline double to_angular(double wavenumbers) {
  return wavenumbers * kRadPerPsPerWavenumber;
}

/// Thermal energy k_B T expressed in cm^-1.
inline double thermal_energy(double temperature_kelvin) {
  return kWavenumberPerKelvin * temperature_kelvin;
}

/// Bose-Einstein occupation of a mode with the given gap (cm^-1).
inline double bose_occupation(double gap_wavenumbers, double temperature_kelvin) {
  if (gap_wavenumbers <= 0.0 || temperature_kelvin <= 0.0)
    throw std::invalid_argument("bose_occupation: gap and temperature must be positive");
  return 1.0 / std::expm1(gap_wavenumbers / thermal_energy(temperature_kelvin));
}

}  // namespace vibropol
