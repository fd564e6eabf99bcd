#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace vibropol {

/// One cavity-coupled molecular vibration together with its local
/// two-state solvent coordinate.
struct Molecule {
  double omega = 0.0;           // vibrational frequency, cm^-1
  double disorder_shift = 0.0;  // frequency shift when the solvent bit is set, cm^-1
  double anharmonicity = 0.0;   // cm^-1; inert in the zero/one-excitation manifolds
  double coupling = 0.0;        // vibration-photon coupling g, cm^-1
  Eigen::Vector3d dipole = Eigen::Vector3d::Zero();  // transition dipole, Debye
  double position = 0.0;        // along the cavity axis, nm
  double length = 0.05;         // vibrational localization length, nm
  double solvent_gap = 0.0;     // two-state solvent splitting v, cm^-1
  double solvent_rate = 0.0;    // solvent jump rate gamma, cm^-1
};

struct Cavity {
  double omega = 0.0;    // photon frequency, cm^-1
  double quality = 0.0;  // quality factor Q, dimensionless
};

struct SystemParams {
  std::vector<Molecule> molecules;
  Cavity cavity;
  double temperature = 300.0;  // K

  int size() const { return static_cast<int>(molecules.size()); }

  /// Bose occupation of molecule i's solvent gap at the system temperature.
  double mean_occupation(int molecule) const;

  /// Cavity photon loss rate omega_c/Q, cm^-1.
  double cavity_rate() const { return cavity.omega / cavity.quality; }

  /// Throws std::invalid_argument when any parameter is out of range.
  void validate() const;
};

/// One configuration of the N two-state solvent coordinates.  Bit i of
/// `index` is the coordinate of molecule i, so molecule 0 is the least
/// significant bit.
struct SolventConfig {
  std::uint32_t index = 0;
  int n_molecules = 0;

  int bit(int molecule) const { return static_cast<int>((index >> molecule) & 1u); }
  std::uint32_t flipped(int molecule) const { return index ^ (1u << molecule); }
  std::vector<int> bits() const;

  static SolventConfig from_bits(const std::vector<int>& bits);
};

/// All 2^N solvent configurations in ascending index order.
/// Throws std::length_error outside 1 <= N <= 20.
std::vector<SolventConfig> enumerate_configs(int n_molecules);

}  // namespace vibropol
