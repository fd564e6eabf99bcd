#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "vibropol/dynamics.hpp"

namespace vibropol {

/// Gaussian pulse acting as a spectral filter in the impulsive limit.
struct Pulse {
  double center = 0.0;  // carrier frequency, cm^-1, lab frame
  double sigma = 0.0;   // spectral width, cm^-1
  Eigen::Vector3d polarization = Eigen::Vector3d::UnitX();
  double amplitude = 1.0;
};

/// Filter value at rotating-frame frequency `omega`; the pulse center is
/// shifted into the rotating frame by the cavity frequency.
double gaussian_envelope(double omega, const Pulse& pulse, double cavity_omega);

/// Frequency-resolved signal on one or two axes (rotating frame, cm^-1).
/// For two axes, values(i, j) corresponds to (omega1(i), omega3(j)).
struct SpectrumGrid {
  std::vector<Eigen::VectorXd> axes;
  Eigen::MatrixXd values;
  std::map<std::string, Eigen::MatrixXd> components;
};

/// Lorentzian widths of the optical coherences <<G, psi_i>> per eigenstate:
/// the solvent dephasing sum plus, optionally, the photon-weighted cavity
/// half-rate.  cm^-1.
Eigen::VectorXd eigenstate_linewidths(const SystemParams& params, const BlockEigensystem& eig,
                                      bool include_cavity = true);

struct TrpsOptions {
  bool include_leakage_term = true;
  bool cavity_linewidth = true;
};

/// Heterodyne photoluminescence spectrum of the state at the probe delay.
SpectrumGrid trps(const DensityState& state, const std::vector<BlockEigensystem>& eigensystems,
                  const SystemParams& params, const Pulse& probe, const Pulse& local_oscillator,
                  const Eigen::VectorXd& omega, const TrpsOptions& options = {});

enum class InitialWeights { kPureGround, kThermal };

struct TwodirOptions {
  bool subtract_gsb = false;
  bool cavity_linewidth = true;
  bool components = false;  // keep per-pathway ESE/GSB/ESD grids
};

struct TwodirPulses {
  Pulse k1, k2, k3, local_oscillator;
};

/// Rephasing photon-echo spectrum at waiting time t2.  Raw omega1 values
/// peak near the negated excitation frequencies.
SpectrumGrid twodir(const SystemParams& params, const LiouvillianSpectrum& spectrum,
                    const std::vector<BlockEigensystem>& eigensystems, const TwodirPulses& pulses,
                    double t2_ps, const Eigen::VectorXd& omega1, const Eigen::VectorXd& omega3,
                    InitialWeights initial, const TwodirOptions& options = {});

/// Single large detuned-vs-resonant configuration block.
struct LargeBlockSpec {
  int count = 0;                   // N
  double collective_coupling = 0;  // g sqrt(N), cm^-1
  int detuned_count = 0;
  double detuning = 0.0;           // cm^-1
};

struct StickSpectrum {
  Eigen::VectorXd omega;     // cm^-1, ascending
  Eigen::VectorXd strength;  // |V_k|^2, Debye^2
};

/// Eigenfrequencies and squared collective dipoles of one configuration
/// block with `detuned_count` molecules shifted by `detuning`.
StickSpectrum dipole_distribution(const LargeBlockSpec& spec, const SystemParams& reference);

/// Lorentzian-broadened stick spectrum for display.
Eigen::VectorXd broaden_sticks(const StickSpectrum& sticks, const Eigen::VectorXd& omega,
                               double width);

}  // namespace vibropol
