#pragma once

#include <string>
#include <vector>

#include "vibropol/dynamics.hpp"
#include "vibropol/signals.hpp"

namespace vibropol {

struct OracleReport {
  std::string quantity;
  double deviation = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  double runtime_s = 0.0;
};

/// Fixed-step RK4 integration of the full generator (excited + ground +
/// leakage feed), independent of the spectral propagation path.
class Rk4Propagator {
 public:
  explicit Rk4Propagator(const SystemParams& params);

  /// Stability heuristic: 0.01 / max |H| entry in rad/ps.
  double max_step() const { return max_step_; }

  /// States at the requested times; each interval is covered by uniform
  /// steps no longer than dt.  Throws when dt exceeds max_step().
  std::vector<DensityState> trajectory(const DensityState& rho0, double dt,
                                       const std::vector<double>& times_ps) const;

 private:
  SectorIndexing idx_;
  Eigen::SparseMatrix<Complex> combined_;
  double max_step_ = 0.0;
};

/// Convenience wrapper over Rk4Propagator::trajectory.
std::vector<DensityState> rk4_propagate(const SystemParams& params, const DensityState& rho0,
                                        double dt, const std::vector<double>& times_ps);

/// Max element-wise deviation between spectral propagation and RK4 across
/// the given times.  A spectrum override supports negative controls.
OracleReport compare_propagators(const SystemParams& params, const DensityState& rho0,
                                 const std::vector<double>& times_ps, double tolerance = 1e-6,
                                 const LiouvillianSpectrum* spectrum = nullptr);

/// Time-domain photoluminescence oracle for N = 1 with frozen solvent
/// (gamma = 0): propagates the dipole-created optical coherence explicitly
/// and Fourier-transforms over the emission delay.
SpectrumGrid timedomain_trps_oracle(const SystemParams& params, const InitialState& initial,
                                    std::uint32_t config_index, double tau_probe_ps,
                                    const Pulse& probe, const Pulse& local_oscillator,
                                    const Eigen::VectorXd& omega, double t_max_ps = 400.0,
                                    double dt_ps = 0.002);

}  // namespace vibropol
