#pragma once

#include <Eigen/Dense>
#include <vector>

#include "vibropol/liouvillian.hpp"

namespace vibropol {

/// Joint vibration/photon/solvent density matrix restricted to the sectors
/// the generator couples: excited config-diagonal coefficients plus ground
/// configuration populations.
struct DensityState {
  Eigen::VectorXcd excited;
  Eigen::VectorXd ground;
  double time = 0.0;  // ps

  static DensityState zero(const SectorIndexing& idx);

  Complex coefficient(const SectorIndexing& idx, int m, int n, std::uint32_t config) const {
    return excited(static_cast<Eigen::Index>(idx.excited(m, n, config)));
  }
};

double total_trace(const DensityState& state, const SectorIndexing& idx);
double hermiticity_defect(const DensityState& state, const SectorIndexing& idx);
double min_population(const DensityState& state, const SectorIndexing& idx);

enum class InitialKind { kLower, kUpper, kDark, kDarkUniform, kSite, kGround };

/// Initial-state selector.  `index` is 0-based: the k-th dark state for
/// kDark (k < N-1) or the site for kSite (molecules 0..N-1, photon N).
struct InitialState {
  InitialKind kind = InitialKind::kLower;
  int index = 0;

  static InitialState lower() { return {InitialKind::kLower, 0}; }
  static InitialState upper() { return {InitialKind::kUpper, 0}; }
  static InitialState dark(int k) { return {InitialKind::kDark, k}; }
  static InitialState dark_uniform() { return {InitialKind::kDarkUniform, 0}; }
  static InitialState site(int i) { return {InitialKind::kSite, i}; }
  static InitialState ground() { return {InitialKind::kGround, 0}; }
};

/// Pure state |psi_a><psi_a| of the selected eigenstate (or site / uniform
/// dark mixture / ground population) in the configuration of `eig`.
DensityState prepare_initial(const InitialState& selector, const BlockEigensystem& eig,
                             const SectorIndexing& idx);

/// Spectral propagation of the excited sector plus closed-form solvent
/// propagation and cavity-leakage feed of the ground sector.
std::vector<DensityState> evolve(const DensityState& state, const std::vector<double>& times_ps,
                                 const LiouvillianSpectrum& spectrum, const SystemParams& params);

/// Config-summed site populations (molecules first, photon last).
Eigen::VectorXd site_populations(const DensityState& state, const SectorIndexing& idx);

/// Magnitude of the config-summed off-diagonal element between sites i and j.
double intermolecule_coherence(const DensityState& state, const SectorIndexing& idx, int i, int j);

struct PolaritonPopulations {
  double lower = 0.0;
  double upper = 0.0;
  double dark = 0.0;
  Eigen::MatrixXd per_config;  // n_configs x (N+1), eigenbasis populations
};

PolaritonPopulations polariton_populations(const DensityState& state,
                                           const std::vector<BlockEigensystem>& eigensystems);

struct SpatialGrid {
  Eigen::VectorXd x;        // nm
  Eigen::VectorXd density;  // rho(x, x)
  bool overlapping_sites = false;
};

/// Spatial density of the vibrational excitation, photon row excluded.
SpatialGrid spatial_density(const DensityState& state, const SectorIndexing& idx,
                            const SystemParams& params, const Eigen::VectorXd& x);

/// Full coherence map rho(x, x').
Eigen::MatrixXcd spatial_coherence(const DensityState& state, const SectorIndexing& idx,
                                   const SystemParams& params, const Eigen::VectorXd& x);

/// Thermal-equilibrium probabilities of the 2^N solvent configurations.
Eigen::VectorXd thermal_config_weights(const SystemParams& params);

}  // namespace vibropol
