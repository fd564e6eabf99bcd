#pragma once

#include <Eigen/Dense>
#include <vector>

#include "vibropol/system.hpp"

namespace vibropol {

enum class StateLabel { kLower, kUpper, kDark };

/// Eigensystem of one single-excitation block H^(P).  Sites are ordered
/// {molecule 0 .. molecule N-1, photon}; eigenstates are ordered by
/// ascending frequency.  Frequencies are detunings from the cavity photon.
struct BlockEigensystem {
  SolventConfig config;
  Eigen::VectorXd omega;      // N+1 eigenfrequencies, cm^-1
  Eigen::MatrixXcd vectors;   // column k = eigenstate k over the site basis
  Eigen::Matrix3Xcd dipoles;  // V_k = sum_s mu_s C(s,k), Debye
  std::vector<StateLabel> labels;

  int lower() const;               // index of the LP-labeled state
  int upper() const;               // index of the UP-labeled state
  std::vector<int> dark() const;   // indices of dark-labeled states
};

/// Single-excitation block Hamiltonian for one solvent configuration,
/// in the photon rotating frame (cm^-1).
Eigen::MatrixXcd build_block_hamiltonian(const SystemParams& params, const SolventConfig& config);

/// Diagonalizes a Hermitian block.  Eigenvector phases are fixed by making
/// the largest-magnitude component real and positive; the two states with
/// the largest photon weight are labeled LP (lower) and UP (higher).
BlockEigensystem diagonalize_block(const Eigen::MatrixXcd& hamiltonian,
                                   const SystemParams& params, const SolventConfig& config);

/// V_k = sum over molecular sites of mu_s C(s,k); the photon row carries
/// no dipole and is excluded from the sum.
Eigen::Matrix3Xcd transition_dipoles(const Eigen::MatrixXcd& vectors,
                                     const std::vector<Eigen::Vector3d>& dipoles);

/// Eigensystems of every solvent configuration, indexed by config.
std::vector<BlockEigensystem> diagonalize_all_blocks(const SystemParams& params);

}  // namespace vibropol
