#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <complex>
#include <cstdint>
#include <vector>

#include "vibropol/block.hpp"
#include "vibropol/system.hpp"

namespace vibropol {

using Complex = std::complex<double>;

/// Flat indexing of the two density-matrix sectors that the generator
/// couples.  The excited sector holds the config-diagonal coefficients
/// <<e_m e_n; P|rho>>; the ground sector holds <<G(P), G(P)|rho>>.
struct SectorIndexing {
  int n_molecules = 0;
  int n_sites = 0;            // N + 1
  std::size_t n_configs = 0;  // 2^N

  SectorIndexing() = default;
  explicit SectorIndexing(int molecules)
      : n_molecules(molecules),
        n_sites(molecules + 1),
        n_configs(std::size_t{1} << molecules) {}

  std::size_t excited_dim() const {
    return static_cast<std::size_t>(n_sites) * n_sites * n_configs;
  }
  std::size_t ground_dim() const { return n_configs; }

  /// 0-based site indices m (bra) and n (ket).
  std::size_t excited(int m, int n, std::uint32_t config) const {
    return (static_cast<std::size_t>(config) * n_sites + m) * n_sites + n;
  }
  int photon() const { return n_molecules; }
};

/// Lindblad generator restricted to the excited sector, rad/ps.
struct ExcitedGenerator {
  SectorIndexing idx;
  Eigen::SparseMatrix<Complex> matrix;
};

/// Ground-sector solvent rate matrix plus the cavity-leakage feed that
/// maps excited photon populations into ground configurations.  rad/ps.
struct GroundGenerator {
  SectorIndexing idx;
  Eigen::SparseMatrix<double> matrix;  // ground_dim x ground_dim
  Eigen::SparseMatrix<double> feed;    // ground_dim x excited_dim
};

/// Spectral decomposition L = S diag(nu) S^-1 of the excited generator.
struct LiouvillianSpectrum {
  SectorIndexing idx;
  Eigen::VectorXcd eigenvalues;     // nu, rad/ps
  Eigen::MatrixXcd modes;           // S
  Eigen::MatrixXcd modes_inverse;   // S^-1
  double condition = 0.0;           // condition number estimate of S
  bool ill_conditioned = false;     // condition > 1e8: prefer the RK4 oracle
};

ExcitedGenerator assemble_excited_generator(const SystemParams& params);
GroundGenerator assemble_ground_generator(const SystemParams& params);

/// Dense eigendecomposition of the excited generator.
/// Throws std::length_error above 10^4 dimensions and NumericalError when
/// the eigenvector matrix is numerically singular.
LiouvillianSpectrum spectral_decompose(const ExcitedGenerator& generator);

/// rho(t) = S exp(nu t) S^-1 rho0 on the excited sector.
Eigen::VectorXcd propagate_excited(const LiouvillianSpectrum& spectrum,
                                   const Eigen::VectorXcd& rho0, double t_ps);

/// Closed-form 2x2 solvent propagator of molecule s in the vibrational
/// ground manifold, basis order (l=0, l=1); columns sum to one.
Eigen::Matrix2d solvent_gg(const SystemParams& params, int molecule, double t_ps);

/// Tensor-product ground-sector propagator over all N solvent coordinates,
/// kept in exponential-sum form so that convolutions against excited-sector
/// modes integrate in closed form.
class GroundPropagator {
 public:
  explicit GroundPropagator(const SystemParams& params);

  int n_molecules() const { return n_; }

  /// Apply the full propagator at time t to a ground-sector vector.
  Eigen::VectorXd apply(double t_ps, const Eigen::VectorXd& v) const;

  /// Dense 2^N x 2^N propagator matrix (small N only).
  Eigen::MatrixXd matrix(double t_ps) const;

  /// Decay rate of the exponential-sum term selected by `mask`, rad/ps.
  double subset_rate(std::uint32_t mask) const;

  /// Apply the term selected by `mask`: stationary factor for molecules
  /// outside the mask, transient factor for molecules inside it.
  Eigen::VectorXcd apply_subset(std::uint32_t mask, const Eigen::VectorXcd& v) const;

 private:
  int n_ = 0;
  std::vector<Eigen::Matrix2d> stationary_;  // A_s
  std::vector<Eigen::Matrix2d> transient_;   // B_s
  std::vector<double> rates_;                // gamma_s (2 nbar_s + 1), rad/ps
};

/// Closed form of the convolution integral(0..t) exp(-gamma (t-t')) exp(nu t') dt',
/// with the analytic limit when nu + gamma vanishes.
Complex exp_convolution(Complex nu, double gamma, double t);

/// Ground-sector population accumulated through cavity leakage up to time t,
/// for an excited state given by its modal weights w = S^-1 rho0.
Eigen::VectorXcd accumulated_leakage(const LiouvillianSpectrum& spectrum,
                                     const SystemParams& params,
                                     const GroundPropagator& ground,
                                     const Eigen::VectorXcd& mode_weights, double t_ps);

/// Cavity-leakage pathway Green's function
/// <<G(r), G(r)|G(T2)|psi_j'(J), psi_j(J)>>, returned as a matrix with one
/// row per final ground configuration r and one column per initial
/// eigenstate pair, flattened as j' * (N+1) + j in the block of `initial`.
Eigen::MatrixXcd esd_green(const LiouvillianSpectrum& spectrum, const SystemParams& params,
                           const BlockEigensystem& initial, double t2_ps);

}  // namespace vibropol
