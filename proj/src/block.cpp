#include "vibropol/block.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>

namespace vibropol {

int BlockEigensystem::lower() const {
  for (std::size_t k = 0; k < labels.size(); ++k)
    if (labels[k] == StateLabel::kLower) return static_cast<int>(k);
  throw std::logic_error("BlockEigensystem: no LP label");
}

int BlockEigensystem::upper() const {
  for (std::size_t k = 0; k < labels.size(); ++k)
    if (labels[k] == StateLabel::kUpper) return static_cast<int>(k);
  throw std::logic_error("BlockEigensystem: no UP label");
}

std::vector<int> BlockEigensystem::dark() const {
  std::vector<int> out;
  for (std::size_t k = 0; k < labels.size(); ++k)
    if (labels[k] == StateLabel::kDark) out.push_back(static_cast<int>(k));
  return out;
}

Eigen::MatrixXcd build_block_hamiltonian(const SystemParams& params, const SolventConfig& config) {
  params.validate();
  const int n = params.size();
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n + 1, n + 1);
  for (int i = 0; i < n; ++i) {
    const auto& m = params.molecules[i];
    // The anharmonicity b+b+bb term annihilates single-excitation states
    // and therefore never enters this block.
    h(i, i) = m.omega + m.disorder_shift * config.bit(i) - params.cavity.omega;
    h(i, n) = m.coupling;
    h(n, i) = m.coupling;
  }
  return h;
}

Eigen::Matrix3Xcd transition_dipoles(const Eigen::MatrixXcd& vectors,
                                     const std::vector<Eigen::Vector3d>& dipoles) {
  const Eigen::Index n = static_cast<Eigen::Index>(dipoles.size());
  if (vectors.rows() != n + 1)
    throw std::invalid_argument("transition_dipoles: eigenvector matrix must have one more row "
                                "than the dipole list");
  Eigen::Matrix3Xd mus(3, n);
  for (Eigen::Index s = 0; s < n; ++s) mus.col(s) = dipoles[s];
  return mus * vectors.topRows(n);
}

BlockEigensystem diagonalize_block(const Eigen::MatrixXcd& hamiltonian,
                                   const SystemParams& params, const SolventConfig& config) {
  const Eigen::Index dim = hamiltonian.rows();
  if (hamiltonian.cols() != dim)
    throw std::invalid_argument("diagonalize_block: matrix must be square");
  if ((hamiltonian - hamiltonian.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("diagonalize_block: input is not Hermitian within 1e-10");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(hamiltonian);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("diagonalize_block: eigensolver failed to converge");

  BlockEigensystem eig;
  eig.config = config;
  eig.omega = solver.eigenvalues();
  eig.vectors = solver.eigenvectors();

  // Deterministic phases: make the largest-magnitude component of each
  // column real and positive; ties resolve to the lowest row index.
  for (Eigen::Index k = 0; k < dim; ++k) {
    Eigen::Index row = 0;
    eig.vectors.col(k).cwiseAbs().maxCoeff(&row);
    const std::complex<double> pivot = eig.vectors(row, k);
    if (std::abs(pivot) > 0.0) eig.vectors.col(k) *= std::conj(pivot) / std::abs(pivot);
  }

  std::vector<Eigen::Vector3d> mus(params.molecules.size());
  for (std::size_t s = 0; s < mus.size(); ++s) mus[s] = params.molecules[s].dipole;
  eig.dipoles = transition_dipoles(eig.vectors, mus);

  // The two states with the largest photon weight are the polariton pair.
  const Eigen::Index photon_row = dim - 1;
  std::vector<Eigen::Index> order(dim);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return std::norm(eig.vectors(photon_row, a)) > std::norm(eig.vectors(photon_row, b));
  });
  Eigen::Index lp = order[0], up = order[1];
  if (eig.omega(lp) > eig.omega(up)) std::swap(lp, up);
  eig.labels.assign(dim, StateLabel::kDark);
  eig.labels[lp] = StateLabel::kLower;
  eig.labels[up] = StateLabel::kUpper;
  return eig;
}

std::vector<BlockEigensystem> diagonalize_all_blocks(const SystemParams& params) {
  std::vector<BlockEigensystem> out;
  for (const auto& config : enumerate_configs(params.size()))
    out.push_back(diagonalize_block(build_block_hamiltonian(params, config), params, config));
  return out;
}

}  // namespace vibropol
