#include "vibropol/liouvillian.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "vibropol/errors.hpp"
#include "vibropol/units.hpp"

namespace vibropol {

namespace {

constexpr Complex kImag{0.0, 1.0};

}  // namespace

ExcitedGenerator assemble_excited_generator(const SystemParams& params) {
  params.validate();
  const int n = params.size();
  const SectorIndexing idx(n);
  const int ns = idx.n_sites;
  const int ph = idx.photon();
  const double cavity_half = 0.5 * to_angular(params.cavity_rate());

  std::vector<Eigen::Triplet<Complex>> entries;
  entries.reserve(idx.excited_dim() * (2 * ns + n + 1));

  const auto configs = enumerate_configs(n);
  for (const auto& config : configs) {
    const Eigen::MatrixXcd h = to_angular(1.0) * build_block_hamiltonian(params, config);
    for (int m = 0; m < ns; ++m) {
      for (int l = 0; l < ns; ++l) {
        // d/dt rho(m, l) = -i sum_k [H(m,k) rho(k,l) - rho(m,k) H(k,l)]
        for (int k = 0; k < ns; ++k) {
          if (h(m, k) != 0.0)
            entries.emplace_back(idx.excited(m, l, config.index),
                                 idx.excited(k, l, config.index), -kImag * h(m, k));
          if (h(k, l) != 0.0)
            entries.emplace_back(idx.excited(m, l, config.index),
                                 idx.excited(m, k, config.index), kImag * h(k, l));
        }
      }
    }

    double out_rate = 0.0;
    for (int i = 0; i < n; ++i) {
      const double nbar = params.mean_occupation(i);
      const double gamma = to_angular(params.molecules[i].solvent_rate);
      const double up = gamma * nbar;
      const double down = gamma * (nbar + 1.0);
      out_rate += config.bit(i) ? down : up;
      // Jump sandwich: flips bit i in bra and ket configs simultaneously.
      const double in_rate = config.bit(i) ? down : up;
      const std::uint32_t target = config.flipped(i);
      for (int m = 0; m < ns; ++m)
        for (int l = 0; l < ns; ++l)
          entries.emplace_back(idx.excited(m, l, target), idx.excited(m, l, config.index),
                               Complex{in_rate, 0.0});
    }
    for (int m = 0; m < ns; ++m)
      for (int l = 0; l < ns; ++l) {
        double decay = out_rate;
        if (m == ph) decay += cavity_half;
        if (l == ph) decay += cavity_half;
        if (decay != 0.0)
          entries.emplace_back(idx.excited(m, l, config.index), idx.excited(m, l, config.index),
                               Complex{-decay, 0.0});
      }
  }

  ExcitedGenerator generator{idx, Eigen::SparseMatrix<Complex>(
                                      static_cast<Eigen::Index>(idx.excited_dim()),
                                      static_cast<Eigen::Index>(idx.excited_dim()))};
  generator.matrix.setFromTriplets(entries.begin(), entries.end());
  return generator;
}

GroundGenerator assemble_ground_generator(const SystemParams& params) {
  params.validate();
  const int n = params.size();
  const SectorIndexing idx(n);

  std::vector<Eigen::Triplet<double>> entries;
  for (const auto& config : enumerate_configs(n)) {
    double out_rate = 0.0;
    for (int i = 0; i < n; ++i) {
      const double nbar = params.mean_occupation(i);
      const double gamma = to_angular(params.molecules[i].solvent_rate);
      const double rate = config.bit(i) ? gamma * (nbar + 1.0) : gamma * nbar;
      out_rate += rate;
      entries.emplace_back(config.flipped(i), config.index, rate);
    }
    if (out_rate != 0.0) entries.emplace_back(config.index, config.index, -out_rate);
  }

  GroundGenerator generator{idx,
                            Eigen::SparseMatrix<double>(static_cast<Eigen::Index>(idx.ground_dim()),
                                                        static_cast<Eigen::Index>(idx.ground_dim())),
                            Eigen::SparseMatrix<double>(static_cast<Eigen::Index>(idx.ground_dim()),
                                                        static_cast<Eigen::Index>(idx.excited_dim()))};
  generator.matrix.setFromTriplets(entries.begin(), entries.end());

  const double feed = to_angular(params.cavity_rate());
  std::vector<Eigen::Triplet<double>> feeds;
  for (const auto& config : enumerate_configs(n))
    feeds.emplace_back(config.index, idx.excited(idx.photon(), idx.photon(), config.index), feed);
  generator.feed.setFromTriplets(feeds.begin(), feeds.end());
  return generator;
}

LiouvillianSpectrum spectral_decompose(const ExcitedGenerator& generator) {
  const std::size_t dim = generator.idx.excited_dim();
  if (dim > 10000)
    throw std::length_error("spectral_decompose: dim(L) = " + std::to_string(dim) +
                            " exceeds the dense eigensolve limit of 10^4");

  Eigen::MatrixXcd dense(generator.matrix);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(dense);
  if (solver.info() != Eigen::Success)
    throw NumericalError("spectral_decompose: eigensolver failed to converge");

  LiouvillianSpectrum spectrum{generator.idx, solver.eigenvalues(), solver.eigenvectors(),
                               Eigen::MatrixXcd(), 0.0, false};

  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(spectrum.modes);
  const double rcond = lu.rcond();
  if (!(rcond > 0.0) || !std::isfinite(rcond))
    throw NumericalError("spectral_decompose: eigenvector matrix is singular; "
                         "the generator appears defective");
  spectrum.modes_inverse = lu.inverse();
  spectrum.condition = 1.0 / rcond;
  spectrum.ill_conditioned = spectrum.condition > 1e8;

  const double identity_defect =
      (spectrum.modes * spectrum.modes_inverse -
       Eigen::MatrixXcd::Identity(dense.rows(), dense.cols()))
          .cwiseAbs()
          .maxCoeff();
  if (identity_defect > 1e-8)
    throw NumericalError("spectral_decompose: S S^-1 deviates from identity by " +
                         std::to_string(identity_defect));
  return spectrum;
}

Eigen::VectorXcd propagate_excited(const LiouvillianSpectrum& spectrum,
                                   const Eigen::VectorXcd& rho0, double t_ps) {
  if (t_ps < 0.0) throw std::invalid_argument("propagate_excited: time must be non-negative");
  if (rho0.size() != spectrum.eigenvalues.size())
    throw std::invalid_argument("propagate_excited: state size mismatch");
  const Eigen::VectorXcd phases = (spectrum.eigenvalues.array() * t_ps).exp();
  return spectrum.modes * phases.cwiseProduct(spectrum.modes_inverse * rho0);
}

namespace {

Eigen::Matrix2d stationary_part(double nbar) {
  Eigen::Matrix2d a;
  a << nbar + 1.0, nbar + 1.0, nbar, nbar;
  return a / (2.0 * nbar + 1.0);
}

}  // namespace

Eigen::Matrix2d solvent_gg(const SystemParams& params, int molecule, double t_ps) {
  if (t_ps < 0.0) throw std::invalid_argument("solvent_gg: time must be non-negative");
  const double nbar = params.mean_occupation(molecule);
  const double rate = to_angular(params.molecules.at(molecule).solvent_rate) * (2.0 * nbar + 1.0);
  const Eigen::Matrix2d a = stationary_part(nbar);
  return a + std::exp(-rate * t_ps) * (Eigen::Matrix2d::Identity() - a);
}

GroundPropagator::GroundPropagator(const SystemParams& params) : n_(params.size()) {
  for (int s = 0; s < n_; ++s) {
    const double nbar = params.mean_occupation(s);
    stationary_.push_back(stationary_part(nbar));
    transient_.push_back(Eigen::Matrix2d::Identity() - stationary_.back());
    rates_.push_back(to_angular(params.molecules[s].solvent_rate) * (2.0 * nbar + 1.0));
  }
}

double GroundPropagator::subset_rate(std::uint32_t mask) const {
  double rate = 0.0;
  for (int s = 0; s < n_; ++s)
    if (mask & (1u << s)) rate += rates_[s];
  return rate;
}

namespace {

template <typename Scalar>
void contract_bit(Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& v, int bit,
                  const Eigen::Matrix2d& g) {
  const std::uint32_t step = 1u << bit;
  const std::uint32_t size = static_cast<std::uint32_t>(v.size());
  for (std::uint32_t base = 0; base < size; ++base) {
    if (base & step) continue;
    const Scalar v0 = v(base);
    const Scalar v1 = v(base | step);
    v(base) = g(0, 0) * v0 + g(0, 1) * v1;
    v(base | step) = g(1, 0) * v0 + g(1, 1) * v1;
  }
}

}  // namespace

Eigen::VectorXd GroundPropagator::apply(double t_ps, const Eigen::VectorXd& v) const {
  Eigen::VectorXd out = v;
  for (int s = 0; s < n_; ++s) {
    const Eigen::Matrix2d g =
        stationary_[s] + std::exp(-rates_[s] * t_ps) * transient_[s];
    contract_bit(out, s, g);
  }
  return out;
}

Eigen::MatrixXd GroundPropagator::matrix(double t_ps) const {
  const Eigen::Index dim = Eigen::Index{1} << n_;
  Eigen::MatrixXd out(dim, dim);
  for (Eigen::Index col = 0; col < dim; ++col)
    out.col(col) = apply(t_ps, Eigen::VectorXd::Unit(dim, col));
  return out;
}

Eigen::VectorXcd GroundPropagator::apply_subset(std::uint32_t mask,
                                                const Eigen::VectorXcd& v) const {
  Eigen::VectorXcd out = v;
  for (int s = 0; s < n_; ++s)
    contract_bit(out, s, (mask & (1u << s)) ? transient_[s] : stationary_[s]);
  return out;
}

Complex exp_convolution(Complex nu, double gamma, double t) {
  const Complex x = nu + gamma;
  if (std::abs(x) < 1e-9)
    return std::exp(-gamma * t) * t * (1.0 + 0.5 * x * t);
  return (std::exp(nu * t) - std::exp(-gamma * t)) / x;
}

Eigen::VectorXcd accumulated_leakage(const LiouvillianSpectrum& spectrum,
                                     const SystemParams& params, const GroundPropagator& ground,
                                     const Eigen::VectorXcd& mode_weights, double t_ps) {
  const SectorIndexing& idx = spectrum.idx;
  const int ph = idx.photon();
  const std::uint32_t n_configs = static_cast<std::uint32_t>(idx.n_configs);
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(n_configs);
  Eigen::VectorXcd photon_amplitude(n_configs);

  for (Eigen::Index u = 0; u < mode_weights.size(); ++u) {
    if (mode_weights(u) == 0.0) continue;
    for (std::uint32_t p = 0; p < n_configs; ++p)
      photon_amplitude(p) =
          spectrum.modes(static_cast<Eigen::Index>(idx.excited(ph, ph, p)), u) * mode_weights(u);
    for (std::uint32_t mask = 0; mask < n_configs; ++mask) {
      const Complex weight =
          exp_convolution(spectrum.eigenvalues(u), ground.subset_rate(mask), t_ps);
      if (weight == 0.0) continue;
      out += weight * ground.apply_subset(mask, photon_amplitude);
    }
  }
  return to_angular(params.cavity_rate()) * out;
}

Eigen::MatrixXcd esd_green(const LiouvillianSpectrum& spectrum, const SystemParams& params,
                           const BlockEigensystem& initial, double t2_ps) {
  if (t2_ps < 0.0) throw std::invalid_argument("esd_green: waiting time must be non-negative");
  const SectorIndexing& idx = spectrum.idx;
  const int ns = idx.n_sites;
  const int ph = idx.photon();
  const std::uint32_t n_configs = static_cast<std::uint32_t>(idx.n_configs);
  const std::uint32_t j_config = initial.config.index;

  // Site-basis coefficients of every initial eigenpair |psi_j'><psi_j|:
  // pair_map((k,l), (j',j)) = C(k,j') conj(C(l,j)).
  const Eigen::MatrixXcd& c = initial.vectors;
  Eigen::MatrixXcd pair_map(ns * ns, ns * ns);
  for (int jp = 0; jp < ns; ++jp)
    for (int j = 0; j < ns; ++j)
      for (int k = 0; k < ns; ++k)
        for (int l = 0; l < ns; ++l)
          pair_map(k * ns + l, jp * ns + j) = c(k, jp) * std::conj(c(l, j));

  // Modal weights of each eigenpair: rows u, columns (j',j).
  const Eigen::MatrixXcd weights =
      spectrum.modes_inverse.middleCols(static_cast<Eigen::Index>(j_config) * ns * ns, ns * ns) *
      pair_map;

  const GroundPropagator ground(params);
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n_configs, ns * ns);
  Eigen::VectorXcd photon_amplitude(n_configs);
  for (Eigen::Index u = 0; u < spectrum.eigenvalues.size(); ++u) {
    for (std::uint32_t p = 0; p < n_configs; ++p)
      photon_amplitude(p) =
          spectrum.modes(static_cast<Eigen::Index>(idx.excited(ph, ph, p)), u);
    for (std::uint32_t mask = 0; mask < n_configs; ++mask) {
      const Complex integral =
          exp_convolution(spectrum.eigenvalues(u), ground.subset_rate(mask), t2_ps);
      if (integral == 0.0) continue;
      const Eigen::VectorXcd leak = ground.apply_subset(mask, photon_amplitude);
      out.noalias() += (integral * leak) * weights.row(u);
    }
  }
  return to_angular(params.cavity_rate()) * out;
}

}  // namespace vibropol
