#include "vibropol/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "vibropol/units.hpp"

namespace vibropol {

DensityState DensityState::zero(const SectorIndexing& idx) {
  DensityState state;
  state.excited = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(idx.excited_dim()));
  state.ground = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(idx.ground_dim()));
  return state;
}

double total_trace(const DensityState& state, const SectorIndexing& idx) {
  double trace = state.ground.sum();
  for (std::uint32_t p = 0; p < idx.n_configs; ++p)
    for (int m = 0; m < idx.n_sites; ++m) trace += state.coefficient(idx, m, m, p).real();
  return trace;
}

double hermiticity_defect(const DensityState& state, const SectorIndexing& idx) {
  double defect = 0.0;
  for (std::uint32_t p = 0; p < idx.n_configs; ++p)
    for (int m = 0; m < idx.n_sites; ++m)
      for (int n = 0; n <= m; ++n)
        defect = std::max(defect, std::abs(state.coefficient(idx, m, n, p) -
                                           std::conj(state.coefficient(idx, n, m, p))));
  return defect;
}

double min_population(const DensityState& state, const SectorIndexing& idx) {
  double lowest = state.ground.size() ? state.ground.minCoeff() : 0.0;
  for (std::uint32_t p = 0; p < idx.n_configs; ++p)
    for (int m = 0; m < idx.n_sites; ++m)
      lowest = std::min(lowest, state.coefficient(idx, m, m, p).real());
  return lowest;
}

DensityState prepare_initial(const InitialState& selector, const BlockEigensystem& eig,
                             const SectorIndexing& idx) {
  const int ns = idx.n_sites;
  const std::uint32_t config = eig.config.index;
  DensityState state = DensityState::zero(idx);

  auto add_pure = [&](int k, double weight) {
    for (int m = 0; m < ns; ++m)
      for (int n = 0; n < ns; ++n)
        state.excited(static_cast<Eigen::Index>(idx.excited(m, n, config))) +=
            weight * eig.vectors(m, k) * std::conj(eig.vectors(n, k));
  };

  switch (selector.kind) {
    case InitialKind::kLower:
      add_pure(eig.lower(), 1.0);
      break;
    case InitialKind::kUpper:
      add_pure(eig.upper(), 1.0);
      break;
    case InitialKind::kDark: {
      const auto dark = eig.dark();
      if (selector.index < 0 || selector.index >= static_cast<int>(dark.size()))
        throw std::out_of_range("prepare_initial: dark-state index out of range");
      add_pure(dark[selector.index], 1.0);
      break;
    }
    case InitialKind::kDarkUniform: {
      const auto dark = eig.dark();
      if (dark.empty())
        throw std::out_of_range("prepare_initial: no dark states for N = 1");
      for (int k : dark) add_pure(k, 1.0 / static_cast<double>(dark.size()));
      break;
    }
    case InitialKind::kSite:
      if (selector.index < 0 || selector.index >= ns)
        throw std::out_of_range("prepare_initial: site index out of range");
      state.excited(static_cast<Eigen::Index>(
          idx.excited(selector.index, selector.index, config))) = 1.0;
      break;
    case InitialKind::kGround:
      state.ground(config) = 1.0;
      break;
  }
  return state;
}

std::vector<DensityState> evolve(const DensityState& state, const std::vector<double>& times_ps,
                                 const LiouvillianSpectrum& spectrum, const SystemParams& params) {
  if (!std::is_sorted(times_ps.begin(), times_ps.end()))
    throw std::invalid_argument("evolve: times must be ascending");
  if (!times_ps.empty() && times_ps.front() < state.time)
    throw std::invalid_argument("evolve: times must not precede the state time");

  const GroundPropagator ground(params);
  const Eigen::VectorXcd weights = spectrum.modes_inverse * state.excited;

  std::vector<DensityState> trajectory;
  trajectory.reserve(times_ps.size());
  for (double t : times_ps) {
    const double dt = t - state.time;
    DensityState snapshot;
    snapshot.time = t;
    if (dt == 0.0) {
      snapshot.excited = state.excited;
      snapshot.ground = state.ground;
    } else {
      const Eigen::VectorXcd phases = (spectrum.eigenvalues.array() * dt).exp();
      snapshot.excited = spectrum.modes * phases.cwiseProduct(weights);
      snapshot.ground = ground.apply(dt, state.ground) +
                        accumulated_leakage(spectrum, params, ground, weights, dt).real();
    }
    trajectory.push_back(std::move(snapshot));
  }
  return trajectory;
}

Eigen::VectorXd site_populations(const DensityState& state, const SectorIndexing& idx) {
  Eigen::VectorXd populations = Eigen::VectorXd::Zero(idx.n_sites);
  for (std::uint32_t p = 0; p < idx.n_configs; ++p)
    for (int m = 0; m < idx.n_sites; ++m)
      populations(m) += state.coefficient(idx, m, m, p).real();
  return populations;
}

double intermolecule_coherence(const DensityState& state, const SectorIndexing& idx, int i, int j) {
  if (i == j)
    throw std::invalid_argument("intermolecule_coherence: site indices must differ");
  if (i < 0 || j < 0 || i >= idx.n_sites || j >= idx.n_sites)
    throw std::out_of_range("intermolecule_coherence: site index out of range");
  Complex sum = 0.0;
  for (std::uint32_t p = 0; p < idx.n_configs; ++p) sum += state.coefficient(idx, i, j, p);
  return std::abs(sum);
}

PolaritonPopulations polariton_populations(const DensityState& state,
                                           const std::vector<BlockEigensystem>& eigensystems) {
  if (eigensystems.empty())
    throw std::invalid_argument("polariton_populations: eigensystems required");
  const SectorIndexing idx(eigensystems.front().config.n_molecules);
  const int ns = idx.n_sites;

  PolaritonPopulations result;
  result.per_config = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(idx.n_configs), ns);
  for (const auto& eig : eigensystems) {
    const std::uint32_t p = eig.config.index;
    Eigen::MatrixXcd block(ns, ns);
    for (int m = 0; m < ns; ++m)
      for (int n = 0; n < ns; ++n) block(m, n) = state.coefficient(idx, m, n, p);
    const Eigen::MatrixXcd rotated = eig.vectors.adjoint() * block * eig.vectors;
    for (int k = 0; k < ns; ++k) {
      const double population = rotated(k, k).real();
      result.per_config(p, k) = population;
      switch (eig.labels[k]) {
        case StateLabel::kLower: result.lower += population; break;
        case StateLabel::kUpper: result.upper += population; break;
        case StateLabel::kDark: result.dark += population; break;
      }
    }
  }
  return result;
}

namespace {

double site_wave(double x, double center, double length) {
  const double u = x - center;
  return std::sqrt(2.0 / (length * length * length * std::sqrt(M_PI))) * u *
         std::exp(-u * u / (2.0 * length * length));
}

bool sites_overlap(const SystemParams& params) {
  for (std::size_t i = 0; i < params.molecules.size(); ++i)
    for (std::size_t j = i + 1; j < params.molecules.size(); ++j)
      if (std::abs(params.molecules[i].position - params.molecules[j].position) < 0.01)
        return true;
  return false;
}

Eigen::MatrixXcd config_summed_block(const DensityState& state, const SectorIndexing& idx) {
  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(idx.n_sites, idx.n_sites);
  for (std::uint32_t p = 0; p < idx.n_configs; ++p)
    for (int m = 0; m < idx.n_sites; ++m)
      for (int n = 0; n < idx.n_sites; ++n) sum(m, n) += state.coefficient(idx, m, n, p);
  return sum;
}

}  // namespace

SpatialGrid spatial_density(const DensityState& state, const SectorIndexing& idx,
                            const SystemParams& params, const Eigen::VectorXd& x) {
  const int n = idx.n_molecules;
  const Eigen::MatrixXcd rho = config_summed_block(state, idx).topLeftCorner(n, n);

  SpatialGrid grid;
  grid.x = x;
  grid.density = Eigen::VectorXd::Zero(x.size());
  grid.overlapping_sites = sites_overlap(params);
  Eigen::VectorXd waves(n);
  for (Eigen::Index ix = 0; ix < x.size(); ++ix) {
    for (int i = 0; i < n; ++i)
      waves(i) = site_wave(x(ix), params.molecules[i].position, params.molecules[i].length);
    grid.density(ix) = (waves.transpose() * rho.real() * waves).value();
  }
  return grid;
}

Eigen::MatrixXcd spatial_coherence(const DensityState& state, const SectorIndexing& idx,
                                   const SystemParams& params, const Eigen::VectorXd& x) {
  const int n = idx.n_molecules;
  const Eigen::MatrixXcd rho = config_summed_block(state, idx).topLeftCorner(n, n);
  Eigen::MatrixXd waves(x.size(), n);
  for (Eigen::Index ix = 0; ix < x.size(); ++ix)
    for (int i = 0; i < n; ++i)
      waves(ix, i) = site_wave(x(ix), params.molecules[i].position, params.molecules[i].length);
  return waves * rho * waves.transpose();
}

Eigen::VectorXd thermal_config_weights(const SystemParams& params) {
  params.validate();
  const int n = params.size();
  const double kt = thermal_energy(params.temperature);
  Eigen::VectorXd weights(Eigen::Index{1} << n);
  for (const auto& config : enumerate_configs(n)) {
    double w = 1.0;
    for (int s = 0; s < n; ++s) {
      const double th = std::tanh(params.molecules[s].solvent_gap / (2.0 * kt));
      w *= 0.5 * (config.bit(s) ? 1.0 - th : 1.0 + th);
    }
    weights(config.index) = w;
  }
  return weights;
}

}  // namespace vibropol
