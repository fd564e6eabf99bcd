#include "vibropol/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "vibropol/units.hpp"

namespace vibropol {

namespace {

double hamiltonian_scale(const SystemParams& params) {
  double scale = params.cavity_rate();
  for (const auto& m : params.molecules) {
    scale = std::max({scale, std::abs(m.omega - params.cavity.omega),
                      std::abs(m.omega + m.disorder_shift - params.cavity.omega),
                      std::abs(m.coupling), m.solvent_rate});
  }
  return to_angular(std::max(scale, 1e-3));
}

}  // namespace

Rk4Propagator::Rk4Propagator(const SystemParams& params) : idx_(params.size()) {
  const ExcitedGenerator excited = assemble_excited_generator(params);
  const GroundGenerator ground = assemble_ground_generator(params);
  const Eigen::Index ne = static_cast<Eigen::Index>(idx_.excited_dim());
  const Eigen::Index ng = static_cast<Eigen::Index>(idx_.ground_dim());

  std::vector<Eigen::Triplet<Complex>> entries;
  for (int k = 0; k < excited.matrix.outerSize(); ++k)
    for (Eigen::SparseMatrix<Complex>::InnerIterator it(excited.matrix, k); it; ++it)
      entries.emplace_back(it.row(), it.col(), it.value());
  for (int k = 0; k < ground.matrix.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(ground.matrix, k); it; ++it)
      entries.emplace_back(ne + it.row(), ne + it.col(), Complex{it.value(), 0.0});
  for (int k = 0; k < ground.feed.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(ground.feed, k); it; ++it)
      entries.emplace_back(ne + it.row(), it.col(), Complex{it.value(), 0.0});

  combined_.resize(ne + ng, ne + ng);
  combined_.setFromTriplets(entries.begin(), entries.end());
  max_step_ = 0.01 / hamiltonian_scale(params);
}

std::vector<DensityState> Rk4Propagator::trajectory(const DensityState& rho0, double dt,
                                                    const std::vector<double>& times_ps) const {
  if (!(dt > 0.0) || dt > max_step_)
    throw std::invalid_argument("Rk4Propagator: step " + std::to_string(dt) +
                                " ps violates the stability heuristic; use dt <= " +
                                std::to_string(max_step_) + " ps");
  if (!std::is_sorted(times_ps.begin(), times_ps.end()))
    throw std::invalid_argument("Rk4Propagator: times must be ascending");
  if (!times_ps.empty() && times_ps.front() < rho0.time)
    throw std::invalid_argument("Rk4Propagator: times must not precede the state time");

  const Eigen::Index ne = static_cast<Eigen::Index>(idx_.excited_dim());
  const Eigen::Index ng = static_cast<Eigen::Index>(idx_.ground_dim());
  Eigen::VectorXcd v(ne + ng);
  v.head(ne) = rho0.excited;
  v.tail(ng) = rho0.ground.cast<Complex>();

  std::vector<DensityState> trajectory;
  trajectory.reserve(times_ps.size());
  double current = rho0.time;
  Eigen::VectorXcd k1(v.size()), k2(v.size()), k3(v.size()), k4(v.size());
  for (double target : times_ps) {
    const double span = target - current;
    if (span > 0.0) {
      const auto steps = static_cast<long>(std::ceil(span / dt - 1e-12));
      const double h = span / static_cast<double>(steps);
      for (long s = 0; s < steps; ++s) {
        k1.noalias() = combined_ * v;
        k2.noalias() = combined_ * (v + 0.5 * h * k1);
        k3.noalias() = combined_ * (v + 0.5 * h * k2);
        k4.noalias() = combined_ * (v + h * k3);
        v += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      }
      current = target;
    }
    DensityState snapshot;
    snapshot.time = target;
    snapshot.excited = v.head(ne);
    snapshot.ground = v.tail(ng).real();
    trajectory.push_back(std::move(snapshot));
  }
  return trajectory;
}

std::vector<DensityState> rk4_propagate(const SystemParams& params, const DensityState& rho0,
                                        double dt, const std::vector<double>& times_ps) {
  if (params.size() > 4)
    throw std::length_error("rk4_propagate: oracle integration is limited to N <= 4");
  return Rk4Propagator(params).trajectory(rho0, dt, times_ps);
}

OracleReport compare_propagators(const SystemParams& params, const DensityState& rho0,
                                 const std::vector<double>& times_ps, double tolerance,
                                 const LiouvillianSpectrum* spectrum) {
  if (params.size() > 3)
    throw std::length_error("compare_propagators: limited to N <= 3");
  const auto start = std::chrono::steady_clock::now();

  LiouvillianSpectrum owned;
  if (!spectrum) {
    owned = spectral_decompose(assemble_excited_generator(params));
    spectrum = &owned;
  }
  const std::vector<DensityState> spectral = evolve(rho0, times_ps, *spectrum, params);

  const Rk4Propagator oracle(params);
  const double dt = std::min(0.9 * oracle.max_step(), 0.002);
  const std::vector<DensityState> integrated = oracle.trajectory(rho0, dt, times_ps);

  double deviation = 0.0;
  for (std::size_t k = 0; k < times_ps.size(); ++k) {
    deviation = std::max(deviation,
                         (spectral[k].excited - integrated[k].excited).cwiseAbs().maxCoeff());
    deviation = std::max(deviation,
                         (spectral[k].ground - integrated[k].ground).cwiseAbs().maxCoeff());
  }

  OracleReport report;
  report.quantity = "spectral propagator vs RK4, N=" + std::to_string(params.size());
  report.deviation = deviation;
  report.tolerance = tolerance;
  report.pass = deviation <= tolerance;
  report.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

SpectrumGrid timedomain_trps_oracle(const SystemParams& params, const InitialState& initial,
                                    std::uint32_t config_index, double tau_probe_ps,
                                    const Pulse& probe, const Pulse& local_oscillator,
                                    const Eigen::VectorXd& omega, double t_max_ps, double dt_ps) {
  if (params.size() != 1)
    throw std::invalid_argument("timedomain_trps_oracle: supports N = 1 only");
  for (const auto& m : params.molecules)
    if (m.solvent_rate != 0.0)
      throw std::invalid_argument("timedomain_trps_oracle: requires a frozen solvent (gamma = 0)");
  if (omega.size() == 0)
    throw std::invalid_argument("timedomain_trps_oracle: frequency grid is empty");

  const SectorIndexing idx(1);
  const SolventConfig config{config_index, 1};
  const BlockEigensystem eig =
      diagonalize_block(build_block_hamiltonian(params, config), params, config);
  const DensityState state0 = prepare_initial(initial, eig, idx);

  // Work on the 2x2 block of the frozen configuration plus its ground scalar.
  Eigen::Matrix2cd rho;
  for (int m = 0; m < 2; ++m)
    for (int n = 0; n < 2; ++n) rho(m, n) = state0.coefficient(idx, m, n, config_index);
  double ground = state0.ground(config_index);

  const Eigen::Matrix2cd h =
      to_angular(1.0) * build_block_hamiltonian(params, config);
  const double cavity = to_angular(params.cavity_rate());
  Eigen::Matrix2d damp = Eigen::Matrix2d::Zero();
  damp(1, 1) = 1.0;  // photon projector

  auto density_rhs = [&](const Eigen::Matrix2cd& r) -> Eigen::Matrix2cd {
    return Complex{0.0, -1.0} * (h * r - r * h) - 0.5 * cavity * (damp * r + r * damp);
  };

  const double dt = std::min(dt_ps, 0.9 * 0.01 / std::max(h.cwiseAbs().maxCoeff(), 1e-6));
  const long pre_steps = std::max(1L, static_cast<long>(std::ceil(tau_probe_ps / dt)));
  if (tau_probe_ps > 0.0) {
    const double hstep = tau_probe_ps / static_cast<double>(pre_steps);
    for (long s = 0; s < pre_steps; ++s) {
      const Eigen::Matrix2cd k1 = density_rhs(rho);
      const Eigen::Matrix2cd k2 = density_rhs(rho + 0.5 * hstep * k1);
      const Eigen::Matrix2cd k3 = density_rhs(rho + 0.5 * hstep * k2);
      const Eigen::Matrix2cd k4 = density_rhs(rho + hstep * k3);
      ground += hstep * cavity *
                (rho(1, 1) + 2.0 * (rho(1, 1) + 0.5 * hstep * k1(1, 1)) +
                 2.0 * (rho(1, 1) + 0.5 * hstep * k2(1, 1)) + (rho(1, 1) + hstep * k3(1, 1)))
                    .real() /
                6.0;
      rho += (hstep / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  }

  // Probe action: optical coherence from the excited state and the bleach
  // coherence from the accumulated ground population.
  const double mu_pr = probe.polarization.dot(params.molecules[0].dipole);
  const double mu_lo = local_oscillator.polarization.dot(params.molecules[0].dipole);
  Eigen::Vector2cd coherence;
  coherence << rho(0, 0) * mu_pr, rho(1, 0) * mu_pr;
  Eigen::Vector2cd bleach;
  bleach << mu_pr * ground, 0.0;

  auto coherence_rhs = [&](const Eigen::Vector2cd& c) -> Eigen::Vector2cd {
    return Complex{0.0, -1.0} * (h * c) - 0.5 * cavity * (damp * c);
  };

  const auto n_steps = static_cast<long>(std::ceil(t_max_ps / dt));
  Eigen::VectorXcd signal(n_steps + 1);
  Eigen::VectorXd times(n_steps + 1);
  for (long s = 0; s <= n_steps; ++s) {
    times(s) = static_cast<double>(s) * dt;
    signal(s) = mu_lo * (coherence(0) - bleach(0));
    auto advance = [&](Eigen::Vector2cd& c) {
      const Eigen::Vector2cd k1 = coherence_rhs(c);
      const Eigen::Vector2cd k2 = coherence_rhs(c + 0.5 * dt * k1);
      const Eigen::Vector2cd k3 = coherence_rhs(c + 0.5 * dt * k2);
      const Eigen::Vector2cd k4 = coherence_rhs(c + dt * k3);
      c += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    };
    advance(coherence);
    advance(bleach);
  }

  SpectrumGrid grid;
  grid.axes = {omega};
  grid.values.resize(omega.size(), 1);
  for (Eigen::Index a = 0; a < omega.size(); ++a) {
    const double w_ang = to_angular(omega(a));
    Complex integral = 0.0;
    for (long s = 0; s <= n_steps; ++s) {
      const double weight = (s == 0 || s == n_steps) ? 0.5 : 1.0;
      integral += weight * signal(s) * std::exp(Complex{0.0, w_ang * times(s)});
    }
    integral *= dt * kRadPerPsPerWavenumber;
    const double filter = gaussian_envelope(omega(a), local_oscillator, params.cavity.omega) *
                          gaussian_envelope(omega(a), probe, params.cavity.omega);
    grid.values(a, 0) = integral.real() * filter;
  }
  return grid;
}

}  // namespace vibropol
