#include "vibropol/validate.hpp"

#include <chrono>
#include <cmath>
#include <functional>

#include "vibropol/units.hpp"

namespace vibropol {

SystemParams reference_system(int n_molecules) {
  SystemParams params;
  params.temperature = 300.0;
  params.cavity = {1983.0, 1983.0 / 0.04};
  for (int i = 0; i < n_molecules; ++i) {
    Molecule m;
    m.omega = 1983.0;
    m.disorder_shift = 18.0;
    m.anharmonicity = 0.0;
    m.coupling = 2.1;
    m.dipole = Eigen::Vector3d{0.122, 0.0, 0.0};
    m.length = 0.05;
    m.position = (i - 0.5 * (n_molecules - 1)) * 0.5;
    m.solvent_gap = 62.0;
    m.solvent_rate = 0.18;
    params.molecules.push_back(m);
  }
  return params;
}

namespace {

OracleReport timed_check(const std::string& quantity, double tolerance,
                         const std::function<double()>& deviation) {
  const auto start = std::chrono::steady_clock::now();
  OracleReport report;
  report.quantity = quantity;
  report.tolerance = tolerance;
  report.deviation = deviation();
  report.pass = report.deviation <= tolerance;
  report.runtime_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace

std::vector<OracleReport> run_validation_suite() {
  std::vector<OracleReport> reports;
  const SystemParams params = reference_system();
  const auto eigensystems = diagonalize_all_blocks(params);
  const auto generator = assemble_excited_generator(params);
  const auto spectrum = spectral_decompose(generator);
  const SectorIndexing& idx = generator.idx;

  reports.push_back(timed_check("dim(L) for N=3 equals 128", 0.0, [&] {
    return std::abs(static_cast<double>(idx.excited_dim()) - 128.0);
  }));

  reports.push_back(timed_check("mean occupation at 62 cm^-1, 300 K equals 2.8878", 5e-4, [&] {
    return std::abs(params.mean_occupation(0) - 2.8878);
  }));

  reports.push_back(timed_check("polariton frequencies at +-g sqrt(3)", 1e-9, [&] {
    const auto& resonant = eigensystems[0];
    const double split = 2.1 * std::sqrt(3.0);
    return std::max(std::abs(resonant.omega(resonant.lower()) + split),
                    std::abs(resonant.omega(resonant.upper()) - split));
  }));

  reports.push_back(timed_check("eigenvector unitarity", 1e-12, [&] {
    double defect = 0.0;
    for (const auto& eig : eigensystems) {
      const Eigen::Index ns = eig.vectors.rows();
      defect = std::max(defect, (eig.vectors.adjoint() * eig.vectors -
                                 Eigen::MatrixXcd::Identity(ns, ns))
                                    .cwiseAbs()
                                    .maxCoeff());
    }
    return defect;
  }));

  reports.push_back(timed_check("spectral reconstruction of each block", 1e-10, [&] {
    double defect = 0.0;
    for (const auto& eig : eigensystems) {
      const Eigen::MatrixXcd h = build_block_hamiltonian(params, eig.config);
      defect = std::max(defect, (eig.vectors * eig.omega.asDiagonal() * eig.vectors.adjoint() - h)
                                    .cwiseAbs()
                                    .maxCoeff());
    }
    return defect;
  }));

  reports.push_back(timed_check("Liouvillian eigenvalues decay (max Re nu)", 1e-10, [&] {
    return spectrum.eigenvalues.real().maxCoeff();
  }));

  reports.push_back(timed_check("trace conservation over 200 ps", 1e-8, [&] {
    const auto rho0 = prepare_initial(InitialState::lower(), eigensystems[0], idx);
    double drift = 0.0;
    for (const auto& state : evolve(rho0, {0.0, 10.0, 50.0, 200.0}, spectrum, params))
      drift = std::max(drift, std::abs(total_trace(state, idx) - 1.0));
    return drift;
  }));

  reports.push_back(timed_check("hermiticity preservation", 1e-10, [&] {
    const auto rho0 = prepare_initial(InitialState::upper(), eigensystems[0], idx);
    double defect = 0.0;
    for (const auto& state : evolve(rho0, {1.0, 100.0}, spectrum, params))
      defect = std::max(defect, hermiticity_defect(state, idx));
    return defect;
  }));

  reports.push_back(timed_check("solvent propagator semigroup and column sums", 1e-10, [&] {
    double defect = 0.0;
    for (double t : {0.1, 1.0, 10.0, 100.0}) {
      const Eigen::Matrix2d g = solvent_gg(params, 0, t);
      defect = std::max(defect, std::abs(g.col(0).sum() - 1.0));
      defect = std::max(defect, std::abs(g.col(1).sum() - 1.0));
      const Eigen::Matrix2d twice = solvent_gg(params, 0, 2.0 * t);
      defect = std::max(defect, (g * g - twice).cwiseAbs().maxCoeff());
    }
    return defect;
  }));

  reports.push_back(timed_check("thermal weights normalization", 1e-12, [&] {
    return std::abs(thermal_config_weights(params).sum() - 1.0);
  }));

  reports.push_back(timed_check("thermal weights match ground-generator null vector", 1e-10, [&] {
    const auto ground = assemble_ground_generator(params);
    const Eigen::VectorXd weights = thermal_config_weights(params);
    return (Eigen::MatrixXd(ground.matrix) * weights).cwiseAbs().maxCoeff();
  }));

  {
    const auto rho0 = prepare_initial(InitialState::lower(), eigensystems[0], idx);
    auto report = compare_propagators(params, rho0, {1.0, 10.0, 100.0}, 1e-6, &spectrum);
    report.quantity = "spectral propagator vs RK4 at 1, 10, 100 ps";
    reports.push_back(report);
  }

  reports.push_back(timed_check("cavity-leakage Green's function vanishes at T2=0", 1e-14, [&] {
    return esd_green(spectrum, params, eigensystems[0], 0.0).cwiseAbs().maxCoeff();
  }));

  {
    // N=1, frozen solvent: closed-form signal against explicit time propagation.
    SystemParams single = reference_system(1);
    single.molecules[0].solvent_rate = 0.0;
    single.molecules[0].coupling = 10.0;
    single.cavity.quality = single.cavity.omega;  // omega_c/Q = 1 cm^-1
    const auto eigs = diagonalize_all_blocks(single);
    const SectorIndexing sidx(1);
    const auto sspec = spectral_decompose(assemble_excited_generator(single));
    Pulse probe{1983.0, 200.0, Eigen::Vector3d::UnitX(), 1.0};
    const Eigen::VectorXd omega = Eigen::VectorXd::LinSpaced(1201, -14.0, -6.0);

    reports.push_back(timed_check("closed-form vs time-domain photoluminescence", 0.01, [&] {
      const auto rho0 = prepare_initial(InitialState::lower(), eigs[0], sidx);
      const auto state = evolve(rho0, {3.0}, sspec, single).front();
      const auto fast = trps(state, eigs, single, probe, probe, omega);
      const auto slow = timedomain_trps_oracle(single, InitialState::lower(), 0, 3.0, probe,
                                               probe, omega, 800.0, 0.002);
      Eigen::Index peak = 0;
      fast.values.col(0).maxCoeff(&peak);
      return std::abs(fast.values(peak, 0) - slow.values(peak, 0)) / fast.values(peak, 0);
    }));
  }

  return reports;
}

}  // namespace vibropol
