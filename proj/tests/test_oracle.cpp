#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "vibropol/oracle.hpp"
#include "vibropol/units.hpp"

using namespace vibropol;
using namespace vibropol::testing;

TEST_CASE("closed two-level system Rabi-oscillates with period pi/(g conv)") {
  const SystemParams params = closed_system(1);  // g = 2.1, no damping
  const SectorIndexing idx(1);
  const auto eigensystems = diagonalize_all_blocks(params);
  const auto rho0 = prepare_initial(InitialState::site(0), eigensystems[0], idx);

  const double period = M_PI / (2.1 * kRadPerPsPerWavenumber);
  const auto trajectory =
      rk4_propagate(params, rho0, 0.002, {0.25 * period, 0.5 * period, period});
  CHECK(site_populations(trajectory[0], idx)(0) == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(site_populations(trajectory[1], idx)(0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-8));
  CHECK(site_populations(trajectory[2], idx)(0) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("RK4 conserves trace over 200 ps") {
  const SystemParams params = reference_system(1);
  const SectorIndexing idx(1);
  const auto eigensystems = diagonalize_all_blocks(params);
  const auto rho0 = prepare_initial(InitialState::lower(), eigensystems[0], idx);
  const auto trajectory = rk4_propagate(params, rho0, 0.001, {200.0});
  CHECK(std::abs(total_trace(trajectory[0], idx) - 1.0) < 1e-9);
}

TEST_CASE("RK4 converges at fourth order") {
  const SystemParams params = reference_system(1);
  const SectorIndexing idx(1);
  const auto rho0 = random_state(idx, 11);
  const Rk4Propagator oracle(params);

  const auto reference = oracle.trajectory(rho0, 0.00035, {5.0}).front();
  const auto coarse = oracle.trajectory(rho0, 0.0028, {5.0}).front();
  const auto fine = oracle.trajectory(rho0, 0.0014, {5.0}).front();
  const double error_coarse = (coarse.excited - reference.excited).cwiseAbs().maxCoeff();
  const double error_fine = (fine.excited - reference.excited).cwiseAbs().maxCoeff();
  CHECK(error_coarse / error_fine > 8.0);
  CHECK(error_coarse / error_fine < 32.0);
}

TEST_CASE("step-size guard refuses with a suggestion") {
  const SystemParams params = reference_system(2);
  const Rk4Propagator oracle(params);
  const SectorIndexing idx(2);
  const auto rho0 = random_state(idx, 3);
  CHECK(oracle.max_step() > 0.0);
  CHECK_THROWS_WITH_AS(oracle.trajectory(rho0, 10.0 * oracle.max_step(), {1.0}),
                       doctest::Contains("use dt <="), std::invalid_argument);
  CHECK_THROWS_AS(rk4_propagate(reference_system(5), random_state(SectorIndexing(5), 1), 1e-3,
                                {1.0}),
                  std::length_error);
}

TEST_CASE("spectral and RK4 propagation agree in the closed limit") {
  const SystemParams params = closed_system(2);
  const SectorIndexing idx(2);
  const auto rho0 = random_state(idx, 23);
  const auto report = compare_propagators(params, rho0, {0.0, 1.0, 5.0, 20.0}, 1e-6);
  CHECK(report.pass);
  CHECK(report.deviation < 1e-8);
}

TEST_CASE("spectral and RK4 propagation agree at reference parameters") {
  const SystemParams params = reference_system(2);
  const SectorIndexing idx(2);
  const auto rho0 = random_state(idx, 29);
  const auto report = compare_propagators(params, rho0, {1.0, 10.0, 100.0}, 1e-6);
  CHECK(report.pass);
}

TEST_CASE("a corrupted spectrum is flagged as a failure") {
  const SystemParams params = reference_system(1);
  const SectorIndexing idx(1);
  const auto rho0 = random_state(idx, 31);
  auto spectrum = spectral_decompose(assemble_excited_generator(params));
  spectrum.modes_inverse(0, 0) += 0.05;
  const auto report = compare_propagators(params, rho0, {1.0, 10.0}, 1e-6, &spectrum);
  CHECK_FALSE(report.pass);
}

TEST_CASE("time-domain oracle reproduces closed-form peaks and widths") {
  SystemParams params = reference_system(1);
  params.molecules[0].solvent_rate = 0.0;
  params.molecules[0].coupling = 10.0;
  params.cavity.quality = params.cavity.omega;  // omega_c/Q = 1 cm^-1
  const SectorIndexing idx(1);
  const auto eigensystems = diagonalize_all_blocks(params);
  const auto spectrum = spectral_decompose(assemble_excited_generator(params));
  const Pulse probe{1983.0, 200.0, Eigen::Vector3d::UnitX(), 1.0};
  const Eigen::VectorXd omega = Eigen::VectorXd::LinSpaced(1201, -14.0, -6.0);

  const auto rho0 = prepare_initial(InitialState::lower(), eigensystems[0], idx);
  const auto state = evolve(rho0, {2.0}, spectrum, params).front();
  const auto fast = trps(state, eigensystems, params, probe, probe, omega);
  const auto slow = timedomain_trps_oracle(params, InitialState::lower(), 0, 2.0, probe, probe,
                                           omega, 700.0, 0.002);

  // peak height must agree to 1%; off-peak the closed form neglects the
  // small non-diagonal part of the cavity damping
  Eigen::Index imax = 0;
  fast.values.col(0).maxCoeff(&imax);
  CHECK(std::abs(fast.values(imax, 0) - slow.values(imax, 0)) / fast.values(imax, 0) < 0.01);

  auto fwhm = [&](const Eigen::MatrixXd& values) {
    Eigen::Index imax = 0;
    values.col(0).maxCoeff(&imax);
    const double half = values(imax, 0) / 2.0;
    Eigen::Index lo = imax, hi = imax;
    while (lo > 0 && values(lo, 0) > half) --lo;
    while (hi + 1 < values.rows() && values(hi, 0) > half) ++hi;
    return omega(hi) - omega(lo);
  };
  CHECK(std::abs(fwhm(fast.values) - fwhm(slow.values)) / fwhm(fast.values) < 0.05);
  // closed-form width: 2 gamma with gamma = (omega_c/2Q) |C_photon|^2 = 0.25
  CHECK(fwhm(fast.values) == doctest::Approx(0.5).epsilon(0.06));

  CHECK_THROWS_AS(timedomain_trps_oracle(reference_system(2), InitialState::lower(), 0, 1.0,
                                         probe, probe, omega),
                  std::invalid_argument);
  CHECK_THROWS_AS(timedomain_trps_oracle(reference_system(1), InitialState::lower(), 0, 1.0,
                                         probe, probe, omega),
                  std::invalid_argument);
}
