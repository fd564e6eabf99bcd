#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "vibropol/block.hpp"
#include "vibropol/system.hpp"

using namespace vibropol;
using namespace vibropol::testing;

TEST_CASE("config enumeration covers the binary encoding") {
  CHECK(enumerate_configs(1).size() == 2);
  const auto configs = enumerate_configs(3);
  REQUIRE(configs.size() == 8);
  for (std::uint32_t p = 0; p < 8; ++p) CHECK(configs[p].index == p);
  CHECK(SolventConfig::from_bits({1, 0, 0}).index == 1);
  CHECK(SolventConfig::from_bits({0, 0, 1}).index == 4);
  CHECK(configs[5].bits() == std::vector<int>{1, 0, 1});
  CHECK(configs[5].flipped(1) == 7);
}

TEST_CASE("config enumeration guards the 2^N blowup") {
  CHECK_THROWS_AS(enumerate_configs(21), std::length_error);
  CHECK_THROWS_AS(enumerate_configs(0), std::length_error);
  CHECK_THROWS_WITH_AS(enumerate_configs(21), doctest::Contains("2^21"), std::length_error);
}

TEST_CASE("parameter validation rejects out-of-range inputs") {
  SystemParams params = reference_system(2);
  CHECK_NOTHROW(params.validate());
  params.molecules[0].solvent_gap = 0.0;
  CHECK_THROWS_AS(params.validate(), std::invalid_argument);
  params = reference_system(2);
  params.cavity.quality = 0.0;
  CHECK_THROWS_AS(params.validate(), std::invalid_argument);
  params = reference_system(2);
  params.temperature = -1.0;
  CHECK_THROWS_AS(params.validate(), std::invalid_argument);
}

TEST_CASE("block Hamiltonian carries detunings, shifts and star coupling") {
  const SystemParams params = reference_system(3);
  const auto configs = enumerate_configs(3);

  const Eigen::MatrixXcd resonant = build_block_hamiltonian(params, configs[0]);
  for (int i = 0; i < 4; ++i) CHECK(std::abs(resonant(i, i)) == 0.0);
  for (int i = 0; i < 3; ++i) {
    CHECK(resonant(i, 3).real() == doctest::Approx(2.1));
    CHECK(resonant(3, i).real() == doctest::Approx(2.1));
  }
  CHECK(std::abs(resonant(0, 1)) == 0.0);

  // l_2 = 1 shifts the second molecule by +18.
  const Eigen::MatrixXcd shifted = build_block_hamiltonian(params, configs[2]);
  CHECK(shifted(1, 1).real() == doctest::Approx(18.0));
  CHECK(shifted(0, 0).real() == doctest::Approx(0.0));

  // The anharmonicity never enters the single-excitation block.
  SystemParams anharmonic = params;
  for (auto& m : anharmonic.molecules) m.anharmonicity = 25.0;
  CHECK((build_block_hamiltonian(anharmonic, configs[0]) - resonant).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("resonant block splits into +-g sqrt(N) polaritons") {
  const SystemParams params = closed_system(3);
  const auto configs = enumerate_configs(3);
  const auto eig =
      diagonalize_block(build_block_hamiltonian(params, configs[0]), params, configs[0]);

  const double split = 2.1 * std::sqrt(3.0);
  CHECK(eig.omega(0) == doctest::Approx(-split).epsilon(1e-12));
  CHECK(eig.omega(3) == doctest::Approx(split).epsilon(1e-12));
  CHECK(std::abs(eig.omega(1)) < 1e-10);
  CHECK(std::abs(eig.omega(2)) < 1e-10);

  CHECK(eig.lower() == 0);
  CHECK(eig.upper() == 3);
  CHECK(eig.dark() == std::vector<int>{1, 2});
  CHECK(std::norm(eig.vectors(3, eig.lower())) == doctest::Approx(0.5));
  CHECK(std::norm(eig.vectors(3, eig.upper())) == doctest::Approx(0.5));
}

TEST_CASE("a detuned molecule produces a photon-poor state near its shift") {
  const SystemParams params = reference_system(3);
  const auto configs = enumerate_configs(3);
  const auto eig =
      diagonalize_block(build_block_hamiltonian(params, configs[2]), params, configs[2]);

  // Independent route: the arrow-matrix secular equation.
  const double expected = secular_root({0.0, 18.0, 0.0}, 2.1, 18.001, 19.0);
  int k = 0;
  eig.omega.maxCoeff(&k);
  CHECK(std::abs(eig.omega(k) - 18.0) < 0.5);
  CHECK(eig.omega(k) == doctest::Approx(expected).epsilon(1e-9));
  CHECK(std::norm(eig.vectors(3, k)) < 0.05);
  CHECK(eig.labels[k] == StateLabel::kDark);
}

TEST_CASE("decoupled limit reduces to the site basis") {
  SystemParams params = reference_system(2);
  for (auto& m : params.molecules) m.coupling = 0.0;
  const auto configs = enumerate_configs(2);
  const auto eig =
      diagonalize_block(build_block_hamiltonian(params, configs[0]), params, configs[0]);
  CHECK((eig.vectors - Eigen::MatrixXcd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("diagonalize_block rejects non-Hermitian input") {
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(3, 3);
  h(0, 1) = 1.0;
  const SystemParams params = reference_system(2);
  CHECK_THROWS_AS(diagonalize_block(h, params, enumerate_configs(2)[0]), std::invalid_argument);
}

TEST_CASE("transition dipoles: bright combination carries N mu^2 / 2 per branch") {
  const SystemParams params = closed_system(3);
  const auto configs = enumerate_configs(3);
  const auto eig =
      diagonalize_block(build_block_hamiltonian(params, configs[0]), params, configs[0]);

  const double mu2 = 0.122 * 0.122;
  CHECK(eig.dipoles.col(eig.lower()).squaredNorm() == doctest::Approx(3.0 * mu2 / 2.0));
  CHECK(eig.dipoles.col(eig.upper()).squaredNorm() == doctest::Approx(3.0 * mu2 / 2.0));
  for (int k : eig.dark()) CHECK(eig.dipoles.col(k).squaredNorm() < 1e-20);

  // Total stays below the molecular sum, with the photon row excluded.
  double total = 0.0;
  for (int k = 0; k < 4; ++k) total += eig.dipoles.col(k).squaredNorm();
  CHECK(total == doctest::Approx(3.0 * mu2));
}

TEST_CASE("transition dipoles edge cases") {
  SystemParams params = closed_system(1);
  const auto configs = enumerate_configs(1);
  auto eig = diagonalize_block(build_block_hamiltonian(params, configs[0]), params, configs[0]);
  const double mu2 = 0.122 * 0.122;
  CHECK(eig.dipoles.col(eig.lower()).squaredNorm() +
            eig.dipoles.col(eig.upper()).squaredNorm() ==
        doctest::Approx(mu2));

  for (auto& m : params.molecules) m.dipole.setZero();
  eig = diagonalize_block(build_block_hamiltonian(params, configs[0]), params, configs[0]);
  CHECK(eig.dipoles.cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(transition_dipoles(Eigen::MatrixXcd::Identity(3, 3),
                                     {Eigen::Vector3d::UnitX()}),
                  std::invalid_argument);
}

TEST_CASE("unitarity and spectral reconstruction hold on every block") {
  const SystemParams params = reference_system(3);
  for (const auto& eig : diagonalize_all_blocks(params)) {
    const Eigen::MatrixXcd h = build_block_hamiltonian(params, eig.config);
    CHECK((eig.vectors.adjoint() * eig.vectors - Eigen::MatrixXcd::Identity(4, 4))
              .cwiseAbs()
              .maxCoeff() < 1e-12);
    CHECK((eig.vectors * eig.omega.asDiagonal() * eig.vectors.adjoint() - h)
              .cwiseAbs()
              .maxCoeff() < 1e-10);
    int lowers = 0, uppers = 0;
    for (auto label : eig.labels) {
      lowers += label == StateLabel::kLower;
      uppers += label == StateLabel::kUpper;
    }
    CHECK(lowers == 1);
    CHECK(uppers == 1);
  }
}

TEST_CASE("diagonalization is deterministic bit for bit") {
  const SystemParams params = reference_system(3);
  const auto configs = enumerate_configs(3);
  for (const auto& config : configs) {
    const auto h = build_block_hamiltonian(params, config);
    const auto a = diagonalize_block(h, params, config);
    const auto b = diagonalize_block(h, params, config);
    CHECK(a.omega == b.omega);
    CHECK(a.vectors == b.vectors);
    CHECK(a.dipoles == b.dipoles);
    CHECK(a.labels == b.labels);
  }
}
