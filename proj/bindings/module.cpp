#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "vibropol/config.hpp"
#include "vibropol/errors.hpp"
#include "vibropol/oracle.hpp"
#include "vibropol/runner.hpp"
#include "vibropol/units.hpp"
#include "vibropol/validate.hpp"
#include "vibropol/version.hpp"

namespace py = pybind11;
using namespace vibropol;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Lindblad dynamics and heterodyne spectra of cavity-coupled molecular "
            "vibrations under two-state solvent disorder";
  m.attr("__version__") = kVersion;
  m.attr("RAD_PER_PS_PER_WAVENUMBER") = kRadPerPsPerWavenumber;

  py::register_exception<ConfigError>(m, "ConfigError");
  py::register_exception<NumericalError>(m, "NumericalError");

  py::class_<Molecule>(m, "Molecule")
      .def(py::init<>())
      .def_readwrite("omega", &Molecule::omega)
      .def_readwrite("disorder_shift", &Molecule::disorder_shift)
      .def_readwrite("anharmonicity", &Molecule::anharmonicity)
      .def_readwrite("coupling", &Molecule::coupling)
      .def_readwrite("dipole", &Molecule::dipole)
      .def_readwrite("position", &Molecule::position)
      .def_readwrite("length", &Molecule::length)
      .def_readwrite("solvent_gap", &Molecule::solvent_gap)
      .def_readwrite("solvent_rate", &Molecule::solvent_rate);

  py::class_<Cavity>(m, "Cavity")
      .def(py::init<>())
      .def(py::init<double, double>(), py::arg("omega"), py::arg("quality"))
      .def_readwrite("omega", &Cavity::omega)
      .def_readwrite("quality", &Cavity::quality);

  py::class_<SystemParams>(m, "SystemParams")
      .def(py::init<>())
      .def_readwrite("molecules", &SystemParams::molecules)
      .def_readwrite("cavity", &SystemParams::cavity)
      .def_readwrite("temperature", &SystemParams::temperature)
      .def_property_readonly("size", &SystemParams::size)
      .def("mean_occupation", &SystemParams::mean_occupation, py::arg("molecule"))
      .def("cavity_rate", &SystemParams::cavity_rate)
      .def("validate", &SystemParams::validate);

  m.def("reference_system", &reference_system, py::arg("n_molecules") = 3);
  m.def("bose_occupation", &bose_occupation, py::arg("gap"), py::arg("temperature"));
  m.def("thermal_energy", &thermal_energy, py::arg("temperature"));

  py::class_<SolventConfig>(m, "SolventConfig")
      .def(py::init<std::uint32_t, int>(), py::arg("index"), py::arg("n_molecules"))
      .def_readonly("index", &SolventConfig::index)
      .def_readonly("n_molecules", &SolventConfig::n_molecules)
      .def("bit", &SolventConfig::bit)
      .def("bits", &SolventConfig::bits)
      .def_static("from_bits", &SolventConfig::from_bits);
  m.def("enumerate_configs", &enumerate_configs, py::arg("n_molecules"));

  py::enum_<StateLabel>(m, "StateLabel")
      .value("LOWER", StateLabel::kLower)
      .value("UPPER", StateLabel::kUpper)
      .value("DARK", StateLabel::kDark);

  py::class_<BlockEigensystem>(m, "BlockEigensystem")
      .def_readonly("config", &BlockEigensystem::config)
      .def_readonly("omega", &BlockEigensystem::omega)
      .def_readonly("vectors", &BlockEigensystem::vectors)
      .def_readonly("dipoles", &BlockEigensystem::dipoles)
      .def_readonly("labels", &BlockEigensystem::labels)
      .def("lower", &BlockEigensystem::lower)
      .def("upper", &BlockEigensystem::upper)
      .def("dark", &BlockEigensystem::dark);

  m.def("build_block_hamiltonian", &build_block_hamiltonian, py::arg("params"), py::arg("config"));
  m.def("diagonalize_block", &diagonalize_block, py::arg("hamiltonian"), py::arg("params"),
        py::arg("config"));
  m.def("transition_dipoles", &transition_dipoles, py::arg("vectors"), py::arg("dipoles"));
  m.def("diagonalize_all_blocks", &diagonalize_all_blocks, py::arg("params"));

  py::class_<SectorIndexing>(m, "SectorIndexing")
      .def(py::init<int>(), py::arg("n_molecules"))
      .def_readonly("n_molecules", &SectorIndexing::n_molecules)
      .def_readonly("n_sites", &SectorIndexing::n_sites)
      .def_readonly("n_configs", &SectorIndexing::n_configs)
      .def("excited_dim", &SectorIndexing::excited_dim)
      .def("ground_dim", &SectorIndexing::ground_dim)
      .def("excited", &SectorIndexing::excited, py::arg("m"), py::arg("n"), py::arg("config"))
      .def("photon", &SectorIndexing::photon);

  py::class_<ExcitedGenerator>(m, "ExcitedGenerator")
      .def_readonly("idx", &ExcitedGenerator::idx)
      .def_property_readonly(
          "matrix", [](const ExcitedGenerator& g) { return Eigen::MatrixXcd(g.matrix); });
  py::class_<GroundGenerator>(m, "GroundGenerator")
      .def_readonly("idx", &GroundGenerator::idx)
      .def_property_readonly("matrix",
                             [](const GroundGenerator& g) { return Eigen::MatrixXd(g.matrix); })
      .def_property_readonly("feed",
                             [](const GroundGenerator& g) { return Eigen::MatrixXd(g.feed); });
  py::class_<LiouvillianSpectrum>(m, "LiouvillianSpectrum")
      .def_readonly("idx", &LiouvillianSpectrum::idx)
      .def_readonly("eigenvalues", &LiouvillianSpectrum::eigenvalues)
      .def_readonly("modes", &LiouvillianSpectrum::modes)
      .def_readonly("modes_inverse", &LiouvillianSpectrum::modes_inverse)
      .def_readonly("condition", &LiouvillianSpectrum::condition)
      .def_readonly("ill_conditioned", &LiouvillianSpectrum::ill_conditioned);

  m.def("assemble_excited_generator", &assemble_excited_generator, py::arg("params"));
  m.def("assemble_ground_generator", &assemble_ground_generator, py::arg("params"));
  m.def("spectral_decompose", &spectral_decompose, py::arg("generator"));
  m.def("propagate_excited", &propagate_excited, py::arg("spectrum"), py::arg("rho0"),
        py::arg("t"));
  m.def("solvent_gg", &solvent_gg, py::arg("params"), py::arg("molecule"), py::arg("t"));
  m.def("esd_green", &esd_green, py::arg("spectrum"), py::arg("params"), py::arg("initial"),
        py::arg("t2"));

  py::class_<DensityState>(m, "DensityState")
      .def(py::init<>())
      .def_readwrite("excited", &DensityState::excited)
      .def_readwrite("ground", &DensityState::ground)
      .def_readwrite("time", &DensityState::time)
      .def_static("zero", &DensityState::zero);

  m.def("total_trace", &total_trace);
  m.def("hermiticity_defect", &hermiticity_defect);
  m.def("min_population", &min_population);

  py::class_<InitialState>(m, "InitialState")
      .def_static("lower", &InitialState::lower)
      .def_static("upper", &InitialState::upper)
      .def_static("dark", &InitialState::dark, py::arg("k"))
      .def_static("dark_uniform", &InitialState::dark_uniform)
      .def_static("site", &InitialState::site, py::arg("i"))
      .def_static("ground", &InitialState::ground);

  m.def("prepare_initial", &prepare_initial, py::arg("selector"), py::arg("eig"), py::arg("idx"));
  m.def("evolve", &evolve, py::arg("state"), py::arg("times"), py::arg("spectrum"),
        py::arg("params"));
  m.def("site_populations", &site_populations, py::arg("state"), py::arg("idx"));
  m.def("intermolecule_coherence", &intermolecule_coherence, py::arg("state"), py::arg("idx"),
        py::arg("i"), py::arg("j"));

  py::class_<PolaritonPopulations>(m, "PolaritonPopulations")
      .def_readonly("lower", &PolaritonPopulations::lower)
      .def_readonly("upper", &PolaritonPopulations::upper)
      .def_readonly("dark", &PolaritonPopulations::dark)
      .def_readonly("per_config", &PolaritonPopulations::per_config);
  m.def("polariton_populations", &polariton_populations, py::arg("state"),
        py::arg("eigensystems"));

  py::class_<SpatialGrid>(m, "SpatialGrid")
      .def_readonly("x", &SpatialGrid::x)
      .def_readonly("density", &SpatialGrid::density)
      .def_readonly("overlapping_sites", &SpatialGrid::overlapping_sites);
  m.def("spatial_density", &spatial_density, py::arg("state"), py::arg("idx"), py::arg("params"),
        py::arg("x"));
  m.def("spatial_coherence", &spatial_coherence, py::arg("state"), py::arg("idx"),
        py::arg("params"), py::arg("x"));
  m.def("thermal_config_weights", &thermal_config_weights, py::arg("params"));

  py::class_<Pulse>(m, "Pulse")
      .def(py::init<>())
      .def(py::init([](double center, double sigma, Eigen::Vector3d polarization,
                       double amplitude) {
             return Pulse{center, sigma, polarization.normalized(), amplitude};
           }),
           py::arg("center"), py::arg("sigma"),
           py::arg("polarization") = Eigen::Vector3d(1.0, 0.0, 0.0), py::arg("amplitude") = 1.0)
      .def_readwrite("center", &Pulse::center)
      .def_readwrite("sigma", &Pulse::sigma)
      .def_readwrite("polarization", &Pulse::polarization)
      .def_readwrite("amplitude", &Pulse::amplitude);

  m.def("gaussian_envelope", &gaussian_envelope, py::arg("omega"), py::arg("pulse"),
        py::arg("cavity_omega"));
  m.def("eigenstate_linewidths", &eigenstate_linewidths, py::arg("params"), py::arg("eig"),
        py::arg("include_cavity") = true);

  py::class_<SpectrumGrid>(m, "SpectrumGrid")
      .def_readonly("axes", &SpectrumGrid::axes)
      .def_readonly("values", &SpectrumGrid::values)
      .def_readonly("components", &SpectrumGrid::components);

  py::class_<TrpsOptions>(m, "TrpsOptions")
      .def(py::init<>())
      .def_readwrite("include_leakage_term", &TrpsOptions::include_leakage_term)
      .def_readwrite("cavity_linewidth", &TrpsOptions::cavity_linewidth);

  m.def("trps", &trps, py::arg("state"), py::arg("eigensystems"), py::arg("params"),
        py::arg("probe"), py::arg("local_oscillator"), py::arg("omega"),
        py::arg("options") = TrpsOptions{});

  py::enum_<InitialWeights>(m, "InitialWeights")
      .value("PURE_GROUND", InitialWeights::kPureGround)
      .value("THERMAL", InitialWeights::kThermal);

  py::class_<TwodirOptions>(m, "TwodirOptions")
      .def(py::init<>())
      .def_readwrite("subtract_gsb", &TwodirOptions::subtract_gsb)
      .def_readwrite("cavity_linewidth", &TwodirOptions::cavity_linewidth)
      .def_readwrite("components", &TwodirOptions::components);

  py::class_<TwodirPulses>(m, "TwodirPulses")
      .def(py::init<>())
      .def(py::init([](const Pulse& k1, const Pulse& k2, const Pulse& k3, const Pulse& lo) {
             return TwodirPulses{k1, k2, k3, lo};
           }),
           py::arg("k1"), py::arg("k2"), py::arg("k3"), py::arg("local_oscillator"))
      .def_readwrite("k1", &TwodirPulses::k1)
      .def_readwrite("k2", &TwodirPulses::k2)
      .def_readwrite("k3", &TwodirPulses::k3)
      .def_readwrite("local_oscillator", &TwodirPulses::local_oscillator);

  m.def("twodir", &twodir, py::arg("params"), py::arg("spectrum"), py::arg("eigensystems"),
        py::arg("pulses"), py::arg("t2"), py::arg("omega1"), py::arg("omega3"),
        py::arg("initial"), py::arg("options") = TwodirOptions{});

  py::class_<LargeBlockSpec>(m, "LargeBlockSpec")
      .def(py::init([](int count, double collective_coupling, int detuned_count, double detuning) {
             return LargeBlockSpec{count, collective_coupling, detuned_count, detuning};
           }),
           py::arg("count"), py::arg("collective_coupling"), py::arg("detuned_count"),
           py::arg("detuning"))
      .def_readwrite("count", &LargeBlockSpec::count)
      .def_readwrite("collective_coupling", &LargeBlockSpec::collective_coupling)
      .def_readwrite("detuned_count", &LargeBlockSpec::detuned_count)
      .def_readwrite("detuning", &LargeBlockSpec::detuning);

  py::class_<StickSpectrum>(m, "StickSpectrum")
      .def_readonly("omega", &StickSpectrum::omega)
      .def_readonly("strength", &StickSpectrum::strength);

  m.def("dipole_distribution", &dipole_distribution, py::arg("spec"), py::arg("reference"));
  m.def("broaden_sticks", &broaden_sticks, py::arg("sticks"), py::arg("omega"), py::arg("width"));

  py::class_<OracleReport>(m, "OracleReport")
      .def_readonly("quantity", &OracleReport::quantity)
      .def_readonly("deviation", &OracleReport::deviation)
      .def_readonly("tolerance", &OracleReport::tolerance)
      .def_readonly("pass_", &OracleReport::pass)
      .def_readonly("runtime_s", &OracleReport::runtime_s)
      .def("__repr__", [](const OracleReport& r) {
        return "<OracleReport " + r.quantity + (r.pass ? " PASS" : " FAIL") + ">";
      });

  m.def("rk4_propagate", &rk4_propagate, py::arg("params"), py::arg("rho0"), py::arg("dt"),
        py::arg("times"));
  m.def(
      "compare_propagators",
      [](const SystemParams& params, const DensityState& rho0, const std::vector<double>& times,
         double tolerance) { return compare_propagators(params, rho0, times, tolerance); },
      py::arg("params"), py::arg("rho0"), py::arg("times"), py::arg("tolerance") = 1e-6);
  m.def("timedomain_trps_oracle", &timedomain_trps_oracle, py::arg("params"), py::arg("initial"),
        py::arg("config_index"), py::arg("tau_probe"), py::arg("probe"),
        py::arg("local_oscillator"), py::arg("omega"), py::arg("t_max") = 400.0,
        py::arg("dt") = 0.002);

  m.def("run_validation_suite", &run_validation_suite);
  m.def(
      "run_config_file",
      [](const std::string& path, const std::string& output_override) {
        RunConfig config = load_config(path);
        if (!output_override.empty()) config.output_directory = output_override;
        std::ostringstream diagnostics;
        const RunResult result = execute_run(config, diagnostics);
        return py::make_tuple(result.files, diagnostics.str(), !result.validation_failed);
      },
      py::arg("path"), py::arg("output_override") = std::string(),
      "Execute a JSON run configuration; returns (files, diagnostics, ok)");
}
