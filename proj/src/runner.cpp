#include "vibropol/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <ostream>
#include <thread>

#include "vibropol/errors.hpp"
#include "vibropol/units.hpp"
#include "vibropol/validate.hpp"
#include "vibropol/version.hpp"

namespace vibropol {

namespace {

std::string format_number(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

std::string format_tag(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%g", value);
  return buffer;
}

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& columns)
      : stream_(path) {
    if (!stream_) throw ConfigError("cannot open output file: " + path.string());
    for (std::size_t k = 0; k < columns.size(); ++k)
      stream_ << (k ? "," : "") << columns[k];
    stream_ << "\n";
  }

  void row(const std::vector<double>& values) {
    for (std::size_t k = 0; k < values.size(); ++k)
      stream_ << (k ? "," : "") << format_number(values[k]);
    stream_ << "\n";
  }

 private:
  std::ofstream stream_;
};

int worker_count(std::size_t jobs) {
  unsigned threads = std::thread::hardware_concurrency();
  if (const char* env = std::getenv("VIBROPOL_THREADS")) {
    const long parsed = std::strtol(env, nullptr, 10);
    if (parsed >= 1) threads = static_cast<unsigned>(parsed);
  }
  if (threads < 1) threads = 1;
  return static_cast<int>(std::min<std::size_t>(threads, jobs));
}

/// Runs one job per item with a bounded worker pool; jobs are independent
/// and write independent files, so results do not depend on the pool size.
template <typename Job>
void fan_out(std::size_t jobs, Job&& job) {
  const int workers = worker_count(jobs);
  if (workers <= 1) {
    for (std::size_t k = 0; k < jobs; ++k) job(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::future<void>> futures;
  futures.reserve(workers);
  for (int w = 0; w < workers; ++w)
    futures.push_back(std::async(std::launch::async, [&] {
      for (std::size_t k = next.fetch_add(1); k < jobs; k = next.fetch_add(1)) job(k);
    }));
  for (auto& f : futures) f.get();
}

struct SidecarData {
  nlohmann::ordered_json derived;
};

void run_dynamics(const RunConfig& config, RunResult& result, std::ostream& diagnostics,
                  SidecarData& sidecar) {
  const DynamicsRun& run = *config.dynamics;
  const SystemParams& params = config.system;
  const SectorIndexing idx(params.size());
  const auto eigensystems = diagonalize_all_blocks(params);
  const auto spectrum = spectral_decompose(assemble_excited_generator(params));
  if (spectrum.ill_conditioned)
    diagnostics << "warning: Liouvillian eigenvector condition " << spectrum.condition
                << " exceeds 1e8; prefer the RK4 oracle integrator\n";
  sidecar.derived["liouvillian_condition"] = spectrum.condition;

  const auto rho0 = prepare_initial(run.initial.state, eigensystems[run.initial.config], idx);
  const Eigen::VectorXd times = run.times.linspace();
  const auto trajectory =
      evolve(rho0, std::vector<double>(times.begin(), times.end()), spectrum, params);

  const int n = params.size();
  std::vector<std::string> columns{"t_ps"};
  for (int i = 1; i <= n; ++i) columns.push_back("pop_" + std::to_string(i));
  columns.push_back("pop_photon");
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j)
      columns.push_back("coh_" + std::to_string(i) + std::to_string(j));
  columns.insert(columns.end(), {"LP", "UP", "dark", "ground"});

  const std::filesystem::path file =
      std::filesystem::path(config.output_directory) / (config.prefix + "_trajectory.csv");
  CsvWriter csv(file, columns);
  for (const auto& state : trajectory) {
    std::vector<double> row{state.time};
    const Eigen::VectorXd populations = site_populations(state, idx);
    for (int i = 0; i <= n; ++i) row.push_back(populations(i));
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) row.push_back(intermolecule_coherence(state, idx, i, j));
    const auto polaritons = polariton_populations(state, eigensystems);
    row.push_back(polaritons.lower);
    row.push_back(polaritons.upper);
    row.push_back(polaritons.dark);
    row.push_back(state.ground.sum());
    csv.row(row);
  }
  result.files.push_back(file.string());

  if (run.spatial) {
    double lo = params.molecules.front().position, hi = lo;
    for (const auto& m : params.molecules) {
      lo = std::min(lo, m.position - run.spatial->padding);
      hi = std::max(hi, m.position + run.spatial->padding);
    }
    const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(run.spatial->points, lo, hi);
    const auto snapshots = evolve(rho0, run.spatial->times, spectrum, params);
    const std::filesystem::path sfile =
        std::filesystem::path(config.output_directory) / (config.prefix + "_spatial.csv");
    CsvWriter scsv(sfile, {"t_ps", "x_nm", "density"});
    bool warned = false;
    for (const auto& state : snapshots) {
      const SpatialGrid grid = spatial_density(state, idx, params, x);
      if (grid.overlapping_sites && !warned) {
        diagnostics << "warning: molecules closer than 0.01 nm; site densities overlap\n";
        warned = true;
      }
      for (Eigen::Index k = 0; k < x.size(); ++k)
        scsv.row({state.time, grid.x(k), grid.density(k)});
    }
    result.files.push_back(sfile.string());
  }
}

void run_trps(const RunConfig& config, RunResult& result, std::ostream& diagnostics,
              SidecarData& sidecar) {
  const TrpsRun& run = *config.trps;
  const SystemParams& params = config.system;
  const SectorIndexing idx(params.size());
  const auto eigensystems = diagonalize_all_blocks(params);
  const auto spectrum = spectral_decompose(assemble_excited_generator(params));
  if (spectrum.ill_conditioned)
    diagnostics << "warning: Liouvillian eigenvector condition " << spectrum.condition
                << " exceeds 1e8; prefer the RK4 oracle integrator\n";
  sidecar.derived["liouvillian_condition"] = spectrum.condition;

  const auto rho0 = prepare_initial(run.initial.state, eigensystems[run.initial.config], idx);
  const Eigen::VectorXd omega = run.omega.linspace();
  TrpsOptions options;
  options.include_leakage_term = run.include_leakage_term;

  std::vector<std::string> files(run.delays.size());
  fan_out(run.delays.size(), [&](std::size_t k) {
    const auto state = evolve(rho0, {run.delays[k]}, spectrum, params).front();
    const SpectrumGrid grid =
        trps(state, eigensystems, params, run.probe, run.local_oscillator, omega, options);
    const std::filesystem::path file =
        std::filesystem::path(config.output_directory) /
        (config.prefix + "_trps_tau" + format_tag(run.delays[k]) + "ps.csv");
    std::vector<std::string> columns{"omega_cm1"};
    if (run.axis == AxisConvention::kAbsolute) columns.push_back("omega_abs_cm1");
    columns.push_back("value");
    CsvWriter csv(file, columns);
    for (Eigen::Index a = 0; a < omega.size(); ++a) {
      std::vector<double> row{omega(a)};
      if (run.axis == AxisConvention::kAbsolute) row.push_back(omega(a) + params.cavity.omega);
      row.push_back(grid.values(a, 0));
      csv.row(row);
    }
    files[k] = file.string();
  });
  result.files.insert(result.files.end(), files.begin(), files.end());
}

void run_twodir(const RunConfig& config, RunResult& result, std::ostream& diagnostics,
                SidecarData& sidecar) {
  const TwodirRun& run = *config.twodir;
  const SystemParams& params = config.system;
  const auto eigensystems = diagonalize_all_blocks(params);
  const auto spectrum = spectral_decompose(assemble_excited_generator(params));
  if (spectrum.ill_conditioned)
    diagnostics << "warning: Liouvillian eigenvector condition " << spectrum.condition
                << " exceeds 1e8; prefer the RK4 oracle integrator\n";
  sidecar.derived["liouvillian_condition"] = spectrum.condition;

  const Eigen::VectorXd omega1 = run.omega1.linspace();
  const Eigen::VectorXd omega3 = run.omega3.linspace();
  TwodirOptions options;
  options.subtract_gsb = run.subtract_gsb;
  options.components = run.components;

  std::vector<std::string> files(run.t2_delays.size());
  fan_out(run.t2_delays.size(), [&](std::size_t k) {
    const SpectrumGrid grid = twodir(params, spectrum, eigensystems, run.pulses,
                                     run.t2_delays[k], omega1, omega3, run.initial, options);
    const std::filesystem::path file =
        std::filesystem::path(config.output_directory) /
        (config.prefix + "_2dir_t2_" + format_tag(run.t2_delays[k]) + "ps.csv");
    std::vector<std::string> columns{"omega1_cm1", "omega1_flipped_cm1", "omega3_cm1"};
    if (run.axis == AxisConvention::kAbsolute) {
      columns.push_back("omega1_flipped_abs_cm1");
      columns.push_back("omega3_abs_cm1");
    }
    columns.push_back("value");
    if (run.components)
      columns.insert(columns.end(), {"ese", "gsb", "esd"});
    CsvWriter csv(file, columns);
    for (Eigen::Index b = 0; b < omega1.size(); ++b)
      for (Eigen::Index a = 0; a < omega3.size(); ++a) {
        std::vector<double> row{omega1(b), -omega1(b), omega3(a)};
        if (run.axis == AxisConvention::kAbsolute) {
          row.push_back(-omega1(b) + params.cavity.omega);
          row.push_back(omega3(a) + params.cavity.omega);
        }
        row.push_back(grid.values(b, a));
        if (run.components) {
          row.push_back(grid.components.at("ese")(b, a));
          row.push_back(grid.components.at("gsb")(b, a));
          row.push_back(grid.components.at("esd")(b, a));
        }
        csv.row(row);
      }
    files[k] = file.string();
  });
  result.files.insert(result.files.end(), files.begin(), files.end());
}

void run_dipoles(const RunConfig& config, RunResult& result, SidecarData& sidecar) {
  const DipolesRun& run = *config.dipoles;
  const StickSpectrum sticks = dipole_distribution(run.block, config.system);
  sidecar.derived["collective_coupling_cm1"] = run.block.collective_coupling;

  const std::filesystem::path file =
      std::filesystem::path(config.output_directory) / (config.prefix + "_sticks.csv");
  CsvWriter csv(file, {"omega_cm1", "strength_D2"});
  for (Eigen::Index k = 0; k < sticks.omega.size(); ++k)
    csv.row({sticks.omega(k), sticks.strength(k)});
  result.files.push_back(file.string());

  if (run.broadening) {
    const Eigen::VectorXd omega = run.broadening->omega.linspace();
    const Eigen::VectorXd values = broaden_sticks(sticks, omega, run.broadening->width);
    const std::filesystem::path bfile =
        std::filesystem::path(config.output_directory) / (config.prefix + "_broadened.csv");
    CsvWriter bcsv(bfile, {"omega_cm1", "value"});
    for (Eigen::Index a = 0; a < omega.size(); ++a) bcsv.row({omega(a), values(a)});
    result.files.push_back(bfile.string());
  }
}

void run_validate(const RunConfig& config, RunResult& result) {
  result.reports = run_validation_suite();
  for (const auto& report : result.reports)
    if (!report.pass) result.validation_failed = true;
  const std::filesystem::path file =
      std::filesystem::path(config.output_directory) / (config.prefix + "_validate.json");
  std::ofstream stream(file);
  stream << report_json(result.reports).dump(2) << "\n";
  result.files.push_back(file.string());
}

}  // namespace

nlohmann::ordered_json report_json(const std::vector<OracleReport>& reports) {
  nlohmann::ordered_json checks = nlohmann::ordered_json::array();
  bool all_pass = true;
  for (const auto& report : reports) {
    checks.push_back({{"quantity", report.quantity},
                      {"deviation", report.deviation},
                      {"tolerance", report.tolerance},
                      {"pass", report.pass},
                      {"runtime_s", report.runtime_s}});
    all_pass = all_pass && report.pass;
  }
  return {{"version", kVersion}, {"pass", all_pass}, {"checks", checks}};
}

RunResult execute_run(const RunConfig& config, std::ostream& diagnostics) {
  const auto start = std::chrono::steady_clock::now();
  std::filesystem::create_directories(config.output_directory);

  RunResult result;
  SidecarData sidecar;
  switch (config.kind) {
    case RunKind::kDynamics: run_dynamics(config, result, diagnostics, sidecar); break;
    case RunKind::kTrps: run_trps(config, result, diagnostics, sidecar); break;
    case RunKind::kTwodir: run_twodir(config, result, diagnostics, sidecar); break;
    case RunKind::kDipoles: run_dipoles(config, result, sidecar); break;
    case RunKind::kValidate: run_validate(config, result); break;
  }

  const SystemParams& params = config.system;
  nlohmann::ordered_json derived = sidecar.derived;
  {
    nlohmann::ordered_json occupations = nlohmann::ordered_json::array();
    for (int i = 0; i < params.size(); ++i) occupations.push_back(params.mean_occupation(i));
    derived["mean_occupations"] = occupations;
    double sum = 0.0;
    for (const auto& m : params.molecules) sum += m.coupling * m.coupling;
    derived["collective_coupling_cm1"] = std::sqrt(sum);
    derived["thermal_energy_cm1"] = thermal_energy(params.temperature);
    derived["cavity_rate_cm1"] = params.cavity_rate();
    if (params.size() <= 20) {
      const SectorIndexing idx(params.size());
      derived["liouvillian_dim"] = idx.excited_dim();
    }
  }

  nlohmann::ordered_json sidecar_doc;
  sidecar_doc["config"] = config.resolved();
  sidecar_doc["derived"] = derived;
  sidecar_doc["version"] = kVersion;
  sidecar_doc["wall_time_s"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  sidecar_doc["files"] = result.files;

  const std::filesystem::path sidecar_file =
      std::filesystem::path(config.output_directory) / (config.prefix + "_run.json");
  std::ofstream stream(sidecar_file);
  if (!stream) throw ConfigError("cannot open output file: " + sidecar_file.string());
  stream << sidecar_doc.dump(2) << "\n";
  result.files.push_back(sidecar_file.string());
  return result;
}

}  // namespace vibropol
