#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "vibropol/errors.hpp"
#include "vibropol/runner.hpp"
#include "vibropol/validate.hpp"
#include "vibropol/version.hpp"

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitNumericalError = 3;

int run_command(const std::string& config_path, const std::string& output_override) {
  vibropol::RunConfig config = vibropol::load_config(config_path);
  if (!output_override.empty()) config.output_directory = output_override;
  const vibropol::RunResult result = vibropol::execute_run(config, std::cerr);
  for (const auto& file : result.files) std::cout << file << "\n";
  if (config.kind == vibropol::RunKind::kValidate) {
    for (const auto& report : result.reports)
      std::printf("%s  %-55s  deviation %.3e  tolerance %.3e\n", report.pass ? "PASS" : "FAIL",
                  report.quantity.c_str(), report.deviation, report.tolerance);
    return result.validation_failed ? 1 : 0;
  }
  return 0;
}

int validate_command(const std::string& json_path) {
  const auto reports = vibropol::run_validation_suite();
  bool failed = false;
  for (const auto& report : reports) {
    failed = failed || !report.pass;
    std::printf("%s  %-55s  deviation %.3e  tolerance %.3e  (%.2fs)\n",
                report.pass ? "PASS" : "FAIL", report.quantity.c_str(), report.deviation,
                report.tolerance, report.runtime_s);
  }
  if (!json_path.empty()) {
    std::ofstream stream(json_path);
    if (!stream) {
      std::cerr << "cannot open " << json_path << "\n";
      return kExitConfigError;
    }
    stream << vibropol::report_json(reports).dump(2) << "\n";
  }
  return failed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lindblad dynamics and heterodyne spectra of cavity-coupled molecular "
               "vibrations under two-state solvent disorder"};
  app.set_version_flag("--version", vibropol::kVersion);
  app.require_subcommand(1);

  std::string config_path, output_override, json_path;
  CLI::App* run = app.add_subcommand("run", "Execute a configuration file");
  run->add_option("config", config_path, "JSON run configuration")->required();
  run->add_option("--output", output_override, "Override the output directory");

  CLI::App* validate = app.add_subcommand("validate", "Run the self-check suite");
  validate->add_option("--json", json_path, "Write the machine-readable report here");

  try {
    app.parse(argc, argv);
    if (run->parsed()) return run_command(config_path, output_override);
    return validate_command(json_path);
  } catch (const CLI::ParseError& error) {
    return app.exit(error);
  } catch (const vibropol::ConfigError& error) {
    std::cerr << error.what() << "\n";
    return kExitConfigError;
  } catch (const vibropol::NumericalError& error) {
    std::cerr << "numerical abort: " << error.what() << "\n";
    return kExitNumericalError;
  } catch (const std::length_error& error) {
    std::cerr << error.what() << "\n";
    return kExitConfigError;
  } catch (const std::invalid_argument& error) {
    std::cerr << error.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 1;
  }
}
