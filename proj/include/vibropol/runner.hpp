#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "vibropol/config.hpp"
#include "vibropol/oracle.hpp"

namespace vibropol {

struct RunResult {
  std::vector<std::string> files;
  std::vector<OracleReport> reports;  // validate runs only
  bool validation_failed = false;
};

/// Executes a parsed configuration: computes the selected pipeline, writes
/// CSV data files plus a JSON sidecar with the resolved parameters, and
/// surfaces numerical warnings on `diagnostics`.
RunResult execute_run(const RunConfig& config, std::ostream& diagnostics);

/// Serializes validation reports to a machine-readable JSON document.
nlohmann::ordered_json report_json(const std::vector<OracleReport>& reports);

}  // namespace vibropol
