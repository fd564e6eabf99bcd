#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vibropol/dynamics.hpp"
#include "vibropol/signals.hpp"

namespace vibropol {

enum class RunKind { kDynamics, kTrps, kTwodir, kDipoles, kValidate };
enum class AxisConvention { kRotating, kAbsolute };

struct GridSpec {
  double start = 0.0;
  double stop = 0.0;
  int count = 0;
  Eigen::VectorXd linspace() const;
};

struct InitialSpec {
  InitialState state;
  std::uint32_t config = 0;
};

struct SpatialSpec {
  std::vector<double> times;  // ps
  int points = 401;
  double padding = 0.25;  // nm beyond the outermost molecules
};

struct DynamicsRun {
  InitialSpec initial;
  GridSpec times;  // ps
  std::optional<SpatialSpec> spatial;
};

struct TrpsRun {
  InitialSpec initial;
  std::vector<double> delays;  // ps
  Pulse probe, local_oscillator;
  GridSpec omega;  // cm^-1, rotating frame
  bool include_leakage_term = true;
  AxisConvention axis = AxisConvention::kRotating;
};

struct TwodirRun {
  InitialWeights initial = InitialWeights::kPureGround;
  std::vector<double> t2_delays;  // ps
  TwodirPulses pulses;
  GridSpec omega1, omega3;  // cm^-1, rotating frame
  bool subtract_gsb = false;
  bool components = false;
  AxisConvention axis = AxisConvention::kRotating;
};

struct BroadeningSpec {
  double width = 0.0;  // Lorentzian half width, cm^-1
  GridSpec omega;
};

struct DipolesRun {
  LargeBlockSpec block;
  std::optional<BroadeningSpec> broadening;
};

struct RunConfig {
  SystemParams system;
  RunKind kind = RunKind::kValidate;
  std::string output_directory = ".";
  std::string prefix = "run";
  std::optional<DynamicsRun> dynamics;
  std::optional<TrpsRun> trps;
  std::optional<TwodirRun> twodir;
  std::optional<DipolesRun> dipoles;

  /// Fully resolved configuration document: defaults materialized, uniform
  /// molecule blocks expanded.  Re-ingesting it reproduces the run.
  nlohmann::ordered_json resolved() const;
};

/// Parses a configuration document.  A top-level "config" key (as written
/// in run sidecars) is unwrapped first.  Unknown keys are rejected;
/// dimensional fields require explicit units.  Throws ConfigError.
RunConfig parse_config(const nlohmann::json& document);

/// Loads and parses a configuration file.  Throws ConfigError with
/// line/column positions for malformed JSON.
RunConfig load_config(const std::string& path);

}  // namespace vibropol
