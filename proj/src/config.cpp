#include "vibropol/config.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>

#include "vibropol/errors.hpp"

namespace vibropol {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string join_path(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ConfigError("config error at " + (path.empty() ? std::string("<root>") : path) + ": " +
                    message);
}

const json& member(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(path, "missing required key \"" + std::string(key) + "\"");
  return *it;
}

void check_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
  if (!obj.is_object()) fail(path, "expected an object");
  for (const auto& item : obj.items())
    if (!allowed.count(item.key()))
      fail(path, "unknown key \"" + item.key() + "\"");
}

double quantity(const json& value, const char* unit, const std::string& path) {
  if (!value.is_string())
    fail(path, "expected a quantity string like \"<number> " + std::string(unit) + "\"");
  const std::string text = value.get<std::string>();
  char* end = nullptr;
  const double parsed = std::strtod(text.c_str(), &end);
  if (end == text.c_str()) fail(path, "cannot parse a number from \"" + text + "\"");
  std::string suffix(end);
  const auto first = suffix.find_first_not_of(' ');
  const auto last = suffix.find_last_not_of(' ');
  suffix = (first == std::string::npos) ? "" : suffix.substr(first, last - first + 1);
  if (suffix != unit)
    fail(path, "expected unit \"" + std::string(unit) + "\" in \"" + text + "\"" +
                   (suffix.empty() ? " (units are mandatory)" : ""));
  if (!std::isfinite(parsed)) fail(path, "value must be finite");
  return parsed;
}

double number(const json& value, const std::string& path) {
  if (!value.is_number()) fail(path, "expected a number");
  return value.get<double>();
}

int integer(const json& value, const std::string& path) {
  if (!value.is_number_integer()) fail(path, "expected an integer");
  return value.get<int>();
}

bool boolean(const json& value, const std::string& path) {
  if (!value.is_boolean()) fail(path, "expected a boolean");
  return value.get<bool>();
}

std::string text(const json& value, const std::string& path) {
  if (!value.is_string()) fail(path, "expected a string");
  return value.get<std::string>();
}

std::string format_quantity(double value, const char* unit) {
  char buffer[48];
  std::snprintf(buffer, sizeof(buffer), "%.17g %s", value, unit);
  return buffer;
}

GridSpec parse_grid(const json& obj, const char* unit, const std::string& path) {
  check_keys(obj, path, {"start", "stop", "count"});
  GridSpec grid;
  grid.start = quantity(member(obj, "start", path), unit, join_path(path, "start"));
  grid.stop = quantity(member(obj, "stop", path), unit, join_path(path, "stop"));
  grid.count = integer(member(obj, "count", path), join_path(path, "count"));
  if (grid.count < 1) fail(join_path(path, "count"), "must be at least 1");
  if (grid.count > 1 && !(grid.stop > grid.start))
    fail(path, "stop must exceed start for multi-point grids");
  return grid;
}

std::vector<double> parse_delays(const json& value, const std::string& path) {
  if (!value.is_array() || value.empty()) fail(path, "expected a non-empty array of times");
  std::vector<double> delays;
  for (std::size_t i = 0; i < value.size(); ++i)
    delays.push_back(quantity(value[i], "ps", path + "[" + std::to_string(i) + "]"));
  return delays;
}

Eigen::Vector3d parse_direction(const json& value, const std::string& path) {
  if (!value.is_array() || value.size() != 3) fail(path, "expected an array of 3 numbers");
  Eigen::Vector3d direction;
  for (int k = 0; k < 3; ++k) direction(k) = number(value[k], path);
  const double norm = direction.norm();
  if (!(norm > 0.0)) fail(path, "direction must be non-zero");
  return direction / norm;
}

Eigen::Vector3d parse_dipole(const json& value, const std::string& path) {
  if (value.is_string())
    return Eigen::Vector3d{quantity(value, "D", path), 0.0, 0.0};
  if (value.is_array() && value.size() == 3) {
    Eigen::Vector3d mu;
    for (int k = 0; k < 3; ++k)
      mu(k) = quantity(value[k], "D", path + "[" + std::to_string(k) + "]");
    return mu;
  }
  fail(path, "expected \"<number> D\" or an array of 3 such components");
}

Molecule parse_molecule(const json& obj, const std::string& path, int index, int total) {
  check_keys(obj, path,
             {"omega", "disorder_shift", "anharmonicity", "coupling", "dipole", "position",
              "length", "solvent_gap", "solvent_rate", "count"});
  Molecule m;
  m.omega = quantity(member(obj, "omega", path), "cm-1", join_path(path, "omega"));
  m.disorder_shift =
      quantity(member(obj, "disorder_shift", path), "cm-1", join_path(path, "disorder_shift"));
  m.coupling = quantity(member(obj, "coupling", path), "cm-1", join_path(path, "coupling"));
  m.dipole = parse_dipole(member(obj, "dipole", path), join_path(path, "dipole"));
  m.solvent_gap =
      quantity(member(obj, "solvent_gap", path), "cm-1", join_path(path, "solvent_gap"));
  m.solvent_rate =
      quantity(member(obj, "solvent_rate", path), "cm-1", join_path(path, "solvent_rate"));
  if (obj.contains("anharmonicity"))
    m.anharmonicity = quantity(obj["anharmonicity"], "cm-1", join_path(path, "anharmonicity"));
  if (obj.contains("length"))
    m.length = quantity(obj["length"], "nm", join_path(path, "length"));
  if (obj.contains("position"))
    m.position = quantity(obj["position"], "nm", join_path(path, "position"));
  else
    m.position = (index - 0.5 * (total - 1)) * 10.0 * m.length;
  return m;
}

SystemParams parse_system(const json& obj, const std::string& path) {
  check_keys(obj, path, {"molecules", "cavity", "temperature"});
  SystemParams params;
  params.temperature =
      quantity(member(obj, "temperature", path), "K", join_path(path, "temperature"));

  const json& cavity = member(obj, "cavity", path);
  const std::string cavity_path = join_path(path, "cavity");
  check_keys(cavity, cavity_path, {"omega", "quality_factor"});
  params.cavity.omega =
      quantity(member(cavity, "omega", cavity_path), "cm-1", join_path(cavity_path, "omega"));
  params.cavity.quality =
      number(member(cavity, "quality_factor", cavity_path), join_path(cavity_path, "quality_factor"));

  const json& molecules = member(obj, "molecules", path);
  const std::string mol_path = join_path(path, "molecules");
  if (molecules.is_array()) {
    const int total = static_cast<int>(molecules.size());
    for (int i = 0; i < total; ++i) {
      const std::string item_path = mol_path + "[" + std::to_string(i) + "]";
      if (molecules[i].contains("count")) fail(item_path, "\"count\" is only valid in the uniform form");
      params.molecules.push_back(parse_molecule(molecules[i], item_path, i, total));
    }
  } else if (molecules.is_object()) {
    const int count = integer(member(molecules, "count", mol_path), join_path(mol_path, "count"));
    if (count < 1) fail(join_path(mol_path, "count"), "must be at least 1");
    if (molecules.contains("position"))
      fail(mol_path, "per-molecule positions require the array form");
    for (int i = 0; i < count; ++i)
      params.molecules.push_back(parse_molecule(molecules, mol_path, i, count));
  } else {
    fail(mol_path, "expected an object with \"count\" or an array of molecules");
  }

  try {
    params.validate();
  } catch (const std::invalid_argument& error) {
    fail(path, error.what());
  }
  return params;
}

InitialSpec parse_initial(const json& obj, const std::string& path, int n_molecules) {
  check_keys(obj, path, {"state", "index", "config"});
  InitialSpec spec;
  const std::string state = text(member(obj, "state", path), join_path(path, "state"));
  const bool has_index = obj.contains("index");
  auto required_index = [&](int low, int high) {
    if (!has_index) fail(path, "state \"" + state + "\" requires \"index\"");
    const int value = integer(obj["index"], join_path(path, "index"));
    if (value < low || value > high)
      fail(join_path(path, "index"), "must lie in [" + std::to_string(low) + ", " +
                                         std::to_string(high) + "]");
    return value;
  };
  if (state == "LP") {
    spec.state = InitialState::lower();
  } else if (state == "UP") {
    spec.state = InitialState::upper();
  } else if (state == "DARK_UNIFORM") {
    spec.state = InitialState::dark_uniform();
  } else if (state == "DARK") {
    spec.state = InitialState::dark(required_index(1, n_molecules - 1) - 1);
  } else if (state == "SITE") {
    spec.state = InitialState::site(required_index(1, n_molecules + 1) - 1);
  } else if (state == "GROUND") {
    spec.state = InitialState::ground();
  } else {
    fail(join_path(path, "state"),
         "expected one of LP, UP, DARK, DARK_UNIFORM, SITE, GROUND");
  }
  if ((state == "LP" || state == "UP" || state == "DARK_UNIFORM" || state == "GROUND") && has_index)
    fail(join_path(path, "index"), "not valid for state \"" + state + "\"");
  if (obj.contains("config")) {
    const int config = integer(obj["config"], join_path(path, "config"));
    if (config < 0 || config >= (1 << n_molecules))
      fail(join_path(path, "config"), "must lie in [0, 2^N)");
    spec.config = static_cast<std::uint32_t>(config);
  }
  return spec;
}

Pulse parse_pulse(const json& obj, const std::string& path) {
  check_keys(obj, path, {"center", "width", "amplitude", "polarization"});
  Pulse pulse;
  pulse.center = quantity(member(obj, "center", path), "cm-1", join_path(path, "center"));
  pulse.sigma = quantity(member(obj, "width", path), "cm-1", join_path(path, "width"));
  if (!(pulse.sigma > 0.0)) fail(join_path(path, "width"), "must be positive");
  if (obj.contains("amplitude"))
    pulse.amplitude = number(obj["amplitude"], join_path(path, "amplitude"));
  if (obj.contains("polarization"))
    pulse.polarization = parse_direction(obj["polarization"], join_path(path, "polarization"));
  return pulse;
}

AxisConvention parse_axis(const json& obj, const std::string& path) {
  if (!obj.contains("axis_convention")) return AxisConvention::kRotating;
  const std::string axis =
      text(obj["axis_convention"], join_path(path, "axis_convention"));
  if (axis == "rotating") return AxisConvention::kRotating;
  if (axis == "absolute") return AxisConvention::kAbsolute;
  fail(join_path(path, "axis_convention"), "expected \"rotating\" or \"absolute\"");
}

DynamicsRun parse_dynamics(const json& obj, const std::string& path, int n_molecules) {
  check_keys(obj, path, {"initial", "times", "spatial"});
  DynamicsRun run;
  run.initial = parse_initial(member(obj, "initial", path), join_path(path, "initial"), n_molecules);
  run.times = parse_grid(member(obj, "times", path), "ps", join_path(path, "times"));
  if (run.times.start < 0.0) fail(join_path(path, "times"), "times must be non-negative");
  if (obj.contains("spatial")) {
    const std::string spath = join_path(path, "spatial");
    check_keys(obj["spatial"], spath, {"times", "points", "padding"});
    SpatialSpec spatial;
    spatial.times = parse_delays(member(obj["spatial"], "times", spath), join_path(spath, "times"));
    if (obj["spatial"].contains("points"))
      spatial.points = integer(obj["spatial"]["points"], join_path(spath, "points"));
    if (spatial.points < 2) fail(join_path(spath, "points"), "must be at least 2");
    if (obj["spatial"].contains("padding"))
      spatial.padding = quantity(obj["spatial"]["padding"], "nm", join_path(spath, "padding"));
    run.spatial = spatial;
  }
  return run;
}

TrpsRun parse_trps(const json& obj, const std::string& path, int n_molecules) {
  check_keys(obj, path,
             {"initial", "probe_delays", "probe", "local_oscillator", "omega",
              "include_leakage_term", "axis_convention"});
  TrpsRun run;
  run.initial = parse_initial(member(obj, "initial", path), join_path(path, "initial"), n_molecules);
  run.delays = parse_delays(member(obj, "probe_delays", path), join_path(path, "probe_delays"));
  run.probe = parse_pulse(member(obj, "probe", path), join_path(path, "probe"));
  run.local_oscillator =
      parse_pulse(member(obj, "local_oscillator", path), join_path(path, "local_oscillator"));
  run.omega = parse_grid(member(obj, "omega", path), "cm-1", join_path(path, "omega"));
  if (obj.contains("include_leakage_term"))
    run.include_leakage_term =
        boolean(obj["include_leakage_term"], join_path(path, "include_leakage_term"));
  run.axis = parse_axis(obj, path);
  return run;
}

TwodirRun parse_twodir(const json& obj, const std::string& path, int n_molecules) {
  (void)n_molecules;
  check_keys(obj, path,
             {"initial_weights", "t2_delays", "pulses", "omega1", "omega3", "subtract_gsb",
              "components", "axis_convention"});
  TwodirRun run;
  const std::string weights =
      text(member(obj, "initial_weights", path), join_path(path, "initial_weights"));
  if (weights == "pure-ground") {
    run.initial = InitialWeights::kPureGround;
  } else if (weights == "thermal") {
    run.initial = InitialWeights::kThermal;
  } else {
    fail(join_path(path, "initial_weights"), "expected \"pure-ground\" or \"thermal\"");
  }
  run.t2_delays = parse_delays(member(obj, "t2_delays", path), join_path(path, "t2_delays"));
  const json& pulses = member(obj, "pulses", path);
  const std::string pulse_path = join_path(path, "pulses");
  check_keys(pulses, pulse_path, {"k1", "k2", "k3", "local_oscillator"});
  run.pulses.k1 = parse_pulse(member(pulses, "k1", pulse_path), join_path(pulse_path, "k1"));
  run.pulses.k2 = parse_pulse(member(pulses, "k2", pulse_path), join_path(pulse_path, "k2"));
  run.pulses.k3 = parse_pulse(member(pulses, "k3", pulse_path), join_path(pulse_path, "k3"));
  run.pulses.local_oscillator = parse_pulse(member(pulses, "local_oscillator", pulse_path),
                                            join_path(pulse_path, "local_oscillator"));
  run.omega1 = parse_grid(member(obj, "omega1", path), "cm-1", join_path(path, "omega1"));
  run.omega3 = parse_grid(member(obj, "omega3", path), "cm-1", join_path(path, "omega3"));
  if (obj.contains("subtract_gsb"))
    run.subtract_gsb = boolean(obj["subtract_gsb"], join_path(path, "subtract_gsb"));
  if (obj.contains("components"))
    run.components = boolean(obj["components"], join_path(path, "components"));
  run.axis = parse_axis(obj, path);
  return run;
}

DipolesRun parse_dipoles(const json& obj, const std::string& path, const SystemParams& system) {
  check_keys(obj, path, {"detuned_count", "detuning", "broadening"});
  DipolesRun run;
  run.block.count = system.size();
  double sum = 0.0;
  for (const auto& m : system.molecules) sum += m.coupling * m.coupling;
  run.block.collective_coupling = std::sqrt(sum);
  run.block.detuned_count =
      integer(member(obj, "detuned_count", path), join_path(path, "detuned_count"));
  run.block.detuning = quantity(member(obj, "detuning", path), "cm-1", join_path(path, "detuning"));
  if (run.block.detuned_count < 0 || run.block.detuned_count > run.block.count)
    fail(join_path(path, "detuned_count"), "must lie in [0, N]");
  if (obj.contains("broadening")) {
    const std::string bpath = join_path(path, "broadening");
    check_keys(obj["broadening"], bpath, {"width", "omega"});
    BroadeningSpec broadening;
    broadening.width =
        quantity(member(obj["broadening"], "width", bpath), "cm-1", join_path(bpath, "width"));
    if (!(broadening.width > 0.0)) fail(join_path(bpath, "width"), "must be positive");
    broadening.omega =
        parse_grid(member(obj["broadening"], "omega", bpath), "cm-1", join_path(bpath, "omega"));
    run.broadening = broadening;
  }
  return run;
}

}  // namespace

Eigen::VectorXd GridSpec::linspace() const {
  return Eigen::VectorXd::LinSpaced(count, start, stop);
}

RunConfig parse_config(const nlohmann::json& document) {
  const json* root = &document;
  if (document.is_object() && document.contains("config")) root = &document["config"];

  check_keys(*root, "", {"system", "run", "output", "dynamics", "trps", "twodir", "dipoles"});
  RunConfig config;
  config.system = parse_system(member(*root, "system", ""), "system");

  const std::string run = text(member(*root, "run", ""), "run");
  const int n = config.system.size();
  if (run == "dynamics") {
    config.kind = RunKind::kDynamics;
    config.dynamics = parse_dynamics(member(*root, "dynamics", ""), "dynamics", n);
  } else if (run == "trps") {
    config.kind = RunKind::kTrps;
    config.trps = parse_trps(member(*root, "trps", ""), "trps", n);
  } else if (run == "twodir") {
    config.kind = RunKind::kTwodir;
    config.twodir = parse_twodir(member(*root, "twodir", ""), "twodir", n);
  } else if (run == "dipoles") {
    config.kind = RunKind::kDipoles;
    config.dipoles = parse_dipoles(member(*root, "dipoles", ""), "dipoles", config.system);
  } else if (run == "validate") {
    config.kind = RunKind::kValidate;
  } else {
    fail("run", "expected one of dynamics, trps, twodir, dipoles, validate");
  }

  for (const char* key : {"dynamics", "trps", "twodir", "dipoles"})
    if (root->contains(key) && run != key)
      fail(key, "block does not match run \"" + run + "\"");

  if (root->contains("output")) {
    check_keys((*root)["output"], "output", {"directory", "prefix"});
    if ((*root)["output"].contains("directory"))
      config.output_directory = text((*root)["output"]["directory"], "output.directory");
    if ((*root)["output"].contains("prefix"))
      config.prefix = text((*root)["output"]["prefix"], "output.prefix");
  }
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream stream(path);
  if (!stream) throw ConfigError("cannot open config file: " + path);
  json document;
  try {
    document = json::parse(stream);
  } catch (const json::parse_error& error) {
    throw ConfigError("config parse error in " + path + ": " + error.what());
  }
  return parse_config(document);
}

namespace {

ordered_json initial_json(const InitialSpec& spec) {
  ordered_json out;
  switch (spec.state.kind) {
    case InitialKind::kLower: out["state"] = "LP"; break;
    case InitialKind::kUpper: out["state"] = "UP"; break;
    case InitialKind::kDarkUniform: out["state"] = "DARK_UNIFORM"; break;
    case InitialKind::kGround: out["state"] = "GROUND"; break;
    case InitialKind::kDark:
      out["state"] = "DARK";
      out["index"] = spec.state.index + 1;
      break;
    case InitialKind::kSite:
      out["state"] = "SITE";
      out["index"] = spec.state.index + 1;
      break;
  }
  out["config"] = spec.config;
  return out;
}

ordered_json grid_json(const GridSpec& grid, const char* unit) {
  return {{"start", format_quantity(grid.start, unit)},
          {"stop", format_quantity(grid.stop, unit)},
          {"count", grid.count}};
}

ordered_json delays_json(const std::vector<double>& delays) {
  ordered_json out = ordered_json::array();
  for (double t : delays) out.push_back(format_quantity(t, "ps"));
  return out;
}

ordered_json pulse_json(const Pulse& pulse) {
  return {{"center", format_quantity(pulse.center, "cm-1")},
          {"width", format_quantity(pulse.sigma, "cm-1")},
          {"amplitude", pulse.amplitude},
          {"polarization", {pulse.polarization(0), pulse.polarization(1), pulse.polarization(2)}}};
}

const char* axis_name(AxisConvention axis) {
  return axis == AxisConvention::kRotating ? "rotating" : "absolute";
}

}  // namespace

nlohmann::ordered_json RunConfig::resolved() const {
  ordered_json out;
  ordered_json molecules = ordered_json::array();
  for (const auto& m : system.molecules) {
    ordered_json entry;
    entry["omega"] = format_quantity(m.omega, "cm-1");
    entry["disorder_shift"] = format_quantity(m.disorder_shift, "cm-1");
    entry["anharmonicity"] = format_quantity(m.anharmonicity, "cm-1");
    entry["coupling"] = format_quantity(m.coupling, "cm-1");
    entry["dipole"] = {format_quantity(m.dipole(0), "D"), format_quantity(m.dipole(1), "D"),
                       format_quantity(m.dipole(2), "D")};
    entry["position"] = format_quantity(m.position, "nm");
    entry["length"] = format_quantity(m.length, "nm");
    entry["solvent_gap"] = format_quantity(m.solvent_gap, "cm-1");
    entry["solvent_rate"] = format_quantity(m.solvent_rate, "cm-1");
    molecules.push_back(entry);
  }
  out["system"] = {{"molecules", molecules},
                   {"cavity",
                    {{"omega", format_quantity(system.cavity.omega, "cm-1")},
                     {"quality_factor", system.cavity.quality}}},
                   {"temperature", format_quantity(system.temperature, "K")}};

  switch (kind) {
    case RunKind::kDynamics: {
      out["run"] = "dynamics";
      ordered_json block;
      block["initial"] = initial_json(dynamics->initial);
      block["times"] = grid_json(dynamics->times, "ps");
      if (dynamics->spatial) {
        block["spatial"] = {{"times", delays_json(dynamics->spatial->times)},
                            {"points", dynamics->spatial->points},
                            {"padding", format_quantity(dynamics->spatial->padding, "nm")}};
      }
      out["dynamics"] = block;
      break;
    }
    case RunKind::kTrps: {
      out["run"] = "trps";
      out["trps"] = {{"initial", initial_json(trps->initial)},
                     {"probe_delays", delays_json(trps->delays)},
                     {"probe", pulse_json(trps->probe)},
                     {"local_oscillator", pulse_json(trps->local_oscillator)},
                     {"omega", grid_json(trps->omega, "cm-1")},
                     {"include_leakage_term", trps->include_leakage_term},
                     {"axis_convention", axis_name(trps->axis)}};
      break;
    }
    case RunKind::kTwodir: {
      out["run"] = "twodir";
      out["twodir"] = {
          {"initial_weights",
           twodir->initial == InitialWeights::kPureGround ? "pure-ground" : "thermal"},
          {"t2_delays", delays_json(twodir->t2_delays)},
          {"pulses",
           {{"k1", pulse_json(twodir->pulses.k1)},
            {"k2", pulse_json(twodir->pulses.k2)},
            {"k3", pulse_json(twodir->pulses.k3)},
            {"local_oscillator", pulse_json(twodir->pulses.local_oscillator)}}},
          {"omega1", grid_json(twodir->omega1, "cm-1")},
          {"omega3", grid_json(twodir->omega3, "cm-1")},
          {"subtract_gsb", twodir->subtract_gsb},
          {"components", twodir->components},
          {"axis_convention", axis_name(twodir->axis)}};
      break;
    }
    case RunKind::kDipoles: {
      out["run"] = "dipoles";
      ordered_json block;
      block["detuned_count"] = dipoles->block.detuned_count;
      block["detuning"] = format_quantity(dipoles->block.detuning, "cm-1");
      if (dipoles->broadening) {
        block["broadening"] = {{"width", format_quantity(dipoles->broadening->width, "cm-1")},
                               {"omega", grid_json(dipoles->broadening->omega, "cm-1")}};
      }
      out["dipoles"] = block;
      break;
    }
    case RunKind::kValidate:
      out["run"] = "validate";
      break;
  }

  out["output"] = {{"directory", output_directory}, {"prefix", prefix}};
  return out;
}

}  // namespace vibropol
