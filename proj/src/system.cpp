#include "vibropol/system.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "vibropol/units.hpp"

namespace vibropol {

double SystemParams::mean_occupation(int molecule) const {
  return bose_occupation(molecules.at(molecule).solvent_gap, temperature);
}

void SystemParams::validate() const {
  if (molecules.empty()) throw std::invalid_argument("system: at least one molecule is required");
  if (!(cavity.omega > 0.0)) throw std::invalid_argument("system: cavity frequency must be positive");
  if (!(cavity.quality > 0.0)) throw std::invalid_argument("system: quality factor must be positive");
  if (!(temperature > 0.0)) throw std::invalid_argument("system: temperature must be positive");
  for (std::size_t i = 0; i < molecules.size(); ++i) {
    const auto& m = molecules[i];
    const std::string tag = "molecule " + std::to_string(i + 1) + ": ";
    if (!(m.omega > 0.0)) throw std::invalid_argument(tag + "vibrational frequency must be positive");
    if (!(m.solvent_gap > 0.0)) throw std::invalid_argument(tag + "solvent gap must be positive");
    if (m.solvent_rate < 0.0) throw std::invalid_argument(tag + "solvent rate must be non-negative");
    if (!(m.length > 0.0)) throw std::invalid_argument(tag + "localization length must be positive");
    if (!std::isfinite(m.disorder_shift) || !std::isfinite(m.coupling) ||
        !std::isfinite(m.anharmonicity) || !std::isfinite(m.position) ||
        !m.dipole.allFinite())
      throw std::invalid_argument(tag + "parameters must be finite");
    const double nbar = bose_occupation(m.solvent_gap, temperature);
    if (!(nbar >= 0.0) || !std::isfinite(nbar))
      throw std::invalid_argument(tag + "solvent occupation is not finite");
  }
}

std::vector<int> SolventConfig::bits() const {
  std::vector<int> out(n_molecules);
  for (int i = 0; i < n_molecules; ++i) out[i] = bit(i);
  return out;
}

SolventConfig SolventConfig::from_bits(const std::vector<int>& bits) {
  if (bits.empty() || bits.size() > 20)
    throw std::length_error("SolventConfig: supported range is 1 <= N <= 20");
  SolventConfig config;
  config.n_molecules = static_cast<int>(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] != 0 && bits[i] != 1)
      throw std::invalid_argument("SolventConfig: bits must be 0 or 1");
    config.index |= static_cast<std::uint32_t>(bits[i]) << i;
  }
  return config;
}

std::vector<SolventConfig> enumerate_configs(int n_molecules) {
  if (n_molecules < 1 || n_molecules > 20)
    throw std::length_error("enumerate_configs: N=" + std::to_string(n_molecules) +
                            " implies 2^" + std::to_string(n_molecules) +
                            " solvent configurations; supported range is 1 <= N <= 20");
  const std::uint32_t count = 1u << n_molecules;
  std::vector<SolventConfig> configs(count);
  for (std::uint32_t p = 0; p < count; ++p) configs[p] = SolventConfig{p, n_molecules};
  return configs;
}

}  // namespace vibropol
