#pragma once

#include <vector>

#include "vibropol/oracle.hpp"

namespace vibropol {

/// Reference W(CO)6-style parameter set used by the validation suite and
/// the bundled presets: three resonant molecules, 18 cm^-1 disorder,
/// 2.1 cm^-1 coupling, 62 cm^-1 solvent gap, 300 K.
SystemParams reference_system(int n_molecules = 3);

/// Self-check suite: oracle comparisons plus structural invariants at the
/// reference parameters.
std::vector<OracleReport> run_validation_suite();

}  // namespace vibropol
