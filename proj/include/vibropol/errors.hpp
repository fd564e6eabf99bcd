#pragma once

#include <stdexcept>
#include <string>

namespace vibropol {

/// Raised when a run configuration cannot be parsed or fails validation.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when a numerical routine cannot deliver a trustworthy result
/// (defective generator, non-convergent eigensolver, NaN in a pathway).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace vibropol
