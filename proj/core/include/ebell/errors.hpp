#pragma once

#include <stdexcept>
#include <string>

namespace ebell {

/// Raised for malformed inputs: bad dimensions, out-of-range indices,
/// invalid distributions or incompatible option combinations.
class ArgumentError : public std::invalid_argument {
 public:
  explicit ArgumentError(const std::string& what) : std::invalid_argument(what) {}
};

/// Raised when a computed quantity leaves its floating-point noise band,
/// e.g. a probability below -1e-9 after conjugation.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ebell
