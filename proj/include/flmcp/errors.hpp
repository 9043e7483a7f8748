#ifndef FLMCP_ERRORS_HPP_
#define FLMCP_ERRORS_HPP_

#include <stdexcept>

namespace flmcp {

/// Two grid functions were combined without sharing a common grid.
struct GridMismatchError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Malformed or unreadable input file (CSV data, binary quantile tables).
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid configuration: basis orders, simulation parameters, levels.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Linear-algebra failure that survives the jitter fallback.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Non-finite values where finite input is required.
struct InvalidInputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace flmcp

#endif  // FLMCP_ERRORS_HPP_
