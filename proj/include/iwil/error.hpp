#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace iwil {

/// Raised when a vector or matrix does not have the length an operation expects.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;

  DimensionError(const std::string& what, std::size_t expected, std::size_t actual)
      : std::invalid_argument(what + ": expected length " + std::to_string(expected) +
                              ", got " + std::to_string(actual)) {}
};

/// Invalid hyperparameter or run configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// File could not be read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void expect_length(const char* what, std::size_t expected, std::size_t actual) {
  if (expected != actual) throw DimensionError(what, expected, actual);
}

}  // namespace iwil
