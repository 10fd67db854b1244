#pragma once

#include <stdexcept>

namespace reprobench {

// Bad or degenerate input data (CLI exit code 2).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed configuration or CLI usage (CLI exit code 1).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace reprobench
