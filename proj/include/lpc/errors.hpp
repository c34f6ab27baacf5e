#pragma once

#include <stdexcept>
#include <string>

namespace lpc {

/// Malformed configuration or input file. The CLI maps this to exit code 1.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A computation left its numerically valid range. The CLI maps this to exit code 2.
class NumericError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace lpc
