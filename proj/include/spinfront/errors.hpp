#pragma once

#include <stdexcept>
#include <string>

namespace spinfront {

// A solver did not meet its accuracy contract (residual, norm, ...).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Invalid user configuration; the CLI maps this to exit status 2.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace spinfront
