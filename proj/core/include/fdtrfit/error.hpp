#pragma once

#include <stdexcept>
#include <string>

namespace fdtrfit {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent user input (config files, parameter definitions,
/// stack descriptions). The CLI maps this to exit code 1.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A call violated a documented precondition (wrong vector length,
/// nonpositive physical value, empty budget, ...).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// The forward model or an objective produced a non-finite value.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace fdtrfit
