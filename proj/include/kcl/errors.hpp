#pragma once

#include <stdexcept>
#include <string>

namespace kcl {

// Base for everything thrown by this library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Bad user input: malformed expressions, invalid model definitions,
// out-of-contract parameters. Maps to CLI exit code 2.
class ConfigError : public Error {
public:
  using Error::Error;
};

// Runtime numerical failure: quadrature non-convergence, ODE breakdown,
// infeasible construction targets. Maps to CLI exit code 3.
class NumericError : public Error {
public:
  using Error::Error;
};

}  // namespace kcl
