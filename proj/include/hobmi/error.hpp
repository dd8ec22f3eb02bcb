#pragma once

#include <stdexcept>
#include <string>

namespace hobmi {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-contract input (bad shapes, parameters, files).
/// The CLI maps this to exit code 2.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A computation could not produce a meaningful result for valid input
/// (rank collapse, no oscillation, undeterminable order). Exit code 3.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace hobmi
