#pragma once

#include <stdexcept>
#include <string>

namespace knorm {

/// Base class of everything the library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or unsupported input (field specs, elements, degrees).
class InputError : public Error {
 public:
  using Error::Error;
};

/// A decision could not be made at the tracked precision.
class PrecisionError : public Error {
 public:
  using Error::Error;
};

/// A mathematical identity that must hold was observed to fail.
class CheckFailure : public Error {
 public:
  using Error::Error;
};

/// Internal construction went wrong (a bug, never valid input).
class InternalError : public Error {
 public:
  using Error::Error;
};

/// The operation needs data the model deliberately does not pin down.
class Unsupported : public Error {
 public:
  using Error::Error;
};

}  // namespace knorm
