#pragma once

#include <stdexcept>
#include <string>

namespace fockmarket {

// Base class for every error raised by the library. The CLI maps these to
// exit code 1; configuration problems use ConfigError (exit code 2).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Requested basis exceeds the configured dimension limit.
class CapacityError : public Error {
 public:
  using Error::Error;
};

// Bad mode index, missing mode, or mode collision.
class ModeError : public Error {
 public:
  using Error::Error;
};

// Operators (or an operator and a state) live on different spaces.
class SpaceMismatch : public Error {
 public:
  using Error::Error;
};

// A NumberState does not fit the space it is used with.
class StateError : public Error {
 public:
  using Error::Error;
};

// Truncation could touch the quantity being computed.
class MarginError : public Error {
 public:
  using Error::Error;
};

class DegenerateParameters : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace fockmarket
