#pragma once

#include <stdexcept>
#include <string>

namespace pendctl {

// Root of every error raised by the library. Callers that only care about
// "something failed" catch this; the CLI maps the subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class NonFiniteError : public Error {
 public:
  using Error::Error;
};

class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

// Complex roots that do not come in conjugate pairs.
class UnpairedRootError : public Error {
 public:
  using Error::Error;
};

class UncontrollableError : public Error {
 public:
  using Error::Error;
};

// Gain synthesis produced a closed loop whose characteristic polynomial does
// not match the request.
class SynthesisError : public Error {
 public:
  using Error::Error;
};

// Invalid parameters, malformed configuration, unreadable files.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace pendctl
