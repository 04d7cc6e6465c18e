#pragma once

#include <stdexcept>
#include <string>

namespace rmf {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter lies outside the supported configuration (e.g. sieve limit).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An index or argument exceeds the extent of a table.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The sample point does not cover every prime the operation needs.
class CoverageError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A regression could not be formed from the supplied data.
class FitError : public Error {
 public:
  using Error::Error;
};

}  // namespace rmf
