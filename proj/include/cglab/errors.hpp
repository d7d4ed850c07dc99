#pragma once

#include <stdexcept>
#include <string>

namespace cglab {

// Every failure raised by the library derives from Error, so callers can catch
// one type and still tell the categories apart.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed instance: unknown id, empty strategy, duplicate resource, bad sizes.
class StructuralError : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain of a function.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Exact computation refused because it would exceed a size limit.
class CapacityError : public Error {
 public:
  using Error::Error;
};

// Missing or inconsistent options (no seed for Monte Carlo, beta <= 0, ...).
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

// A requested error bound cannot be certified.
class PrecisionError : public Error {
 public:
  using Error::Error;
};

// Flow/load pair or profile violates feasibility.
class FeasibilityError : public Error {
 public:
  using Error::Error;
};

// Ratio with a zero denominator (PoA with Opt = 0).
class UndefinedRatioError : public Error {
 public:
  using Error::Error;
};

// Bad command line or file usage.
class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace cglab
