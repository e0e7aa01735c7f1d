#pragma once

#include <stdexcept>
#include <string>

namespace hst {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numeric input outside the declared domain (non-finite x, p not in (0,1), ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Caller violated an interface contract (dimension mismatch, bad parameter).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// A tester was handed a declared volume above the p <= 0.1 gate.
class VolumeOutOfRange : public Error {
 public:
  using Error::Error;
};

/// Parameter schedule underflowed (t or kappa below 1e-300) or is not runnable.
class DegenerateParameters : public Error {
 public:
  using Error::Error;
};

/// Rejection sampling exceeded its attempt cap.
class SamplerStarved : public Error {
 public:
  SamplerStarved(const std::string& msg, double acceptance_rate)
      : Error(msg), acceptance_rate(acceptance_rate) {}
  double acceptance_rate;
};

/// The positive set has Gaussian measure zero; SAMP is undefined.
class EmptyPositiveSet : public Error {
 public:
  using Error::Error;
};

/// No closed-form volume exists for this function variant.
class NoClosedForm : public Error {
 public:
  using Error::Error;
};

/// Argument below the low end of the invertible range (volume would exceed 0.5).
class OutOfRangeLow : public Error {
 public:
  using Error::Error;
};

/// Argument above the high end of the invertible range (volume below the floor).
class OutOfRangeHigh : public Error {
 public:
  using Error::Error;
};

/// Stub hook for the standard-model fallback testers.
class NotImplementedError : public Error {
 public:
  using Error::Error;
};

/// Configuration failed validation; names the offending field.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& field, const std::string& msg)
      : Error("config field '" + field + "': " + msg), field(field) {}
  std::string field;
};

}  // namespace hst
