#pragma once

#include <stdexcept>
#include <string>

namespace starpulse {

/// Base of every failure raised by the library. `name()` is the stable
/// identifier printed by the command line (e.g. "NoZeroFound").
class Error : public std::runtime_error {
 public:
  Error(std::string name, const std::string& what)
      : std::runtime_error(what), name_(std::move(name)) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

/// Configuration and input errors (exit code 2 at the command line).
class InvalidParams : public Error {
 public:
  explicit InvalidParams(const std::string& what) : Error("InvalidParams", what) {}
};

/// Numerical failures (exit code 3 at the command line).
class NumericalError : public Error {
 public:
  using Error::Error;
};

#define STARPULSE_NUMERICAL_ERROR(Name)                                    \
  class Name : public NumericalError {                                     \
   public:                                                                 \
    explicit Name(const std::string& what) : NumericalError(#Name, what) {} \
  }

STARPULSE_NUMERICAL_ERROR(NoZeroFound);
STARPULSE_NUMERICAL_ERROR(FitDiverged);
STARPULSE_NUMERICAL_ERROR(InversionFailed);
STARPULSE_NUMERICAL_ERROR(ConvergenceFailure);
STARPULSE_NUMERICAL_ERROR(StiffnessBlowup);
STARPULSE_NUMERICAL_ERROR(DomainViolation);
STARPULSE_NUMERICAL_ERROR(StepUnstable);

#undef STARPULSE_NUMERICAL_ERROR

/// Raised when a cache file exists but cannot be trusted; callers recover
/// by recomputing.
class CacheCorrupt : public Error {
 public:
  explicit CacheCorrupt(const std::string& what) : Error("CacheCorrupt", what) {}
};

}  // namespace starpulse
