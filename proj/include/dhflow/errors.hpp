#pragma once

#include <stdexcept>
#include <string>

namespace dhflow {

/// Base class for every error raised by the library. Callers that only need
/// to know "something numerical went wrong" can catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// geometry
class TubeViolation : public Error {
 public:
  using Error::Error;
};
class NotTangent : public Error {
 public:
  using Error::Error;
};
class BeyondInjectivity : public Error {
 public:
  using Error::Error;
};
class ConstantsSchemeViolation : public Error {
 public:
  using Error::Error;
};

// dirac
class TangencyViolation : public Error {
 public:
  using Error::Error;
};
class EigensolveFailure : public Error {
 public:
  using Error::Error;
};

/// Raised when the Dirac operator along the map does not have a minimal,
/// isolated kernel. The flow driver turns this into a singular-time event.
class KernelNotMinimal : public Error {
 public:
  KernelNotMinimal(const std::string& what, int kernel_dim, double gap)
      : Error(what), kernel_dim_(kernel_dim), gap_(gap) {}
  int kernel_dim() const noexcept { return kernel_dim_; }
  double gap() const noexcept { return gap_; }

 private:
  int kernel_dim_;
  double gap_;
};

class ProjectionDegenerate : public Error {
 public:
  ProjectionDegenerate(const std::string& what, double norm)
      : Error(what), norm_(norm) {}
  double norm() const noexcept { return norm_; }

 private:
  double norm_;
};

// flow
/// A step kept raising the energy after the allowed number of dt halvings.
class StepRejected : public Error {
 public:
  using Error::Error;
};
class RestartExhausted : public Error {
 public:
  using Error::Error;
};
class ContinuationAborted : public Error {
 public:
  using Error::Error;
};

// analysis
class RadiusTooSmall : public Error {
 public:
  using Error::Error;
};
class AngleJumpTooLarge : public Error {
 public:
  using Error::Error;
};
class DegreeNotNearInteger : public Error {
 public:
  using Error::Error;
};

// io
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace dhflow
