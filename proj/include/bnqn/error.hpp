#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace bnqn {

enum class ErrorCode {
  PoleAt,
  Overflow,
  SingularMatrix,
  DuplicateDeltas,
  InternalInvariantViolation,
  ArmijoFloor,
  CriticalPointHit,
  SingularHessian,
  StepNearSingularity,
  InvalidArgument,
  InsufficientTail,
  EmptySites,
  PaletteTooSmall,
  ProbeFailed,
};

const char* to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised when a denominator vanishes; carries the offending point.
class PoleError : public Error {
 public:
  explicit PoleError(std::complex<double> z)
      : Error(ErrorCode::PoleAt, "pole at (" + std::to_string(z.real()) + ", " +
                                     std::to_string(z.imag()) + ")"),
        z_(z) {}

  std::complex<double> where() const noexcept { return z_; }

 private:
  std::complex<double> z_;
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::PoleAt: return "PoleAt";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::DuplicateDeltas: return "DuplicateDeltas";
    case ErrorCode::InternalInvariantViolation: return "InternalInvariantViolation";
    case ErrorCode::ArmijoFloor: return "ArmijoFloor";
    case ErrorCode::CriticalPointHit: return "CriticalPointHit";
    case ErrorCode::SingularHessian: return "SingularHessian";
    case ErrorCode::StepNearSingularity: return "StepNearSingularity";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InsufficientTail: return "InsufficientTail";
    case ErrorCode::EmptySites: return "EmptySites";
    case ErrorCode::PaletteTooSmall: return "PaletteTooSmall";
    case ErrorCode::ProbeFailed: return "ProbeFailed";
  }
  return "Unknown";
}

}  // namespace bnqn
