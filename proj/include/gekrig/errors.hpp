#pragma once

#include <stdexcept>
#include <string>

namespace gekrig {

enum class ErrorCode {
  InvalidArgument,
  DegenerateResponse,
  SingularRotation,
  InvalidKernel,
  UnsupportedKernel,
  IllConditioned,
  NumericalBreakdown,
  OptimizationFailed,
  TooLarge,
  DomainError,
  Io,
};

const char* to_string(ErrorCode code);

/// Library exception. Every failure raised by gekrig carries a code so callers
/// (the harness in particular) can classify failed trials without string
/// matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised when a matrix cannot be factorized even at the largest nugget, or a
/// rotation matrix is numerically singular.
class ConditioningError : public Error {
 public:
  ConditioningError(ErrorCode code, const std::string& what, double condition)
      : Error(code, what), condition_(condition) {}

  /// Estimated 2-norm condition number of the offending matrix.
  double condition_estimate() const noexcept { return condition_; }

 private:
  double condition_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(ErrorCode::InvalidArgument, what);
}

}  // namespace gekrig
