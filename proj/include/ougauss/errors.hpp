#pragma once

#include <stdexcept>
#include <string>

namespace ougauss {

enum class ErrorCode {
  NotSymmetric,
  NotPositiveDefinite,
  NotHurwitz,
  LyapunovSolveFailed,
  QuadratureDivergence,
  ZeroVector,
  RootBracketFailure,
  EmptyMultiindex,
  ComplexEigenvalueUnsupported,
  QuadratureBudgetExceeded,
  NearDiagonal,
  QuadratureNonconvergence,
  SupportOverlap,
  UnknownEstimate,
  DegenerateSample,
  T0NotFound,
  GridBudgetExceeded,
  IoFailure,
};

const char* to_string(ErrorCode code);

// All library failures throw this; `code` identifies the failure class so
// callers (and tests) can dispatch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace ougauss
