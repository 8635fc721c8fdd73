#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace xgr {

enum class ErrorCode {
  kNotApplicable,
  kBudgetExceeded,
  kInvalidHeuristic,
  kMalformedDomain,
  kMalformedSpec,
  kNotAdjacent,
  kInvalidObservationChain,
  kAllGoalsUnsolvable,
  kZeroPosterior,
  kZeroPrior,
  kEmptyCounterfactualSet,
  kEmptyExplanan,
  kParseError,
  kValidationError,
  kMissingAnnotation,
  kKeyMismatch,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotApplicable: return "NotApplicable";
    case ErrorCode::kBudgetExceeded: return "BudgetExceeded";
    case ErrorCode::kInvalidHeuristic: return "InvalidHeuristic";
    case ErrorCode::kMalformedDomain: return "MalformedDomain";
    case ErrorCode::kMalformedSpec: return "MalformedSpec";
    case ErrorCode::kNotAdjacent: return "NotAdjacent";
    case ErrorCode::kInvalidObservationChain: return "InvalidObservationChain";
    case ErrorCode::kAllGoalsUnsolvable: return "AllGoalsUnsolvable";
    case ErrorCode::kZeroPosterior: return "ZeroPosterior";
    case ErrorCode::kZeroPrior: return "ZeroPrior";
    case ErrorCode::kEmptyCounterfactualSet: return "EmptyCounterfactualSet";
    case ErrorCode::kEmptyExplanan: return "EmptyExplanan";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kValidationError: return "ValidationError";
    case ErrorCode::kMissingAnnotation: return "MissingAnnotation";
    case ErrorCode::kKeyMismatch: return "KeyMismatch";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so that
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace xgr
