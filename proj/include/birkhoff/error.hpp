#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace birkhoff {

enum class ErrorCode {
  InvalidOrder,
  InvalidDomain,
  UnsupportedGrid,
  IllConditionedBasis,
  ShapeError,
  DomainError,
  IncompleteDerivatives,
  NotFound,
  DomainMismatch,
  EvaluationError,
  InvalidForm,
  UnsupportedMapping,
  DegenerateWeight,
  NoConvergence,
  UnsupportedProblem,
  InvalidConfig,
};

/// Kebab-case tag, e.g. "ill-conditioned-basis".
std::string_view to_string(ErrorCode code);

/// Shortest round-trip text for a double, used in messages and CSV/JSON output.
std::string format_double(double value);

/// Every recoverable failure in the library is reported through this type.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace birkhoff
