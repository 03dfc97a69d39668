#include "birkhoff/error.hpp"

#include <array>
#include <charconv>

namespace birkhoff {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidOrder: return "invalid-order";
    case ErrorCode::InvalidDomain: return "invalid-domain";
    case ErrorCode::UnsupportedGrid: return "unsupported-grid";
    case ErrorCode::IllConditionedBasis: return "ill-conditioned-basis";
    case ErrorCode::ShapeError: return "shape-error";
    case ErrorCode::DomainError: return "domain-error";
    case ErrorCode::IncompleteDerivatives: return "incomplete-derivatives";
    case ErrorCode::NotFound: return "not-found";
    case ErrorCode::DomainMismatch: return "domain-mismatch";
    case ErrorCode::EvaluationError: return "evaluation-error";
    case ErrorCode::InvalidForm: return "invalid-form";
    case ErrorCode::UnsupportedMapping: return "unsupported-mapping";
    case ErrorCode::DegenerateWeight: return "degenerate-weight";
    case ErrorCode::NoConvergence: return "no-convergence";
    case ErrorCode::UnsupportedProblem: return "unsupported-problem";
    case ErrorCode::InvalidConfig: return "invalid-config";
  }
  return "unknown";
}

std::string format_double(double value) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), res.ptr);
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace birkhoff
