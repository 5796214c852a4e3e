#include "minlab/error.hpp"

namespace minlab {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NegativeRate: return "NegativeRate";
    case ErrorCode::SuperConservative: return "SuperConservative";
    case ErrorCode::InfiniteSupport: return "InfiniteSupport";
    case ErrorCode::MalformedExpression: return "MalformedExpression";
    case ErrorCode::MalformedSpec: return "MalformedSpec";
    case ErrorCode::WindowTooSmall: return "WindowTooSmall";
    case ErrorCode::BoundaryViolation: return "BoundaryViolation";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::MonotonicityViolation: return "MonotonicityViolation";
    case ErrorCode::NotConservative: return "NotConservative";
    case ErrorCode::BadLambda: return "BadLambda";
    case ErrorCode::NegativePhi: return "NegativePhi";
    case ErrorCode::ZeroBirthRate: return "ZeroBirthRate";
    case ErrorCode::PreconditionFailed: return "PreconditionFailed";
    case ErrorCode::NotSingleBirth: return "NotSingleBirth";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace minlab
