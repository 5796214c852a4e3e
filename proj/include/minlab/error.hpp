#ifndef MINLAB_ERROR_HPP
#define MINLAB_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace minlab {

enum class ErrorCode {
  NegativeRate,
  SuperConservative,
  InfiniteSupport,
  MalformedExpression,
  MalformedSpec,
  WindowTooSmall,
  BoundaryViolation,
  NonFiniteInput,
  SingularSystem,
  MonotonicityViolation,
  NotConservative,
  BadLambda,
  NegativePhi,
  ZeroBirthRate,
  PreconditionFailed,
  NotSingleBirth,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace minlab

#endif
