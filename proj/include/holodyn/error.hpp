#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace holodyn {

enum class ErrorKind {
  DimensionMismatch,
  OrderOutOfRange,
  SingularLinearPart,
  NotTriangular,
  NotDiagonal,
  DecompositionIncomplete,
  ConditionViolation,
  SmallDivisor,
  ZeroDivisor,
  NotTangentToIdentity,
  InfiniteOrder,
  NotParabolic,
  InsufficientTruncation,
  IsIdentityIterate,
  QuadratureNonConvergent,
  RationalDetected,
  OriginPoint,
  OrbitEscaped,
  NotConverged,
  UnsupportedDimension,
  DegenerateDirection,
  DegenerateAlongCenter,
  NotEigendirection,
  ZeroMultiplier,
  InvalidArgument,
  ParseError,
};

std::string_view error_kind_name(ErrorKind kind) noexcept;

// Every library failure is reported through this type; the CLI turns it into
// a JSON payload on stderr.
class DomainError : public std::runtime_error {
 public:
  DomainError(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw DomainError(kind, message);
}

}  // namespace holodyn
