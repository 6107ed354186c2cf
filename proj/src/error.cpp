#include "holodyn/error.hpp"

namespace holodyn {

std::string_view error_kind_name(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::OrderOutOfRange: return "OrderOutOfRange";
    case ErrorKind::SingularLinearPart: return "SingularLinearPart";
    case ErrorKind::NotTriangular: return "NotTriangular";
    case ErrorKind::NotDiagonal: return "NotDiagonal";
    case ErrorKind::DecompositionIncomplete: return "DecompositionIncomplete";
    case ErrorKind::ConditionViolation: return "ConditionViolation";
    case ErrorKind::SmallDivisor: return "SmallDivisor";
    case ErrorKind::ZeroDivisor: return "ZeroDivisor";
    case ErrorKind::NotTangentToIdentity: return "NotTangentToIdentity";
    case ErrorKind::InfiniteOrder: return "InfiniteOrder";
    case ErrorKind::NotParabolic: return "NotParabolic";
    case ErrorKind::InsufficientTruncation: return "InsufficientTruncation";
    case ErrorKind::IsIdentityIterate: return "IsIdentityIterate";
    case ErrorKind::QuadratureNonConvergent: return "QuadratureNonConvergent";
    case ErrorKind::RationalDetected: return "RationalDetected";
    case ErrorKind::OriginPoint: return "OriginPoint";
    case ErrorKind::OrbitEscaped: return "OrbitEscaped";
    case ErrorKind::NotConverged: return "NotConverged";
    case ErrorKind::UnsupportedDimension: return "UnsupportedDimension";
    case ErrorKind::DegenerateDirection: return "DegenerateDirection";
    case ErrorKind::DegenerateAlongCenter: return "DegenerateAlongCenter";
    case ErrorKind::NotEigendirection: return "NotEigendirection";
    case ErrorKind::ZeroMultiplier: return "ZeroMultiplier";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace holodyn
