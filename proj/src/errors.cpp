#include "arfima/errors.hpp"

namespace arfima {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonStationary: return "NonStationary";
    case ErrorCode::NonInvertible: return "NonInvertible";
    case ErrorCode::CommonRoot: return "CommonRoot";
    case ErrorCode::DOutOfRange: return "DOutOfRange";
    case ErrorCode::LambdaOutOfRange: return "LambdaOutOfRange";
    case ErrorCode::RepeatedArRoots: return "RepeatedArRoots";
    case ErrorCode::CholeskyFailure: return "CholeskyFailure";
    case ErrorCode::NonPositiveDefinite: return "NonPositiveDefinite";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::DStarOutOfRange: return "DStarOutOfRange";
    case ErrorCode::NoRoot: return "NoRoot";
    case ErrorCode::BoundaryRoot: return "BoundaryRoot";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::UnsupportedN: return "UnsupportedN";
    case ErrorCode::SingularB: return "SingularB";
    case ErrorCode::DegenerateSample: return "DegenerateSample";
    case ErrorCode::CaseMismatch: return "CaseMismatch";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::FailureThreshold: return "FailureThreshold";
  }
  return "Unknown";
}

}  // namespace arfima
