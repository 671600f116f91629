#include "fptlab/error.hpp"

namespace fptlab {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DegenerateVariance: return "DegenerateVariance";
    case ErrorKind::OutOfInterval: return "OutOfInterval";
    case ErrorKind::NonpositiveDiffusion: return "NonpositiveDiffusion";
    case ErrorKind::ParameterConstraint: return "ParameterConstraint";
    case ErrorKind::NonInvertibleTimeMap: return "NonInvertibleTimeMap";
    case ErrorKind::StartsAboveBoundary: return "StartsAboveBoundary";
    case ErrorKind::NotMsDifferentiable: return "NotMsDifferentiable";
    case ErrorKind::CoincidentTimes: return "CoincidentTimes";
    case ErrorKind::DiagonalNotConverged: return "DiagonalNotConverged";
    case ErrorKind::IllConditioned: return "IllConditioned";
    case ErrorKind::NotPositive: return "NotPositive";
    case ErrorKind::DegreeMismatch: return "DegreeMismatch";
    case ErrorKind::NonHurwitz: return "NonHurwitz";
    case ErrorKind::DegenerateObservation: return "DegenerateObservation";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::AllCensored: return "AllCensored";
    case ErrorKind::DisjointSupports: return "DisjointSupports";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace fptlab
