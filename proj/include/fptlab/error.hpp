#pragma once

#include <stdexcept>
#include <string>

namespace fptlab {

enum class ErrorKind {
  DomainError,
  InvalidArgument,
  DegenerateVariance,
  OutOfInterval,
  NonpositiveDiffusion,
  ParameterConstraint,
  NonInvertibleTimeMap,
  StartsAboveBoundary,
  NotMsDifferentiable,
  CoincidentTimes,
  DiagonalNotConverged,
  IllConditioned,
  NotPositive,
  DegreeMismatch,
  NonHurwitz,
  DegenerateObservation,
  NotPositiveDefinite,
  AllCensored,
  DisjointSupports,
  ConfigInvalid,
  Io,
};

const char* to_string(ErrorKind kind) noexcept;

// Every module reports failures through this type; kind() is the
// machine-readable category printed by the CLI.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace fptlab
