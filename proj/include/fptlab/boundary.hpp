#pragma once

#include <functional>
#include <string>
#include <variant>

namespace fptlab {

using ScalarFn = std::function<double(double)>;

struct SogliaBoundary {
  double beta;
  double d;
};
struct LinearBoundary {
  double a;
  double b;
};
struct ConstantBoundary {
  double a;
};
struct CustomBoundary {};

using BoundaryKind =
    std::variant<SogliaBoundary, LinearBoundary, ConstantBoundary, CustomBoundary>;

/// Threshold S(t) together with its time derivative.
class BoundarySpec {
 public:
  static BoundarySpec soglia(double beta, double d);
  static BoundarySpec linear(double a, double b);
  static BoundarySpec constant(double a);
  /// Arbitrary boundary; the derivative is checked against central
  /// differences of the value on [probe_lo, probe_hi] before acceptance.
  static BoundarySpec custom(ScalarFn value, ScalarFn derivative, double probe_lo,
                             double probe_hi);

  double operator()(double t) const { return value_(t); }
  double derivative(double t) const { return derivative_(t); }
  const BoundaryKind& kind() const noexcept { return kind_; }
  std::string describe() const;

 private:
  BoundarySpec(ScalarFn value, ScalarFn derivative, BoundaryKind kind)
      : value_(std::move(value)), derivative_(std::move(derivative)), kind_(kind) {}

  ScalarFn value_;
  ScalarFn derivative_;
  BoundaryKind kind_;
};

// S(t) = d e^{-bt} {1 - (e^{2bt}-1)/(2d^2) ln[1/4 + 1/4 sqrt(1 + 8 exp(-4d^2/(e^{2bt}-1)))]}
double soglia_eval(double beta, double d, double t);
double soglia_derivative(double beta, double d, double t);

/// Largest relative mismatch between `derivative` and a central difference
/// of `value` (step 1e-5 scaled by t) over n equispaced probes in [lo, hi].
double derivative_mismatch(const ScalarFn& value, const ScalarFn& derivative, double lo,
                           double hi, int n = 64);

}  // namespace fptlab
