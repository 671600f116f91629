#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "fptlab/boundary.hpp"

namespace fptlab {

struct Interval {
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();

  bool contains(double t) const noexcept { return t >= lo && t <= hi; }
};

struct MeanFunction {
  ScalarFn value;
  ScalarFn derivative;

  static MeanFunction constant(double level);
  static MeanFunction zero() { return constant(0.0); }
};

/// c(s,t) = h1(s) h2(t) for s <= t.
struct CovarianceFactors {
  ScalarFn h1;
  ScalarFn h1_prime;
  ScalarFn h2;
  ScalarFn h2_prime;
  Interval interval;
  // Closed-form inverse of r = h1/h2, when one is known.
  ScalarFn r_inverse;

  double r(double t) const { return h1(t) / h2(t); }
  double r_prime(double t) const;
};

/// Unit-variance stationary correlation gamma(t - s).
struct StationaryCorrelation {
  ScalarFn gamma;
  // Right derivative for t >= 0; gamma is even so gamma'(-t) = -gamma'(t).
  ScalarFn gamma_prime;
  // gamma''(0), when the process is mean-square differentiable.
  std::optional<double> curvature_at_zero;
};

struct ProcessSpec {
  MeanFunction mean;
  std::variant<CovarianceFactors, StationaryCorrelation> covariance;
  double x0 = 0.0;
  double t0 = 0.0;
  std::string family;

  bool is_factored() const noexcept {
    return std::holds_alternative<CovarianceFactors>(covariance);
  }
  const CovarianceFactors& factors() const;
  const StationaryCorrelation& correlation() const;
};

using CovarianceFn = std::function<double(double, double)>;

CovarianceFn covariance_function(const ProcessSpec& spec);

struct Triple {
  double s;
  double t;
  double u;
};

struct MarkovCheck {
  bool markov;
  double max_violation;  // relative to |c(s,u)|
};

/// Triple-product criterion c(s,u) = c(s,t) c(t,u) / c(t,t).
MarkovCheck markov_condition_check(const CovarianceFn& cov, std::span<const Triple> triples,
                                   double tol);

/// All ordered triples drawn from `points` (which must be sorted).
std::vector<Triple> triple_grid(std::span<const double> points);

struct TransitionDensityParams {
  double mean;
  double variance;
};

struct TransitionDensity {
  double value;
  TransitionDensityParams params;
};

TransitionDensityParams transition_params(const ProcessSpec& spec, double y, double tau,
                                          double t);
/// Normal density f(x, t | y, tau) of a factored (Gauss-Markov) process.
TransitionDensity transition_density(const ProcessSpec& spec, double y, double tau, double x,
                                     double t);

struct FokkerPlanckCoefficients {
  double drift;      // A1(x, t)
  double diffusion;  // A2(t)
};

FokkerPlanckCoefficients fokker_planck_coefficients(const ProcessSpec& spec, double x,
                                                    double t);

// Stationary-transition families. Wiener: m = beta1 t + c, c(s,t) = sigma^2 s + c1.
// OU: m = -beta1/beta2 + c e^{beta2 t},
//     c(s,t) = c1 e^{beta2 t} [c2 e^{beta2 s} - sigma^2 e^{-beta2 s} / (2 c1 beta2)].
ProcessSpec make_wiener_family(double beta1, double c, double sigma, double c1,
                               Interval interval = {});
ProcessSpec make_ou_family(double beta1, double beta2, double c, double c1, double c2,
                           double sigma, Interval interval = {});

/// gamma(t) = e^{-beta|t|} cos(alpha t).
StationaryCorrelation exp_cos_correlation(double beta, double alpha);
/// gamma(t) = (1 + beta|t|) e^{-beta|t|}; mean-square differentiable.
StationaryCorrelation matern32_correlation(double beta);

/// Zero-mean process with correlation exp_cos_correlation(beta, alpha).
/// alpha == 0 yields the factored form h1 = e^{beta t}, h2 = e^{-beta t}.
ProcessSpec make_exp_cos_process(double beta, double alpha, double x0 = 0.0,
                                 Interval interval = {});
ProcessSpec make_stationary_process(StationaryCorrelation correlation, double x0,
                                    std::string family);

struct WienerTransform {
  std::function<double(double)> boundary;  // S*(theta)
  double x0;                               // x0*
  double theta0;                           // r(t0)
  ScalarFn r;
  ScalarFn r_prime;
  ScalarFn r_inverse;
};

/// Maps the FPT problem for (spec, boundary) onto a standard Wiener problem:
///   g[S(t), t | x0, t0] = r'(t) g_W[S*(r(t)), r(t) | x0*, r(t0)].
/// `horizon` bounds the probe grid used to confirm that r is increasing.
WienerTransform transform_to_wiener(const ProcessSpec& spec, const BoundarySpec& boundary,
                                    double horizon);

/// Inverse of an increasing function on [lo, hi] by bisection.
double invert_increasing(const ScalarFn& f, double target, Interval interval,
                         double rel_tol = 1e-12);

}  // namespace fptlab
