#include "fptlab/process.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "fptlab/error.hpp"

namespace fptlab {
namespace {

void require_in(const Interval& interval, double t, const char* what) {
  if (!interval.contains(t))
    fail(ErrorKind::OutOfInterval,
         fmt::format("{} = {} outside working interval [{}, {}]", what, t, interval.lo,
                     interval.hi));
}

}  // namespace

MeanFunction MeanFunction::constant(double level) {
  return {[level](double) { return level; }, [](double) { return 0.0; }};
}

double CovarianceFactors::r_prime(double t) const {
  const double a = h2(t);
  return (h1_prime(t) * a - h1(t) * h2_prime(t)) / (a * a);
}

const CovarianceFactors& ProcessSpec::factors() const {
  if (const auto* f = std::get_if<CovarianceFactors>(&covariance)) return *f;
  fail(ErrorKind::InvalidArgument,
       fmt::format("process '{}' has no factored (Gauss-Markov) covariance", family));
}

const StationaryCorrelation& ProcessSpec::correlation() const {
  if (const auto* c = std::get_if<StationaryCorrelation>(&covariance)) return *c;
  fail(ErrorKind::InvalidArgument,
       fmt::format("process '{}' has no stationary correlation", family));
}

CovarianceFn covariance_function(const ProcessSpec& spec) {
  if (spec.is_factored()) {
    const CovarianceFactors f = spec.factors();
    return [f](double s, double t) {
      if (s > t) std::swap(s, t);
      return f.h1(s) * f.h2(t);
    };
  }
  const ScalarFn gamma = spec.correlation().gamma;
  return [gamma](double s, double t) { return gamma(std::abs(t - s)); };
}

MarkovCheck markov_condition_check(const CovarianceFn& cov, std::span<const Triple> triples,
                                   double tol) {
  MarkovCheck result{true, 0.0};
  for (const Triple& tr : triples) {
    if (!(tr.s <= tr.t && tr.t <= tr.u))
      fail(ErrorKind::InvalidArgument,
           fmt::format("triple ({}, {}, {}) is not ordered s <= t <= u", tr.s, tr.t, tr.u));
    const double ctt = cov(tr.t, tr.t);
    if (!(ctt > 0.0))
      fail(ErrorKind::InvalidArgument, fmt::format("c(t,t) = {} <= 0 at t = {}", ctt, tr.t));
    const double csu = cov(tr.s, tr.u);
    const double diff = std::abs(csu - cov(tr.s, tr.t) * cov(tr.t, tr.u) / ctt);
    const double scale = std::abs(csu);
    const double violation = scale > 0.0 ? diff / scale : diff;
    result.max_violation = std::max(result.max_violation, violation);
    if (diff > tol * scale) result.markov = false;
  }
  return result;
}

std::vector<Triple> triple_grid(std::span<const double> points) {
  std::vector<Triple> out;
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i; j < points.size(); ++j)
      for (std::size_t k = j; k < points.size(); ++k)
        out.push_back({points[i], points[j], points[k]});
  return out;
}

TransitionDensityParams transition_params(const ProcessSpec& spec, double y, double tau,
                                          double t) {
  const CovarianceFactors& f = spec.factors();
  require_in(f.interval, tau, "tau");
  require_in(f.interval, t, "t");
  if (!(tau <= t))
    fail(ErrorKind::InvalidArgument, fmt::format("transition needs tau <= t ({} > {})", tau, t));
  const double h2t = f.h2(t);
  const double h2tau = f.h2(tau);
  const double ratio = h2t / h2tau;
  const double h1t = f.h1(t);
  const double mean = spec.mean.value(t) + ratio * (y - spec.mean.value(tau));
  const double variance = h2t * (h1t - ratio * f.h1(tau));
  return {mean, variance};
}

TransitionDensity transition_density(const ProcessSpec& spec, double y, double tau, double x,
                                     double t) {
  const TransitionDensityParams p = transition_params(spec, y, tau, t);
  const CovarianceFactors& f = spec.factors();
  const double scale = std::abs(f.h1(t) * f.h2(t));
  if (!(p.variance > 1e-14 * scale))
    fail(ErrorKind::DegenerateVariance,
         fmt::format("V(t|tau) = {:.3g} is degenerate for tau = {}, t = {}", p.variance, tau, t));
  const double z = x - p.mean;
  const double value =
      std::exp(-0.5 * z * z / p.variance) / std::sqrt(2.0 * std::numbers::pi * p.variance);
  return {value, p};
}

FokkerPlanckCoefficients fokker_planck_coefficients(const ProcessSpec& spec, double x,
                                                    double t) {
  const CovarianceFactors& f = spec.factors();
  require_in(f.interval, t, "t");
  const double h2 = f.h2(t);
  if (h2 == 0.0) fail(ErrorKind::InvalidArgument, fmt::format("h2({}) = 0", t));
  const double drift = spec.mean.derivative(t) + (x - spec.mean.value(t)) * f.h2_prime(t) / h2;
  const double diffusion = h2 * h2 * f.r_prime(t);
  if (!(diffusion > 0.0))
    fail(ErrorKind::NonpositiveDiffusion,
         fmt::format("A2({}) = {} <= 0; covariance factors are invalid", t, diffusion));
  return {drift, diffusion};
}

ProcessSpec make_wiener_family(double beta1, double c, double sigma, double c1,
                               Interval interval) {
  if (sigma == 0.0 || !std::isfinite(sigma))
    fail(ErrorKind::ParameterConstraint, "wiener family: sigma != 0 violated");
  if (!(c1 >= 0.0)) fail(ErrorKind::ParameterConstraint, "wiener family: c1 >= 0 violated");
  const double s2 = sigma * sigma;
  CovarianceFactors f{
      [s2, c1](double s) { return s2 * s + c1; },
      [s2](double) { return s2; },
      [](double) { return 1.0; },
      [](double) { return 0.0; },
      interval,
      [s2, c1](double theta) { return (theta - c1) / s2; },
  };
  return ProcessSpec{
      {[beta1, c](double t) { return beta1 * t + c; }, [beta1](double) { return beta1; }},
      std::move(f),
      0.0,
      0.0,
      "wiener"};
}

ProcessSpec make_ou_family(double beta1, double beta2, double c, double c1, double c2,
                           double sigma, Interval interval) {
  if (sigma == 0.0 || !std::isfinite(sigma))
    fail(ErrorKind::ParameterConstraint, "ou family: sigma != 0 violated");
  if (c1 == 0.0) fail(ErrorKind::ParameterConstraint, "ou family: c1 != 0 violated");
  if (beta2 == 0.0) fail(ErrorKind::ParameterConstraint, "ou family: beta2 != 0 violated");
  const double s2 = sigma * sigma;
  const double k = c1 * c2;
  if (!(k - s2 / (2.0 * beta2) >= 0.0))
    fail(ErrorKind::ParameterConstraint,
         fmt::format("ou family: c1 c2 - sigma^2/(2 beta2) >= 0 violated ({})",
                     k - s2 / (2.0 * beta2)));
  const double w = s2 / (2.0 * beta2);
  CovarianceFactors f{
      [k, w, beta2](double s) { return k * std::exp(beta2 * s) - w * std::exp(-beta2 * s); },
      [k, w, beta2](double s) {
        return beta2 * (k * std::exp(beta2 * s) + w * std::exp(-beta2 * s));
      },
      [beta2](double t) { return std::exp(beta2 * t); },
      [beta2](double t) { return beta2 * std::exp(beta2 * t); },
      interval,
      // r = k - w e^{-2 beta2 s}
      [k, w, beta2](double theta) { return -std::log((k - theta) / w) / (2.0 * beta2); },
  };
  return ProcessSpec{{[beta1, beta2, c](double t) { return -beta1 / beta2 + c * std::exp(beta2 * t); },
                      [beta2, c](double t) { return c * beta2 * std::exp(beta2 * t); }},
                     std::move(f),
                     0.0,
                     0.0,
                     "ou"};
}

StationaryCorrelation exp_cos_correlation(double beta, double alpha) {
  if (!(beta > 0.0)) fail(ErrorKind::DomainError, "exp-cos correlation: beta must be > 0");
  return {
      [beta, alpha](double t) { return std::exp(-beta * std::abs(t)) * std::cos(alpha * t); },
      [beta, alpha](double t) {
        const double a = std::abs(t);
        const double sign = t < 0.0 ? -1.0 : 1.0;
        return sign * -std::exp(-beta * a) * (beta * std::cos(alpha * a) + alpha * std::sin(alpha * a));
      },
      std::nullopt,
  };
}

StationaryCorrelation matern32_correlation(double beta) {
  if (!(beta > 0.0)) fail(ErrorKind::DomainError, "matern32 correlation: beta must be > 0");
  return {
      [beta](double t) {
        const double a = std::abs(t);
        return (1.0 + beta * a) * std::exp(-beta * a);
      },
      [beta](double t) { return -beta * beta * t * std::exp(-beta * std::abs(t)); },
      -beta * beta,
  };
}

ProcessSpec make_exp_cos_process(double beta, double alpha, double x0, Interval interval) {
  if (!(beta > 0.0)) fail(ErrorKind::ParameterConstraint, "exp-cos process: beta > 0 violated");
  if (alpha != 0.0)
    return make_stationary_process(exp_cos_correlation(beta, alpha), x0, "exp-cos-correlation");
  CovarianceFactors f{
      [beta](double t) { return std::exp(beta * t); },
      [beta](double t) { return beta * std::exp(beta * t); },
      [beta](double t) { return std::exp(-beta * t); },
      [beta](double t) { return -beta * std::exp(-beta * t); },
      interval,
      [beta](double theta) { return std::log(theta) / (2.0 * beta); },
  };
  return ProcessSpec{MeanFunction::zero(), std::move(f), x0, 0.0, "exp-cos-correlation"};
}

ProcessSpec make_stationary_process(StationaryCorrelation correlation, double x0,
                                    std::string family) {
  if (std::abs(correlation.gamma(0.0) - 1.0) > 1e-12)
    fail(ErrorKind::ParameterConstraint, "stationary correlation must satisfy gamma(0) = 1");
  return ProcessSpec{MeanFunction::zero(), std::move(correlation), x0, 0.0, std::move(family)};
}

double invert_increasing(const ScalarFn& f, double target, Interval interval, double rel_tol) {
  double lo = interval.lo;
  double hi = interval.hi;
  if (f(lo) > target)
    fail(ErrorKind::OutOfInterval,
         fmt::format("inverse: target {} below f(lo) = {}", target, f(lo)));
  if (std::isinf(hi)) {
    double width = 1.0;
    hi = lo + width;
    for (int i = 0; f(hi) < target; ++i) {
      if (i > 2000) fail(ErrorKind::OutOfInterval, "inverse: could not bracket target");
      lo = hi;
      width *= 2.0;
      hi = lo + width;
    }
  } else if (f(hi) < target) {
    fail(ErrorKind::OutOfInterval,
         fmt::format("inverse: target {} above f(hi) = {}", target, f(hi)));
  }
  for (int i = 0; i < 400; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= rel_tol * std::max(std::abs(lo), std::abs(hi)) || mid == lo || mid == hi)
      break;
    if (f(mid) < target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

WienerTransform transform_to_wiener(const ProcessSpec& spec, const BoundarySpec& boundary,
                                    double horizon) {
  const CovarianceFactors f = spec.factors();
  const double t0 = spec.t0;
  const double x0 = spec.x0;
  if (!(x0 < boundary(t0)))
    fail(ErrorKind::StartsAboveBoundary,
         fmt::format("x0 = {} is not below S(t0) = {}", x0, boundary(t0)));
  const double lo = std::max(t0, f.interval.lo);
  const double hi = std::min(horizon, f.interval.hi);
  constexpr int kProbes = 257;
  for (int i = 0; i < kProbes; ++i) {
    const double t = lo + (hi - lo) * double(i) / (kProbes - 1);
    if (!(f.r_prime(t) > 0.0))
      fail(ErrorKind::NonInvertibleTimeMap, fmt::format("r'({}) = {} <= 0", t, f.r_prime(t)));
  }

  WienerTransform out;
  out.r = [f](double t) { return f.r(t); };
  out.r_prime = [f](double t) { return f.r_prime(t); };
  if (f.r_inverse) {
    out.r_inverse = f.r_inverse;
  } else {
    const Interval iv = f.interval;
    out.r_inverse = [f, iv](double theta) {
      return invert_increasing([&f](double t) { return f.r(t); }, theta, iv);
    };
  }
  out.theta0 = f.r(t0);
  out.x0 = (x0 - spec.mean.value(t0)) / f.h2(t0);
  const MeanFunction mean = spec.mean;
  out.boundary = [f, mean, boundary, inv = out.r_inverse](double theta) {
    const double t = inv(theta);
    return (boundary(t) - mean.value(t)) / f.h2(t);
  };
  return out;
}

}  // namespace fptlab
