#include "fptlab/boundary.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "fptlab/error.hpp"

namespace fptlab {
namespace {

void check_soglia(double beta, double d, double t) {
  if (!(d > 0.0)) fail(ErrorKind::DomainError, fmt::format("soglia: d must be > 0, got {}", d));
  if (!(beta > 0.0))
    fail(ErrorKind::DomainError, fmt::format("soglia: beta must be > 0, got {}", beta));
  if (!(t >= 0.0) || !std::isfinite(t))
    fail(ErrorKind::DomainError, fmt::format("soglia: t must be >= 0, got {}", t));
}

bool below_limit_threshold(double beta, double t) { return t < 1e-9 / beta; }

// Pieces shared by value and derivative. u = e^{2bt}-1, q = 1-E with
// E = exp(-4d^2/u), root = sqrt(1+8E) = sqrt(9-8q) and
// log_term = ln[(1+root)/4] = log1p(-2q/(root+3)).
struct SogliaParts {
  double u;
  double q;
  double root;
  double log_term;
};

SogliaParts soglia_parts(double beta, double d, double t) {
  SogliaParts p{};
  p.u = std::expm1(2.0 * beta * t);
  p.q = -std::expm1(-4.0 * d * d / p.u);
  p.root = std::sqrt(9.0 - 8.0 * p.q);
  p.log_term = std::log1p(-2.0 * p.q / (p.root + 3.0));
  return p;
}

}  // namespace

double soglia_eval(double beta, double d, double t) {
  check_soglia(beta, d, t);
  if (below_limit_threshold(beta, t)) return d;
  const SogliaParts p = soglia_parts(beta, d, t);
  return d * std::exp(-beta * t) * (1.0 - p.u / (2.0 * d * d) * p.log_term);
}

double soglia_derivative(double beta, double d, double t) {
  check_soglia(beta, d, t);
  const double d2 = d * d;
  if (below_limit_threshold(beta, t)) return d * beta * (std::log(2.0) / d2 - 1.0);
  const SogliaParts p = soglia_parts(beta, d, t);
  // dE/du = E 4d^2/u^2, formed in log space so tiny u cannot overflow.
  const double log_de_du = -4.0 * d2 / p.u + std::log(4.0 * d2) - 2.0 * std::log(p.u);
  const double de_du = std::exp(log_de_du);
  const double dlog_du = 4.0 * de_du / (p.root * (1.0 + p.root));
  const double bracket = 1.0 - p.u / (2.0 * d2) * p.log_term;
  const double dbracket_du = -(p.log_term + p.u * dlog_du) / (2.0 * d2);
  const double du_dt = 2.0 * beta * (p.u + 1.0);
  return d * std::exp(-beta * t) * (-beta * bracket + dbracket_du * du_dt);
}

double derivative_mismatch(const ScalarFn& value, const ScalarFn& derivative, double lo,
                           double hi, int n) {
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t = lo + (hi - lo) * (n == 1 ? 0.0 : double(i) / (n - 1));
    const double step = 1e-5 * std::max(1.0, std::abs(t));
    const double fd = (value(t + step) - value(t - step)) / (2.0 * step);
    const double exact = derivative(t);
    const double scale = std::max({std::abs(exact), std::abs(fd), 1e-8});
    worst = std::max(worst, std::abs(fd - exact) / scale);
  }
  return worst;
}

BoundarySpec BoundarySpec::soglia(double beta, double d) {
  check_soglia(beta, d, 0.0);
  return BoundarySpec([beta, d](double t) { return soglia_eval(beta, d, t); },
                      [beta, d](double t) { return soglia_derivative(beta, d, t); },
                      SogliaBoundary{beta, d});
}

BoundarySpec BoundarySpec::linear(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b))
    fail(ErrorKind::DomainError, "linear boundary: coefficients must be finite");
  return BoundarySpec([a, b](double t) { return a + b * t; }, [b](double) { return b; },
                      LinearBoundary{a, b});
}

BoundarySpec BoundarySpec::constant(double a) {
  if (!std::isfinite(a)) fail(ErrorKind::DomainError, "constant boundary: level must be finite");
  return BoundarySpec([a](double) { return a; }, [](double) { return 0.0; },
                      ConstantBoundary{a});
}

BoundarySpec BoundarySpec::custom(ScalarFn value, ScalarFn derivative, double probe_lo,
                                  double probe_hi) {
  if (!value || !derivative) fail(ErrorKind::InvalidArgument, "custom boundary: empty evaluator");
  const double mismatch = derivative_mismatch(value, derivative, probe_lo, probe_hi);
  if (!(mismatch <= 1e-6))
    fail(ErrorKind::InvalidArgument,
         fmt::format("custom boundary: derivative disagrees with finite differences "
                     "(relative mismatch {:.3g})",
                     mismatch));
  return BoundarySpec(std::move(value), std::move(derivative), CustomBoundary{});
}

std::string BoundarySpec::describe() const {
  return std::visit(
      [](const auto& k) -> std::string {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, SogliaBoundary>)
          return fmt::format("soglia(beta={}, d={})", k.beta, k.d);
        else if constexpr (std::is_same_v<K, LinearBoundary>)
          return fmt::format("linear(a={}, b={})", k.a, k.b);
        else if constexpr (std::is_same_v<K, ConstantBoundary>)
          return fmt::format("constant(a={})", k.a);
        else
          return "custom";
      },
      kind_);
}

}  // namespace fptlab
