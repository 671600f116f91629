#include "fptlab/analytic.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "fptlab/error.hpp"
#include "fptlab/quadrature.hpp"

namespace fptlab {
namespace {

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }
double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

}  // namespace

double closed_form_soglia(double beta, double d, double t) {
  if (!(t > 0.0)) fail(ErrorKind::DomainError, fmt::format("closed form: t must be > 0, got {}", t));
  const double s = soglia_eval(beta, d, t);
  // Below this the transition variance is under rounding and the density is
  // exp(-d^2/(4 beta t))-small.
  if (beta * t < 1e-12) return 0.0;
  const ProcessSpec ou = make_exp_cos_process(beta, 0.0);
  const double f = transition_density(ou, 0.0, 0.0, s, t).value;
  const double u = std::expm1(2.0 * beta * t);
  const double root = std::sqrt(1.0 + 8.0 * std::exp(-4.0 * d * d / u));
  return 4.0 * d * beta * std::exp(beta * t) / u * root / (1.0 + root) * f;
}

double wiener_linear_fpt(double a, double b, double x0, double theta0, double theta) {
  const double gap = a + b * theta0 - x0;
  if (!(gap > 0.0))
    fail(ErrorKind::StartsAboveBoundary,
         fmt::format("wiener fpt: x0 = {} is not below a + b theta0 = {}", x0, a + b * theta0));
  if (!(theta > theta0))
    fail(ErrorKind::DomainError, fmt::format("wiener fpt: theta = {} <= theta0", theta));
  const double dt = theta - theta0;
  const double excess = a + b * theta - x0;
  return gap / std::sqrt(2.0 * std::numbers::pi * dt * dt * dt) *
         std::exp(-excess * excess / (2.0 * dt));
}

ConditionalPairMoments w1_conditional_moments(const ProcessSpec& spec, double x0, double t) {
  const StationaryCorrelation& c = spec.correlation();
  const double slope0 = c.gamma_prime(0.0);
  if (!c.curvature_at_zero || std::abs(slope0) > 1e-10 || !(*c.curvature_at_zero < 0.0))
    fail(ErrorKind::NotMsDifferentiable,
         fmt::format("process '{}' is not mean-square differentiable (gamma'(0) = {})",
                     spec.family, slope0));
  const double g = c.gamma(t);
  const double gp = c.gamma_prime(t);
  // Unconditional joint of (X(0), X(t), X'(t)): unit variances on X,
  // Var X' = -gamma''(0), Cov(X0, Xt) = gamma, Cov(X0, X't) = gamma',
  // Cov(Xt, X't) = 0. Condition on X(0) = x0.
  ConditionalPairMoments m{};
  m.mean_x = g * x0;
  m.var_x = 1.0 - g * g;
  m.mean_z = gp * x0;
  m.var_z = -*c.curvature_at_zero - gp * gp;
  m.cov_xz = -g * gp;
  return m;
}

double w1_upper_bound(const ProcessSpec& spec, const BoundarySpec& boundary, double x0,
                      double t) {
  if (!(x0 < boundary(0.0)))
    fail(ErrorKind::StartsAboveBoundary,
         fmt::format("w1: x0 = {} is not below S(0) = {}", x0, boundary(0.0)));
  if (!(t > 0.0)) fail(ErrorKind::DomainError, "w1: t must be > 0");
  const ConditionalPairMoments m = w1_conditional_moments(spec, x0, t);
  if (!(m.var_x > 0.0)) return 0.0;
  const double s = boundary(t);
  const double slope = boundary.derivative(t);
  const double sd_x = std::sqrt(m.var_x);
  const double density_x = normal_pdf((s - m.mean_x) / sd_x) / sd_x;
  // Z | X(t) = S is normal; W1 = p_X(S) E[(Z - S')^+ | X(t) = S].
  const double mean_z = m.mean_z + m.cov_xz / m.var_x * (s - m.mean_x);
  const double var_z = m.var_z - m.cov_xz * m.cov_xz / m.var_x;
  const double excess = mean_z - slope;
  if (!(var_z > 0.0)) return density_x * std::max(excess, 0.0);
  const double sd_z = std::sqrt(var_z);
  const double k = excess / sd_z;
  return density_x * (excess * normal_cdf(k) + sd_z * normal_pdf(k));
}

DensityGrid bin_average(const std::function<double(double)>& density,
                        std::span<const double> edges, std::string method, double abs_tol) {
  if (edges.size() < 2) fail(ErrorKind::InvalidArgument, "bin_average: need at least two edges");
  std::vector<double> mids(edges.size() - 1);
  std::vector<double> values(edges.size() - 1);
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double width = edges[i + 1] - edges[i];
    mids[i] = 0.5 * (edges[i] + edges[i + 1]);
    values[i] = adaptive_simpson(density, edges[i], edges[i + 1], abs_tol * width) / width;
  }
  return DensityGrid::make(std::move(mids), std::move(values), std::move(method));
}

}  // namespace fptlab
