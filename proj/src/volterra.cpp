#include "fptlab/volterra.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "fptlab/error.hpp"

namespace fptlab {

void SolverConfig::validate() const {
  if (!(step > 0.0)) fail(ErrorKind::InvalidArgument, "solver: step must be > 0");
  if (!(horizon >= 2.0 * step)) fail(ErrorKind::InvalidArgument, "solver: horizon must be >= 2 step");
  const double n = horizon / step;
  if (std::abs(n - std::round(n)) > 1e-9 * n)
    fail(ErrorKind::InvalidArgument,
         fmt::format("solver: horizon / step = {} is not an integer", n));
  if (startup_refinement < 1 || startup_steps < 0)
    fail(ErrorKind::InvalidArgument, "solver: invalid start-up layer");
  if (!(diagonal_tolerance > 0.0)) fail(ErrorKind::InvalidArgument, "solver: tolerance must be > 0");
}

std::size_t SolverConfig::intervals() const {
  return static_cast<std::size_t>(std::llround(horizon / step));
}

std::vector<double> simpson_weights(std::size_t n, double h) {
  std::vector<double> w(n + 1, 0.0);
  if (n == 0) return w;
  const std::size_t even = (n % 2 == 0) ? n : n - 1;
  if (even > 0) {
    for (std::size_t j = 0; j <= even; ++j) {
      const double c = (j == 0 || j == even) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
      w[j] = c * h / 3.0;
    }
  }
  if (even != n) {
    w[n - 1] += 0.5 * h;
    w[n] += 0.5 * h;
  }
  return w;
}

double psi_kernel(const ProcessSpec& spec, const BoundarySpec& boundary, double t, double y,
                  double tau) {
  if (!(t - tau > 1e-12 * std::max(1.0, std::abs(t))))
    fail(ErrorKind::CoincidentTimes,
         fmt::format("psi: tau = {} too close to t = {}; use psi_diagonal", tau, t));
  const CovarianceFactors& f = spec.factors();
  const double h1t = f.h1(t);
  const double h2t = f.h2(t);
  const double h1p = f.h1_prime(t);
  const double h2p = f.h2_prime(t);
  const double h1tau = f.h1(tau);
  const double h2tau = f.h2(tau);
  const double den = h1t * h2tau - h2t * h1tau;
  const double s = boundary(t);
  const double mt = spec.mean.value(t);
  const double bracket = 0.5 * (boundary.derivative(t) - spec.mean.derivative(t)) -
                         0.5 * (s - mt) * (h1p * h2tau - h2p * h1tau) / den -
                         0.5 * (y - spec.mean.value(tau)) * (h2p * h1t - h2t * h1p) / den;
  return bracket * transition_density(spec, y, tau, s, t).value;
}

DiagonalEstimate psi_diagonal(const ProcessSpec& spec, const BoundarySpec& boundary, double t,
                              double h, double tolerance) {
  if (!(t > spec.t0)) fail(ErrorKind::DomainError, "psi_diagonal: t must exceed t0");
  if (!(h > 0.0)) fail(ErrorKind::DomainError, "psi_diagonal: h must be > 0");
  constexpr int kLevels = 5;
  std::array<double, kLevels> row{};
  for (int k = 0; k < kLevels; ++k) {
    const double tau = t - h * std::ldexp(1.0, -k);
    row[k] = psi_kernel(spec, boundary, t, boundary(tau), tau);
  }
  // Eliminate sqrt(delta), delta, delta^{3/2}, delta^2 in turn.
  double previous_best = row[kLevels - 1];
  for (int p = 1; p < kLevels; ++p) {
    const double factor = std::pow(2.0, 0.5 * p);
    previous_best = row[kLevels - p];
    for (int k = 0; k + p < kLevels; ++k)
      row[k] = (factor * row[k + 1] - row[k]) / (factor - 1.0);
  }
  const double value = row[0];
  const double residual = std::abs(value - previous_best);
  if (!(residual <= tolerance * std::max(1.0, std::abs(value))))
    fail(ErrorKind::DiagonalNotConverged,
         fmt::format("psi diagonal at t = {}: residual {:.3g} exceeds tolerance", t, residual));
  return {value, residual};
}

namespace {

struct Layer {
  std::vector<double> t;
  std::vector<double> s;  // boundary at t
  std::vector<double> g;
  std::vector<double> diag;
  std::vector<std::uint8_t> clamped;
};

class Stepper {
 public:
  Stepper(const ProcessSpec& spec, const BoundarySpec& boundary, const SolverConfig& config)
      : spec_(spec), boundary_(boundary), config_(config) {}

  double forcing(double t) const { return -2.0 * psi_kernel(spec_, boundary_, t, spec_.x0, spec_.t0); }

  double kernel(double t, const Layer& layer, std::size_t j) const {
    return psi_kernel(spec_, boundary_, t, layer.s[j], layer.t[j]);
  }

  double diagonal(double t, double h) const {
    if (config_.diagonal == DiagonalStrategy::Neglect) return 0.0;
    // Offsets comparable to t - t0 are outside the asymptotic regime.
    const double probe = std::min(h, (t - spec_.t0) / 64.0);
    return psi_diagonal(spec_, boundary_, t, probe, config_.diagonal_tolerance).value;
  }

  // Finishes g at the current knot given the accumulated explicit part.
  void close(Layer& layer, std::size_t k, double explicit_part, double w_kk, double h,
             std::size_t& clamps) const {
    const double diag = diagonal(layer.t[k], h);
    const double denom = 1.0 - 2.0 * w_kk * diag;
    if (!(std::abs(denom) >= 1e-10))
      fail(ErrorKind::IllConditioned,
           fmt::format("volterra: 1 - 2 w Psi = {:.3g} at t = {}", denom, layer.t[k]));
    double g = explicit_part / denom;
    if (!std::isfinite(g))
      fail(ErrorKind::IllConditioned, fmt::format("volterra: non-finite density at t = {}", layer.t[k]));
    layer.diag[k] = diag;
    if (g < 0.0) {
      g = 0.0;
      layer.clamped[k] = 1;
      ++clamps;
    }
    layer.g[k] = g;
  }

 private:
  const ProcessSpec& spec_;
  const BoundarySpec& boundary_;
  const SolverConfig& config_;
};

Layer make_layer(const BoundarySpec& boundary, double t0, double h, std::size_t n) {
  Layer layer;
  layer.t = uniform_knots(t0, h, n);
  layer.s.resize(n + 1);
  for (std::size_t k = 0; k <= n; ++k) layer.s[k] = boundary(layer.t[k]);
  layer.g.assign(n + 1, 0.0);
  layer.diag.assign(n + 1, 0.0);
  layer.clamped.assign(n + 1, 0);
  return layer;
}

}  // namespace

VolterraSolution solve_fpt_volterra(const ProcessSpec& spec, const BoundarySpec& boundary,
                                    const SolverConfig& config) {
  config.validate();
  if (!(spec.x0 < boundary(spec.t0)))
    fail(ErrorKind::StartsAboveBoundary,
         fmt::format("x0 = {} is not below S(t0) = {}", spec.x0, boundary(spec.t0)));
  const std::size_t n = config.intervals();
  const double h = config.step;
  const Stepper stepper(spec, boundary, config);
  std::size_t clamps = 0;

  const std::size_t startup =
      config.startup_refinement > 1 ? std::min<std::size_t>(config.startup_steps, n) : 0;
  const std::size_t refine = static_cast<std::size_t>(config.startup_refinement);
  const std::size_t nf = startup * refine;
  const double hf = h / double(refine);

  // Refined start-up layer; g(t0) = 0.
  Layer fine = make_layer(boundary, spec.t0, hf, nf);
  for (std::size_t k = 1; k <= nf; ++k) {
    const std::vector<double> w = simpson_weights(k, hf);
    double acc = stepper.forcing(fine.t[k]);
    for (std::size_t j = 1; j < k; ++j)
      if (fine.g[j] != 0.0) acc += 2.0 * w[j] * fine.g[j] * stepper.kernel(fine.t[k], fine, j);
    stepper.close(fine, k, acc, w[k], hf, clamps);
  }
  const std::vector<double> layer_weights = simpson_weights(nf, hf);

  Layer coarse = make_layer(boundary, spec.t0, h, n);
  for (std::size_t k = 1; k <= startup; ++k) {
    coarse.g[k] = fine.g[k * refine];
    coarse.diag[k] = fine.diag[k * refine];
    coarse.clamped[k] = fine.clamped[k * refine];
  }
  for (std::size_t k = startup + 1; k <= n; ++k) {
    const double t = coarse.t[k];
    double acc = stepper.forcing(t);
    for (std::size_t j = 1; j <= nf; ++j)
      if (fine.g[j] != 0.0) acc += 2.0 * layer_weights[j] * fine.g[j] * stepper.kernel(t, fine, j);
    const std::vector<double> w = simpson_weights(k - startup, h);
    for (std::size_t j = startup; j < k; ++j)
      if (coarse.g[j] != 0.0)
        acc += 2.0 * w[j - startup] * coarse.g[j] * stepper.kernel(t, coarse, j);
    stepper.close(coarse, k, acc, w[k - startup], h, clamps);
  }

  VolterraSolution out;
  out.density = DensityGrid::make(coarse.t, coarse.g, "volterra");
  out.psi_diagonal = std::move(coarse.diag);
  out.clamped = std::move(coarse.clamped);
  out.clamp_count = clamps;
  return out;
}

void VolterraSolution::write_diagnostics_csv(std::ostream& os) const {
  os << "t,psi_diag,clamped\n";
  for (std::size_t i = 0; i < density.knots.size(); ++i)
    fmt::print(os, "{:.17g},{:.17g},{}\n", density.knots[i], psi_diagonal[i], int(clamped[i]));
}

}  // namespace fptlab
