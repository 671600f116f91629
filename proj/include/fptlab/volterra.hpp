#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "fptlab/boundary.hpp"
#include "fptlab/density.hpp"
#include "fptlab/process.hpp"

namespace fptlab {

enum class DiagonalStrategy {
  Richardson,  // extrapolate Psi[S(t),t|S(tau),tau] as tau -> t
  Neglect,     // drop the j = k quadrature term
};

struct SolverConfig {
  double step = 0.01;
  double horizon = 10.0;
  DiagonalStrategy diagonal = DiagonalStrategy::Richardson;
  double diagonal_tolerance = 1e-6;
  // The first `startup_steps` steps are solved on a grid refined by
  // `startup_refinement`; 1 disables the refined layer.
  int startup_steps = 20;
  int startup_refinement = 8;

  void validate() const;
  std::size_t intervals() const;
};

/// Psi[S(t), t | y, tau] for tau < t.
double psi_kernel(const ProcessSpec& spec, const BoundarySpec& boundary, double t, double y,
                  double tau);

struct DiagonalEstimate {
  double value;
  double residual;
};

/// lim_{tau -> t} Psi[S(t), t | S(tau), tau] from tau = t - h 2^{-k}, k = 0..4.
/// Near the diagonal Psi expands in powers of sqrt(t - tau).
DiagonalEstimate psi_diagonal(const ProcessSpec& spec, const BoundarySpec& boundary, double t,
                              double h, double tolerance = 1e-6);

struct VolterraSolution {
  DensityGrid density;
  std::vector<double> psi_diagonal;
  std::vector<std::uint8_t> clamped;
  std::size_t clamp_count = 0;

  // Header "t,psi_diag,clamped".
  void write_diagnostics_csv(std::ostream& os) const;
};

/// Solves the second-kind Volterra equation for the FPT density of a
/// Gauss-Markov process from (spec.x0, spec.t0) on t0 + k h, k = 0..T/h.
VolterraSolution solve_fpt_volterra(const ProcessSpec& spec, const BoundarySpec& boundary,
                                    const SolverConfig& config);

/// Composite Simpson weights over n uniform panels of width h; an odd panel
/// count closes with one trapezoid panel.
std::vector<double> simpson_weights(std::size_t n, double h);

}  // namespace fptlab
