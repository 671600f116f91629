#pragma once

#include <functional>
#include <span>

#include "fptlab/boundary.hpp"
#include "fptlab/density.hpp"
#include "fptlab/process.hpp"

namespace fptlab {

/// FPT density of the zero-mean unit-variance OU process (gamma = e^{-beta|t|})
/// started at x0 = 0 through the soglia boundary with the same beta.
double closed_form_soglia(double beta, double d, double t);

/// Standard Wiener FPT density through a + b theta from (x0, theta0).
double wiener_linear_fpt(double a, double b, double x0, double theta0, double theta);

/// Moments of (X(t), X'(t)) given X(0) = x0 for a unit-variance stationary
/// mean-square differentiable process.
struct ConditionalPairMoments {
  double mean_x;
  double var_x;
  double mean_z;
  double var_z;
  double cov_xz;
};

ConditionalPairMoments w1_conditional_moments(const ProcessSpec& spec, double x0, double t);

/// First term W1 of the alternating series for the FPT density; an upper
/// bound on g(t) for mean-square differentiable stationary processes.
double w1_upper_bound(const ProcessSpec& spec, const BoundarySpec& boundary, double x0,
                      double t);

/// Average of `density` over each [edges[i], edges[i+1]], placed at the bin
/// midpoints. This is the quantity a histogram with these edges estimates.
DensityGrid bin_average(const std::function<double(double)>& density,
                        std::span<const double> edges, std::string method,
                        double abs_tol = 1e-10);

}  // namespace fptlab
