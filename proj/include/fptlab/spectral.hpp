#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace fptlab {

/// Real polynomial, coefficients in ascending powers.
using Polynomial = std::vector<double>;

std::complex<double> evaluate(const Polynomial& p, std::complex<double> x);
std::size_t degree(const Polynomial& p);

/// Even rational spectral density Gamma(w) = N(w^2) / D(w^2), coefficients of
/// N and D in ascending powers of w^2.
struct EvenRational {
  Polynomial numerator;
  Polynomial denominator;

  double operator()(double omega) const;
};

/// Gamma(w) = |P(iw)|^2 / |Q(iw)|^2 with Q Hurwitz and P minimum phase.
struct RationalSpectrum {
  Polynomial numerator;    // P(s)
  Polynomial denominator;  // Q(s)

  std::complex<double> transfer(double omega) const;
  double density(double omega) const;
};

// 2 beta (w^2 + alpha^2 + beta^2) / (w^4 + 2 w^2 (beta^2 - alpha^2) + (beta^2 + alpha^2)^2)
double spectral_density_expcos(double beta, double alpha, double omega);
EvenRational expcos_spectrum(double beta, double alpha);
/// Spectrum of (1 + beta|t|) e^{-beta|t|}: 4 beta^3 / (w^2 + beta^2)^2.
EvenRational matern32_spectrum(double beta);

RationalSpectrum spectral_factorize(const EvenRational& gamma);

/// Exact discrete-time state-space realization of X = P(D)/Q(D) Lambda.
struct StateSpaceFilter {
  Eigen::MatrixXd generator;       // companion matrix of monic Q
  Eigen::RowVectorXd observation;  // C, coefficients of P / lead(Q)
  Eigen::MatrixXd stationary_cov;  // Sigma_stat
  Eigen::MatrixXd transition;      // Phi = exp(generator dt)
  Eigen::MatrixXd step_cov;        // Sigma_Delta = Sigma_stat - Phi Sigma_stat Phi^T
  Eigen::MatrixXd step_factor;     // L with L L^T = Sigma_Delta
  double dt = 0.0;
  // Stationary filters start from Sigma_stat conditioned on C v = x0; the
  // Wiener filter starts from the pinned state x0.
  bool stationary = true;
  // Local variance rate of the observed path (0 for differentiable paths).
  double diffusion = 0.0;

  std::size_t dimension() const noexcept { return std::size_t(generator.rows()); }
  double observation_variance() const;
  /// C Phi^k Sigma_stat C^T.
  double autocovariance(std::size_t lag) const;
};

StateSpaceFilter build_filter(const RationalSpectrum& spectrum, double dt);
/// sigma W(t) sampled every dt, started exactly at x0.
StateSpaceFilter wiener_filter(double dt, double sigma = 1.0);

/// Symmetric square root factor with eigenvalues below zero clipped.
Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& m);

}  // namespace fptlab
