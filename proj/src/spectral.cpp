#include "fptlab/spectral.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "fptlab/error.hpp"

namespace fptlab {
namespace {

using cplx = std::complex<double>;

Polynomial trimmed(Polynomial p) {
  while (p.size() > 1 && p.back() == 0.0) p.pop_back();
  return p;
}

// Roots of a real polynomial. Degrees 1 and 2 use closed forms so exact
// double roots stay exact; higher degrees use companion eigenvalues.
std::vector<cplx> roots(const Polynomial& p_in) {
  const Polynomial p = trimmed(p_in);
  const std::size_t n = p.size() - 1;
  if (n == 0) return {};
  if (n == 1) return {cplx(-p[0] / p[1], 0.0)};
  if (n == 2) {
    const double a = p[2];
    const double b = p[1];
    const double c = p[0];
    const double disc = b * b - 4.0 * a * c;
    if (disc >= 0.0) {
      const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
      if (q == 0.0) return {cplx(0.0, 0.0), cplx(0.0, 0.0)};
      return {cplx(q / a, 0.0), cplx(c / q, 0.0)};
    }
    const double im = std::sqrt(-disc) / (2.0 * a);
    const double re = -b / (2.0 * a);
    return {cplx(re, im), cplx(re, -im)};
  }
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(Eigen::Index(n), Eigen::Index(n));
  for (std::size_t i = 1; i < n; ++i) companion(Eigen::Index(i), Eigen::Index(i - 1)) = 1.0;
  for (std::size_t i = 0; i < n; ++i) companion(Eigen::Index(i), Eigen::Index(n - 1)) = -p[i] / p[n];
  Eigen::EigenSolver<Eigen::MatrixXd> es(companion, false);
  std::vector<cplx> out;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) out.push_back(es.eigenvalues()[i]);
  return out;
}

// Monic polynomial with the given roots; conjugate pairs give real coefficients.
Polynomial from_roots(const std::vector<cplx>& rs) {
  std::vector<cplx> c{cplx(1.0, 0.0)};
  for (const cplx& r : rs) {
    std::vector<cplx> next(c.size() + 1, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < c.size(); ++i) {
      next[i + 1] += c[i];
      next[i] -= r * c[i];
    }
    c = std::move(next);
  }
  Polynomial out(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) out[i] = c[i].real();
  return out;
}

// s-plane root with nonpositive real part whose square is -w.
cplx stable_root(cplx w) {
  cplx s = std::sqrt(-w);
  if (s.real() > 0.0) s = -s;
  return s;
}

}  // namespace

std::complex<double> evaluate(const Polynomial& p, std::complex<double> x) {
  std::complex<double> acc(0.0, 0.0);
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
  return acc;
}

std::size_t degree(const Polynomial& p) { return trimmed(p).size() - 1; }

double EvenRational::operator()(double omega) const {
  const double w = omega * omega;
  return evaluate(numerator, w).real() / evaluate(denominator, w).real();
}

std::complex<double> RationalSpectrum::transfer(double omega) const {
  const cplx s(0.0, omega);
  return evaluate(numerator, s) / evaluate(denominator, s);
}

double RationalSpectrum::density(double omega) const { return std::norm(transfer(omega)); }

double spectral_density_expcos(double beta, double alpha, double omega) {
  if (!(beta > 0.0)) fail(ErrorKind::DomainError, "spectral density: beta must be > 0");
  const double w = omega * omega;
  const double a2 = alpha * alpha;
  const double b2 = beta * beta;
  return 2.0 * beta * (w + a2 + b2) / (w * w + 2.0 * w * (b2 - a2) + (b2 + a2) * (b2 + a2));
}

EvenRational expcos_spectrum(double beta, double alpha) {
  if (!(beta > 0.0)) fail(ErrorKind::DomainError, "spectral density: beta must be > 0");
  const double a2 = alpha * alpha;
  const double b2 = beta * beta;
  return {{2.0 * beta * (a2 + b2), 2.0 * beta}, {(b2 + a2) * (b2 + a2), 2.0 * (b2 - a2), 1.0}};
}

EvenRational matern32_spectrum(double beta) {
  if (!(beta > 0.0)) fail(ErrorKind::DomainError, "spectral density: beta must be > 0");
  const double b2 = beta * beta;
  return {{4.0 * beta * b2}, {b2 * b2, 2.0 * b2, 1.0}};
}

RationalSpectrum spectral_factorize(const EvenRational& gamma) {
  const Polynomial num = trimmed(gamma.numerator);
  const Polynomial den = trimmed(gamma.denominator);
  if (den.size() < 2 || num.size() >= den.size())
    fail(ErrorKind::DegreeMismatch,
         fmt::format("spectral factorization needs deg N < deg D in w^2 (got {} and {})",
                     num.size() - 1, den.size() - 1));
  const double gain2 = num.back() / den.back();
  if (!(gain2 > 0.0)) fail(ErrorKind::NotPositive, "spectral density is negative for large w");
  constexpr int kProbes = 4001;
  for (int i = 0; i < kProbes; ++i) {
    const double omega = 100.0 * double(i) / (kProbes - 1);
    const double value = gamma(omega);
    if (!(value > 0.0) || !std::isfinite(value))
      fail(ErrorKind::NotPositive, fmt::format("Gamma({}) = {} is not positive", omega, value));
  }

  std::vector<cplx> num_w = roots(num);
  std::vector<cplx> den_w = roots(den);
  // Cancel common factors (e.g. alpha = 0 in the exp-cos family).
  for (auto it = num_w.begin(); it != num_w.end();) {
    const auto match = std::find_if(den_w.begin(), den_w.end(), [&](const cplx& d) {
      return std::abs(d - *it) <= 1e-12 * std::max(std::abs(d), std::abs(*it));
    });
    if (match != den_w.end()) {
      den_w.erase(match);
      it = num_w.erase(it);
    } else {
      ++it;
    }
  }

  std::vector<cplx> poles;
  for (const cplx& w : den_w) poles.push_back(stable_root(w));
  std::vector<cplx> zeros;
  for (const cplx& w : num_w) zeros.push_back(stable_root(w));

  RationalSpectrum out;
  out.denominator = from_roots(poles);
  out.numerator = from_roots(zeros);
  const double gain = std::sqrt(gain2);
  for (double& c : out.numerator) c *= gain;
  return out;
}

double StateSpaceFilter::observation_variance() const {
  return (observation * stationary_cov * observation.transpose())(0, 0);
}

double StateSpaceFilter::autocovariance(std::size_t lag) const {
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(generator.rows(), generator.cols());
  for (std::size_t k = 0; k < lag; ++k) power = transition * power;
  return (observation * power * stationary_cov * observation.transpose())(0, 0);
}

Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& m) {
  const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  Eigen::VectorXd lambda = es.eigenvalues();
  const double scale = std::max(1.0, lambda.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (lambda[i] < -1e-12 * scale)
      fail(ErrorKind::NotPositiveDefinite,
           fmt::format("covariance has eigenvalue {:.3g} < 0", lambda[i]));
    lambda[i] = std::sqrt(std::max(lambda[i], 0.0));
  }
  return es.eigenvectors() * lambda.asDiagonal();
}

StateSpaceFilter build_filter(const RationalSpectrum& spectrum, double dt) {
  if (!(dt > 0.0)) fail(ErrorKind::InvalidArgument, "build_filter: dt must be > 0");
  const Polynomial q = trimmed(spectrum.denominator);
  const Polynomial p = trimmed(spectrum.numerator);
  const std::size_t n = q.size() - 1;
  if (n == 0 || p.size() - 1 >= n)
    fail(ErrorKind::DegreeMismatch, "build_filter: need deg P < deg Q");
  for (const cplx& r : roots(q))
    if (!(r.real() < 0.0))
      fail(ErrorKind::NonHurwitz,
           fmt::format("denominator root {}{:+}i is not in the open left half-plane", r.real(),
                       r.imag()));

  const auto dim = Eigen::Index(n);
  StateSpaceFilter f;
  f.dt = dt;
  f.generator = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index i = 0; i + 1 < dim; ++i) f.generator(i, i + 1) = 1.0;
  for (Eigen::Index j = 0; j < dim; ++j) f.generator(dim - 1, j) = -q[std::size_t(j)] / q[n];
  f.observation = Eigen::RowVectorXd::Zero(dim);
  for (std::size_t j = 0; j < p.size(); ++j) f.observation(Eigen::Index(j)) = p[j] / q[n];

  // A S + S A^T + B B^T = 0 with B = e_n, solved as a Kronecker system.
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(dim, dim);
  Eigen::MatrixXd kron(dim * dim, dim * dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j)
      kron.block(i * dim, j * dim, dim, dim) = f.generator(i, j) * eye + (i == j ? f.generator : Eigen::MatrixXd::Zero(dim, dim));
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim * dim);
  rhs(dim * dim - 1) = -1.0;
  const Eigen::VectorXd vec = kron.fullPivLu().solve(rhs);
  f.stationary_cov = Eigen::Map<const Eigen::MatrixXd>(vec.data(), dim, dim);
  f.stationary_cov = 0.5 * (f.stationary_cov + f.stationary_cov.transpose()).eval();

  f.transition = (f.generator * dt).exp();
  f.step_cov = f.stationary_cov - f.transition * f.stationary_cov * f.transition.transpose();
  f.step_cov = 0.5 * (f.step_cov + f.step_cov.transpose()).eval();
  f.step_factor = psd_factor(f.step_cov);
  f.stationary = true;
  f.diffusion = (p.size() == n) ? std::pow(p[n - 1] / q[n], 2) : 0.0;
  return f;
}

StateSpaceFilter wiener_filter(double dt, double sigma) {
  if (!(dt > 0.0)) fail(ErrorKind::InvalidArgument, "wiener_filter: dt must be > 0");
  if (sigma == 0.0) fail(ErrorKind::InvalidArgument, "wiener_filter: sigma must be nonzero");
  StateSpaceFilter f;
  f.dt = dt;
  f.generator = Eigen::MatrixXd::Zero(1, 1);
  f.observation = Eigen::RowVectorXd::Ones(1);
  f.stationary_cov = Eigen::MatrixXd::Zero(1, 1);
  f.transition = Eigen::MatrixXd::Ones(1, 1);
  f.step_cov = Eigen::MatrixXd::Constant(1, 1, sigma * sigma * dt);
  f.step_factor = Eigen::MatrixXd::Constant(1, 1, std::abs(sigma) * std::sqrt(dt));
  f.stationary = false;
  f.diffusion = sigma * sigma;
  return f;
}

}  // namespace fptlab
