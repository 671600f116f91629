#include <algorithm>
#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "fptlab/error.hpp"
#include "fptlab/simulator.hpp"

using namespace fptlab;

namespace {

double gamma_expcos(double beta, double alpha, double t) {
  return std::exp(-beta * std::abs(t)) * std::cos(alpha * t);
}

StateSpaceFilter expcos_filter(double beta, double alpha, double dt) {
  return build_filter(spectral_factorize(expcos_spectrum(beta, alpha)), dt);
}

struct Moments {
  double mean = 0;
  double var = 0;
};

Moments column(const PathEnsemble& e, std::size_t k) {
  Moments m;
  for (std::size_t i = 0; i < e.paths; ++i) m.mean += e.path(i)[k];
  m.mean /= double(e.paths);
  for (std::size_t i = 0; i < e.paths; ++i) {
    const double d = e.path(i)[k] - m.mean;
    m.var += d * d;
  }
  m.var /= double(e.paths - 1);
  return m;
}

}  // namespace

TEST(Ensemble, StartsExactlyAtX0) {
  const auto f = expcos_filter(0.5, 0.5, 0.01);
  const auto e = simulate_ensemble(f, 0.7, 500, 20, 3);
  for (std::size_t i = 0; i < e.paths; ++i) ASSERT_EQ(e.path(i)[0], 0.7);
}

TEST(Ensemble, ConditionalMean) {
  const double dt = 0.01;
  const auto f = expcos_filter(0.5, 0.5, dt);
  const std::size_t n = 100000;
  const auto e = simulate_ensemble(f, 1.0, n, 100, 11);
  for (std::size_t k : {10u, 50u, 100u}) {
    const double g = gamma_expcos(0.5, 0.5, k * dt);
    const Moments m = column(e, k);
    EXPECT_NEAR(m.mean, g, 3 * std::sqrt((1 - g * g) / n)) << k;
    EXPECT_NEAR(m.var, 1 - g * g, 3 * (1 - g * g) * std::sqrt(2.0 / n)) << k;
  }
}

// Far from the conditioning point the law is stationary: product moments at
// time s and s + lag estimate gamma(lag).
TEST(Ensemble, StationaryAutocovariance) {
  const double dt = 0.01;
  const auto f = expcos_filter(0.5, 0.5, dt);
  const FilterSampler sampler(f, 0.0);
  const std::size_t n = 100000;
  const std::size_t start = 1000;
  const std::size_t lags[] = {10, 50, 100};
  double sum[3] = {0, 0, 0}, sum2[3] = {0, 0, 0}, var = 0;
  for (std::size_t i = 0; i < n; ++i) {
    FilterSampler::Path p(sampler, 5, i);
    double x0 = 0;
    for (std::size_t k = 1; k <= start; ++k) x0 = p.advance();
    var += x0 * x0;
    double x = x0;
    for (std::size_t k = 1, j = 0; k <= 100; ++k) {
      x = p.advance();
      if (k == lags[j]) {
        sum[j] += x0 * x;
        sum2[j] += x0 * x * x0 * x;
        ++j;
      }
    }
  }
  for (int j = 0; j < 3; ++j) {
    const double m = sum[j] / n;
    const double se = std::sqrt((sum2[j] / n - m * m) / n);
    EXPECT_NEAR(m, gamma_expcos(0.5, 0.5, lags[j] * dt), 3 * se) << lags[j];
  }
  EXPECT_NEAR(var / n, 1.0, 3 * std::sqrt(2.0 / n));
}

TEST(Ensemble, DeterministicAcrossWorkers) {
  const auto f = expcos_filter(0.5, 0.25, 0.01);
  const auto a = simulate_ensemble(f, 0.0, 301, 50, 99, 1);
  const auto b = simulate_ensemble(f, 0.0, 301, 50, 99, 4);
  EXPECT_EQ(a.values, b.values);
  const auto c = simulate_ensemble(f, 0.0, 301, 50, 100, 1);
  EXPECT_NE(a.values, c.values);
}

TEST(Ensemble, WienerIncrements) {
  const auto f = wiener_filter(0.01);
  const std::size_t n = 20000;
  const auto e = simulate_ensemble(f, 0.5, n, 100, 1);
  const Moments m = column(e, 100);
  EXPECT_NEAR(m.mean, 0.5, 3 * std::sqrt(1.0 / n));
  EXPECT_NEAR(m.var, 1.0, 3 * std::sqrt(2.0 / n));
}

TEST(Ensemble, CsvLimit) {
  const auto e = simulate_ensemble(wiener_filter(0.1), 0.0, 3, 4, 1);
  std::ostringstream os;
  e.write_csv(os, 100);
  const std::string text = os.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
  EXPECT_THROW(e.write_csv(os, 10), Error);
}

TEST(Oracle, MatchesFilterMoments) {
  const double dt = 0.05;
  const std::size_t steps = 200;
  const std::size_t n = 10000;
  const auto gamma = [](double t) { return gamma_expcos(0.5, 0.5, t); };
  const auto a = simulate_oracle_cholesky(gamma, 0.8, dt, steps, n, 1);
  const auto b = simulate_ensemble(expcos_filter(0.5, 0.5, dt), 0.8, n, steps, 2);
  for (std::size_t k = 1; k <= steps; ++k) {
    const Moments ma = column(a, k);
    const Moments mb = column(b, k);
    const double v = 0.5 * (ma.var + mb.var);
    ASSERT_NEAR(ma.mean, mb.mean, 4 * std::sqrt(2 * v / n)) << k;
    ASSERT_NEAR(ma.var, mb.var, 4 * v * std::sqrt(4.0 / n)) << k;
  }
}

TEST(Oracle, OuVariance) {
  const double dt = 0.05;
  const std::size_t n = 10000;
  const auto a = simulate_oracle_cholesky([](double t) { return std::exp(-0.5 * std::abs(t)); }, 0.0,
                                          dt, 100, n, 4);
  for (std::size_t k : {1u, 10u, 50u, 100u}) {
    const double v = 1 - std::exp(-2 * 0.5 * k * dt);
    EXPECT_NEAR(column(a, k).var, v, 3 * v * std::sqrt(2.0 / n)) << k;
  }
}

TEST(Oracle, SingleStep) {
  const double dt = 0.1;
  const std::size_t n = 40000;
  const auto gamma = [](double t) { return std::exp(-0.5 * std::abs(t)); };
  const auto a = simulate_oracle_cholesky(gamma, 1.0, dt, 1, n, 8);
  const double g = gamma(dt);
  const Moments m = column(a, 1);
  EXPECT_NEAR(m.mean, g, 3 * std::sqrt((1 - g * g) / n));
  EXPECT_NEAR(m.var, 1 - g * g, 3 * (1 - g * g) * std::sqrt(2.0 / n));
  EXPECT_THROW(simulate_oracle_cholesky(gamma, 0.0, dt, 2001, 1, 1), Error);
}
