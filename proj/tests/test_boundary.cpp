#include <cmath>

#include <gtest/gtest.h>

#include "fptlab/boundary.hpp"
#include "fptlab/error.hpp"

using namespace fptlab;

namespace {

// Literal transcription in long double; fine away from t = 0.
double soglia_direct(double beta, double d, double t) {
  const long double e = std::exp(2.0L * beta * t) - 1.0L;
  const long double inner = 0.25L + 0.25L * std::sqrt(1.0L + 8.0L * std::exp(-4.0L * d * d / e));
  return double(d * std::exp(-(long double)beta * t) * (1.0L - e / (2.0L * d * d) * std::log(inner)));
}

double central(double beta, double d, double t, double h = 1e-5) {
  return (soglia_eval(beta, d, t + h) - soglia_eval(beta, d, t - h)) / (2.0 * h);
}

}  // namespace

TEST(Soglia, MatchesDirectFormula) {
  for (double d : {0.25, 0.5, 1.0})
    for (double t : {0.05, 0.3, 1.0, 3.0, 8.0})
      EXPECT_NEAR(soglia_eval(0.5, d, t), soglia_direct(0.5, d, t), 1e-12) << d << " " << t;
}

TEST(Soglia, LimitAtZero) {
  EXPECT_DOUBLE_EQ(soglia_eval(0.5, 0.25, 0.0), 0.25);
  EXPECT_NEAR(soglia_eval(0.5, 0.25, 1e-10), 0.25, 1e-9);
  // S'(0) = d beta (ln 2 / d^2 - 1) ~ 1.26
  EXPECT_NEAR(soglia_eval(0.5, 0.25, 1e-6), 0.25 + 1e-6 * soglia_derivative(0.5, 0.25, 0.0), 1e-10);
}

TEST(Soglia, DecaysToZero) {
  EXPECT_LT(std::abs(soglia_eval(0.5, 0.5, 20.0)), 1e-3);
  EXPECT_GT(soglia_eval(0.5, 0.5, 20.0), 0.0);
}

TEST(Soglia, FlatterForSmallerD) {
  EXPECT_LT(std::abs(soglia_derivative(0.5, 0.25, 1.0)), std::abs(soglia_derivative(0.5, 0.5, 1.0)));
}

TEST(Soglia, DerivativeMatchesCentralDifference) {
  const double fd = central(0.5, 0.25, 1.0);
  EXPECT_NEAR(soglia_derivative(0.5, 0.25, 1.0), fd, 1e-8 * std::abs(fd));
  for (double t : {0.01, 0.2, 2.0, 7.0}) {
    const double c = central(0.5, 0.5, t, 1e-6);
    EXPECT_NEAR(soglia_derivative(0.5, 0.5, t), c, 1e-6 * std::max(1.0, std::abs(c))) << t;
  }
}

TEST(Soglia, DerivativeFiniteNearZero) {
  const double a = soglia_derivative(0.5, 0.25, 1e-6);
  const double b = soglia_derivative(0.5, 0.25, 1e-4);
  EXPECT_TRUE(std::isfinite(a));
  EXPECT_NEAR(a, b, 1e-3);
  EXPECT_NEAR(soglia_derivative(0.5, 0.25, 0.0), 0.5 * 0.25 * (std::log(2.0) / 0.0625 - 1.0), 1e-12);
}

// The curve first rises above d and then decays; one turning point.
TEST(Soglia, SingleTurningPointThenDecay) {
  for (double d : {0.25, 0.5}) {
    int changes = 0;
    double prev = soglia_derivative(0.5, d, 1e-3);
    double turn = 0.0;
    for (int i = 1; i <= 10000; ++i) {
      const double t = 1e-3 * i;
      const double v = soglia_derivative(0.5, d, t);
      if ((v < 0.0) != (prev < 0.0)) {
        ++changes;
        turn = t;
      }
      prev = v;
    }
    EXPECT_EQ(changes, 1) << d;
    EXPECT_LT(turn, 0.5) << d;
    for (double t = turn + 1e-3; t <= 10.0; t += 0.01) ASSERT_LT(soglia_derivative(0.5, d, t), 0.0) << t;
  }
}

TEST(Soglia, RejectsBadParameters) {
  EXPECT_THROW(soglia_eval(0.5, -1.0, 1.0), Error);
  EXPECT_THROW(soglia_eval(0.0, 0.25, 1.0), Error);
  EXPECT_THROW(soglia_eval(0.5, 0.25, -1.0), Error);
  try {
    BoundarySpec::soglia(0.5, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DomainError);
  }
}

TEST(BoundarySpec, KindsEvaluate) {
  const auto lin = BoundarySpec::linear(1.0, 2.0);
  EXPECT_DOUBLE_EQ(lin(3.0), 7.0);
  EXPECT_DOUBLE_EQ(lin.derivative(3.0), 2.0);
  const auto c = BoundarySpec::constant(1.5);
  EXPECT_DOUBLE_EQ(c(100.0), 1.5);
  EXPECT_DOUBLE_EQ(c.derivative(100.0), 0.0);
  const auto s = BoundarySpec::soglia(0.5, 0.25);
  EXPECT_DOUBLE_EQ(s(1.0), soglia_eval(0.5, 0.25, 1.0));
  EXPECT_TRUE(std::holds_alternative<SogliaBoundary>(s.kind()));
}

TEST(BoundarySpec, CustomChecksDerivative) {
  auto ok = BoundarySpec::custom([](double t) { return std::sin(t); },
                                 [](double t) { return std::cos(t); }, 0.1, 5.0);
  EXPECT_NEAR(ok(1.0), std::sin(1.0), 0.0);
  EXPECT_THROW(BoundarySpec::custom([](double t) { return std::sin(t); },
                                    [](double t) { return 2.0 * std::cos(t); }, 0.1, 5.0),
               Error);
}
