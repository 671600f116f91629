#include <cmath>
#include <numbers>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "fptlab/analytic.hpp"
#include "fptlab/error.hpp"
#include "fptlab/quadrature.hpp"

using namespace fptlab;

namespace {

constexpr double kPi = std::numbers::pi;

// Closed form written out with the OU transition density N(0, 1 - e^{-2 beta t}).
double closed_form_direct(double beta, double d, double t) {
  const double e = std::exp(2 * beta * t) - 1;
  const double s = d * std::exp(-beta * t) *
                   (1 - e / (2 * d * d) * std::log(0.25 + 0.25 * std::sqrt(1 + 8 * std::exp(-4 * d * d / e))));
  const double v = 1 - std::exp(-2 * beta * t);
  const double f = std::exp(-s * s / (2 * v)) / std::sqrt(2 * kPi * v);
  const double r = std::sqrt(1 + 8 * std::exp(-4 * d * d / e));
  return 4 * d * beta * std::exp(beta * t) / e * r / (1 + r) * f;
}

struct Peak {
  double t;
  double g;
};

Peak scan_peak(double d) {
  Peak p{0, 0};
  for (int i = 1; i <= 100000; ++i) {
    const double t = 1e-4 * i;
    const double g = closed_form_soglia(0.5, d, t);
    if (g > p.g) p = {t, g};
  }
  return p;
}

}  // namespace

TEST(ClosedForm, MatchesDirectFormula) {
  for (double d : {0.25, 0.5})
    for (double t : {0.05, 0.3, 1.0, 2.5, 6.0}) {
      const double ref = closed_form_direct(0.5, d, t);
      EXPECT_NEAR(closed_form_soglia(0.5, d, t), ref, 1e-12 * std::max(1.0, ref)) << d << " " << t;
    }
  EXPECT_NEAR(closed_form_soglia(0.5, 0.25, 1.0), 0.16897033956799445, 1e-12);
  EXPECT_NEAR(closed_form_soglia(0.5, 0.5, 0.3), 0.6956059431360524, 1e-12);
}

TEST(ClosedForm, ModeShiftsRightAndDropsWithD) {
  const Peak a = scan_peak(0.25);
  const Peak b = scan_peak(0.5);
  EXPECT_GT(b.t, a.t);
  EXPECT_LT(b.g, a.g);
}

TEST(ClosedForm, VanishesAtZero) {
  double prev = closed_form_soglia(0.5, 0.25, 1e-3);
  EXPECT_LT(prev, 1e-3);
  for (double t : {1e-4, 1e-5}) {
    const double g = closed_form_soglia(0.5, 0.25, t);
    EXPECT_LE(g, prev);
    prev = g;
  }
  EXPECT_LT(prev, 1e-100);
  EXPECT_THROW(closed_form_soglia(0.5, 0.25, 0.0), Error);
}

TEST(ClosedForm, TotalMass) {
  const auto g = [](double t) { return t <= 0 ? 0.0 : closed_form_soglia(0.5, 0.25, t); };
  double mass = 0;
  const double cuts[] = {0.0, 0.1, 1.0, 10.0, 50.0};
  for (int i = 0; i < 4; ++i) mass += adaptive_simpson(g, cuts[i], cuts[i + 1], 1e-12);
  EXPECT_GT(mass, 0.0);
  EXPECT_LE(mass, 1.0 + 1e-9);
  // scipy.integrate.quad on the same formula: 0.9999999999958447
  EXPECT_NEAR(mass, 0.9999999999958447, 1e-8);
}

TEST(WienerLinear, ConstantBoundarySureCrossing) {
  const auto g = [](double th) { return th <= 0 ? 0.0 : wiener_linear_fpt(1.0, 0.0, 0.0, 0.0, th); };
  // Integrate in log-time to reach 1e4.
  const auto h = [&](double u) { return g(std::exp(u)) * std::exp(u); };
  const double mass = adaptive_simpson(h, std::log(1e-4), std::log(1e4), 1e-12);
  // P(T <= theta) = erfc(a / sqrt(2 theta)); only 0.992 by 1e4.
  EXPECT_NEAR(mass, std::erfc(1.0 / std::sqrt(2e4)), 1e-8);
  const double far = adaptive_simpson(h, std::log(1e-4), std::log(1e8), 1e-12);
  EXPECT_GE(far, 0.999);
  EXPECT_LE(far, 1.0);
}

TEST(WienerLinear, SlopedBoundaryMass) {
  const auto h = [](double u) {
    const double th = std::exp(u);
    return wiener_linear_fpt(1.0, 1.0, 0.0, 0.0, th) * th;
  };
  const double mass = adaptive_simpson(h, std::log(1e-4), std::log(1e3), 1e-12);
  EXPECT_NEAR(mass, std::exp(-2.0), 1e-4);
}

TEST(WienerLinear, TranslationInvariant) {
  for (double th : {0.2, 1.0, 4.0})
    EXPECT_DOUBLE_EQ(wiener_linear_fpt(2.0, 0.3, 1.0, 0.0, th), wiener_linear_fpt(1.0, 0.3, 0.0, 0.0, th));
  EXPECT_THROW(wiener_linear_fpt(1.0, 0.0, 2.0, 0.0, 1.0), Error);
}

TEST(W1, RejectsNonDifferentiable) {
  const auto p = make_exp_cos_process(0.5, 0.25);
  try {
    w1_upper_bound(p, BoundarySpec::constant(1.0), 0.0, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotMsDifferentiable);
  }
}

// Condition the joint law of (X0, Xt, X't) numerically and integrate
// (z - S') p(S, z) over z > S'.
TEST(W1, MatchesQuadratureOfDefiningIntegral) {
  const double beta = 1.0;
  const auto p = make_stationary_process(matern32_correlation(beta), 0.0, "matern32");
  const auto b = BoundarySpec::constant(1.0);
  const double t = 1.0;
  const double x0 = 0.0;
  const double g = (1 + beta * t) * std::exp(-beta * t);
  const double gp = -beta * beta * t * std::exp(-beta * t);
  Eigen::Matrix3d c;
  c << 1, g, gp,  //
      g, 1, 0,    //
      gp, 0, beta * beta;
  const Eigen::Vector2d cross = c.block<2, 1>(1, 0);
  const Eigen::Vector2d mu = cross * x0;
  const Eigen::Matrix2d cov = c.block<2, 2>(1, 1) - cross * cross.transpose();
  const Eigen::Matrix2d inv = cov.inverse();
  const double norm = 1.0 / (2 * kPi * std::sqrt(cov.determinant()));
  const double s = b(t);
  const double sp = b.derivative(t);
  const auto integrand = [&](double z) {
    const Eigen::Vector2d v(s - mu(0), z - mu(1));
    return (z - sp) * norm * std::exp(-0.5 * v.dot(inv * v));
  };
  const double ref = adaptive_simpson(integrand, sp, sp + 40.0, 1e-13);
  EXPECT_NEAR(w1_upper_bound(p, b, x0, t), ref, 1e-8);
}

TEST(BinAverage, ConstantAndLinear) {
  const std::vector<double> edges{0.0, 0.5, 1.0, 2.0};
  const auto grid = bin_average([](double t) { return 2.0 * t; }, edges, "lin");
  ASSERT_EQ(grid.size(), 3u);
  EXPECT_NEAR(grid.knots[2], 1.5, 1e-15);
  EXPECT_NEAR(grid.values[0], 0.5, 1e-10);
  EXPECT_NEAR(grid.values[2], 3.0, 1e-10);
}
