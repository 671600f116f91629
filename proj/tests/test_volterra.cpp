#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "fptlab/analytic.hpp"
#include "fptlab/error.hpp"
#include "fptlab/volterra.hpp"

using namespace fptlab;

namespace {

double normal(double x, double m, double v) {
  return std::exp(-(x - m) * (x - m) / (2 * v)) / std::sqrt(2 * std::numbers::pi * v);
}

// OU kernel after simplifying the factor algebra by hand:
// Psi = f/2 [S' - beta (S cosh(beta dt) - y) / sinh(beta dt)].
double ou_psi(double beta, const BoundarySpec& b, double t, double y, double tau) {
  const double dl = t - tau;
  const double s = b(t);
  const double f = normal(s, y * std::exp(-beta * dl), 1 - std::exp(-2 * beta * dl));
  return 0.5 * f * (b.derivative(t) - beta * (s * std::cosh(beta * dl) - y) / std::sinh(beta * dl));
}

double sup_error(const VolterraSolution& sol, double beta, double d) {
  double e = 0;
  for (std::size_t i = 0; i < sol.density.size(); ++i) {
    const double t = sol.density.knots[i];
    const double ref = t > 0 ? closed_form_soglia(beta, d, t) : 0.0;
    e = std::max(e, std::abs(sol.density.values[i] - ref));
  }
  return e;
}

}  // namespace

TEST(Psi, WienerConstantBoundary) {
  const auto w = make_wiener_family(0.0, 0.0, 1.0, 0.0);
  const auto b = BoundarySpec::constant(1.0);
  for (double y : {-0.5, 0.2, 0.9})
    for (double tau : {0.0, 0.4}) {
      const double t = 1.3;
      const double f = normal(1.0, y, t - tau);
      const double ref = -(1.0 - y) / (2 * (t - tau)) * f;
      const double got = psi_kernel(w, b, t, y, tau);
      EXPECT_NEAR(got, ref, 1e-14);
      EXPECT_LT(got, 0.0);
    }
}

TEST(Psi, OuMatchesSimplifiedForm) {
  const auto ou = make_exp_cos_process(0.5, 0.0);
  const auto b = BoundarySpec::soglia(0.5, 0.25);
  for (double t : {0.5, 1.0, 4.0})
    for (double tau : {0.0, 0.1, 0.45}) {
      const double ref = ou_psi(0.5, b, t, b(tau), tau);
      EXPECT_NEAR(psi_kernel(ou, b, t, b(tau), tau), ref, 1e-12 * std::max(1.0, std::abs(ref)));
    }
  const double ref = ou_psi(0.5, b, 2.0, -0.3, 1.0);
  EXPECT_NEAR(psi_kernel(ou, b, 2.0, -0.3, 1.0), ref, 1e-13);
}

TEST(Psi, NonSingularNearDiagonal) {
  const auto ou = make_exp_cos_process(0.5, 0.0);
  const auto b = BoundarySpec::soglia(0.5, 0.25);
  const double t = 1.0;
  const double a = psi_kernel(ou, b, t, b(t - 1e-2), t - 1e-2);
  const double c = psi_kernel(ou, b, t, b(t - 1e-3), t - 1e-3);
  const double e = psi_kernel(ou, b, t, b(t - 1e-4), t - 1e-4);
  EXPECT_LT(std::abs(a - c), 1e-4);
  EXPECT_LT(std::abs(c - e), 1e-4);
  EXPECT_THROW(psi_kernel(ou, b, t, b(t), t), Error);
}

TEST(PsiDiagonal, WienerConstantIsZero) {
  const auto w = make_wiener_family(0.0, 0.0, 1.0, 0.0);
  const auto est = psi_diagonal(w, BoundarySpec::constant(1.0), 2.0, 0.01);
  EXPECT_LT(std::abs(est.value), 1e-6);
}

TEST(PsiDiagonal, OuSogliaBaseline) {
  const auto ou = make_exp_cos_process(0.5, 0.0);
  const auto b = BoundarySpec::soglia(0.5, 0.25);
  const auto est = psi_diagonal(ou, b, 1.0, 0.01);
  // Baseline from this implementation: the kernel vanishes on this boundary.
  EXPECT_LT(std::abs(est.value), 1e-8);
  EXPECT_LT(est.residual, 1e-8);
  for (double t : {0.1, 0.01}) {
    const auto near = psi_diagonal(ou, b, t, t / 64);
    EXPECT_TRUE(std::isfinite(near.value));
  }
}

TEST(PsiDiagonal, OuConstantBoundaryMatchesBruteForce) {
  const auto ou = make_exp_cos_process(0.5, 0.0);
  const auto b = BoundarySpec::constant(0.4);
  const double t = 2.0;
  const double lim = ou_psi(0.5, b, t, b(t - 1e-9), t - 1e-9);
  const auto est = psi_diagonal(ou, b, t, 0.01);
  EXPECT_NEAR(est.value, lim, 1e-5);
}

TEST(Simpson, ExactForCubics) {
  for (std::size_t n : {2u, 4u, 10u}) {
    const double h = 0.3;
    const auto w = simpson_weights(n, h);
    ASSERT_EQ(w.size(), n + 1);
    double s = 0;
    for (std::size_t i = 0; i <= n; ++i) {
      const double x = h * i;
      s += w[i] * (x * x * x - 2 * x);
    }
    const double L = h * n;
    EXPECT_NEAR(s, L * L * L * L / 4 - L * L, 1e-12);
  }
  const auto odd = simpson_weights(3, 1.0);
  double tot = 0;
  for (double v : odd) tot += v;
  EXPECT_NEAR(tot, 3.0, 1e-14);
}

TEST(Solver, MatchesClosedForm) {
  const auto ou = make_exp_cos_process(0.5, 0.0);
  for (double d : {0.25, 0.5}) {
    const auto sol = solve_fpt_volterra(ou, BoundarySpec::soglia(0.5, d), SolverConfig{});
    EXPECT_EQ(sol.density.size(), 1001u);
    EXPECT_LT(sup_error(sol, 0.5, d), 1e-3) << d;
    EXPECT_EQ(sol.clamp_count, 0u);
  }
}

TEST(Solver, WienerConstantBoundary) {
  const auto w = make_wiener_family(0.0, 0.0, 1.0, 0.0);
  const auto sol = solve_fpt_volterra(w, BoundarySpec::linear(1.0, 0.0), SolverConfig{});
  double e = 0;
  for (std::size_t i = 1; i < sol.density.size(); ++i) {
    const double t = sol.density.knots[i];
    e = std::max(e, std::abs(sol.density.values[i] - wiener_linear_fpt(1.0, 0.0, 0.0, 0.0, t)));
  }
  EXPECT_LT(e, 1e-3);
}

TEST(Solver, SecondOrderInStep) {
  const auto ou = make_exp_cos_process(0.5, 0.0);
  const auto b = BoundarySpec::soglia(0.5, 0.25);
  SolverConfig coarse;
  coarse.step = 0.02;
  coarse.startup_refinement = 1;
  SolverConfig fine = coarse;
  fine.step = 0.01;
  const double ec = sup_error(solve_fpt_volterra(ou, b, coarse), 0.5, 0.25);
  const double ef = sup_error(solve_fpt_volterra(ou, b, fine), 0.5, 0.25);
  EXPECT_GE(ec / ef, 4.0) << ec << " " << ef;
}

TEST(Solver, NeglectStrategyRuns) {
  const auto ou = make_exp_cos_process(0.5, 0.0);
  SolverConfig c;
  c.diagonal = DiagonalStrategy::Neglect;
  c.horizon = 2.0;
  const auto sol = solve_fpt_volterra(ou, BoundarySpec::soglia(0.5, 0.5), c);
  EXPECT_LT(sup_error(sol, 0.5, 0.5), 1e-3);
}

TEST(Solver, RejectsBadConfig) {
  const auto ou = make_exp_cos_process(0.5, 0.0);
  SolverConfig c;
  c.step = -1;
  EXPECT_THROW(solve_fpt_volterra(ou, BoundarySpec::soglia(0.5, 0.5), c), Error);
  const auto above = make_exp_cos_process(0.5, 0.0, 1.0);
  try {
    solve_fpt_volterra(above, BoundarySpec::soglia(0.5, 0.5), SolverConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::StartsAboveBoundary);
  }
}

TEST(Solver, DiagnosticsCsv) {
  const auto ou = make_exp_cos_process(0.5, 0.0);
  SolverConfig c;
  c.horizon = 0.5;
  const auto sol = solve_fpt_volterra(ou, BoundarySpec::soglia(0.5, 0.5), c);
  std::ostringstream os;
  sol.write_diagnostics_csv(os);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "t,psi_diag,clamped");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  EXPECT_EQ(rows, 51);
}
