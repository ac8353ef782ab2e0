#include <gtest/gtest.h>

#include <cmath>

#include "carrystate/error.hpp"
#include "carrystate/gen.hpp"
#include "carrystate/theory.hpp"

using namespace cs;

namespace {

// Midpoint rule on a log grid, independent of the closed form.
double rho_quadrature(double r, double gamma, double alpha, double K_f) {
  auto integral = [&](double lo, double hi) {
    const int n = 200000;
    const double a = std::log(lo), b = std::log(hi), h = (b - a) / n;
    double s = 0;
    for (int i = 0; i < n; ++i) {
      const double x = std::exp(a + (i + 0.5) * h);
      s += std::pow(x, -alpha) * x * h;
    }
    return s;
  };
  return integral(gamma, 1.0) / integral(r / K_f, 1.0);
}

TheoryParams params(int d, std::vector<int> bits) {
  TheoryParams p;
  p.d = d;
  p.bits = std::move(bits);
  p.B = 0;
  for (int b : p.bits) p.B += b;
  return p;
}

}  // namespace

TEST(Theory, RhoMatchesQuadrature) {
  for (double alpha : {0.5, 1.0, 3.0, 5.0})
    for (double gamma : {0.3, 0.5, 0.8})
      EXPECT_NEAR(rho_hf(4.0, gamma, alpha, 40.0), rho_quadrature(4.0, gamma, alpha, 40.0), 1e-7)
          << alpha << " " << gamma;
  EXPECT_THROW(rho_hf(40.0, 0.5, 3.0, 40.0), Error);
}

TEST(Theory, EqualSplitAttainsBound) {
  for (int d : {1, 2}) {
    TheoryParams eq = params(d, std::vector<int>(d, 4));
    EXPECT_NEAR(dq_exact(eq) / dq_lower_bound(eq), 1.0, 1e-12);
    if (d == 2) {
      TheoryParams uneq = params(2, {2, 6});
      EXPECT_GT(dq_exact(uneq), dq_lower_bound(uneq));
    }
  }
}

TEST(Theory, ExactValueFrozen) {
  // theta = 0.75, rho = rho_hf(4, 0.5, 3, 40), a^2/3 = 16/3, bits {2, 4}.
  TheoryParams p = params(2, {2, 4});
  const double rho = rho_hf(4.0, 0.5, 3.0, 40.0);
  EXPECT_NEAR(rho, (4.0 - 1.0) / (100.0 - 1.0), 1e-15);
  EXPECT_NEAR(dq_exact(p), 0.75 * 16.0 / 3.0 / (2 * rho) * (1.0 / 16 + 1.0 / 256), 1e-12);
  EXPECT_NEAR(dq_exact(p, 0.5, 0.25), 0.5 * 16.0 / 3.0 / 0.5 * (1.0 / 16 + 1.0 / 256), 1e-12);
}

TEST(Theory, UnitBudgetGivesOne) {
  for (int d : {1, 2})
    for (double r : {2.0, 8.0}) {
      TheoryParams p;
      p.d = d;
      p.r = r;
      p.B = unit_budget(p);
      EXPECT_NEAR(dq_lower_bound(p), 1.0, 1e-12);
    }
}

TEST(Theory, SplitMustMatchBudget) {
  TheoryParams p = params(2, {2, 4});
  p.B = 7;
  EXPECT_THROW(p.validate(), Error);
}

TEST(Theory, LatticeFractionsCount) {
  auto b = build_basis(BasisKind::Fourier, 2, 32);
  const BandSpec band = BandSpec::make(GridSpec{2, 32, 16}, 0.5);
  const auto f = lattice_fractions(*b, band, std::vector<double>(b->size(), 1.0));
  EXPECT_EQ(f.n_expressible, 15u * 15u - 1u);
  EXPECT_EQ(f.n_fine_band, 15u * 15u - 81u);
  EXPECT_NEAR(f.theta, double(f.n_fine_band) / 256.0, 1e-15);
  EXPECT_NEAR(f.rho, double(f.n_fine_band) / f.n_expressible, 1e-15);
}

TEST(Theory, CrossoverAndCurveCrossings) {
  EXPECT_DOUBLE_EQ(crossover_shell(1.0, 16.0), 4.0);
  EXPECT_THROW(crossover_shell(0.0, 1.0), Error);
  const double nan = std::nan("");
  const std::vector<double> a{0, 5, 4, nan, 2, 1, 3};
  const std::vector<double> b{0, 3, 3, 3, 3, 3, 2};
  EXPECT_EQ(curve_crossings(a, b), (std::vector<int>{4, 6}));
}

TEST(Theory, ShellCurveForVorticity) {
  // D for omega is sigma / (kappa^2 S_z) when M = i|k|.
  const std::vector<double> sigma{0, 1, 1, 1};
  const std::vector<double> m2{0, 1, 4, 9};
  const std::vector<double> sz{0, 2, 2, 2};
  const ShellCurve c = distortion_curve("omega", 4, sigma, m2, sz);
  EXPECT_TRUE(std::isnan(c.D[0]));
  EXPECT_NEAR(c.D[2], 1.0 / 8.0, 1e-15);
  EXPECT_NEAR(c.L2[3], std::sqrt(1.0 / 18.0), 1e-15);
}

TEST(Theory, PhaseContourOnUnitLevel) {
  std::vector<double> B, r{2, 4, 8};
  for (int i = 0; i <= 24; ++i) B.push_back(i * 0.5);
  TheoryParams base;
  base.K_f = 64;
  const PhaseDiagram pd = phase_diagram(B, r, GammaRule::Fixed, base, 2);
  ASSERT_EQ(pd.value.size(), 3u);
  for (std::size_t i = 0; i < r.size(); ++i) {
    TheoryParams p = base;
    p.r = r[i];
    EXPECT_NEAR(pd.unit_B[i], unit_budget(p), 1e-12);
  }
  ASSERT_FALSE(pd.contour.empty());
  for (const auto& [cb, cr] : pd.contour) {
    TheoryParams p = base;
    p.r = cr;
    if (cr == 2 || cr == 4 || cr == 8) EXPECT_NEAR(cb, unit_budget(p), 0.1);
  }
  const PhaseDiagram tied = phase_diagram(B, r, GammaRule::Tied, base, 1);
  EXPECT_NEAR(tied.gamma[2], std::sqrt(8.0 / 64.0), 1e-15);
}
