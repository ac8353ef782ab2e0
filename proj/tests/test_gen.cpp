#include <gtest/gtest.h>

#include <cmath>

#include "carrystate/error.hpp"
#include "carrystate/gen.hpp"
#include "test_util.hpp"

using namespace cs;

TEST(Gen, ModeVarianceNormalized) {
  for (auto [kind, d, n] : {std::tuple{BasisKind::Fourier, 2, 32}, std::tuple{BasisKind::CosineNeumann, 2, 16},
                            std::tuple{BasisKind::Fourier, 1, 128}, std::tuple{BasisKind::Eigen1D, 1, 64}}) {
    auto b = build_basis(kind, d, n);
    SpectrumModel model = SpectrumModel::defaults(d, n);
    model.amplitude = 2.5;
    const auto var = mode_variance(model, *b);
    double s = 0;
    for (double v : var) s += v;
    EXPECT_NEAR(s, 2.5 * b->size(), 1e-9 * s);
    EXPECT_EQ(var[0], 0.0);
    for (std::size_t m = 0; m < b->size(); ++m)
      if (b->is_nyquist(m)) EXPECT_EQ(var[m], 0.0);
  }
}

TEST(Gen, VelocityIsDivergenceFree) {
  auto b = build_basis(BasisKind::Fourier, 2, 32);
  const SpectralField u = sample_divfree_spectral(SpectrumModel::defaults(2, 32), b, 17);
  double div = 0, mag = 0;
  for (std::size_t m = 0; m < b->size(); ++m) {
    const auto k = b->wavevector(m);
    div += std::norm(k[0] * u.at(0, m) + k[1] * u.at(1, m));
    mag += std::norm(u.at(0, m)) + std::norm(u.at(1, m));
  }
  EXPECT_LT(div, 1e-24 * mag);
  const Field f = synthesize(u);
  for (double v : f.data) EXPECT_TRUE(std::isfinite(v));
}

TEST(Gen, SeedDeterminism) {
  const FamilyTemplate t = family_template(Family::DiffReact);
  auto b = build_basis(t.basis_kind, 2, 16);
  const auto m = SpectrumModel::defaults(2, 16);
  const Field a = sample_family_instance(t, m, b, 5), c = sample_family_instance(t, m, b, 5);
  const Field d = sample_family_instance(t, m, b, 6);
  EXPECT_EQ(a.data, c.data);
  EXPECT_NE(a.data, d.data);
}

TEST(Gen, EnsembleSpectrumFollowsSlope) {
  // Mean shell energy above the plateau should fall like kappa^-alpha.
  auto b = build_basis(BasisKind::Fourier, 2, 64);
  SpectrumModel model = SpectrumModel::defaults(2, 64);
  model.alpha = 3.0;
  std::vector<double> e(b->max_shell() + 1, 0.0);
  const int n = 48;
  for (int s = 0; s < n; ++s) {
    const auto sh = shell_energies(sample_scalar_spectral(model, b, 1000 + s));
    for (std::size_t k = 0; k < sh.size() && k < e.size(); ++k) e[k] += sh[k] / n;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (int k = 6; k <= 24; ++k) {
    const double x = std::log(k), y = std::log(e[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++cnt;
  }
  const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  EXPECT_NEAR(slope, -3.0, 0.25);
}

TEST(Gen, DiffReactImbalance) {
  const FamilyTemplate t = family_template(Family::DiffReact);
  auto b = build_basis(t.basis_kind, 2, 32);
  FamilyGenParams p;
  p.imbalance = 0.2;
  double es = 0, ed = 0;
  for (int s = 0; s < 32; ++s) {
    const LatentState z = to_latent(t, sample_family_spectral(t, SpectrumModel::defaults(2, 32), b, 50 + s, p));
    for (std::size_t m = 1; m < b->size(); ++m) {
      es += std::norm(z.at(m, 0));
      ed += std::norm(z.at(m, 1));
    }
  }
  EXPECT_NEAR(ed / (es + ed), 0.2, 0.02);
}

TEST(Gen, RejectsBadShares) {
  FamilyGenParams p;
  p.compressive = 0.9;
  try {
    p.validate();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
  }
}
