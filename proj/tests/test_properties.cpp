#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "carrystate/calib.hpp"
#include "carrystate/codec.hpp"
#include "carrystate/rng.hpp"
#include "carrystate/theory.hpp"
#include "test_util.hpp"

using namespace cs;

TEST(Properties, QuantizerErrorWithinHalfCell) {
  Rng rng(1);
  for (int i = 0; i < 20000; ++i) {
    const int b = 1 + i % 16;
    const double a = 0.5 + 4 * rng.uniform();
    const double x = rng.uniform(-a, a);
    const double step = 2 * a / std::ldexp(1.0, b);
    EXPECT_LE(std::abs(dequantize(quantize(x, b, a), b, a) - x), 0.5 * step * (1 + 1e-12));
  }
}

TEST(Properties, QuantizerMonotone) {
  Rng rng(2);
  for (int i = 0; i < 5000; ++i) {
    const double x = rng.uniform(-6, 6), y = rng.uniform(-6, 6);
    if (x <= y) EXPECT_LE(quantize(x, 5, 3.0), quantize(y, 5, 3.0));
  }
}

TEST(Properties, AnalysisIsLinear) {
  for (BasisKind k : {BasisKind::Fourier, BasisKind::CosineNeumann}) {
    auto b = build_basis(k, 2, 12);
    const Field f = test::random_field(2, 12, 1, 3), g = test::random_field(2, 12, 1, 4);
    Field h = f;
    for (std::size_t i = 0; i < h.data.size(); ++i) h.data[i] = 2 * f.data[i] - 0.5 * g.data[i];
    const SpectralField sf = analyze(b, f), sg = analyze(b, g), sh = analyze(b, h);
    for (std::size_t m = 0; m < b->size(); ++m)
      EXPECT_NEAR(std::abs(sh.at(0, m) - (2.0 * sf.at(0, m) - 0.5 * sg.at(0, m))), 0.0, 1e-12);
  }
}

TEST(Properties, ProjectionsIdempotent) {
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const int nf = 16 << (trial % 2), nc = nf / (2 << (trial % 3 == 0));
    auto b = build_basis(trial % 2 ? BasisKind::Fourier : BasisKind::CosineNeumann, 2, nf);
    const BandSpec band = BandSpec::make(GridSpec{2, nf, nc}, 0.25 + 0.5 * rng.uniform());
    const SpectralField s = analyze(b, test::random_field(2, nf, 1, 100 + trial));
    const SpectralField p = project_expressible(s, band);
    EXPECT_LT(test::rel_diff(project_expressible(p, band), p), 1e-15);
    EXPECT_LT(test::rel_diff(project_fine(project_fine(s, band), band), project_fine(s, band)), 1e-15);
  }
}

TEST(Properties, IsotonicFitIsNonincreasingAndMeanPreserving) {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(1 + trial % 17);
    for (double& x : v) x = rng.normal();
    const double sum = std::accumulate(v.begin(), v.end(), 0.0);
    std::vector<double> w = v;
    isotonic_nonincreasing(w);
    for (std::size_t i = 1; i < w.size(); ++i) EXPECT_LE(w[i], w[i - 1] + 1e-12);
    EXPECT_NEAR(std::accumulate(w.begin(), w.end(), 0.0), sum, 1e-10);
    std::vector<double> again = w;
    EXPECT_FALSE(isotonic_nonincreasing(again));
  }
}

TEST(Properties, DistortionBoundHoldsForEverySplit) {
  Rng rng(9);
  for (int trial = 0; trial < 500; ++trial) {
    TheoryParams p;
    p.d = 1 + trial % 2;
    p.bits.clear();
    p.B = 0;
    for (int j = 0; j < p.d; ++j) {
      p.bits.push_back(static_cast<int>(16 * rng.uniform()));
      p.B += p.bits.back();
    }
    p.gamma = 0.2 + 0.6 * rng.uniform();
    p.alpha = 0.5 + 4 * rng.uniform();
    p.r = 2;
    p.K_f = 64;
    EXPECT_GE(dq_exact(p), dq_lower_bound(p) * (1 - 1e-12));
  }
}

TEST(Properties, CodecNeverTouchesOutsideBand) {
  CodecConfig cfg;
  cfg.grid = GridSpec{2, 32, 8};
  cfg.band = BandSpec::make(cfg.grid, 0.5);
  cfg.bits = {4};
  const Field f = test::random_field(2, 32, 1, 11);
  cfg.stats = estimate_stats(cfg, {f});
  const Codec codec(cfg);
  const SpectralField y = codec.decode_spectral(codec.encode_spectral(analyze(codec.fine_basis(), f)));
  EXPECT_EQ(project_outside(y, cfg.band).energy(), 0.0);
}
