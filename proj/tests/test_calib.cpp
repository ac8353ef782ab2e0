#include <gtest/gtest.h>

#include <cmath>

#include "carrystate/calib.hpp"
#include "carrystate/error.hpp"
#include "carrystate/gen.hpp"
#include "test_util.hpp"

using namespace cs;

namespace {

struct Fixture {
  FamilyTemplate t = family_template(Family::IncompNS);
  GridSpec grid{2, 32, 16};
  BandSpec band = BandSpec::make(grid, 0.5);
  std::vector<SpectralField> samples;

  explicit Fixture(int n) {
    auto b = build_basis(t.basis_kind, grid, t.basis_params);
    for (int i = 0; i < n; ++i) samples.push_back(sample_family_spectral(t, SpectrumModel::defaults(2, 32), b, 700 + i));
  }
};

}  // namespace

TEST(Calib, IsotonicFrozen) {
  std::vector<double> v{3, 1, 2};
  EXPECT_TRUE(isotonic_nonincreasing(v));
  EXPECT_EQ(v, (std::vector<double>{3, 1.5, 1.5}));
  std::vector<double> w{1, 2, 3, 0};
  isotonic_nonincreasing(w);
  EXPECT_EQ(w, (std::vector<double>{2, 2, 2, 0}));
  std::vector<double> ok{5, 4, 4, 1};
  EXPECT_FALSE(isotonic_nonincreasing(ok));
}

TEST(Calib, PooledBinsHoldEnoughModes) {
  auto b = build_basis(BasisKind::Fourier, 2, 32);
  const BandSpec band = BandSpec::make(GridSpec{2, 32, 16}, 0.5);
  const auto bins = pool_shells(*b, band, 4);
  std::map<int, int> count;
  for (std::size_t m : expressible_modes(*b, band, false)) ++count[bins[b->shell(m)]];
  EXPECT_EQ(bins[0], -1);
  for (const auto& [bin, c] : count) {
    EXPECT_GE(bin, 0);
    EXPECT_GE(c, 4);
  }
}

TEST(Calib, LosslessGainIsOne) {
  Fixture s(8);
  CalibrationOptions opt;
  opt.bit_grid = {4};
  opt.lossless = true;
  const ChannelCalibration cal = calibrate_family(s.t, s.samples, s.grid, s.band, opt);
  for (const auto& [id, ch] : cal.channels)
    for (int k = 1; k < cal.shells(); ++k) {
      if (!ch.observed[k]) continue;
      EXPECT_NEAR(ch.gain[0][k], 1.0, 1e-9) << id << " shell " << k;
      EXPECT_NEAR(ch.sigma[0][k], 0.0, 1e-18) << id << " shell " << k;
    }
}

TEST(Calib, ResidualFallsWithBits) {
  Fixture s(12);
  CalibrationOptions opt;
  opt.bit_grid = {2, 4, 6, 8};
  const ChannelCalibration cal = calibrate_family(s.t, s.samples, s.grid, s.band, opt);
  for (const auto& [id, ch] : cal.channels)
    for (int k = 1; k < cal.shells(); ++k) {
      if (!ch.observed[k]) continue;
      for (std::size_t bi = 1; bi < opt.bit_grid.size(); ++bi) EXPECT_LE(ch.sigma[bi][k], ch.sigma[bi - 1][k]);
      EXPECT_LT(ch.sigma[3][k], ch.sigma[0][k]);
    }
  EXPECT_EQ(cal.samples, 12u);
  EXPECT_EQ(cal.family, "incomp_ns");
}

TEST(Calib, LatentSpectrumMatchesModel) {
  Fixture s(16);
  CalibrationOptions opt;
  opt.bit_grid = {6};
  const ChannelCalibration cal = calibrate_family(s.t, s.samples, s.grid, s.band, opt);
  auto b = s.samples.front().basis;
  const auto var = mode_variance(SpectrumModel::defaults(2, 32), *b);
  std::vector<double> mean(cal.shells(), 0.0), cnt(cal.shells(), 0.0);
  for (std::size_t m : expressible_modes(*b, s.band, false)) {
    mean[b->shell(m)] += var[m];
    cnt[b->shell(m)] += 1;
  }
  for (int k = 2; k < cal.shells(); ++k) {
    if (cnt[k] == 0) continue;
    EXPECT_NEAR(cal.s_z[k][0] / (mean[k] / cnt[k]), 1.0, 0.5) << "shell " << k;
  }
}

TEST(Calib, TooFewSamplesRejected) {
  Fixture s(4);
  try {
    calibrate_family(s.t, s.samples, s.grid, s.band, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
  }
}

TEST(Calib, PerturbationZeroIsIdentity) {
  Fixture s(8);
  CalibrationOptions opt;
  opt.bit_grid = {4};
  const ChannelCalibration cal = calibrate_family(s.t, s.samples, s.grid, s.band, opt);
  const ChannelCalibration same = perturb_calibration(cal, 0.0, 1);
  EXPECT_EQ(same.channels.at("u").sigma, cal.channels.at("u").sigma);
  const ChannelCalibration moved = perturb_calibration(cal, 0.1, 1);
  EXPECT_NE(moved.channels.at("u").sigma, cal.channels.at("u").sigma);
}
