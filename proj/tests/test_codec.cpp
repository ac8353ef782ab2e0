#include <gtest/gtest.h>

#include <cmath>

#include "carrystate/codec.hpp"
#include "carrystate/error.hpp"
#include "test_util.hpp"

using namespace cs;

namespace {

CodecConfig config(BasisKind k, int d, int nf, int nc, std::vector<int> bits) {
  CodecConfig c;
  c.grid = GridSpec{d, nf, nc};
  c.band = BandSpec::make(c.grid, 0.5);
  c.basis = k;
  c.bits = std::move(bits);
  return c;
}

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Usage;
}

}  // namespace

TEST(Quantizer, MidRiseIndicesFrozen) {
  // a = 1, b = 2: cells of width 0.5 centred at -0.75, -0.25, 0.25, 0.75.
  EXPECT_EQ(quantize(-0.9, 2, 1.0), 0u);
  EXPECT_EQ(quantize(-0.1, 2, 1.0), 1u);
  EXPECT_EQ(quantize(0.1, 2, 1.0), 2u);
  EXPECT_EQ(quantize(0.99, 2, 1.0), 3u);
  EXPECT_EQ(quantize(7.0, 2, 1.0), 3u);
  EXPECT_EQ(quantize(-7.0, 2, 1.0), 0u);
  EXPECT_DOUBLE_EQ(dequantize(2, 2, 1.0), 0.25);
  EXPECT_DOUBLE_EQ(dequantize(0, 2, 1.0), -0.75);
  EXPECT_DOUBLE_EQ(dequantize(quantize(0.3, 8, 4.0), 8, 4.0), 0.296875);
}

TEST(Quantizer, RejectsBadInput) {
  EXPECT_EQ(code_of([] { quantize(NAN, 4, 1.0); }), ErrorCode::NonFiniteInput);
  EXPECT_EQ(code_of([] { quantize(0.0, 0, 1.0); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { quantize(0.0, 4, 0.0); }), ErrorCode::InvalidArgument);
}

TEST(Codec, LosslessIsExpressibleProjection) {
  struct Case {
    BasisKind k;
    int d, nf, nc;
  };
  for (const Case& c : {Case{BasisKind::Fourier, 1, 64, 16}, Case{BasisKind::Fourier, 2, 32, 8},
                        Case{BasisKind::CosineNeumann, 1, 64, 16}, Case{BasisKind::CosineNeumann, 2, 32, 16},
                        Case{BasisKind::Eigen1D, 1, 64, 16}}) {
    CodecConfig cfg = config(c.k, c.d, c.nf, c.nc, {0, 0});
    cfg.lossless = true;
    const Codec codec(cfg);
    const Field f = test::random_field(c.d, c.nf, 2, 40 + c.nf);
    const SpectralField x = analyze(codec.fine_basis(), f);
    SpectralField ref = project_expressible(x, cfg.band);
    const SpectralField y = codec.decode_spectral(codec.encode_spectral(x));
    EXPECT_LT(test::rel_diff(y, ref), 1e-10) << basis_kind_name(c.k) << " d=" << c.d;
  }
}

TEST(Codec, PayloadBitsExact) {
  CodecConfig cfg = config(BasisKind::Fourier, 2, 32, 8, {6, 3});
  const Field f = test::random_field(2, 32, 2, 1);
  cfg.stats = estimate_stats(cfg, {f});
  const EncodedState e = encode(f, cfg);
  EXPECT_EQ(e.payload_bits, (6u + 3u) * 64u);
  EXPECT_EQ(e.payload.size(), (e.payload_bits + 7) / 8);
  EXPECT_EQ(e.side_bits(), 128u);
}

TEST(Codec, ZeroBitsDecodesToSideOnly) {
  CodecConfig cfg = config(BasisKind::CosineNeumann, 1, 64, 16, {0});
  const Field f = test::random_field(1, 64, 1, 2);
  cfg.stats = estimate_stats(cfg, {f});
  const Codec codec(cfg);
  const SpectralField x = analyze(codec.fine_basis(), f);
  const EncodedState e = codec.encode_spectral(x);
  EXPECT_EQ(e.payload_bits, 0u);
  const SpectralField y = codec.decode_spectral(e);
  EXPECT_EQ(y.at(0, 0), x.at(0, 0));
  for (std::size_t m = 1; m < y.modes(); ++m) EXPECT_EQ(y.at(0, m), cplx(0.0));
}

TEST(Codec, ErrorShrinksWithBits) {
  CodecConfig cfg = config(BasisKind::Fourier, 2, 32, 16, {2});
  const Field f = test::random_field(2, 32, 1, 3);
  cfg.stats = estimate_stats(cfg, {f});
  double prev = INFINITY;
  for (int b : {2, 4, 6, 8, 10}) {
    cfg.bits = {b};
    const double e = roundtrip_hf_error(f, cfg);
    EXPECT_LT(e, prev) << b;
    prev = e;
  }
  EXPECT_LT(prev, 0.01);
}

TEST(Codec, ConfigHashChecked) {
  CodecConfig cfg = config(BasisKind::Fourier, 1, 64, 16, {4});
  const Field f = test::random_field(1, 64, 1, 4);
  cfg.stats = estimate_stats(cfg, {f});
  const EncodedState e = encode(f, cfg);
  CodecConfig other = cfg;
  other.clip_a = 3.0;
  EXPECT_EQ(code_of([&] { decode(e, other); }), ErrorCode::ConfigHashMismatch);
}

TEST(Codec, MissingStatsAndBadInput) {
  CodecConfig cfg = config(BasisKind::Fourier, 1, 64, 16, {4});
  Field f = test::random_field(1, 64, 1, 5);
  EXPECT_EQ(code_of([&] { encode(f, cfg); }), ErrorCode::StatsMissing);
  cfg.stats = estimate_stats(cfg, {f});
  f.data[3] = INFINITY;
  EXPECT_EQ(code_of([&] { encode(f, cfg); }), ErrorCode::NonFiniteInput);
  cfg.bits = {4, 4};
  cfg.stats = {};
  EXPECT_EQ(code_of([&] { encode(test::random_field(1, 64, 1, 6), cfg); }), ErrorCode::ShapeMismatch);
}

TEST(Codec, StandardizedSamplesHaveUnitSpread) {
  CodecConfig cfg = config(BasisKind::Fourier, 2, 32, 8, {8});
  std::vector<Field> train;
  for (int i = 0; i < 8; ++i) train.push_back(test::random_field(2, 32, 1, 100 + i));
  cfg.stats = estimate_stats(cfg, train);
  EXPECT_NEAR(cfg.stats.mean[0], 0.0, 1e-12);
  EXPECT_GT(cfg.stats.std[0], 0.0);
}
