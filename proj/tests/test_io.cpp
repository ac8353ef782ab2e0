#include <gtest/gtest.h>
#include <hdf5.h>

#include <cmath>
#include <filesystem>

#include "carrystate/codec.hpp"
#include "carrystate/error.hpp"
#include "carrystate/gen.hpp"
#include "carrystate/io.hpp"
#include "carrystate/svg.hpp"
#include "test_util.hpp"

using namespace cs;
namespace fs = std::filesystem;

namespace {

fs::path tmp(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "carrystate_test_io";
  fs::create_directories(dir);
  return dir / name;
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

// Fixture layout (sample, t, x, y, c) with value = s*1000 + t*100 + x + y/100 + c/10.
void write_fixture(const std::string& path, hsize_t n) {
  const hsize_t dims[5] = {2, 3, n, n, 2};
  std::vector<double> v(2 * 3 * n * n * 2);
  std::size_t i = 0;
  for (hsize_t s = 0; s < 2; ++s)
    for (hsize_t t = 0; t < 3; ++t)
      for (hsize_t x = 0; x < n; ++x)
        for (hsize_t y = 0; y < n; ++y)
          for (hsize_t c = 0; c < 2; ++c) v[i++] = s * 1000.0 + t * 100.0 + x + y / 100.0 + c / 10.0;
  const hid_t file = H5Fcreate(path.c_str(), H5F_ACC_TRUNC, H5P_DEFAULT, H5P_DEFAULT);
  const hid_t space = H5Screate_simple(5, dims, nullptr);
  const hid_t ds = H5Dcreate2(file, "tensor", H5T_IEEE_F32LE, space, H5P_DEFAULT, H5P_DEFAULT, H5P_DEFAULT);
  H5Dwrite(ds, H5T_NATIVE_DOUBLE, H5S_ALL, H5S_ALL, H5P_DEFAULT, v.data());
  H5Dclose(ds);
  H5Sclose(space);
  H5Fclose(file);
}

void write_velocity_fixture(const std::string& path, const Field& u) {
  const hsize_t n = static_cast<hsize_t>(u.n);
  const hsize_t dims[4] = {1, n, n, 2};
  std::vector<double> v(n * n * 2);
  for (hsize_t p = 0; p < n * n; ++p)
    for (int c = 0; c < 2; ++c) v[p * 2 + c] = u.data[c * n * n + p];
  const hid_t file = H5Fcreate(path.c_str(), H5F_ACC_TRUNC, H5P_DEFAULT, H5P_DEFAULT);
  const hid_t space = H5Screate_simple(4, dims, nullptr);
  const hid_t ds = H5Dcreate2(file, "velocity", H5T_IEEE_F64LE, space, H5P_DEFAULT, H5P_DEFAULT, H5P_DEFAULT);
  H5Dwrite(ds, H5T_NATIVE_DOUBLE, H5S_ALL, H5S_ALL, H5P_DEFAULT, v.data());
  H5Dclose(ds);
  H5Sclose(space);
  H5Fclose(file);
}

}  // namespace

TEST(FieldFile, RoundTripBitIdentical) {
  for (int d : {1, 2}) {
    const Field f = test::random_field(d, 12, 3, 60 + d);
    const auto path = tmp("f" + std::to_string(d) + ".fld").string();
    write_field(path, f);
    const Field g = read_field(path);
    EXPECT_EQ(g.data, f.data);
    EXPECT_EQ(g.d, d);
    EXPECT_EQ(g.channels, 3);
    EXPECT_EQ(serialize_field(g), read_bytes(path));
    EXPECT_EQ(read_bytes(path).size(), 4 + 2 + 1 + 4u * d + 4 + 1 + 8u * 3 * (d == 1 ? 12 : 144));
  }
}

TEST(FieldFile, ErrorCodesDistinct) {
  const auto bytes = serialize_field(test::random_field(1, 8, 1, 1));
  auto magic = bytes;
  magic[0] = 'X';
  EXPECT_EQ(code_of([&] { deserialize_field(magic); }), ErrorCode::MagicMismatch);
  auto version = bytes;
  version[4] = 9;
  EXPECT_EQ(code_of([&] { deserialize_field(version); }), ErrorCode::VersionMismatch);
  auto cut = bytes;
  cut.resize(cut.size() - 3);
  EXPECT_EQ(code_of([&] { deserialize_field(cut); }), ErrorCode::TruncatedPayload);
  auto extra = bytes;
  extra.push_back(0);
  EXPECT_EQ(code_of([&] { deserialize_field(extra); }), ErrorCode::SchemaViolation);
}

TEST(EncodedFile, RoundTripAndBudget) {
  CodecConfig cfg;
  cfg.grid = GridSpec{2, 32, 16};
  cfg.band = BandSpec::make(cfg.grid, 0.5);
  cfg.bits = {5, 3};
  const Field f = test::random_field(2, 32, 2, 70);
  cfg.stats = estimate_stats(cfg, {f});
  for (bool lossless : {false, true}) {
    cfg.lossless = lossless;
    const EncodedState e = encode(f, cfg);
    const auto bytes = serialize_encoded(e);
    const EncodedState g = deserialize_encoded(bytes);
    EXPECT_EQ(serialize_encoded(g), bytes);
    EXPECT_EQ(g.payload_bits, lossless ? 0u : (5u + 3u) * 256u);
    EXPECT_EQ(decode(g, cfg).data, decode(e, cfg).data);
    auto cut = bytes;
    cut.resize(cut.size() / 2);
    EXPECT_EQ(code_of([&] { deserialize_encoded(cut); }), ErrorCode::TruncatedPayload);
  }
}

TEST(CalibrationFile, RoundTripAndSchema) {
  const FamilyTemplate t = family_template(Family::Advection);
  const GridSpec grid{1, 64, 16};
  const BandSpec band = BandSpec::make(grid, 0.5);
  auto b = build_basis(t.basis_kind, grid, t.basis_params);
  std::vector<SpectralField> s;
  for (int i = 0; i < 8; ++i) s.push_back(sample_family_spectral(t, SpectrumModel::defaults(1, 64), b, 80 + i));
  CalibrationOptions opt;
  opt.bit_grid = {2, 4};
  ChannelCalibration cal = calibrate_family(t, s, grid, band, opt);
  cal.seed = 42;
  cal.provenance = "synthetic";
  const std::string text = calibration_to_json(cal);
  const ChannelCalibration back = calibration_from_json(text);
  EXPECT_EQ(calibration_to_json(back), text);
  EXPECT_EQ(back.s_z, cal.s_z);
  EXPECT_EQ(back.channels.at("u").sigma, cal.channels.at("u").sigma);
  EXPECT_EQ(back.seed, 42u);

  std::string broken = text;
  broken.replace(broken.find("\"bit_grid\""), 10, "\"bit_grix\"");
  EXPECT_EQ(code_of([&] { calibration_from_json(broken); }), ErrorCode::SchemaViolation);
  std::string fmt = text;
  fmt.replace(fmt.find("CAL1"), 4, "CAL9");
  EXPECT_EQ(code_of([&] { calibration_from_json(fmt); }), ErrorCode::MagicMismatch);
  EXPECT_NE(code_of([&] { calibration_from_json("{not json"); }), ErrorCode::Usage);
}

TEST(Ingest, FixtureFrameMatches) {
  const auto path = tmp("fixture.h5").string();
  write_fixture(path, 4);
  IngestOptions opt;
  opt.d = 2;
  opt.channel_axis = true;
  opt.sample = 1;
  opt.frame = 2;
  const Field f = ingest_pdebench(path, opt);
  ASSERT_EQ(f.channels, 2);
  ASSERT_EQ(f.n, 4);
  for (int c = 0; c < 2; ++c)
    for (int x = 0; x < 4; ++x)
      for (int y = 0; y < 4; ++y)
        EXPECT_NEAR(f.data[c * 16 + x * 4 + y], 1200.0 + x + y / 100.0 + c / 10.0, 1e-4);
  EXPECT_EQ(ingest_pdebench_frames(path, opt, 1).size(), 1u);
}

TEST(Ingest, ErrorCodes) {
  const auto path = tmp("fixture_err.h5").string();
  write_fixture(path, 4);
  IngestOptions opt;
  opt.d = 2;
  opt.channel_axis = true;
  opt.key = "density";
  EXPECT_EQ(code_of([&] { ingest_pdebench(path, opt); }), ErrorCode::MissingDataset);
  opt.key = "tensor";
  opt.channel_axis = false;
  EXPECT_EQ(code_of([&] { ingest_pdebench(path, opt); }), ErrorCode::RankMismatch);
  opt.channel_axis = true;
  opt.frame = 3;
  EXPECT_EQ(code_of([&] { ingest_pdebench(path, opt); }), ErrorCode::IndexOutOfRange);
}

TEST(Ingest, VelocityDivergenceResidualReported) {
  // Solenoidal velocity plus a gradient part; the projection removes the gradient.
  const int n = 32;
  auto b = build_basis(BasisKind::Fourier, 2, n);
  const Field sol = sample_divfree_velocity(SpectrumModel::defaults(2, n), b, 5);
  Field u = sol;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) u.data[x * n + y] += 0.3 * std::sin(2 * M_PI * 3 * x / n);
  const auto path = tmp("velocity.h5").string();
  write_velocity_fixture(path, u);
  IngestOptions opt;
  opt.key = "velocity";
  opt.d = 2;
  opt.channel_axis = true;
  opt.has_sample_axis = false;
  const SpectralField s = analyze(b, ingest_pdebench(path, opt));
  SpectralField proj = s;
  double removed = 0, total = s.energy();
  for (std::size_t m = 1; m < b->size(); ++m) {
    const auto k = b->wavevector(m);
    const double k2 = k[0] * k[0] + k[1] * k[1];
    const cplx dot = k[0] * s.at(0, m) + k[1] * s.at(1, m);
    for (int c = 0; c < 2; ++c) proj.at(c, m) -= dot * k[c] / k2;
    removed += std::norm(dot) / k2;
  }
  const double residual = std::sqrt(removed / total);
  RecordProperty("divergence_projection_residual", std::to_string(residual));
  EXPECT_GT(residual, 0.05);
  EXPECT_LT(test::rel_diff(proj, analyze(b, sol)), 1e-10);
}

TEST(Reports, HeaderOnlyCsvAndPrecision) {
  Table t;
  t.columns = {"name", "value"};
  EXPECT_EQ(table_to_csv(t), "name,value\n");
  t.rows.push_back({std::string("a,b"), 0.1});
  t.rows.push_back({std::string("c"), std::nan("")});
  const std::string csv = table_to_csv(t);
  EXPECT_NE(csv.find("\"a,b\",0.10000000000000001"), std::string::npos);
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
  EXPECT_NE(table_to_json(t).find("null"), std::string::npos);
  EXPECT_THROW(write_report(tmp("r.xml").string(), t, "xml"), Error);
}

TEST(Plots, DeterministicAndContourDrawn) {
  std::vector<double> B, r{2, 4, 8};
  for (int i = 0; i <= 12; ++i) B.push_back(i);
  TheoryParams base;
  base.K_f = 64;
  const PhaseDiagram pd = phase_diagram(B, r, GammaRule::Fixed, base, 1);
  const std::string a = svg_phase_diagram(pd), b = svg_phase_diagram(phase_diagram(B, r, GammaRule::Fixed, base, 3));
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.rfind("<svg", 0), 0u);
  std::size_t circles = 0;
  for (std::size_t p = a.find("<circle"); p != std::string::npos; p = a.find("<circle", p + 1)) ++circles;
  EXPECT_EQ(circles, pd.contour.size());
  ShellCurve c;
  c.channel = "u";
  c.bits = 4;
  c.L2 = {std::nan(""), 0.5, 0.25, 0.1};
  EXPECT_EQ(svg_shell_curves({c}, "t"), svg_shell_curves({c}, "t"));
}
