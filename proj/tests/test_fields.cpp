#include <gtest/gtest.h>

#include "carrystate/error.hpp"
#include "carrystate/fields.hpp"
#include "carrystate/gen.hpp"
#include "test_util.hpp"

using namespace cs;

namespace {

std::vector<std::string> ids(const FamilyTemplate& t) {
  std::vector<std::string> out;
  for (const auto& c : t.candidates) out.push_back(c.id + "/" + std::to_string(c.m));
  return out;
}

int test_n(const FamilyTemplate& t) { return t.d == 2 ? 16 : 32; }

}  // namespace

TEST(Fields, ParseFamilyBothSpellings) {
  EXPECT_EQ(parse_family("incomp-ns"), Family::IncompNS);
  EXPECT_EQ(parse_family("incomp_ns"), Family::IncompNS);
  EXPECT_EQ(parse_family("comp-ns"), Family::CompNS);
  try {
    parse_family("navier");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownFamily);
  }
}

TEST(Fields, CandidateSetsFrozen) {
  using V = std::vector<std::string>;
  EXPECT_EQ(ids(family_template(Family::Advection)), (V{"u/1", "Lambda_u/1", "Delta_u/1"}));
  EXPECT_EQ(ids(family_template(Family::DiffSorp)), (V{"u/1", "Lambda_R_u/1", "L_R_u/1"}));
  EXPECT_EQ(ids(family_template(Family::Rdb)), (V{"h/1", "Lambda_N_h/1", "Delta_N_h/1"}));
  EXPECT_EQ(ids(family_template(Family::DiffReact)), (V{"q/2", "Lambda_N_q/2", "Delta_N_q/2", "d/1"}));
  EXPECT_EQ(ids(family_template(Family::IncompNS)), (V{"u/2", "omega/1"}));
  EXPECT_EQ(ids(family_template(Family::CompNS)), (V{"q/4", "chi/1", "omega/1", "Lambda_p/1"}));
  EXPECT_EQ(ids(family_template(Family::Darcy)), (V{"a/1", "Lambda_E_a/1", "L_E_a/1"}));
}

TEST(Fields, BestSingleFrozen) {
  const std::vector<std::pair<Family, std::string>> ref = {
      {Family::Advection, "Lambda_u"}, {Family::Burgers, "Lambda_u"}, {Family::DiffSorp, "Lambda_R_u"},
      {Family::DiffReact, "d"},        {Family::Rdb, "Lambda_N_h"},   {Family::IncompNS, "omega"},
      {Family::CompNS, "chi"},         {Family::Darcy, "Lambda_E_a"}};
  for (const auto& [f, id] : ref) EXPECT_EQ(family_template(f).best_single, id) << family_name(f);
}

TEST(Fields, RotationOrthogonal) {
  const auto r = family_template(Family::DiffReact).rotation;
  EXPECT_LT((r * r.transpose() - Eigen::Matrix2d::Identity()).norm(), 1e-12);
}

TEST(Fields, LatentRoundTripEveryFamily) {
  for (Family f : all_families()) {
    const FamilyTemplate t = family_template(f);
    const int n = test_n(t);
    auto b = build_basis(t.basis_kind, t.d, n, t.basis_params);
    const SpectralField x = sample_family_spectral(t, SpectrumModel::defaults(t.d, n), b, 99);
    const LatentState z = to_latent(t, x);
    const SpectralField y = from_latent_spectral(t, z);
    EXPECT_LT(test::rel_diff(y, x), 1e-12) << t.name;
  }
}

TEST(Fields, VorticityIsCurlOfVelocity) {
  const FamilyTemplate t = family_template(Family::IncompNS);
  auto b = build_basis(BasisKind::Fourier, 2, 16);
  const SpectralField u = sample_family_spectral(t, SpectrumModel::defaults(2, 16), b, 3);
  const SpectralField w = channel_forward(t.channel("omega"), to_latent(t, u));
  for (std::size_t m = 1; m < b->size(); ++m) {
    if (b->is_nyquist(m)) continue;
    const auto k = b->wavevector(m);
    const cplx curl = cplx(0, 1) * (k[0] * u.at(1, m) - k[1] * u.at(0, m));
    EXPECT_NEAR(std::abs(w.at(0, m) - curl), 0.0, 1e-12);
  }
}

TEST(Fields, ChannelInvertRecoversLatent) {
  for (Family f : {Family::Advection, Family::Rdb, Family::DiffReact, Family::IncompNS, Family::CompNS}) {
    const FamilyTemplate t = family_template(f);
    const int n = test_n(t);
    auto b = build_basis(t.basis_kind, t.d, n, t.basis_params);
    const LatentState z = to_latent(t, sample_family_spectral(t, SpectrumModel::defaults(t.d, n), b, 8));
    for (const auto& ch : t.candidates) {
      const InvertResult inv = channel_invert(ch, channel_forward(ch, z), t.dim_z);
      for (std::size_t m = 1; m < b->size(); ++m) {
        if (!inv.observed[m] || b->is_nyquist(m)) continue;
        // Channels with fewer rows than the latent only see one direction of it.
        if (ch.m < t.dim_z) continue;
        for (int j = 0; j < t.dim_z; ++j)
          EXPECT_NEAR(std::abs(inv.z[m * t.dim_z + j] - z.at(m, j)), 0.0, 1e-9 * (1 + std::abs(z.at(m, j))))
              << t.name << " " << ch.id << " mode " << m;
      }
    }
  }
}

TEST(Fields, ZeroSymbolModesUnobserved) {
  const FamilyTemplate t = family_template(Family::IncompNS);
  auto b = build_basis(BasisKind::Fourier, 2, 16);
  const LatentState z = to_latent(t, sample_family_spectral(t, SpectrumModel::defaults(2, 16), b, 1));
  const InvertResult inv = channel_invert(t.channel("omega"), channel_forward(t.channel("omega"), z), 1);
  EXPECT_EQ(inv.observed[0], 0);
  EXPECT_EQ(inv.observed[1], 1);
}
