#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "carrystate/basis.hpp"
#include "carrystate/error.hpp"
#include "test_util.hpp"

using namespace cs;

namespace {

// Direct unitary DFT, sum_x f(x) exp(-2 pi i k x / n) / sqrt(n^d).
cplx naive_dft(const Field& f, int k0, int k1) {
  const int n = f.n;
  cplx s = 0;
  if (f.d == 1) {
    for (int x = 0; x < n; ++x) s += f.data[x] * std::polar(1.0, -2 * std::numbers::pi * k0 * x / n);
    return s / std::sqrt(double(n));
  }
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      s += f.data[x * n + y] * std::polar(1.0, -2 * std::numbers::pi * (double(k0) * x + double(k1) * y) / n);
  return s / double(n);
}

// Orthonormal DCT-II coefficient of a 1D signal.
double naive_dct(const std::vector<double>& x, int l) {
  const int n = static_cast<int>(x.size());
  double s = 0;
  for (int i = 0; i < n; ++i) s += x[i] * std::cos(std::numbers::pi * l * (i + 0.5) / n);
  return s * std::sqrt((l == 0 ? 1.0 : 2.0) / n);
}

}  // namespace

TEST(Basis, FourierMatchesDirectDft1D) {
  const Field f = test::random_field(1, 16, 1, 11);
  auto b = build_basis(BasisKind::Fourier, 1, 16);
  const SpectralField s = analyze(b, f);
  for (std::size_t m = 0; m < b->size(); ++m) {
    const cplx ref = naive_dft(f, static_cast<int>(m), 0);
    EXPECT_NEAR(std::abs(s.at(0, m) - ref), 0.0, 1e-12) << "mode " << m;
  }
}

TEST(Basis, FourierMatchesDirectDft2D) {
  const Field f = test::random_field(2, 8, 1, 12);
  auto b = build_basis(BasisKind::Fourier, 2, 8);
  const SpectralField s = analyze(b, f);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) {
      const std::size_t m = b->mode_of(i, j);
      EXPECT_NEAR(std::abs(s.at(0, m) - naive_dft(f, i, j)), 0.0, 1e-12);
    }
}

TEST(Basis, CosineMatchesDirectDct) {
  const Field f = test::random_field(1, 12, 1, 13);
  auto b = build_basis(BasisKind::CosineNeumann, 1, 12);
  const SpectralField s = analyze(b, f);
  for (int l = 0; l < 12; ++l) {
    EXPECT_NEAR(s.at(0, l).real(), naive_dct(f.data, l), 1e-12);
    EXPECT_EQ(s.at(0, l).imag(), 0.0);
  }
}

TEST(Basis, InverseAndParsevalAllKinds) {
  struct Case {
    BasisKind k;
    int d, n;
  };
  for (const Case& c : {Case{BasisKind::Fourier, 1, 32}, Case{BasisKind::Fourier, 2, 16},
                        Case{BasisKind::CosineNeumann, 1, 20}, Case{BasisKind::CosineNeumann, 2, 10},
                        Case{BasisKind::Eigen1D, 1, 24}}) {
    const Field f = test::random_field(c.d, c.n, 2, 21 + c.n);
    auto b = build_basis(c.k, c.d, c.n);
    const SpectralField s = analyze(b, f);
    EXPECT_NEAR(s.energy(), f.energy(), 1e-10 * f.energy()) << basis_kind_name(c.k);
    const Field g = synthesize(s);
    EXPECT_LT(test::max_abs_diff(f.data, g.data), 1e-12) << basis_kind_name(c.k);
  }
}

TEST(Basis, EigenVectorsSolveOperator) {
  BasisParams p;
  p.robin_left = 2.0;
  p.robin_right = 0.5;
  const int n = 20;
  auto b = build_basis(BasisKind::Eigen1D, 1, n, p);
  const Eigen::MatrixXd a = eigen1d_operator(n, p) * double(n) * n;
  const Eigen::MatrixXd& v = *b->eigenvectors();
  EXPECT_LT((v.transpose() * v - Eigen::MatrixXd::Identity(n, n)).norm(), 1e-12);
  for (int l = 0; l < n; ++l) {
    const Eigen::VectorXd r = a * v.col(l) - b->lambda(l) * v.col(l);
    EXPECT_LT(r.norm(), 1e-9 * std::max(1.0, b->lambda(l)));
    if (l > 0) {
      EXPECT_GE(b->lambda(l), b->lambda(l - 1));
    }
  }
}

TEST(Basis, NonSymmetricBoundaryRejected) {
  BasisParams p;
  p.left_rows = std::array<double, 3>{1.0, -1.0, -0.5};
  try {
    build_basis(BasisKind::Eigen1D, 1, 16, p);
    FAIL() << "expected NonSymmetricBoundary";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonSymmetricBoundary);
  }
}

TEST(Basis, FourierBandCountsFrozen) {
  // N_f = 16, N_c = 8: |k_i| <= 3 on both axes, the coarse Nyquist line excluded.
  auto b = build_basis(BasisKind::Fourier, 2, 16);
  const BandSpec band = BandSpec::make(GridSpec{2, 16, 8}, 0.5);
  std::size_t n_exp = 0, n_hf = 0;
  for (std::size_t m = 0; m < b->size(); ++m) {
    n_exp += b->in_expressible(m, band);
    n_hf += b->in_fine(m, band);
  }
  EXPECT_EQ(n_exp, 49u);
  EXPECT_EQ(n_hf, 49u - 25u);
}

TEST(Basis, ShellCountsFrozen) {
  // Lattice points of Z^2 with |k| in (kappa - 1/2, kappa + 1/2], counted independently.
  auto b = build_basis(BasisKind::Fourier, 2, 32);
  const auto counts = shell_counts(*b);
  std::vector<std::size_t> ref(4, 0);
  for (int x = -16; x < 16; ++x)
    for (int y = -16; y < 16; ++y) {
      const double r = std::hypot(x, y);
      for (int k = 0; k < 4; ++k)
        if ((k == 0 && r <= 0.5) || (r > k - 0.5 && r <= k + 0.5)) ++ref[k];
    }
  for (int k = 0; k < 4; ++k) EXPECT_EQ(counts[k], ref[k]) << "shell " << k;
  EXPECT_EQ(ref[0], 1u);
  EXPECT_EQ(ref[1], 8u);
  EXPECT_EQ(ref[2], 12u);
  EXPECT_EQ(ref[3], 16u);
}

TEST(Basis, CachedConstruction) {
  auto a = build_basis(BasisKind::CosineNeumann, 2, 16);
  auto b = build_basis(BasisKind::CosineNeumann, 2, 16);
  EXPECT_EQ(a.get(), b.get());
}

TEST(Basis, ProjectionsSplitEnergy) {
  const Field f = test::random_field(2, 16, 1, 5);
  auto b = build_basis(BasisKind::Fourier, 2, 16);
  const BandSpec band = BandSpec::make(GridSpec{2, 16, 8}, 0.5);
  const SpectralField s = analyze(b, f);
  const double e_in = project_expressible(s, band).energy();
  const double e_out = project_outside(s, band).energy();
  EXPECT_NEAR(e_in + e_out, s.energy(), 1e-10 * s.energy());
  EXPECT_LE(project_fine(s, band).energy(), e_in + 1e-12);
}
