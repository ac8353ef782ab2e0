#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cs {

using cplx = std::complex<double>;

/// Fine and coarse resolutions. Periodic domains are [0, 2pi)^d, the others
/// [0, 1]^d; wavenumbers are integer mode indices.
struct GridSpec {
  int d = 2;
  int n_fine = 128;
  int n_coarse = 32;

  int ratio() const { return n_fine / n_coarse; }
  std::size_t fine_points() const;
  std::size_t coarse_points() const;
  void validate() const;
};

/// Expressible band B_exp = {|l| <= k_c} and fine band B_hf = {k_1 < |l| <= k_c}.
struct BandSpec {
  double k_c = 16.0;
  double k_1 = 8.0;
  double gamma = 0.5;

  static BandSpec make(const GridSpec& grid, double gamma);
  int n_coarse() const { return static_cast<int>(2.0 * k_c + 0.5); }
  void validate() const;
};

enum class BasisKind { Fourier, CosineNeumann, Eigen1D };

const char* basis_kind_name(BasisKind kind);
BasisKind parse_basis_kind(const std::string& name);

struct BasisParams {
  double robin_left = 1.0;
  double robin_right = 1.0;
  /// Explicit boundary entries of h^2 A: {a00, a01, a10} and {a_nn, a_n,n-1, a_n-1,n}.
  std::optional<std::array<double, 3>> left_rows;
  std::optional<std::array<double, 3>> right_rows;
};

/// Orthonormal analysis basis on n^d points with per-mode eigenvalues and
/// radial indices. Modes are stored row-major over axis indices (i0, i1).
class Basis {
 public:
  BasisKind kind() const { return kind_; }
  int d() const { return d_; }
  int n() const { return n_; }
  std::size_t size() const { return size_; }

  const std::vector<double>& axis_lambda() const { return axis_lambda_; }
  const std::vector<double>& axis_kappa() const { return axis_kappa_; }
  /// Signed wavenumber for Fourier axes, mode index otherwise.
  int axis_wavenumber(int i) const;

  std::array<int, 2> index(std::size_t mode) const;
  std::size_t mode_of(int i0, int i1 = 0) const;
  /// Eigenvalue of the (negative) Laplacian-type operator for this mode.
  double lambda(std::size_t mode) const;
  /// Per-axis wavevector: signed k (Fourier), pi*l (cosine), sqrt(lambda) (eigen).
  std::array<double, 2> wavevector(std::size_t mode) const;
  /// Euclidean radial index |k| (Fourier) or the effective radius of the mode.
  double radius(std::size_t mode) const;
  /// Max-norm radial index used for band membership.
  double band_radius(std::size_t mode) const;
  /// Shell S_kappa = {kappa - 1/2 < radius <= kappa + 1/2}.
  int shell(std::size_t mode) const;
  int max_shell() const { return max_shell_; }
  /// Integer radial key: k_x^2 + k_y^2, l_x^2 + l_y^2, or the eigen index.
  long key2(std::size_t mode) const;

  bool in_expressible(std::size_t mode, const BandSpec& band) const;
  bool in_fine(std::size_t mode, const BandSpec& band) const;
  /// True on Fourier lines |k_i| = n/2, which carry no independent real content.
  bool is_nyquist(std::size_t mode) const;

  /// Eigenvectors (columns) for eigen-1d bases, nullptr otherwise.
  const Eigen::MatrixXd* eigenvectors() const { return eig_ ? eig_.get() : nullptr; }

  void forward(const double* in, cplx* out) const;
  void inverse(const cplx* in, double* out) const;

 private:
  friend std::shared_ptr<const Basis> build_basis(BasisKind, int, int, const BasisParams&);
  Basis() = default;

  BasisKind kind_ = BasisKind::Fourier;
  int d_ = 1;
  int n_ = 0;
  std::size_t size_ = 0;
  int max_shell_ = 0;
  std::vector<double> axis_lambda_;
  std::vector<double> axis_kappa_;
  std::shared_ptr<Eigen::MatrixXd> eig_;
};

using BasisPtr = std::shared_ptr<const Basis>;

BasisPtr build_basis(BasisKind kind, int d, int n, const BasisParams& params = {});
/// Basis on the fine grid of `grid`.
BasisPtr build_basis(BasisKind kind, const GridSpec& grid, const BasisParams& params = {});

/// Explicit h^2-scaled operator matrix used by the eigen-1d basis.
Eigen::MatrixXd eigen1d_operator(int n, const BasisParams& params);

/// Real multi-channel field, layout [channel][i0][i1].
struct Field {
  int d = 1;
  int n = 0;
  int channels = 1;
  std::vector<double> data;

  Field() = default;
  Field(int d, int n, int channels);
  std::size_t points() const;
  double* channel(int c) { return data.data() + static_cast<std::size_t>(c) * points(); }
  const double* channel(int c) const { return data.data() + static_cast<std::size_t>(c) * points(); }
  double energy() const;
};

/// Coefficients of a multi-channel field in an orthonormal basis, layout [channel][mode].
struct SpectralField {
  BasisPtr basis;
  int channels = 1;
  std::vector<cplx> coef;

  SpectralField() = default;
  SpectralField(BasisPtr basis, int channels);
  std::size_t modes() const { return basis ? basis->size() : 0; }
  cplx* channel(int c) { return coef.data() + static_cast<std::size_t>(c) * modes(); }
  const cplx* channel(int c) const { return coef.data() + static_cast<std::size_t>(c) * modes(); }
  cplx& at(int c, std::size_t mode) { return coef[static_cast<std::size_t>(c) * modes() + mode]; }
  const cplx& at(int c, std::size_t mode) const { return coef[static_cast<std::size_t>(c) * modes() + mode]; }
  double energy() const;
};

SpectralField analyze(const BasisPtr& basis, const Field& field);
Field synthesize(const SpectralField& sf);

SpectralField project_expressible(const SpectralField& sf, const BandSpec& band);
SpectralField project_fine(const SpectralField& sf, const BandSpec& band);
/// (I - P_exp) sf.
SpectralField project_outside(const SpectralField& sf, const BandSpec& band);

/// Energy per integer shell kappa = 0..max_shell, summed over channels.
std::vector<double> shell_energies(const SpectralField& sf);

/// Number of lattice modes per shell.
std::vector<std::size_t> shell_counts(const Basis& basis);

/// Modes of B_exp, optionally without the zero (side-information) mode.
std::vector<std::size_t> expressible_modes(const Basis& basis, const BandSpec& band, bool include_zero);

void check_band(const Basis& basis, const BandSpec& band);

}  // namespace cs
