#include "carrystate/basis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include <fftw3.h>

#include "carrystate/error.hpp"

namespace cs {

std::size_t GridSpec::fine_points() const {
  return d == 1 ? static_cast<std::size_t>(n_fine) : static_cast<std::size_t>(n_fine) * n_fine;
}

std::size_t GridSpec::coarse_points() const {
  return d == 1 ? static_cast<std::size_t>(n_coarse) : static_cast<std::size_t>(n_coarse) * n_coarse;
}

void GridSpec::validate() const {
  if (d != 1 && d != 2) fail(ErrorCode::InvalidArgument, "grid dimension must be 1 or 2");
  if (n_coarse < 2 || n_coarse % 2 != 0) fail(ErrorCode::InvalidArgument, "N_c must be even and >= 2");
  if (n_fine < n_coarse || n_fine % n_coarse != 0)
    fail(ErrorCode::InvalidArgument, "N_f must be a multiple of N_c");
}

BandSpec BandSpec::make(const GridSpec& grid, double gamma) {
  grid.validate();
  BandSpec b;
  b.k_c = grid.n_coarse / 2.0;
  b.gamma = gamma;
  b.k_1 = gamma * b.k_c;
  b.validate();
  return b;
}

void BandSpec::validate() const {
  if (!(gamma > 0.0 && gamma < 1.0)) fail(ErrorCode::InvalidArgument, "gamma must lie in (0, 1)");
  if (!(k_1 > 0.0 && k_1 < k_c)) fail(ErrorCode::InvalidArgument, "band requires 0 < k_1 < k_c");
}

const char* basis_kind_name(BasisKind kind) {
  switch (kind) {
    case BasisKind::Fourier: return "fourier";
    case BasisKind::CosineNeumann: return "cosine-neumann";
    case BasisKind::Eigen1D: return "eigen-1d";
  }
  return "unknown";
}

BasisKind parse_basis_kind(const std::string& name) {
  if (name == "fourier") return BasisKind::Fourier;
  if (name == "cosine-neumann" || name == "cosine") return BasisKind::CosineNeumann;
  if (name == "eigen-1d" || name == "eigen") return BasisKind::Eigen1D;
  fail(ErrorCode::UnsupportedBasis, "unknown basis kind '" + name + "'");
}

namespace {

enum class PlanType { C2CForward, C2CBackward, DctForward, DctInverse };

struct PlanCache {
  std::mutex mutex;
  std::map<std::tuple<int, int, int>, fftw_plan> plans;

  ~PlanCache() {
    for (auto& [key, plan] : plans) fftw_destroy_plan(plan);
  }

  fftw_plan get(PlanType type, int d, int n) {
    std::lock_guard<std::mutex> lock(mutex);
    const auto key = std::make_tuple(static_cast<int>(type), d, n);
    auto it = plans.find(key);
    if (it != plans.end()) return it->second;
    const std::size_t size = d == 1 ? n : static_cast<std::size_t>(n) * n;
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan plan = nullptr;
    if (type == PlanType::C2CForward || type == PlanType::C2CBackward) {
      auto* a = fftw_alloc_complex(size);
      auto* b = fftw_alloc_complex(size);
      const int sign = type == PlanType::C2CForward ? FFTW_FORWARD : FFTW_BACKWARD;
      plan = d == 1 ? fftw_plan_dft_1d(n, a, b, sign, flags) : fftw_plan_dft_2d(n, n, a, b, sign, flags);
      fftw_free(a);
      fftw_free(b);
    } else {
      auto* a = fftw_alloc_real(size);
      auto* b = fftw_alloc_real(size);
      const fftw_r2r_kind kind = type == PlanType::DctForward ? FFTW_REDFT10 : FFTW_REDFT01;
      plan = d == 1 ? fftw_plan_r2r_1d(n, a, b, kind, flags) : fftw_plan_r2r_2d(n, n, a, b, kind, kind, flags);
      fftw_free(a);
      fftw_free(b);
    }
    if (!plan) fail(ErrorCode::NumericFailure, "FFTW plan creation failed");
    plans.emplace(key, plan);
    return plan;
  }
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

int signed_k(int i, int n) { return i <= n / 2 ? i : i - n; }

double dct_scale(int l, int n) {
  return l == 0 ? 1.0 / std::sqrt(4.0 * n) : 1.0 / std::sqrt(2.0 * n);
}

}  // namespace

Eigen::MatrixXd eigen1d_operator(int n, const BasisParams& params) {
  if (n < 2) fail(ErrorCode::InvalidArgument, "eigen-1d basis needs at least 2 points");
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    a(i, i) = 2.0;
    if (i > 0) a(i, i - 1) = -1.0;
    if (i + 1 < n) a(i, i + 1) = -1.0;
  }
  const double h = 1.0 / n;
  auto robin_diag = [h](double beta) { return 1.0 + beta * h / (1.0 + 0.5 * beta * h); };
  if (params.left_rows) {
    const auto& r = *params.left_rows;
    a(0, 0) = r[0];
    a(0, 1) = r[1];
    a(1, 0) = r[2];
  } else {
    a(0, 0) = robin_diag(params.robin_left);
  }
  if (params.right_rows) {
    const auto& r = *params.right_rows;
    a(n - 1, n - 1) = r[0];
    a(n - 1, n - 2) = r[1];
    a(n - 2, n - 1) = r[2];
  } else {
    a(n - 1, n - 1) = robin_diag(params.robin_right);
  }
  return a;
}

BasisPtr build_basis(BasisKind kind, int d, int n, const BasisParams& params) {
  if (d != 1 && d != 2) fail(ErrorCode::UnsupportedBasis, "only d = 1 or 2 is supported");
  if (n < 2) fail(ErrorCode::InvalidArgument, "basis needs at least 2 points per axis");
  if (kind == BasisKind::Eigen1D && d != 1)
    fail(ErrorCode::UnsupportedBasis, "eigen-1d basis is one-dimensional");

  std::string key = std::to_string(static_cast<int>(kind)) + ":" + std::to_string(d) + ":" + std::to_string(n);
  if (kind == BasisKind::Eigen1D) {
    char buf[64];
    for (double v : {params.robin_left, params.robin_right}) {
      std::snprintf(buf, sizeof buf, ":%a", v);
      key += buf;
    }
    for (const auto& rows : {params.left_rows, params.right_rows}) {
      if (!rows) {
        key += ":-";
        continue;
      }
      for (double v : *rows) {
        std::snprintf(buf, sizeof buf, ":%a", v);
        key += buf;
      }
    }
  }
  static std::mutex cache_mutex;
  static std::map<std::string, BasisPtr> cache;
  {
    std::lock_guard<std::mutex> lock(cache_mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }

  std::shared_ptr<Basis> b(new Basis());
  b->kind_ = kind;
  b->d_ = d;
  b->n_ = n;
  b->size_ = d == 1 ? n : static_cast<std::size_t>(n) * n;
  b->axis_lambda_.resize(n);
  b->axis_kappa_.resize(n);

  switch (kind) {
    case BasisKind::Fourier:
      for (int i = 0; i < n; ++i) {
        const int k = signed_k(i, n);
        b->axis_lambda_[i] = static_cast<double>(k) * k;
        b->axis_kappa_[i] = std::abs(k);
      }
      break;
    case BasisKind::CosineNeumann: {
      for (int i = 0; i < n; ++i) {
        const double w = std::numbers::pi * i;
        b->axis_lambda_[i] = w * w;
      }
      const double scale = (n / 2.0) / (std::numbers::pi * (n - 1));
      for (int i = 0; i < n; ++i) b->axis_kappa_[i] = std::numbers::pi * i * scale;
      break;
    }
    case BasisKind::Eigen1D: {
      Eigen::MatrixXd a = eigen1d_operator(n, params);
      if (a(0, 1) != a(1, 0) || a(n - 1, n - 2) != a(n - 2, n - 1))
        fail(ErrorCode::NonSymmetricBoundary, "eigen-1d boundary rows must be symmetric");
      Eigen::VectorXd diag = a.diagonal();
      Eigen::VectorXd sub(n - 1);
      for (int i = 0; i + 1 < n; ++i) sub[i] = a(i + 1, i);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
      solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
      if (solver.info() != Eigen::Success) fail(ErrorCode::NumericFailure, "tridiagonal eigensolve failed");
      const double inv_h2 = static_cast<double>(n) * n;
      auto vecs = std::make_shared<Eigen::MatrixXd>(solver.eigenvectors());
      for (int l = 0; l < n; ++l) {
        auto col = vecs->col(l);
        col.normalize();
        for (int i = 0; i < n; ++i) {
          if (std::abs(col[i]) > 1e-8) {
            if (col[i] < 0) col = -col;
            break;
          }
        }
        b->axis_lambda_[l] = std::max(0.0, solver.eigenvalues()[l] * inv_h2);
      }
      const double lmax = b->axis_lambda_.back();
      for (int l = 0; l < n; ++l)
        b->axis_kappa_[l] = lmax > 0 ? std::sqrt(b->axis_lambda_[l]) * (n / 2.0) / std::sqrt(lmax) : 0.0;
      b->eig_ = vecs;
      break;
    }
  }
  int ms = 0;
  for (std::size_t m = 0; m < b->size_; ++m) ms = std::max(ms, b->shell(m));
  b->max_shell_ = ms;
  std::lock_guard<std::mutex> lock(cache_mutex);
  return cache.emplace(key, b).first->second;
}

BasisPtr build_basis(BasisKind kind, const GridSpec& grid, const BasisParams& params) {
  grid.validate();
  return build_basis(kind, grid.d, grid.n_fine, params);
}

int Basis::axis_wavenumber(int i) const {
  return kind_ == BasisKind::Fourier ? signed_k(i, n_) : i;
}

std::array<int, 2> Basis::index(std::size_t mode) const {
  if (d_ == 1) return {static_cast<int>(mode), 0};
  return {static_cast<int>(mode / n_), static_cast<int>(mode % n_)};
}

std::size_t Basis::mode_of(int i0, int i1) const {
  return d_ == 1 ? static_cast<std::size_t>(i0) : static_cast<std::size_t>(i0) * n_ + i1;
}

double Basis::lambda(std::size_t mode) const {
  const auto ix = index(mode);
  return d_ == 1 ? axis_lambda_[ix[0]] : axis_lambda_[ix[0]] + axis_lambda_[ix[1]];
}

std::array<double, 2> Basis::wavevector(std::size_t mode) const {
  const auto ix = index(mode);
  auto axis = [&](int i) -> double {
    switch (kind_) {
      case BasisKind::Fourier: return signed_k(i, n_);
      case BasisKind::CosineNeumann: return std::numbers::pi * i;
      case BasisKind::Eigen1D: return std::sqrt(axis_lambda_[i]);
    }
    return 0.0;
  };
  return {axis(ix[0]), d_ == 1 ? 0.0 : axis(ix[1])};
}

double Basis::radius(std::size_t mode) const {
  const auto ix = index(mode);
  if (d_ == 1) return axis_kappa_[ix[0]];
  return std::hypot(axis_kappa_[ix[0]], axis_kappa_[ix[1]]);
}

double Basis::band_radius(std::size_t mode) const {
  const auto ix = index(mode);
  if (d_ == 1) return axis_kappa_[ix[0]];
  return std::max(axis_kappa_[ix[0]], axis_kappa_[ix[1]]);
}

int Basis::shell(std::size_t mode) const {
  const double r = radius(mode);
  return std::max(0, static_cast<int>(std::ceil(r - 0.5 - 1e-9)));
}

long Basis::key2(std::size_t mode) const {
  const auto ix = index(mode);
  if (kind_ == BasisKind::Eigen1D) return ix[0];
  const long a = axis_wavenumber(ix[0]);
  const long c = d_ == 1 ? 0 : axis_wavenumber(ix[1]);
  return a * a + c * c;
}

bool Basis::is_nyquist(std::size_t mode) const {
  if (kind_ != BasisKind::Fourier) return false;
  const auto ix = index(mode);
  if (ix[0] == n_ / 2) return true;
  return d_ == 2 && ix[1] == n_ / 2;
}

bool Basis::in_expressible(std::size_t mode, const BandSpec& band) const {
  switch (kind_) {
    case BasisKind::Fourier: return band_radius(mode) < band.k_c - 1e-9;
    case BasisKind::CosineNeumann: return band_radius(mode) <= band.k_c + 1e-9;
    case BasisKind::Eigen1D: return index(mode)[0] < band.n_coarse();
  }
  return false;
}

bool Basis::in_fine(std::size_t mode, const BandSpec& band) const {
  return in_expressible(mode, band) && band_radius(mode) > band.k_1 + 1e-9;
}

void Basis::forward(const double* in, cplx* out) const {
  const std::size_t sz = size_;
  switch (kind_) {
    case BasisKind::Fourier: {
      std::vector<cplx> buf(in, in + sz);
      fftw_plan p = plan_cache().get(PlanType::C2CForward, d_, n_);
      fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(buf.data()), reinterpret_cast<fftw_complex*>(out));
      const double s = 1.0 / std::sqrt(static_cast<double>(sz));
      for (std::size_t i = 0; i < sz; ++i) out[i] *= s;
      break;
    }
    case BasisKind::CosineNeumann: {
      std::vector<double> a(in, in + sz), c(sz);
      fftw_plan p = plan_cache().get(PlanType::DctForward, d_, n_);
      fftw_execute_r2r(p, a.data(), c.data());
      for (std::size_t m = 0; m < sz; ++m) {
        const auto ix = index(m);
        double s = dct_scale(ix[0], n_);
        if (d_ == 2) s *= dct_scale(ix[1], n_);
        out[m] = cplx(c[m] * s, 0.0);
      }
      break;
    }
    case BasisKind::Eigen1D: {
      Eigen::Map<const Eigen::VectorXd> f(in, n_);
      Eigen::VectorXd c = eig_->transpose() * f;
      for (int l = 0; l < n_; ++l) out[l] = cplx(c[l], 0.0);
      break;
    }
  }
}

void Basis::inverse(const cplx* in, double* out) const {
  const std::size_t sz = size_;
  switch (kind_) {
    case BasisKind::Fourier: {
      std::vector<cplx> a(in, in + sz), b(sz);
      fftw_plan p = plan_cache().get(PlanType::C2CBackward, d_, n_);
      fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(a.data()), reinterpret_cast<fftw_complex*>(b.data()));
      const double s = 1.0 / std::sqrt(static_cast<double>(sz));
      for (std::size_t i = 0; i < sz; ++i) out[i] = b[i].real() * s;
      break;
    }
    case BasisKind::CosineNeumann: {
      std::vector<double> a(sz), c(sz);
      for (std::size_t m = 0; m < sz; ++m) {
        const auto ix = index(m);
        // REDFT01 weights the zero term once and the others twice.
        auto w = [this](int l) { return l == 0 ? 1.0 / std::sqrt(static_cast<double>(n_)) : 1.0 / std::sqrt(2.0 * n_); };
        double s = w(ix[0]);
        if (d_ == 2) s *= w(ix[1]);
        a[m] = in[m].real() * s;
      }
      fftw_plan p = plan_cache().get(PlanType::DctInverse, d_, n_);
      fftw_execute_r2r(p, a.data(), c.data());
      std::copy(c.begin(), c.end(), out);
      break;
    }
    case BasisKind::Eigen1D: {
      Eigen::VectorXd c(n_);
      for (int l = 0; l < n_; ++l) c[l] = in[l].real();
      Eigen::Map<Eigen::VectorXd> f(out, n_);
      f = (*eig_) * c;
      break;
    }
  }
}

Field::Field(int d_, int n_, int channels_) : d(d_), n(n_), channels(channels_) {
  data.assign(points() * static_cast<std::size_t>(channels), 0.0);
}

std::size_t Field::points() const {
  return d == 1 ? static_cast<std::size_t>(n) : static_cast<std::size_t>(n) * n;
}

double Field::energy() const {
  double e = 0.0;
  for (double v : data) e += v * v;
  return e;
}

SpectralField::SpectralField(BasisPtr b, int ch) : basis(std::move(b)), channels(ch) {
  coef.assign(modes() * static_cast<std::size_t>(channels), cplx(0.0, 0.0));
}

double SpectralField::energy() const {
  double e = 0.0;
  for (const auto& c : coef) e += std::norm(c);
  return e;
}

SpectralField analyze(const BasisPtr& basis, const Field& field) {
  if (!basis) fail(ErrorCode::InvalidArgument, "null basis");
  if (field.d != basis->d() || field.n != basis->n() || field.data.size() != field.points() * field.channels)
    fail(ErrorCode::ShapeMismatch, "field shape does not match the basis");
  SpectralField sf(basis, field.channels);
  for (int c = 0; c < field.channels; ++c) basis->forward(field.channel(c), sf.channel(c));
  return sf;
}

Field synthesize(const SpectralField& sf) {
  if (!sf.basis) fail(ErrorCode::InvalidArgument, "spectral field without basis");
  if (sf.coef.size() != sf.modes() * sf.channels) fail(ErrorCode::ShapeMismatch, "coefficient array size");
  Field f(sf.basis->d(), sf.basis->n(), sf.channels);
  for (int c = 0; c < sf.channels; ++c) sf.basis->inverse(sf.channel(c), f.channel(c));
  return f;
}

void check_band(const Basis& basis, const BandSpec& band) {
  band.validate();
  if (band.n_coarse() > basis.n()) fail(ErrorCode::BandIncompatible, "band cutoff exceeds the basis lattice");
}

namespace {
template <class Keep>
SpectralField mask(const SpectralField& sf, Keep keep) {
  SpectralField out(sf.basis, sf.channels);
  const std::size_t nm = sf.modes();
  for (std::size_t m = 0; m < nm; ++m) {
    if (!keep(m)) continue;
    for (int c = 0; c < sf.channels; ++c) out.at(c, m) = sf.at(c, m);
  }
  return out;
}
}  // namespace

SpectralField project_expressible(const SpectralField& sf, const BandSpec& band) {
  check_band(*sf.basis, band);
  return mask(sf, [&](std::size_t m) { return sf.basis->in_expressible(m, band); });
}

SpectralField project_fine(const SpectralField& sf, const BandSpec& band) {
  check_band(*sf.basis, band);
  return mask(sf, [&](std::size_t m) { return sf.basis->in_fine(m, band); });
}

SpectralField project_outside(const SpectralField& sf, const BandSpec& band) {
  check_band(*sf.basis, band);
  return mask(sf, [&](std::size_t m) { return !sf.basis->in_expressible(m, band); });
}

std::vector<double> shell_energies(const SpectralField& sf) {
  const Basis& b = *sf.basis;
  std::vector<double> e(b.max_shell() + 1, 0.0);
  for (std::size_t m = 0; m < sf.modes(); ++m) {
    double s = 0.0;
    for (int c = 0; c < sf.channels; ++c) s += std::norm(sf.at(c, m));
    e[b.shell(m)] += s;
  }
  return e;
}

std::vector<std::size_t> shell_counts(const Basis& basis) {
  std::vector<std::size_t> n(basis.max_shell() + 1, 0);
  for (std::size_t m = 0; m < basis.size(); ++m) ++n[basis.shell(m)];
  return n;
}

std::vector<std::size_t> expressible_modes(const Basis& basis, const BandSpec& band, bool include_zero) {
  std::vector<std::size_t> out;
  for (std::size_t m = 0; m < basis.size(); ++m) {
    if (!include_zero && m == 0) continue;
    if (basis.in_expressible(m, band)) out.push_back(m);
  }
  return out;
}

}  // namespace cs
