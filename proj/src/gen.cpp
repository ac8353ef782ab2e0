#include "carrystate/gen.hpp"

#include <cmath>

#include "carrystate/error.hpp"
#include "carrystate/rng.hpp"

namespace cs {

namespace {

const cplx I(0.0, 1.0);

void check_fourier2d(const Basis& b) {
  if (b.kind() != BasisKind::Fourier || b.d() != 2)
    fail(ErrorCode::UnsupportedBasis, "velocity sampling needs a 2D Fourier basis");
}

/// Multiplies white coefficients by sqrt(share * variance).
SpectralField shaped(const SpectrumModel& model, const BasisPtr& basis, double share, std::uint64_t seed) {
  SpectralField w = white_coefficients(basis, 1, seed);
  const auto var = mode_variance(model, *basis);
  for (std::size_t m = 0; m < w.modes(); ++m) w.at(0, m) *= std::sqrt(share * var[m]);
  return w;
}

/// Velocity e z with z = -i a and e either e_par or e_perp; the result is real.
void add_velocity(SpectralField& out, int c0, const SpectralField& a, bool perpendicular) {
  const Basis& b = *out.basis;
  for (std::size_t m = 1; m < b.size(); ++m) {
    const auto k = b.wavevector(m);
    const double r = std::hypot(k[0], k[1]);
    if (r == 0) continue;
    const cplx z = -I * a.at(0, m);
    const double e0 = perpendicular ? -k[1] / r : k[0] / r;
    const double e1 = perpendicular ? k[0] / r : k[1] / r;
    out.at(c0, m) += e0 * z;
    out.at(c0 + 1, m) += e1 * z;
  }
}

}  // namespace

SpectrumModel SpectrumModel::defaults(int d, int n_fine) {
  SpectrumModel m;
  m.alpha = d == 2 ? 3.0 : 2.0;
  m.k0 = 4.0;
  m.K_f = 0.5 * n_fine / m.k0;
  return m;
}

void SpectrumModel::validate() const {
  if (!(alpha > 0)) fail(ErrorCode::InvalidArgument, "alpha must be positive");
  if (!(k0 >= 1)) fail(ErrorCode::InvalidArgument, "k0 must be at least 1");
  if (!(K_f > 1)) fail(ErrorCode::InvalidArgument, "K_f must exceed 1");
  if (!(amplitude > 0)) fail(ErrorCode::InvalidArgument, "amplitude must be positive");
}

void FamilyGenParams::validate() const {
  for (double v : {imbalance, compressive, vortical, thermo})
    if (!(v >= 0 && v <= 1)) fail(ErrorCode::InvalidArgument, "energy shares must lie in [0, 1]");
  if (std::abs(compressive + vortical + thermo - 1.0) > 1e-9)
    fail(ErrorCode::InvalidArgument, "comp_ns energy shares must sum to 1");
}

std::vector<double> mode_variance(const SpectrumModel& model, const Basis& basis) {
  model.validate();
  const auto counts = shell_counts(basis);
  std::vector<double> var(basis.size(), 0.0);
  double total = 0;
  for (std::size_t m = 1; m < basis.size(); ++m) {
    if (basis.is_nyquist(m)) continue;
    const int s = basis.shell(m);
    const double kappa = std::max(static_cast<double>(s), model.k0);
    var[m] = std::pow(kappa, -model.alpha) / static_cast<double>(counts[s]);
    total += var[m];
  }
  if (!(total > 0)) fail(ErrorCode::NumericFailure, "spectrum has no energy on this basis");
  const double scale = model.amplitude * static_cast<double>(basis.size()) / total;
  for (double& v : var) v *= scale;
  return var;
}

SpectralField white_coefficients(const BasisPtr& basis, int channels, std::uint64_t seed) {
  Field f(basis->d(), basis->n(), channels);
  Rng rng(seed);
  for (double& v : f.data) v = rng.normal();
  return analyze(basis, f);
}

SpectralField sample_scalar_spectral(const SpectrumModel& model, const BasisPtr& basis, std::uint64_t seed) {
  return shaped(model, basis, 1.0, seed);
}

Field sample_scalar_field(const SpectrumModel& model, const BasisPtr& basis, std::uint64_t seed) {
  return synthesize(sample_scalar_spectral(model, basis, seed));
}

SpectralField sample_divfree_spectral(const SpectrumModel& model, const BasisPtr& basis, std::uint64_t seed) {
  check_fourier2d(*basis);
  SpectralField u(basis, 2);
  add_velocity(u, 0, shaped(model, basis, 1.0, seed), true);
  return u;
}

Field sample_divfree_velocity(const SpectrumModel& model, const BasisPtr& basis, std::uint64_t seed) {
  return synthesize(sample_divfree_spectral(model, basis, seed));
}

SpectralField sample_family_spectral(const FamilyTemplate& t, const SpectrumModel& model, const BasisPtr& basis,
                                     std::uint64_t seed, const FamilyGenParams& params) {
  params.validate();
  if (basis->kind() != t.basis_kind || basis->d() != t.d)
    fail(ErrorCode::UnsupportedBasis, "basis does not match the family template");
  switch (t.family) {
    case Family::IncompNS:
      return sample_divfree_spectral(model, basis, seed);
    case Family::DiffReact: {
      const SpectralField s = shaped(model, basis, 1.0 - params.imbalance, derive_seed(seed, 1));
      const SpectralField d = shaped(model, basis, params.imbalance, derive_seed(seed, 2));
      SpectralField q(basis, 2);
      const double r = 1.0 / std::sqrt(2.0);
      for (std::size_t m = 0; m < q.modes(); ++m) {
        q.at(0, m) = r * (s.at(0, m) + d.at(0, m));
        q.at(1, m) = r * (s.at(0, m) - d.at(0, m));
      }
      return q;
    }
    case Family::CompNS: {
      check_fourier2d(*basis);
      SpectralField q(basis, 4);
      const SpectralField rho = shaped(model, basis, 0.5 * params.thermo, derive_seed(seed, 1));
      const SpectralField p = shaped(model, basis, 0.5 * params.thermo, derive_seed(seed, 4));
      std::copy(rho.channel(0), rho.channel(0) + q.modes(), q.channel(0));
      std::copy(p.channel(0), p.channel(0) + q.modes(), q.channel(3));
      add_velocity(q, 1, shaped(model, basis, params.compressive, derive_seed(seed, 2)), false);
      add_velocity(q, 1, shaped(model, basis, params.vortical, derive_seed(seed, 3)), true);
      return q;
    }
    default:
      return sample_scalar_spectral(model, basis, seed);
  }
}

Field sample_family_instance(const FamilyTemplate& t, const SpectrumModel& model, const BasisPtr& basis,
                             std::uint64_t seed, const FamilyGenParams& params) {
  return synthesize(sample_family_spectral(t, model, basis, seed, params));
}

}  // namespace cs
