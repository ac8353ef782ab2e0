#pragma once

#include <cstdint>
#include <vector>

#include "carrystate/basis.hpp"
#include "carrystate/fields.hpp"

namespace cs {

/// Shell spectrum E(kappa) proportional to max(kappa, k0)^-alpha.
struct SpectrumModel {
  double alpha = 3.0;
  double k0 = 4.0;
  double K_f = 16.0;
  /// Expected per-point variance of a sampled scalar field.
  double amplitude = 1.0;

  static SpectrumModel defaults(int d, int n_fine);
  void validate() const;
};

/// Per-mode coefficient variance: zero at the zero mode and on Fourier
/// Nyquist lines, summing to amplitude * points.
std::vector<double> mode_variance(const SpectrumModel& model, const Basis& basis);

SpectralField sample_scalar_spectral(const SpectrumModel& model, const BasisPtr& basis, std::uint64_t seed);
Field sample_scalar_field(const SpectrumModel& model, const BasisPtr& basis, std::uint64_t seed);

/// Hermitian white coefficients (analysis of real unit-variance noise).
SpectralField white_coefficients(const BasisPtr& basis, int channels, std::uint64_t seed);

/// u = e_perp z on a 2D Fourier basis.
SpectralField sample_divfree_spectral(const SpectrumModel& model, const BasisPtr& basis, std::uint64_t seed);
Field sample_divfree_velocity(const SpectrumModel& model, const BasisPtr& basis, std::uint64_t seed);

struct FamilyGenParams {
  /// diffreact: share of latent energy in the difference d.
  double imbalance = 0.25;
  /// comp_ns shares; thermo is split evenly between rho and p.
  double compressive = 0.3;
  double vortical = 0.5;
  double thermo = 0.2;

  void validate() const;
};

SpectralField sample_family_spectral(const FamilyTemplate& t, const SpectrumModel& model, const BasisPtr& basis,
                                     std::uint64_t seed, const FamilyGenParams& params = {});
Field sample_family_instance(const FamilyTemplate& t, const SpectrumModel& model, const BasisPtr& basis,
                             std::uint64_t seed, const FamilyGenParams& params = {});

}  // namespace cs
