#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "carrystate/basis.hpp"
#include "carrystate/codec.hpp"
#include "carrystate/fields.hpp"

namespace cs {

/// Per-channel transfer and residual tables, indexed [bit index][shell].
struct ChannelStats {
  std::string id;
  int m = 1;
  std::vector<std::vector<double>> gain;
  std::vector<std::vector<double>> sigma;
  std::vector<char> observed;  // per shell
  bool isotonic_applied = false;
  StandardizationStats stats;
};

struct ChannelCalibration {
  std::string family;
  GridSpec grid;
  BandSpec band;
  BasisKind basis = BasisKind::Fourier;
  BasisParams basis_params;
  double clip_a = 4.0;
  bool lossless = false;
  std::vector<int> bit_grid;
  int dim_z = 1;
  /// Latent spectrum [shell][dim]; shells run 0..shells()-1 over B_exp.
  std::vector<std::vector<double>> s_z;
  std::vector<char> shell_available;
  /// Pooled bin id per shell used for the transfer fit.
  std::vector<int> shell_bin;
  std::map<std::string, ChannelStats> channels;
  std::size_t samples = 0;
  bool degenerate = false;
  std::uint64_t seed = 0;
  std::string provenance;

  int shells() const { return static_cast<int>(s_z.size()); }
  int bit_index(int b) const;
  bool has(const std::string& channel) const { return channels.count(channel) > 0; }
  const ChannelStats& channel(const std::string& id) const;
  double sigma(const std::string& channel, int b, int shell) const;
  double gain(const std::string& channel, int b, int shell) const;
  /// Codec configuration for a channel stored at b bits per component.
  CodecConfig codec_config(const std::string& channel, int b) const;
};

struct CalibrationOptions {
  std::vector<int> bit_grid{2, 4, 6, 8, 10, 12};
  double clip_a = 4.0;
  bool lossless = false;
  bool isotonic = true;
  int min_shell_modes = 4;
  int threads = 0;
};

/// Latent spectrum per shell of B_exp (zero mode excluded), [shell][dim].
std::vector<std::vector<double>> estimate_latent_spectrum(const std::vector<LatentState>& latents, const BandSpec& band);

/// Shell -> pooled bin, merging shells with fewer than `min_modes` modes of
/// B_exp into their upper neighbour (the last bin merges downward).
std::vector<int> pool_shells(const Basis& basis, const BandSpec& band, int min_modes);

/// Pool-adjacent-violators fit of a nonincreasing sequence. Returns true if
/// any value changed.
bool isotonic_nonincreasing(std::vector<double>& values);

ChannelStats calibrate_channel(const ChannelSpec& ch, const std::vector<LatentState>& latents, const GridSpec& grid,
                               const BandSpec& band, BasisKind basis, const BasisParams& params,
                               const std::vector<int>& shell_bin, const CalibrationOptions& opt);

/// Full calibration of a family from primitive training samples on the fine basis.
ChannelCalibration calibrate_family(const FamilyTemplate& t, const std::vector<SpectralField>& samples,
                                    const GridSpec& grid, const BandSpec& band, const CalibrationOptions& opt,
                                    const std::vector<std::string>& channels = {});

ChannelCalibration perturb_calibration(const ChannelCalibration& cal, double eps, std::uint64_t seed);

}  // namespace cs
