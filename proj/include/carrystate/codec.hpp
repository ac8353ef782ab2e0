#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "carrystate/basis.hpp"

namespace cs {

/// Mid-rise uniform quantizer on [-a, a] with 2^b cells.
std::uint32_t quantize(double x, int b, double a);
double dequantize(std::uint32_t index, int b, double a);

struct StandardizationStats {
  std::vector<double> mean;
  std::vector<double> std;

  bool populated() const { return !std.empty(); }
};

struct CodecConfig {
  GridSpec grid;
  BandSpec band;
  BasisKind basis = BasisKind::Fourier;
  BasisParams basis_params;
  double clip_a = 4.0;
  std::vector<int> bits;
  StandardizationStats stats;
  /// Debug path: store unquantized samples (b = infinity).
  bool lossless = false;

  int components() const { return static_cast<int>(bits.size()); }
  std::uint64_t hash() const;
  void validate() const;
};

struct EncodedState {
  std::uint64_t config_hash = 0;
  int n_coarse = 0;
  int d = 1;
  std::vector<int> bits;
  std::vector<std::uint8_t> payload;
  std::uint64_t payload_bits = 0;
  std::vector<double> side;
  /// Only filled on the lossless path.
  std::vector<double> raw;

  /// Side values are stored as one 64-bit float per component.
  std::uint64_t side_bits() const { return 64ull * side.size(); }
};

/// Coarsen-quantize-decode operator for one stored channel. Holds the fine
/// basis and the coarse sampling machinery for a grid/band/basis triple.
class Codec {
 public:
  explicit Codec(CodecConfig cfg);

  const CodecConfig& config() const { return cfg_; }
  const BasisPtr& fine_basis() const { return fine_; }
  const std::vector<std::size_t>& expressible() const { return exp_modes_; }

  /// Physical coarse-lattice samples of P_exp x with the zero mode removed,
  /// layout [component][coarse point].
  std::vector<double> coarse_samples(const SpectralField& x) const;
  /// Inverse of coarse_samples on B_exp (zero mode left at 0).
  SpectralField lift(const std::vector<double>& samples, int components) const;

  EncodedState encode_spectral(const SpectralField& x) const;
  /// Quantizes precomputed coarse samples (see coarse_samples).
  EncodedState encode_samples(const std::vector<double>& samples, const std::vector<double>& side) const;
  EncodedState encode(const Field& x) const;
  SpectralField decode_spectral(const EncodedState& enc) const;
  Field decode(const EncodedState& enc) const;

  /// Dequantized, de-standardized coarse samples of an encoded state.
  std::vector<double> reconstructed_samples(const EncodedState& enc) const;

 private:
  CodecConfig cfg_;
  BasisPtr fine_;
  BasisPtr coarse_;
  std::vector<std::size_t> exp_modes_;
  std::vector<std::size_t> coarse_index_;
  double scale_ = 1.0;
  std::vector<std::size_t> sample_rows_;
  std::shared_ptr<Eigen::MatrixXd> phi_s_;
  std::shared_ptr<Eigen::PartialPivLU<Eigen::MatrixXd>> phi_s_lu_;
};

EncodedState encode(const Field& field, const CodecConfig& cfg);
Field decode(const EncodedState& enc, const CodecConfig& cfg);

/// Mean and standard deviation per component of the side-removed coarse
/// samples over a training set.
StandardizationStats estimate_stats(const Codec& codec, const std::vector<SpectralField>& samples);
StandardizationStats estimate_stats(const CodecConfig& cfg, const std::vector<Field>& samples);

/// hf_L2(0): relative error of decode(encode(field)) on B_hf.
double roundtrip_hf_error(const Field& field, const CodecConfig& cfg);
double hf_relative_error(const SpectralField& estimate, const SpectralField& truth, const BandSpec& band);

}  // namespace cs
