#include "carrystate/codec.hpp"

#include <cmath>
#include <cstring>

#include "carrystate/error.hpp"

namespace cs {

namespace {

class Fnv {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* c = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h_ ^= c[i];
      h_ *= 1099511628211ull;
    }
  }
  template <class T>
  void put(const T& v) {
    bytes(&v, sizeof(T));
  }
  std::uint64_t value() const { return h_; }

 private:
  std::uint64_t h_ = 1469598103934665603ull;
};

void put_bits(std::vector<std::uint8_t>& buf, std::uint64_t& pos, std::uint32_t v, int b) {
  for (int i = 0; i < b; ++i, ++pos) {
    if ((pos >> 3) >= buf.size()) buf.push_back(0);
    if ((v >> i) & 1u) buf[pos >> 3] |= static_cast<std::uint8_t>(1u << (pos & 7));
  }
}

std::uint32_t get_bits(const std::vector<std::uint8_t>& buf, std::uint64_t& pos, int b) {
  std::uint32_t v = 0;
  for (int i = 0; i < b; ++i, ++pos) {
    if ((pos >> 3) >= buf.size()) fail(ErrorCode::TruncatedPayload, "payload ends early");
    if ((buf[pos >> 3] >> (pos & 7)) & 1u) v |= 1u << i;
  }
  return v;
}

}  // namespace

std::uint32_t quantize(double x, int b, double a) {
  if (!std::isfinite(x)) fail(ErrorCode::NonFiniteInput, "cannot quantize a non-finite value");
  if (b < 1 || b > 16) fail(ErrorCode::InvalidArgument, "quantizer needs 1..16 bits");
  if (!(a > 0)) fail(ErrorCode::InvalidArgument, "clip radius must be positive");
  const double levels = std::ldexp(1.0, b);
  const double delta = 2.0 * a / levels;
  const double q = std::floor((x + a) / delta);
  if (q < 0) return 0;
  if (q > levels - 1) return static_cast<std::uint32_t>(levels - 1);
  return static_cast<std::uint32_t>(q);
}

double dequantize(std::uint32_t index, int b, double a) {
  if (b < 1 || b > 16) fail(ErrorCode::InvalidArgument, "quantizer needs 1..16 bits");
  const double delta = 2.0 * a / std::ldexp(1.0, b);
  return -a + (index + 0.5) * delta;
}

std::uint64_t CodecConfig::hash() const {
  Fnv h;
  h.put(grid.d);
  h.put(grid.n_fine);
  h.put(grid.n_coarse);
  h.put(band.k_c);
  h.put(band.k_1);
  h.put(band.gamma);
  h.put(static_cast<int>(basis));
  h.put(basis_params.robin_left);
  h.put(basis_params.robin_right);
  for (const auto& rows : {basis_params.left_rows, basis_params.right_rows}) {
    h.put(rows.has_value());
    if (rows) h.bytes(rows->data(), sizeof(double) * 3);
  }
  h.put(clip_a);
  h.put(bits.size());
  h.bytes(bits.data(), sizeof(int) * bits.size());
  h.bytes(stats.mean.data(), sizeof(double) * stats.mean.size());
  h.bytes(stats.std.data(), sizeof(double) * stats.std.size());
  h.put(lossless);
  return h.value();
}

void CodecConfig::validate() const {
  grid.validate();
  band.validate();
  if (!(clip_a > 0)) fail(ErrorCode::InvalidArgument, "clip radius must be positive");
  if (bits.empty()) fail(ErrorCode::InvalidArgument, "codec needs at least one component");
  for (int b : bits)
    if (b < 0 || b > 16) fail(ErrorCode::InvalidArgument, "bit widths must lie in 0..16");
  if (basis == BasisKind::Eigen1D && grid.d != 1) fail(ErrorCode::UnsupportedBasis, "eigen basis is 1D");
  if (band.n_coarse() != grid.n_coarse) fail(ErrorCode::BandIncompatible, "band cutoff does not match the coarse grid");
  if (stats.populated()) {
    if (stats.mean.size() != bits.size() || stats.std.size() != bits.size())
      fail(ErrorCode::ShapeMismatch, "stats do not match the component count");
    for (double s : stats.std)
      if (!(s > 0)) fail(ErrorCode::InvalidArgument, "stats std must be positive");
  }
}

Codec::Codec(CodecConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  fine_ = build_basis(cfg_.basis, cfg_.grid.d, cfg_.grid.n_fine, cfg_.basis_params);
  check_band(*fine_, cfg_.band);
  exp_modes_ = expressible_modes(*fine_, cfg_.band, true);
  const int nc = cfg_.grid.n_coarse;
  const int d = cfg_.grid.d;
  if (cfg_.basis == BasisKind::Eigen1D) {
    const int r = cfg_.grid.ratio();
    const Eigen::MatrixXd& phi = *fine_->eigenvectors();
    sample_rows_.resize(nc);
    for (int j = 0; j < nc; ++j) sample_rows_[j] = static_cast<std::size_t>(j * r + r / 2);
    phi_s_ = std::make_shared<Eigen::MatrixXd>(nc, nc);
    for (int j = 0; j < nc; ++j)
      for (int l = 0; l < nc; ++l) (*phi_s_)(j, l) = phi(static_cast<Eigen::Index>(sample_rows_[j]), l);
    phi_s_lu_ = std::make_shared<Eigen::PartialPivLU<Eigen::MatrixXd>>(*phi_s_);
    if (exp_modes_.size() != static_cast<std::size_t>(nc))
      fail(ErrorCode::BandIncompatible, "eigen expressible set must hold the first N_c modes");
    for (std::size_t i = 0; i < exp_modes_.size(); ++i)
      if (exp_modes_[i] != i) fail(ErrorCode::BandIncompatible, "unexpected eigen expressible ordering");
    return;
  }
  coarse_ = build_basis(cfg_.basis, d, nc, cfg_.basis_params);
  scale_ = std::pow(static_cast<double>(nc) / cfg_.grid.n_fine, 0.5 * d);
  coarse_index_.resize(exp_modes_.size());
  for (std::size_t i = 0; i < exp_modes_.size(); ++i) {
    const auto idx = fine_->index(exp_modes_[i]);
    int c[2] = {0, 0};
    for (int a = 0; a < d; ++a) {
      int k = fine_->axis_wavenumber(idx[a]);
      if (cfg_.basis == BasisKind::Fourier) k = ((k % nc) + nc) % nc;
      if (k < 0 || k >= nc) fail(ErrorCode::BandIncompatible, "expressible mode does not fit the coarse lattice");
      c[a] = k;
    }
    coarse_index_[i] = coarse_->mode_of(c[0], c[1]);
  }
}

std::vector<double> Codec::coarse_samples(const SpectralField& x) const {
  if (x.basis->size() != fine_->size() || x.basis->kind() != fine_->kind())
    fail(ErrorCode::ShapeMismatch, "field is not on the codec's fine basis");
  const std::size_t pts = cfg_.grid.coarse_points();
  std::vector<double> out(static_cast<std::size_t>(x.channels) * pts, 0.0);
  if (phi_s_) {
    Eigen::VectorXd c(pts);
    for (int ch = 0; ch < x.channels; ++ch) {
      c[0] = 0.0;
      for (std::size_t l = 1; l < pts; ++l) c[static_cast<Eigen::Index>(l)] = x.at(ch, l).real();
      Eigen::VectorXd y = (*phi_s_) * c;
      std::memcpy(out.data() + ch * pts, y.data(), sizeof(double) * pts);
    }
    return out;
  }
  std::vector<cplx> coarse(pts);
  for (int ch = 0; ch < x.channels; ++ch) {
    std::fill(coarse.begin(), coarse.end(), cplx(0.0));
    for (std::size_t i = 0; i < exp_modes_.size(); ++i) {
      if (exp_modes_[i] == 0) continue;
      coarse[coarse_index_[i]] = x.at(ch, exp_modes_[i]) * scale_;
    }
    coarse_->inverse(coarse.data(), out.data() + ch * pts);
  }
  return out;
}

SpectralField Codec::lift(const std::vector<double>& samples, int components) const {
  const std::size_t pts = cfg_.grid.coarse_points();
  if (samples.size() != pts * components) fail(ErrorCode::ShapeMismatch, "sample count does not match the coarse grid");
  SpectralField out(fine_, components);
  if (phi_s_) {
    for (int ch = 0; ch < components; ++ch) {
      Eigen::Map<const Eigen::VectorXd> y(samples.data() + ch * pts, static_cast<Eigen::Index>(pts));
      Eigen::VectorXd c = phi_s_lu_->solve(y);
      for (std::size_t l = 1; l < pts; ++l) out.at(ch, l) = c[static_cast<Eigen::Index>(l)];
    }
    return out;
  }
  std::vector<cplx> coarse(pts);
  for (int ch = 0; ch < components; ++ch) {
    coarse_->forward(samples.data() + ch * pts, coarse.data());
    for (std::size_t i = 0; i < exp_modes_.size(); ++i) {
      if (exp_modes_[i] == 0) continue;
      out.at(ch, exp_modes_[i]) = coarse[coarse_index_[i]] / scale_;
    }
  }
  return out;
}

EncodedState Codec::encode_spectral(const SpectralField& x) const {
  if (x.channels != cfg_.components()) fail(ErrorCode::ShapeMismatch, "field components do not match the bit vector");
  for (const cplx& v : x.coef)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) fail(ErrorCode::NonFiniteInput, "input is not finite");
  std::vector<double> side(x.channels);
  for (int c = 0; c < x.channels; ++c) side[c] = x.at(c, 0).real();
  return encode_samples(coarse_samples(x), side);
}

EncodedState Codec::encode_samples(const std::vector<double>& y, const std::vector<double>& side) const {
  const int m = cfg_.components();
  const std::size_t pts = cfg_.grid.coarse_points();
  if (y.size() != pts * m || static_cast<int>(side.size()) != m)
    fail(ErrorCode::ShapeMismatch, "samples do not match the codec layout");
  if (!cfg_.lossless && !cfg_.stats.populated()) fail(ErrorCode::StatsMissing, "standardization stats are missing");
  EncodedState enc;
  enc.config_hash = cfg_.hash();
  enc.n_coarse = cfg_.grid.n_coarse;
  enc.d = cfg_.grid.d;
  enc.bits = cfg_.bits;
  enc.side = side;
  if (cfg_.lossless) {
    enc.raw = y;
    return enc;
  }
  std::uint64_t pos = 0;
  for (int c = 0; c < m; ++c) {
    const int b = cfg_.bits[c];
    if (b == 0) continue;
    const double mu = cfg_.stats.mean[c], sd = cfg_.stats.std[c];
    for (std::size_t j = 0; j < pts; ++j) put_bits(enc.payload, pos, quantize((y[c * pts + j] - mu) / sd, b, cfg_.clip_a), b);
  }
  enc.payload_bits = pos;
  return enc;
}

EncodedState Codec::encode(const Field& x) const { return encode_spectral(analyze(fine_, x)); }

std::vector<double> Codec::reconstructed_samples(const EncodedState& enc) const {
  if (enc.config_hash != cfg_.hash()) fail(ErrorCode::ConfigHashMismatch, "encoded state was produced under another config");
  const int m = cfg_.components();
  const std::size_t pts = cfg_.grid.coarse_points();
  if (static_cast<int>(enc.side.size()) != m) fail(ErrorCode::ShapeMismatch, "side values do not match the component count");
  if (cfg_.lossless) {
    if (enc.raw.size() != pts * m) fail(ErrorCode::TruncatedPayload, "lossless payload has the wrong size");
    return enc.raw;
  }
  std::vector<double> y(pts * m, 0.0);
  std::uint64_t pos = 0;
  for (int c = 0; c < m; ++c) {
    const int b = cfg_.bits[c];
    if (b == 0) continue;
    const double mu = cfg_.stats.mean[c], sd = cfg_.stats.std[c];
    for (std::size_t j = 0; j < pts; ++j) y[c * pts + j] = mu + sd * dequantize(get_bits(enc.payload, pos, b), b, cfg_.clip_a);
  }
  return y;
}

SpectralField Codec::decode_spectral(const EncodedState& enc) const {
  const int m = cfg_.components();
  SpectralField out = lift(reconstructed_samples(enc), m);
  if (!cfg_.lossless)
    for (int c = 0; c < m; ++c)
      if (cfg_.bits[c] == 0) std::fill(out.channel(c), out.channel(c) + out.modes(), cplx(0.0));
  for (int c = 0; c < m; ++c) out.at(c, 0) = enc.side[c];
  return out;
}

Field Codec::decode(const EncodedState& enc) const { return synthesize(decode_spectral(enc)); }

EncodedState encode(const Field& field, const CodecConfig& cfg) { return Codec(cfg).encode(field); }

Field decode(const EncodedState& enc, const CodecConfig& cfg) { return Codec(cfg).decode(enc); }

StandardizationStats estimate_stats(const Codec& codec, const std::vector<SpectralField>& samples) {
  if (samples.empty()) fail(ErrorCode::EmptySamples, "no training samples for standardization");
  const int m = samples.front().channels;
  const std::size_t pts = codec.config().grid.coarse_points();
  std::vector<double> s1(m, 0.0), s2(m, 0.0);
  double count = 0;
  for (const auto& x : samples) {
    if (x.channels != m) fail(ErrorCode::ShapeMismatch, "training samples differ in component count");
    const auto y = codec.coarse_samples(x);
    for (int c = 0; c < m; ++c)
      for (std::size_t j = 0; j < pts; ++j) {
        s1[c] += y[c * pts + j];
        s2[c] += y[c * pts + j] * y[c * pts + j];
      }
    count += static_cast<double>(pts);
  }
  StandardizationStats st;
  st.mean.resize(m);
  st.std.resize(m);
  for (int c = 0; c < m; ++c) {
    st.mean[c] = s1[c] / count;
    const double var = std::max(0.0, s2[c] / count - st.mean[c] * st.mean[c]);
    st.std[c] = var > 0 ? std::sqrt(var) : 1.0;
  }
  return st;
}

StandardizationStats estimate_stats(const CodecConfig& cfg, const std::vector<Field>& samples) {
  CodecConfig probe = cfg;
  probe.stats = {};
  probe.lossless = true;
  if (!samples.empty()) probe.bits.assign(samples.front().channels, 0);
  Codec codec(probe);
  std::vector<SpectralField> spec;
  spec.reserve(samples.size());
  for (const auto& f : samples) spec.push_back(analyze(codec.fine_basis(), f));
  return estimate_stats(codec, spec);
}

double hf_relative_error(const SpectralField& est, const SpectralField& truth, const BandSpec& band) {
  if (est.channels != truth.channels || est.modes() != truth.modes())
    fail(ErrorCode::ShapeMismatch, "fields differ in shape");
  const Basis& b = *truth.basis;
  double num = 0, den = 0;
  for (int c = 0; c < truth.channels; ++c)
    for (std::size_t m = 0; m < b.size(); ++m) {
      if (!b.in_fine(m, band)) continue;
      num += std::norm(est.at(c, m) - truth.at(c, m));
      den += std::norm(truth.at(c, m));
    }
  if (!(den > 0)) fail(ErrorCode::ZeroBandEnergy, "reference has no energy in the fine band");
  return std::sqrt(num / den);
}

double roundtrip_hf_error(const Field& field, const CodecConfig& cfg) {
  Codec codec(cfg);
  const SpectralField x = analyze(codec.fine_basis(), field);
  return hf_relative_error(codec.decode_spectral(codec.encode_spectral(x)), x, cfg.band);
}

}  // namespace cs
