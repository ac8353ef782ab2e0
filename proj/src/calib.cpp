#include "carrystate/calib.hpp"

#include <cmath>

#include "carrystate/error.hpp"
#include "carrystate/parallel.hpp"
#include "carrystate/rng.hpp"

namespace cs {

namespace {

int exp_shells(const Basis& b, const BandSpec& band) {
  int n = 0;
  for (std::size_t m : expressible_modes(b, band, true)) n = std::max(n, b.shell(m) + 1);
  return n;
}

struct Acc {
  double xx = 0, xr = 0, rr = 0, n = 0;
};

}  // namespace

int ChannelCalibration::bit_index(int b) const {
  for (std::size_t i = 0; i < bit_grid.size(); ++i)
    if (bit_grid[i] == b) return static_cast<int>(i);
  return -1;
}

const ChannelStats& ChannelCalibration::channel(const std::string& id) const {
  auto it = channels.find(id);
  if (it == channels.end()) fail(ErrorCode::MissingCalibration, "no calibration for channel '" + id + "'");
  return it->second;
}

double ChannelCalibration::sigma(const std::string& ch, int b, int shell) const {
  const ChannelStats& c = channel(ch);
  const int i = bit_index(b);
  if (i < 0) fail(ErrorCode::MissingCalibration, "bit width " + std::to_string(b) + " is not calibrated");
  if (shell < 0 || shell >= shells()) fail(ErrorCode::MissingCalibration, "shell outside the calibrated range");
  return c.sigma[i][shell];
}

double ChannelCalibration::gain(const std::string& ch, int b, int shell) const {
  const ChannelStats& c = channel(ch);
  const int i = bit_index(b);
  if (i < 0) fail(ErrorCode::MissingCalibration, "bit width " + std::to_string(b) + " is not calibrated");
  if (shell < 0 || shell >= shells()) fail(ErrorCode::MissingCalibration, "shell outside the calibrated range");
  return c.gain[i][shell];
}

CodecConfig ChannelCalibration::codec_config(const std::string& ch, int b) const {
  const ChannelStats& c = channel(ch);
  CodecConfig cfg;
  cfg.grid = grid;
  cfg.band = band;
  cfg.basis = basis;
  cfg.basis_params = basis_params;
  cfg.clip_a = clip_a;
  cfg.lossless = lossless;
  cfg.bits.assign(c.m, b);
  cfg.stats = c.stats;
  return cfg;
}

std::vector<std::vector<double>> estimate_latent_spectrum(const std::vector<LatentState>& latents, const BandSpec& band) {
  if (latents.empty()) fail(ErrorCode::EmptySamples, "no samples for the latent spectrum");
  const Basis& b = *latents.front().basis;
  const int dz = latents.front().dim_z;
  const int ns = exp_shells(b, band);
  std::vector<std::vector<double>> s(ns, std::vector<double>(dz, 0.0));
  std::vector<double> cnt(ns, 0.0);
  const auto modes = expressible_modes(b, band, false);
  for (const auto& z : latents)
    for (std::size_t m : modes) {
      const int sh = b.shell(m);
      for (int j = 0; j < dz; ++j) s[sh][j] += std::norm(z.at(m, j));
      cnt[sh] += 1;
    }
  for (int k = 0; k < ns; ++k)
    if (cnt[k] > 0)
      for (double& v : s[k]) v /= cnt[k];
  return s;
}

std::vector<int> pool_shells(const Basis& basis, const BandSpec& band, int min_modes) {
  const int ns = exp_shells(basis, band);
  std::vector<int> count(ns, 0);
  for (std::size_t m : expressible_modes(basis, band, false)) ++count[basis.shell(m)];
  std::vector<int> bin(ns, -1);
  int next = 0, acc = 0, first_open = -1;
  for (int k = 0; k < ns; ++k) {
    if (count[k] == 0 && first_open < 0) continue;
    if (first_open < 0) first_open = k;
    acc += count[k];
    if (acc >= min_modes) {
      for (int j = first_open; j <= k; ++j) bin[j] = next;
      ++next;
      acc = 0;
      first_open = -1;
    }
  }
  if (first_open >= 0)
    for (int j = first_open; j < ns; ++j) bin[j] = next > 0 ? next - 1 : 0;
  return bin;
}

bool isotonic_nonincreasing(std::vector<double>& v) {
  struct Block {
    double sum;
    int n;
  };
  std::vector<Block> st;
  for (double x : v) {
    st.push_back({x, 1});
    while (st.size() > 1) {
      const Block& a = st[st.size() - 2];
      const Block& b = st.back();
      if (a.sum / a.n >= b.sum / b.n) break;
      Block merged{a.sum + b.sum, a.n + b.n};
      st.pop_back();
      st.back() = merged;
    }
  }
  bool changed = false;
  std::size_t i = 0;
  for (const Block& b : st)
    for (int j = 0; j < b.n; ++j, ++i) {
      const double val = b.sum / b.n;
      if (val != v[i]) changed = true;
      v[i] = val;
    }
  return changed;
}

ChannelStats calibrate_channel(const ChannelSpec& ch, const std::vector<LatentState>& latents, const GridSpec& grid,
                               const BandSpec& band, BasisKind basis, const BasisParams& params,
                               const std::vector<int>& shell_bin, const CalibrationOptions& opt) {
  if (latents.empty()) fail(ErrorCode::EmptySamples, "no samples to calibrate");
  const std::size_t ns = latents.size();
  const int m = ch.m;
  const std::size_t pts = grid.coarse_points();

  CodecConfig probe;
  probe.grid = grid;
  probe.band = band;
  probe.basis = basis;
  probe.basis_params = params;
  probe.clip_a = opt.clip_a;
  probe.lossless = true;
  probe.bits.assign(m, 0);
  const Codec probe_codec(probe);
  const Basis& fb = *probe_codec.fine_basis();
  const auto modes = expressible_modes(fb, band, false);

  // Coarse samples and clean B_exp coefficients per sample.
  std::vector<std::vector<double>> samples(ns);
  std::vector<std::vector<cplx>> clean(ns);
  parallel_for(ns, [&](std::size_t i) {
    const SpectralField x = channel_forward(ch, latents[i]);
    samples[i] = probe_codec.coarse_samples(x);
    auto& c = clean[i];
    c.resize(modes.size() * m);
    for (int k = 0; k < m; ++k)
      for (std::size_t j = 0; j < modes.size(); ++j) c[k * modes.size() + j] = x.at(k, modes[j]);
  }, opt.threads);

  ChannelStats out;
  out.id = ch.id;
  out.m = m;
  {
    std::vector<double> s1(m, 0.0), s2(m, 0.0);
    for (const auto& y : samples)
      for (int c = 0; c < m; ++c)
        for (std::size_t j = 0; j < pts; ++j) {
          s1[c] += y[c * pts + j];
          s2[c] += y[c * pts + j] * y[c * pts + j];
        }
    const double cnt = static_cast<double>(ns * pts);
    out.stats.mean.resize(m);
    out.stats.std.resize(m);
    for (int c = 0; c < m; ++c) {
      out.stats.mean[c] = s1[c] / cnt;
      const double var = std::max(0.0, s2[c] / cnt - out.stats.mean[c] * out.stats.mean[c]);
      out.stats.std[c] = var > 0 ? std::sqrt(var) : 1.0;
    }
  }

  const int nshell = static_cast<int>(shell_bin.size());
  int nbins = 0;
  for (int b : shell_bin) nbins = std::max(nbins, b + 1);
  const std::size_t nb = opt.bit_grid.size();
  out.gain.assign(nb, std::vector<double>(nshell, 0.0));
  out.sigma.assign(nb, std::vector<double>(nshell, 0.0));
  out.observed.assign(nshell, 0);

  for (std::size_t bi = 0; bi < nb; ++bi) {
    CodecConfig cfg = probe;
    cfg.lossless = opt.lossless;
    cfg.bits.assign(m, opt.bit_grid[bi]);
    cfg.stats = out.stats;
    const Codec codec(cfg);
    std::vector<std::vector<Acc>> part(ns, std::vector<Acc>(nbins));
    parallel_for(ns, [&](std::size_t i) {
      const std::vector<double> side(m, 0.0);
      const SpectralField y = codec.decode_spectral(codec.encode_samples(samples[i], side));
      auto& acc = part[i];
      for (int c = 0; c < m; ++c)
        for (std::size_t j = 0; j < modes.size(); ++j) {
          const int bin = shell_bin[fb.shell(modes[j])];
          if (bin < 0) continue;
          const cplx x = clean[i][c * modes.size() + j];
          const cplx r = y.at(c, modes[j]) - x;
          Acc& a = acc[bin];
          a.xx += std::norm(x);
          a.xr += (std::conj(x) * r).real();
          a.rr += std::norm(r);
          a.n += 1;
        }
    }, opt.threads);
    std::vector<Acc> tot(nbins);
    for (const auto& p : part)
      for (int k = 0; k < nbins; ++k) {
        tot[k].xx += p[k].xx;
        tot[k].xr += p[k].xr;
        tot[k].rr += p[k].rr;
        tot[k].n += p[k].n;
      }
    for (int s = 0; s < nshell; ++s) {
      const int bin = shell_bin[s];
      if (bin < 0 || tot[bin].n == 0) continue;
      const Acc& a = tot[bin];
      if (a.xx > 0) {
        out.gain[bi][s] = 1.0 + a.xr / a.xx;
        out.sigma[bi][s] = std::max(0.0, a.rr - a.xr * a.xr / a.xx) / a.n;
        out.observed[s] = 1;
      } else {
        out.gain[bi][s] = 0.0;
        out.sigma[bi][s] = a.rr / a.n;
      }
    }
  }

  if (opt.isotonic && nb > 1) {
    for (int s = 0; s < nshell; ++s) {
      std::vector<double> col(nb);
      for (std::size_t bi = 0; bi < nb; ++bi) col[bi] = out.sigma[bi][s];
      if (isotonic_nonincreasing(col)) {
        out.isotonic_applied = true;
        for (std::size_t bi = 0; bi < nb; ++bi) out.sigma[bi][s] = col[bi];
      }
    }
  }
  return out;
}

ChannelCalibration calibrate_family(const FamilyTemplate& t, const std::vector<SpectralField>& samples,
                                    const GridSpec& grid, const BandSpec& band, const CalibrationOptions& opt,
                                    const std::vector<std::string>& channels) {
  if (samples.empty()) fail(ErrorCode::EmptySamples, "no samples to calibrate");
  if (samples.size() < 8) fail(ErrorCode::InvalidArgument, "calibration needs at least 8 samples");
  for (int b : opt.bit_grid)
    if (b < 1 || b > 16) fail(ErrorCode::InvalidArgument, "calibrated bit widths must lie in 1..16");
  grid.validate();
  band.validate();
  const BasisPtr basis = samples.front().basis;
  check_band(*basis, band);

  std::vector<LatentState> latents(samples.size());
  parallel_for(samples.size(), [&](std::size_t i) { latents[i] = to_latent(t, samples[i]); }, opt.threads);

  ChannelCalibration cal;
  cal.family = t.name;
  cal.grid = grid;
  cal.band = band;
  cal.basis = t.basis_kind;
  cal.basis_params = t.basis_params;
  cal.clip_a = opt.clip_a;
  cal.lossless = opt.lossless;
  cal.bit_grid = opt.bit_grid;
  cal.dim_z = t.dim_z;
  cal.samples = samples.size();
  cal.s_z = estimate_latent_spectrum(latents, band);
  cal.shell_available.assign(cal.s_z.size(), 0);
  {
    std::vector<int> cnt(cal.s_z.size(), 0);
    for (std::size_t m : expressible_modes(*basis, band, false)) ++cnt[basis->shell(m)];
    bool any = false;
    for (std::size_t k = 0; k < cal.s_z.size(); ++k) {
      cal.shell_available[k] = cnt[k] > 0;
      for (double v : cal.s_z[k]) any = any || v > 0;
    }
    cal.degenerate = !any;
  }
  cal.shell_bin = pool_shells(*basis, band, opt.min_shell_modes);

  std::vector<std::string> ids = channels;
  if (ids.empty())
    for (const auto& c : t.candidates) ids.push_back(c.id);
  for (const auto& id : ids)
    cal.channels[id] = calibrate_channel(t.channel(id), latents, grid, band, t.basis_kind, t.basis_params,
                                         cal.shell_bin, opt);
  return cal;
}

ChannelCalibration perturb_calibration(const ChannelCalibration& cal, double eps, std::uint64_t seed) {
  if (!(eps >= 0)) fail(ErrorCode::InvalidArgument, "perturbation scale must be nonnegative");
  ChannelCalibration out = cal;
  if (eps == 0) return out;
  Rng rng(seed);
  for (auto& [id, ch] : out.channels) {
    for (auto& row : ch.gain)
      for (double& g : row) g *= std::exp(eps * rng.normal());
    for (auto& row : ch.sigma)
      for (double& s : row) s *= std::exp(eps * rng.normal());
  }
  return out;
}

}  // namespace cs
