#include "carrystate/design.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "carrystate/codec.hpp"
#include "carrystate/error.hpp"
#include "carrystate/parallel.hpp"

namespace cs {

namespace {

constexpr double kSigmaFloor = 1e-15;
constexpr double kTieTol = 1e-12;

std::vector<int> positive_steps(const std::vector<int>& steps) {
  std::vector<int> s;
  for (int b : steps)
    if (b > 0) s.push_back(b);
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

int design_bits(const DesignProblem& p, const Design& d) {
  int t = 0;
  for (std::size_t c = 0; c < d.bits.size(); ++c) t += p.m(c) * d.bits[c];
  return t;
}

/// Calls fn for every feasible design in enumeration order; stops early if fn returns false.
void for_each_feasible(const DesignProblem& p, const std::function<bool(const Design&)>& fn) {
  const std::size_t n = p.candidates.size();
  const std::vector<int> steps = positive_steps(p.bit_steps);
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    std::vector<std::size_t> sel;
    for (std::size_t c = 0; c < n; ++c)
      if (mask & (1u << c)) sel.push_back(c);
    if (sel.empty()) {
      if (!fn(Design{std::vector<int>(n, 0)})) return;
      continue;
    }
    if (steps.empty()) continue;
    std::vector<std::size_t> idx(sel.size(), 0);
    while (true) {
      Design d{std::vector<int>(n, 0)};
      double used = 0;
      for (std::size_t i = 0; i < sel.size(); ++i) {
        d.bits[sel[i]] = steps[idx[i]];
        used += static_cast<double>(p.m(sel[i])) * steps[idx[i]];
      }
      if (used <= p.budget_B + 1e-9) {
        if (!fn(d)) return;
      }
      // Odometer with the last selected channel fastest.
      int k = static_cast<int>(sel.size()) - 1;
      while (k >= 0 && ++idx[k] == steps.size()) idx[k--] = 0;
      if (k < 0) break;
    }
  }
}

Eigen::MatrixXcd posterior_from_precision(const Eigen::MatrixXcd& Q, const Eigen::VectorXd& prior) {
  const Eigen::Index n = prior.size();
  Eigen::VectorXd s = prior.cwiseMax(0.0).cwiseSqrt();
  Eigen::MatrixXcd inner = Eigen::MatrixXcd::Identity(n, n);
  inner += s.asDiagonal() * Q * s.asDiagonal();
  Eigen::MatrixXcd inv = inner.ldlt().solve(Eigen::MatrixXcd::Identity(n, n));
  return s.asDiagonal() * inv * s.asDiagonal();
}

}  // namespace

int DesignProblem::m(std::size_t candidate) const { return tmpl.channel(candidates.at(candidate)).m; }

void DesignProblem::validate() const {
  if (candidates.empty()) fail(ErrorCode::InvalidArgument, "design problem needs candidates");
  if (candidates.size() > 16) fail(ErrorCode::InvalidArgument, "at most 16 candidates are supported");
  if (bit_steps.empty()) fail(ErrorCode::InvalidArgument, "bit steps must be nonempty");
  for (int b : bit_steps)
    if (b < 0 || b > 16) fail(ErrorCode::InvalidArgument, "bit steps must lie in 0..16");
  if (!(budget_B >= 0)) fail(ErrorCode::InvalidArgument, "budget must be nonnegative");
  if (!cal) fail(ErrorCode::MissingCalibration, "design problem has no calibration");
  if (!(fine_emphasis >= 0)) fail(ErrorCode::InvalidArgument, "fine emphasis must be nonnegative");
  for (const auto& c : candidates) tmpl.channel(c);
  if (!weights.empty()) {
    bool any = false;
    for (double w : weights) {
      if (!(w >= 0)) fail(ErrorCode::InvalidArgument, "weights must be nonnegative");
      any = any || w > 0;
    }
    if (!any) fail(ErrorCode::InvalidArgument, "weights must not all be zero");
  }
}

unsigned Design::mask() const {
  unsigned m = 0;
  for (std::size_t c = 0; c < bits.size(); ++c)
    if (bits[c] > 0) m |= 1u << c;
  return m;
}

int DesignChoice::total_bits(const FamilyTemplate& t) const {
  int s = 0;
  for (std::size_t i = 0; i < channels.size(); ++i) s += t.channel(channels[i]).m * bits[i];
  return s;
}

DesignProblem make_problem(const FamilyTemplate& t, std::shared_ptr<const ChannelCalibration> cal, double budget_B,
                           const std::vector<int>& bit_steps) {
  DesignProblem p;
  p.tmpl = t;
  for (const auto& c : t.candidates) p.candidates.push_back(c.id);
  p.budget_B = budget_B;
  p.bit_steps = bit_steps;
  p.cal = std::move(cal);
  return p;
}

std::vector<double> target_weights(const Basis& basis, const BandSpec& band, double fine_emphasis) {
  std::vector<double> w(basis.size(), 0.0);
  for (std::size_t m : expressible_modes(basis, band, false)) w[m] = basis.in_fine(m, band) ? fine_emphasis : 1.0;
  return w;
}

std::size_t count_feasible(const DesignProblem& p) {
  p.validate();
  std::size_t n = 0;
  for_each_feasible(p, [&](const Design&) {
    ++n;
    return true;
  });
  return n;
}

std::vector<Design> enumerate_feasible(const DesignProblem& p) {
  const std::size_t n = count_feasible(p);
  if (n > p.enumeration_cap)
    fail(ErrorCode::EnumerationCap, "feasible set has " + std::to_string(n) + " designs, above the cap of " +
                                        std::to_string(p.enumeration_cap));
  std::vector<Design> out;
  out.reserve(n);
  for_each_feasible(p, [&](const Design& d) {
    out.push_back(d);
    return true;
  });
  return out;
}

Eigen::MatrixXcd posterior_covariance(const std::vector<Eigen::MatrixXcd>& symbols, const std::vector<double>& gains,
                                      const std::vector<double>& sigmas, const Eigen::VectorXd& prior) {
  const Eigen::Index n = prior.size();
  Eigen::MatrixXcd Q = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t c = 0; c < symbols.size(); ++c) {
    if (symbols[c].cols() != n) fail(ErrorCode::ShapeMismatch, "symbol width does not match the latent");
    Q += (gains[c] * gains[c] / std::max(sigmas[c], kSigmaFloor)) * (symbols[c].adjoint() * symbols[c]);
  }
  return posterior_from_precision(Q, prior);
}

DesignScorer::DesignScorer(const DesignProblem& p) : p_(&p) {
  p.validate();
  const ChannelCalibration& cal = *p.cal;
  basis_ = build_basis(cal.basis, cal.grid, cal.basis_params);
  if (basis_->kind() != p.tmpl.basis_kind || basis_->d() != p.tmpl.d)
    fail(ErrorCode::ShapeMismatch, "calibration basis does not match the family");
  if (cal.dim_z != p.tmpl.dim_z) fail(ErrorCode::ShapeMismatch, "calibration latent size does not match the family");
  for (const auto& c : p.candidates)
    if (!cal.has(c)) fail(ErrorCode::MissingCalibration, "no calibration for channel '" + c + "'");
  weights_ = p.weights.empty() ? target_weights(*basis_, cal.band, p.fine_emphasis) : p.weights;
  if (weights_.size() != basis_->size()) fail(ErrorCode::ShapeMismatch, "weights do not match the basis");

  const int dz = p.tmpl.dim_z;
  mode_group_.assign(basis_->size(), -1);
  std::map<std::tuple<int, long, double, bool>, int> index;
  for (std::size_t m : expressible_modes(*basis_, cal.band, false)) {
    const int shell = basis_->shell(m);
    if (shell >= cal.shells()) fail(ErrorCode::MissingCalibration, "shell outside the calibrated range");
    const auto key = std::make_tuple(shell, basis_->key2(m), weights_[m], basis_->in_fine(m, cal.band));
    auto it = index.find(key);
    if (it == index.end()) {
      Group g;
      g.shell = shell;
      const ModeInfo mi = mode_info(*basis_, m);
      const Eigen::MatrixXcd L = p.tmpl.target_matrix(mi);
      g.G = L.adjoint() * L;
      g.ll = L.squaredNorm();
      for (const auto& c : p.candidates) {
        const Eigen::MatrixXcd M = symbol_matrix(p.tmpl.channel(c), mi, dz);
        g.P.push_back(M.adjoint() * M);
        g.mm.push_back(M.squaredNorm());
      }
      it = index.emplace(key, static_cast<int>(groups_.size())).first;
      groups_.push_back(std::move(g));
    }
    groups_[it->second].weight_sum += weights_[m];
    mode_group_[m] = it->second;
  }
}

double DesignScorer::precision_weight(std::size_t cand, int b, int shell) const {
  const ChannelCalibration& cal = *p_->cal;
  const double g = cal.gain(p_->candidates[cand], b, shell);
  return g * g / std::max(cal.sigma(p_->candidates[cand], b, shell), kSigmaFloor);
}

Eigen::MatrixXcd DesignScorer::group_posterior(const Design& d, const Group& g) const {
  const int dz = p_->tmpl.dim_z;
  Eigen::MatrixXcd Q = Eigen::MatrixXcd::Zero(dz, dz);
  for (std::size_t c = 0; c < d.bits.size(); ++c)
    if (d.bits[c] > 0) Q += precision_weight(c, d.bits[c], g.shell) * g.P[c];
  const auto& sz = p_->cal->s_z[g.shell];
  return posterior_from_precision(Q, Eigen::Map<const Eigen::VectorXd>(sz.data(), dz));
}

double DesignScorer::score(const Design& d) const {
  double j = 0;
  for (const Group& g : groups_) {
    if (g.weight_sum == 0) continue;
    j += g.weight_sum * (group_posterior(d, g) * g.G).trace().real();
  }
  return j;
}

std::vector<double> DesignScorer::shell_trace(const Design& d) const {
  std::vector<double> t(p_->cal->shells(), 0.0);
  for (const Group& g : groups_) {
    if (g.weight_sum == 0) continue;
    t[g.shell] += g.weight_sum * (group_posterior(d, g) * g.G).trace().real();
  }
  return t;
}

double DesignScorer::score_scalar(const Design& d) const {
  if (p_->tmpl.dim_z != 1) fail(ErrorCode::InvalidArgument, "scalar score needs a one-dimensional latent");
  double j = 0;
  for (const Group& g : groups_) {
    if (g.weight_sum == 0) continue;
    const double sz = p_->cal->s_z[g.shell][0];
    if (!(sz > 0)) continue;
    double prec = 1.0 / sz;
    for (std::size_t c = 0; c < d.bits.size(); ++c)
      if (d.bits[c] > 0) prec += precision_weight(c, d.bits[c], g.shell) * g.mm[c];
    j += g.weight_sum * g.ll / prec;
  }
  return j;
}

Eigen::MatrixXcd DesignScorer::mode_covariance(const Design& d, std::size_t mode) const {
  if (mode >= mode_group_.size() || mode_group_[mode] < 0)
    fail(ErrorCode::IndexOutOfRange, "mode is outside the expressible band");
  return group_posterior(d, groups_[mode_group_[mode]]);
}

double design_score(const Design& d, const DesignProblem& p) { return DesignScorer(p).score(d); }

DesignChoice make_choice(const DesignScorer& s, const Design& d, const std::string& provenance) {
  const DesignProblem& p = s.problem();
  DesignChoice c;
  for (std::size_t i = 0; i < d.bits.size(); ++i)
    if (d.bits[i] > 0) {
      c.channels.push_back(p.candidates[i]);
      c.bits.push_back(d.bits[i]);
    }
  c.score = s.score(d);
  c.provenance = provenance;
  c.shell_trace = s.shell_trace(d);
  c.degenerate = d.empty();
  return c;
}

bool design_better(double ja, const Design& a, double jb, const Design& b, const DesignProblem& p) {
  const double tol = kTieTol * std::max(std::abs(ja), std::abs(jb));
  if (ja < jb - tol) return true;
  if (jb < ja - tol) return false;
  const int ta = design_bits(p, a), tb = design_bits(p, b);
  if (ta != tb) return ta < tb;
  if (a.mask() != b.mask()) return a.mask() < b.mask();
  // Lexicographic over the bits of carried channels in candidate order.
  return a.bits < b.bits;
}

DesignChoice select(const DesignProblem& p, int threads) {
  const std::vector<Design> all = enumerate_feasible(p);
  const DesignScorer s(p);
  std::vector<double> j(all.size());
  parallel_for(all.size(), [&](std::size_t i) { j[i] = s.score(all[i]); }, threads);
  std::size_t best = 0;
  int ties = 0;
  for (std::size_t i = 1; i < all.size(); ++i) {
    const double tol = kTieTol * std::max(std::abs(j[i]), std::abs(j[best]));
    if (std::abs(j[i] - j[best]) <= tol) ++ties;
    if (design_better(j[i], all[i], j[best], all[best], p)) best = i;
  }
  DesignChoice c = make_choice(s, all[best], "derivopt");
  if (ties > 0) c.note = "score ties resolved by bits, mask, then lexicographic order";
  if (c.degenerate) c.note = "no carried channel improves on the prior";
  return c;
}

Design design_from_choice(const DesignProblem& p, const DesignChoice& c) {
  Design d{std::vector<int>(p.candidates.size(), 0)};
  for (std::size_t i = 0; i < c.channels.size(); ++i) {
    auto it = std::find(p.candidates.begin(), p.candidates.end(), c.channels[i]);
    if (it == p.candidates.end()) fail(ErrorCode::InvalidArgument, "choice channel is not a candidate");
    d.bits[static_cast<std::size_t>(it - p.candidates.begin())] = c.bits[i];
  }
  return d;
}

ControlDesigns control_designs(const DesignProblem& p, const DesignChoice& derivopt) {
  const DesignScorer s(p);
  const std::vector<int> steps = positive_steps(p.bit_steps);
  const std::size_t n = p.candidates.size();
  ControlDesigns out;

  auto largest_step = [&](double limit) {
    int best = 0;
    for (int b : steps)
      if (b <= limit + 1e-9) best = b;
    return best;
  };
  auto index_of = [&](const std::string& id) {
    auto it = std::find(p.candidates.begin(), p.candidates.end(), id);
    if (it == p.candidates.end()) fail(ErrorCode::InvalidArgument, "channel '" + id + "' is not a candidate");
    return static_cast<std::size_t>(it - p.candidates.begin());
  };

  {
    const std::size_t c = index_of(p.tmpl.primitive);
    Design d{std::vector<int>(n, 0)};
    d.bits[c] = largest_step(p.budget_B / p.m(c));
    out.primitive = make_choice(s, d, "primitive");
    if (d.empty()) out.primitive.note = "budget too small for any primitive allocation";
  }
  {
    const std::size_t c = index_of(p.tmpl.best_single);
    Design best{std::vector<int>(n, 0)};
    double jb = s.score(best);
    for (int b : steps) {
      if (p.m(c) * b > p.budget_B + 1e-9) continue;
      Design d{std::vector<int>(n, 0)};
      d.bits[c] = b;
      const double j = s.score(d);
      if (best.empty() || design_better(j, d, jb, best, p)) {
        best = d;
        jb = j;
      }
    }
    out.best_single = make_choice(s, best, "best_single");
    if (best.empty()) out.best_single.note = "budget too small for any single-channel allocation";
  }
  {
    const Design opt = design_from_choice(p, derivopt);
    int msum = 0;
    for (std::size_t c = 0; c < n; ++c)
      if (opt.bits[c] > 0) msum += p.m(c);
    Design d{std::vector<int>(n, 0)};
    if (msum > 0) {
      const int b = largest_step(p.budget_B / msum);
      for (std::size_t c = 0; c < n; ++c)
        if (opt.bits[c] > 0) d.bits[c] = b;
    }
    out.derivbase = make_choice(s, d, "derivbase");
    if (d.empty()) out.derivbase.note = "no uniform allocation fits the selected subset";
  }
  return out;
}

SpectralField transmit(const ChannelCalibration& cal, const ChannelSpec& ch, int b, const LatentState& z) {
  const Codec codec(cal.codec_config(ch.id, b));
  return codec.decode_spectral(codec.encode_spectral(channel_forward(ch, z)));
}

LatentState posterior_decode(const DesignScorer& s, const Design& d, const std::vector<const SpectralField*>& obs,
                             const std::vector<cplx>& side, const std::vector<double>* gain_scale) {
  const DesignProblem& p = s.problem();
  const ChannelCalibration& cal = *p.cal;
  const Basis& b = *s.basis();
  const int dz = p.tmpl.dim_z;
  if (obs.size() != p.candidates.size()) fail(ErrorCode::ShapeMismatch, "one observation slot per candidate");
  for (std::size_t c = 0; c < d.bits.size(); ++c)
    if (d.bits[c] > 0 && !obs[c])
      fail(ErrorCode::MissingObservation, "no observation for carried channel '" + p.candidates[c] + "'");

  LatentState z;
  z.family = p.tmpl.family;
  z.basis = s.basis();
  z.dim_z = dz;
  z.z.assign(b.size() * dz, cplx(0.0));
  z.side = side;

  const auto modes = expressible_modes(b, cal.band, false);
  for (std::size_t m : modes) {
    const int shell = b.shell(m);
    const ModeInfo mi = mode_info(b, m);
    Eigen::MatrixXcd Q = Eigen::MatrixXcd::Zero(dz, dz);
    Eigen::VectorXcd h = Eigen::VectorXcd::Zero(dz);
    for (std::size_t c = 0; c < d.bits.size(); ++c) {
      if (d.bits[c] == 0) continue;
      const ChannelSpec& ch = p.tmpl.channel(p.candidates[c]);
      double g = cal.gain(ch.id, d.bits[c], shell);
      if (gain_scale) g *= (*gain_scale)[c];
      const double sg = std::max(cal.sigma(ch.id, d.bits[c], shell), kSigmaFloor);
      const Eigen::MatrixXcd M = symbol_matrix(ch, mi, dz);
      Q += (g * g / sg) * (M.adjoint() * M);
      Eigen::VectorXcd y(ch.m);
      for (int k = 0; k < ch.m; ++k) y[k] = obs[c]->at(k, m);
      h += (g / sg) * (M.adjoint() * y);
    }
    const auto& sz = cal.s_z[shell];
    const Eigen::VectorXcd est = posterior_from_precision(Q, Eigen::Map<const Eigen::VectorXd>(sz.data(), dz)) * h;
    for (int j = 0; j < dz; ++j) z.at(m, j) = est[j];
  }
  return z;
}

double weighted_target_error(const DesignScorer& s, const LatentState& est, const LatentState& truth) {
  const DesignProblem& p = s.problem();
  const Basis& b = *s.basis();
  const int dz = p.tmpl.dim_z;
  double e = 0;
  for (std::size_t m : expressible_modes(b, p.cal->band, false)) {
    const double w = s.weights()[m];
    if (w == 0) continue;
    const Eigen::MatrixXcd L = p.tmpl.target_matrix(mode_info(b, m));
    Eigen::VectorXcd dzv(dz);
    for (int j = 0; j < dz; ++j) dzv[j] = est.at(m, j) - truth.at(m, j);
    e += w * (L * dzv).squaredNorm();
  }
  return e;
}

namespace {

double latent_fine_rel(const DesignScorer& s, const LatentState& est, const LatentState& truth) {
  const DesignProblem& p = s.problem();
  const Basis& b = *s.basis();
  const int dz = p.tmpl.dim_z;
  double num = 0, den = 0;
  for (std::size_t m : expressible_modes(b, p.cal->band, false)) {
    if (!b.in_fine(m, p.cal->band)) continue;
    const Eigen::MatrixXcd L = p.tmpl.target_matrix(mode_info(b, m));
    Eigen::VectorXcd ze(dz), zt(dz);
    for (int j = 0; j < dz; ++j) {
      ze[j] = est.at(m, j);
      zt[j] = truth.at(m, j);
    }
    num += (L * (ze - zt)).squaredNorm();
    den += (L * zt).squaredNorm();
  }
  if (!(den > 0)) fail(ErrorCode::ZeroBandEnergy, "truth has no fine-band energy");
  return std::sqrt(num / den);
}

}  // namespace

EmpiricalResult empirical_select(const DesignProblem& p, const std::vector<SpectralField>& samples,
                                 EmpiricalMetric metric, int threads) {
  if (samples.empty()) fail(ErrorCode::EmptySamples, "empirical selection needs samples");
  const std::vector<Design> all = enumerate_feasible(p);
  const DesignScorer s(p);
  const ChannelCalibration& cal = *p.cal;
  const std::size_t nc = p.candidates.size();

  std::vector<std::pair<std::size_t, int>> pairs;
  for (const Design& d : all)
    for (std::size_t c = 0; c < nc; ++c)
      if (d.bits[c] > 0 && std::find(pairs.begin(), pairs.end(), std::make_pair(c, d.bits[c])) == pairs.end())
        pairs.emplace_back(c, d.bits[c]);
  std::vector<std::unique_ptr<Codec>> codecs;
  for (const auto& [c, b] : pairs) codecs.push_back(std::make_unique<Codec>(cal.codec_config(p.candidates[c], b)));

  std::vector<std::vector<double>> val(samples.size(), std::vector<double>(all.size(), 0.0));
  parallel_for(samples.size(), [&](std::size_t i) {
    const LatentState truth = to_latent(p.tmpl, samples[i]);
    std::vector<SpectralField> dec;
    dec.reserve(pairs.size());
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const ChannelSpec& ch = p.tmpl.channel(p.candidates[pairs[k].first]);
      dec.push_back(codecs[k]->decode_spectral(codecs[k]->encode_spectral(channel_forward(ch, truth))));
    }
    for (std::size_t di = 0; di < all.size(); ++di) {
      std::vector<const SpectralField*> obs(nc, nullptr);
      for (std::size_t c = 0; c < nc; ++c) {
        if (all[di].bits[c] == 0) continue;
        for (std::size_t k = 0; k < pairs.size(); ++k)
          if (pairs[k].first == c && pairs[k].second == all[di].bits[c]) obs[c] = &dec[k];
      }
      const LatentState est = posterior_decode(s, all[di], obs, truth.side);
      val[i][di] = metric == EmpiricalMetric::FineRel ? latent_fine_rel(s, est, truth)
                                                       : weighted_target_error(s, est, truth);
    }
  }, threads);

  EmpiricalResult r;
  r.values.assign(all.size(), 0.0);
  for (std::size_t di = 0; di < all.size(); ++di) {
    for (std::size_t i = 0; i < samples.size(); ++i) r.values[di] += val[i][di];
    r.values[di] /= static_cast<double>(samples.size());
  }
  std::size_t best = 0;
  for (std::size_t di = 1; di < all.size(); ++di)
    if (design_better(r.values[di], all[di], r.values[best], all[best], p)) best = di;
  r.choice = make_choice(s, all[best], "empirical");
  r.evaluations = all.size() * samples.size();
  return r;
}

}  // namespace cs
