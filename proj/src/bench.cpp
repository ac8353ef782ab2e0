#include "carrystate/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <map>

#include "carrystate/codec.hpp"
#include "carrystate/error.hpp"
#include "carrystate/parallel.hpp"
#include "carrystate/rng.hpp"
#include "carrystate/theory.hpp"

namespace cs {

namespace {

const char* kRowLabels[4] = {"Primitive", "BestSingleDerived", "DerivBase", "DerivOpt"};

double parse_number(const std::string& s, const char* what) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !(v > 0))
    fail(ErrorCode::InvalidArgument, std::string("invalid ") + what + " '" + s + "'");
  return v;
}

std::string design_string(const DesignChoice& c) {
  if (c.channels.empty()) return "{}";
  std::string s;
  for (std::size_t i = 0; i < c.channels.size(); ++i) {
    if (i) s += "+";
    s += c.channels[i] + "@" + std::to_string(c.bits[i]);
  }
  return s;
}

std::vector<int> positive(const std::vector<int>& steps) {
  std::vector<int> out;
  for (int b : steps)
    if (b > 0 && std::find(out.begin(), out.end(), b) == out.end()) out.push_back(b);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

double parse_budget_ratio(const std::string& s) {
  if (s == "tight") return 0.125;
  if (s == "medium") return 0.25;
  if (s == "relaxed") return 0.5;
  return parse_number(s, "budget ratio");
}

double parse_retain_frac(const std::string& s) {
  if (s == "coarse") return 0.125;
  if (s == "medium") return 0.25;
  if (s == "dense") return 0.5;
  const double v = parse_number(s, "retain fraction");
  if (v > 1) fail(ErrorCode::InvalidArgument, "retain fraction must not exceed 1");
  return v;
}

std::string budget_label(double r) {
  if (r == 0.125) return "tight";
  if (r == 0.25) return "medium";
  if (r == 0.5) return "relaxed";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", r);
  return buf;
}

std::string retain_label(double f) {
  if (f == 0.125) return "coarse";
  if (f == 0.25) return "medium";
  if (f == 0.5) return "dense";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", f);
  return buf;
}

std::uint64_t train_seed(std::uint64_t master, std::size_t i) { return derive_seed(master, 1, i); }
std::uint64_t test_seed(std::uint64_t master, std::size_t i) { return derive_seed(master, 2, i); }

ResolvedRegime resolve_regime(const BenchConfig& cfg, const FamilyTemplate& t) {
  ResolvedRegime reg;
  const int nf = cfg.n_fine > 0 ? cfg.n_fine : (t.d == 2 ? 128 : 512);
  const double nc_real = cfg.retain_frac * nf;
  const int nc = static_cast<int>(std::lround(nc_real));
  if (std::abs(nc_real - nc) > 1e-9 || nc < 2)
    fail(ErrorCode::InvalidArgument, "retain fraction does not give an integer coarse grid");
  reg.grid = GridSpec{t.d, nf, nc};
  reg.grid.validate();
  reg.band = BandSpec::make(reg.grid, cfg.gamma);
  reg.m_primitive = t.channel(t.primitive).m;
  reg.budget_B = cfg.budget_ratio * 16.0 * reg.m_primitive;
  reg.model = SpectrumModel::defaults(t.d, nf);
  if (cfg.model.alpha > 0) {
    reg.model.alpha = cfg.model.alpha;
    reg.model.k0 = cfg.model.k0;
    reg.model.amplitude = cfg.model.amplitude;
    reg.model.K_f = 0.5 * nf / reg.model.k0;
  }
  reg.model.validate();
  reg.nu = cfg.nu > 0 ? cfg.nu : 1.0 / (reg.band.k_c * reg.band.k_c * std::max(1, cfg.T_r));
  try {
    TheoryParams tp;
    tp.d = t.d;
    tp.B = reg.budget_B;
    tp.r = reg.grid.ratio();
    tp.gamma = cfg.gamma;
    tp.alpha = reg.model.alpha;
    tp.K_f = reg.model.K_f;
    tp.a = cfg.clip_a;
    reg.dq_bound_sqrt = std::sqrt(dq_lower_bound(tp));
  } catch (const Error&) {
    reg.dq_bound_sqrt = std::numeric_limits<double>::quiet_NaN();
  }
  return reg;
}

std::shared_ptr<const ChannelCalibration> bench_calibration(const BenchConfig& cfg, const FamilyTemplate& t,
                                                            const ResolvedRegime& reg) {
  const BasisPtr basis = build_basis(t.basis_kind, reg.grid, t.basis_params);
  std::vector<SpectralField> train = cfg.train_samples;
  if (train.empty()) {
    train.resize(cfg.calib_samples);
    parallel_for(train.size(), [&](std::size_t i) {
      train[i] = sample_family_spectral(t, reg.model, basis, train_seed(cfg.seed, i), cfg.gen);
    }, cfg.threads);
  }
  CalibrationOptions opt;
  opt.bit_grid = positive(cfg.bit_steps);
  opt.clip_a = cfg.clip_a;
  opt.lossless = cfg.lossless;
  opt.threads = cfg.threads;
  auto cal = std::make_shared<ChannelCalibration>(calibrate_family(t, train, reg.grid, reg.band, opt));
  cal->seed = cfg.seed;
  cal->provenance = cfg.train_samples.empty() ? "synthetic" : "external";
  return cal;
}

LadderResult run_input_stage_ladder(const BenchConfig& cfg) {
  cfg.thresholds.validate();
  if (cfg.T_r < 1) fail(ErrorCode::InvalidArgument, "trajectory length must be at least 1");
  const FamilyTemplate t = family_template(cfg.family);
  LadderResult res;
  res.family = t.name;
  res.regime = resolve_regime(cfg, t);
  const ResolvedRegime& reg = res.regime;
  const BasisPtr basis = build_basis(t.basis_kind, reg.grid, t.basis_params);
  res.cal = cfg.cal ? cfg.cal : bench_calibration(cfg, t, reg);
  const ChannelCalibration& cal = *res.cal;
  if (cal.grid.n_fine != reg.grid.n_fine || cal.grid.n_coarse != reg.grid.n_coarse || cal.band.k_1 != reg.band.k_1 ||
      cal.family != t.name)
    fail(ErrorCode::InvalidArgument, "calibration does not match the benchmark regime");

  DesignProblem p = make_problem(t, res.cal, reg.budget_B, cfg.bit_steps);
  p.fine_emphasis = cfg.fine_emphasis;
  const DesignScorer scorer(p);
  res.derivopt = select(p, cfg.threads);
  res.controls = control_designs(p, res.derivopt);
  const DesignChoice* choices[4] = {&res.controls.primitive, &res.controls.best_single, &res.controls.derivbase,
                                    &res.derivopt};
  std::vector<Design> designs;
  for (const DesignChoice* c : choices) designs.push_back(design_from_choice(p, *c));

  std::map<std::pair<std::string, int>, std::unique_ptr<Codec>> codecs;
  for (const Design& d : designs)
    for (std::size_t c = 0; c < d.bits.size(); ++c) {
      if (d.bits[c] == 0) continue;
      const auto key = std::make_pair(p.candidates[c], d.bits[c]);
      if (!codecs.count(key)) codecs[key] = std::make_unique<Codec>(cal.codec_config(key.first, key.second));
    }

  const std::size_t n = cfg.test_samples.empty() ? cfg.samples : cfg.test_samples.size();
  if (n == 0) fail(ErrorCode::EmptySamples, "benchmark needs test samples");
  std::vector<std::array<DetailValues, 4>> v0(n);
  std::vector<std::array<double, 4>> tg(n);
  const std::size_t nmodes = basis->size();
  std::vector<double> decay_rate(nmodes);
  for (std::size_t m = 0; m < nmodes; ++m) {
    const double k = basis->shell(m);
    decay_rate[m] = reg.nu * k * k;
  }

  parallel_for(n, [&](std::size_t i) {
    const SpectralField x = cfg.test_samples.empty()
                                ? sample_family_spectral(t, reg.model, basis, test_seed(cfg.seed, i), cfg.gen)
                                : cfg.test_samples[i];
    const LatentState z = to_latent(t, x);
    const SpectralField truth = from_latent_spectral(t, z);
    for (int r = 0; r < 4; ++r) {
      const Design& d = designs[r];
      SpectralField pred;
      if (d.empty()) {
        LatentState zero = z;
        std::fill(zero.z.begin(), zero.z.end(), cplx(0.0));
        pred = from_latent_spectral(t, zero);
      } else if (r == 0) {
        const std::size_t c = static_cast<std::size_t>(p.tmpl.candidate_index(t.primitive));
        const Codec& codec = *codecs.at({t.primitive, d.bits[c]});
        pred = codec.decode_spectral(codec.encode_spectral(x));
      } else {
        std::vector<SpectralField> dec(p.candidates.size());
        std::vector<const SpectralField*> obs(p.candidates.size(), nullptr);
        for (std::size_t c = 0; c < d.bits.size(); ++c) {
          if (d.bits[c] == 0) continue;
          const Codec& codec = *codecs.at({p.candidates[c], d.bits[c]});
          dec[c] = codec.decode_spectral(codec.encode_spectral(channel_forward(t.channel(p.candidates[c]), z)));
          obs[c] = &dec[c];
        }
        LatentState est;
        if (r == 1) {
          const std::size_t c = static_cast<std::size_t>(p.tmpl.candidate_index(t.best_single));
          const InvertResult inv = channel_invert(t.channel(p.candidates[c]), dec[c], t.dim_z);
          est = z;
          for (std::size_t m = 0; m < nmodes; ++m)
            for (int j = 0; j < t.dim_z; ++j)
              est.at(m, j) = (m != 0 && inv.observed[m] && basis->in_expressible(m, reg.band))
                                 ? inv.z[m * t.dim_z + j]
                                 : cplx(0.0);
        } else {
          est = posterior_decode(scorer, d, obs, z.side);
        }
        pred = from_latent_spectral(t, est);
      }
      v0[i][r] = detail_values(pred, truth, reg.band);
      if (!cfg.horizon) continue;
      std::vector<DetailValues> traj(cfg.T_r + 1);
      traj[0] = v0[i][r];
      SpectralField tt(basis, truth.channels), pt(basis, truth.channels);
      for (int s = 1; s <= cfg.T_r; ++s) {
        for (int c = 0; c < truth.channels; ++c)
          for (std::size_t m = 0; m < nmodes; ++m) {
            const cplx tv = truth.at(c, m) * std::exp(-decay_rate[m] * s);
            tt.at(c, m) = tv;
            pt.at(c, m) = tv + (pred.at(c, m) - truth.at(c, m));
          }
        traj[s] = detail_values(pt, tt, reg.band);
      }
      tg[i][r] = detail_horizon(traj, cfg.thresholds);
    }
  }, cfg.threads);

  res.fine_rel_samples.assign(4, std::vector<double>(n));
  for (int r = 0; r < 4; ++r) {
    LadderRow row;
    row.label = kRowLabels[r];
    row.design = design_string(*choices[r]);
    row.score = choices[r]->score;
    row.samples = n;
    row.degenerate = choices[r]->degenerate;
    row.note = choices[r]->note;
    std::vector<DetailValues> col(n);
    for (std::size_t i = 0; i < n; ++i) {
      const DetailValues& v = v0[i][r];
      col[i] = v;
      row.expr_rel += v.expr_rel;
      row.fine_rel += v.fine_rel;
      row.q_fine += v.q_fine;
      row.e_out += v.e_out;
      row.t_gen += tg[i][r];
      res.fine_rel_samples[r][i] = v.fine_rel;
    }
    const double dn = static_cast<double>(n);
    row.expr_rel /= dn;
    row.fine_rel /= dn;
    row.q_fine /= dn;
    row.e_out /= dn;
    row.t_gen = cfg.horizon ? row.t_gen / dn : std::numeric_limits<double>::quiet_NaN();
    row.pass_rate = pass_rate(col, cfg.thresholds);
    res.rows.push_back(row);
  }
  return res;
}

SweepResult sweep(const std::vector<std::string>& families, const std::vector<double>& budgets,
                  const std::vector<double>& retains, const BenchConfig& base) {
  SweepResult out;
  for (const auto& f : families)
    for (double b : budgets)
      for (double r : retains) {
        SweepCell cell;
        cell.family = f;
        cell.budget_ratio = b;
        cell.retain_frac = r;
        BenchConfig cfg = base;
        cfg.family = f;
        cfg.budget_ratio = b;
        cfg.retain_frac = r;
        cfg.cal = nullptr;
        try {
          cell.result = run_input_stage_ladder(cfg);
          cell.ok = true;
        } catch (const Error& e) {
          cell.error = std::string(error_name(e.code())) + ": " + e.what();
        }
        out.cells.push_back(std::move(cell));
      }
  out.pooled.resize(4);
  out.wins.assign(4, 0);
  std::vector<double> weight(4, 0.0);
  for (int r = 0; r < 4; ++r) {
    out.pooled[r].label = kRowLabels[r];
    out.pooled[r].design = "pooled";
  }
  for (const auto& cell : out.cells) {
    if (!cell.ok) continue;
    int best = 0;
    for (int r = 0; r < 4; ++r) {
      const LadderRow& row = cell.result.rows[r];
      const double w = static_cast<double>(row.samples);
      LadderRow& pr = out.pooled[r];
      pr.expr_rel += w * row.expr_rel;
      pr.fine_rel += w * row.fine_rel;
      pr.q_fine += w * row.q_fine;
      pr.e_out += w * row.e_out;
      pr.pass_rate += w * row.pass_rate;
      pr.t_gen += w * row.t_gen;
      pr.samples += row.samples;
      weight[r] += w;
      if (row.fine_rel < cell.result.rows[best].fine_rel) best = r;
    }
    ++out.wins[best];
  }
  for (int r = 0; r < 4; ++r) {
    if (weight[r] == 0) continue;
    LadderRow& pr = out.pooled[r];
    pr.expr_rel /= weight[r];
    pr.fine_rel /= weight[r];
    pr.q_fine /= weight[r];
    pr.e_out /= weight[r];
    pr.pass_rate /= weight[r];
    pr.t_gen /= weight[r];
  }
  return out;
}

}  // namespace cs
