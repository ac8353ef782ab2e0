#include "carrystate/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "carrystate/error.hpp"
#include "carrystate/parallel.hpp"

namespace cs {

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Integral of rho^-alpha over [t, 1].
double tail_integral(double t, double alpha) {
  const double s = 1.0 - alpha;
  const double lt = std::log(t);
  if (s == 0.0) return -lt;
  return -std::expm1(s * lt) / s;
}

}  // namespace

void TheoryParams::validate() const {
  if (d != 1 && d != 2) fail(ErrorCode::DomainError, "d must be 1 or 2");
  if (!(gamma > 0 && gamma < 1)) fail(ErrorCode::DomainError, "gamma must lie in (0, 1)");
  if (!(r > 0) || !(K_f > 0)) fail(ErrorCode::DomainError, "r and K_f must be positive");
  if (!(r / K_f < gamma)) fail(ErrorCode::DomainError, "r/K_f must be below gamma");
  if (!(alpha > 0)) fail(ErrorCode::DomainError, "alpha must be positive");
  if (!(a > 0)) fail(ErrorCode::DomainError, "clip radius must be positive");
  if (!bits.empty()) {
    double s = 0;
    for (int b : bits) s += b;
    if (std::abs(s - B) > 1e-12) fail(ErrorCode::DomainError, "bit split does not sum to B");
  }
}

double rho_hf(double r, double gamma, double alpha, double K_f) {
  const double lo = r / K_f;
  if (!(lo > 0 && lo < gamma && gamma < 1)) fail(ErrorCode::DomainError, "rho_hf needs 0 < r/K_f < gamma < 1");
  if (!(alpha > 0)) fail(ErrorCode::DomainError, "alpha must be positive");
  return tail_integral(gamma, alpha) / tail_integral(lo, alpha);
}

double dq_exact(const TheoryParams& p, std::optional<double> theta, std::optional<double> rho) {
  if (p.bits.empty()) fail(ErrorCode::DomainError, "dq_exact needs a bit split");
  TheoryParams q = p;
  q.B = 0;
  for (int b : p.bits) q.B += b;
  q.validate();
  const double th = theta.value_or(1.0 - std::pow(p.gamma, p.d));
  const double rh = rho.value_or(rho_hf(p.r, p.gamma, p.alpha, p.K_f));
  if (!(rh > 0)) fail(ErrorCode::DomainError, "fine-band energy fraction must be positive");
  double s = 0;
  for (int b : p.bits) s += std::ldexp(1.0, -2 * b);
  return th * (p.a * p.a / 3.0) / (p.d * rh) * s;
}

double dq_lower_bound(const TheoryParams& p) {
  TheoryParams q = p;
  q.bits.clear();
  q.validate();
  const double th = 1.0 - std::pow(p.gamma, p.d);
  return th * p.a * p.a / (3.0 * rho_hf(p.r, p.gamma, p.alpha, p.K_f)) * std::exp2(-2.0 * p.B / p.d);
}

double unit_budget(const TheoryParams& p) {
  TheoryParams q = p;
  q.bits.clear();
  q.validate();
  const double th = 1.0 - std::pow(p.gamma, p.d);
  return 0.5 * p.d * std::log2(th * p.a * p.a / (3.0 * rho_hf(p.r, p.gamma, p.alpha, p.K_f)));
}

LatticeFractions lattice_fractions(const Basis& basis, const BandSpec& band, const std::vector<double>& var) {
  if (var.size() != basis.size()) fail(ErrorCode::ShapeMismatch, "variance vector does not match the basis");
  LatticeFractions f;
  double e_exp = 0, e_hf = 0;
  for (std::size_t m : expressible_modes(basis, band, false)) {
    ++f.n_expressible;
    e_exp += var[m];
    if (basis.in_fine(m, band)) {
      ++f.n_fine_band;
      e_hf += var[m];
    }
  }
  double coarse = 1;
  for (int i = 0; i < basis.d(); ++i) coarse *= band.n_coarse();
  f.theta = static_cast<double>(f.n_fine_band) / coarse;
  f.rho = e_exp > 0 ? e_hf / e_exp : 0.0;
  return f;
}

GammaRule parse_gamma_rule(const std::string& s) {
  if (s == "fixed") return GammaRule::Fixed;
  if (s == "tied") return GammaRule::Tied;
  fail(ErrorCode::InvalidArgument, "gamma rule must be 'fixed' or 'tied'");
}

const char* gamma_rule_name(GammaRule g) { return g == GammaRule::Fixed ? "fixed" : "tied"; }

PhaseDiagram phase_diagram(const std::vector<double>& B, const std::vector<double>& r, GammaRule rule,
                           const TheoryParams& base, int threads) {
  if (B.empty() || r.empty()) fail(ErrorCode::InvalidArgument, "phase diagram needs nonempty axes");
  PhaseDiagram pd;
  pd.B = B;
  pd.r = r;
  pd.value.assign(r.size(), std::vector<double>(B.size(), kNaN));
  pd.gamma.assign(r.size(), kNaN);
  pd.unit_B.assign(r.size(), kNaN);
  parallel_for(r.size(), [&](std::size_t i) {
    TheoryParams p = base;
    p.bits.clear();
    p.r = r[i];
    p.gamma = rule == GammaRule::Fixed ? base.gamma : std::sqrt(r[i] / base.K_f);
    pd.gamma[i] = p.gamma;
    if (!(p.r / p.K_f < p.gamma && p.gamma < 1)) return;
    pd.unit_B[i] = unit_budget(p);
    for (std::size_t j = 0; j < B.size(); ++j) {
      p.B = B[j];
      pd.value[i][j] = std::sqrt(dq_lower_bound(p));
    }
  }, threads);
  const double level = 1.0;
  auto crosses = [&](double a, double b) {
    return std::isfinite(a) && std::isfinite(b) && ((a - level) * (b - level) < 0 || (a == level && b != level));
  };
  for (std::size_t i = 0; i < r.size(); ++i)
    for (std::size_t j = 0; j < B.size(); ++j) {
      const double v = pd.value[i][j];
      if (j + 1 < B.size() && crosses(v, pd.value[i][j + 1])) {
        const double t = (level - v) / (pd.value[i][j + 1] - v);
        pd.contour.emplace_back(B[j] + t * (B[j + 1] - B[j]), r[i]);
      }
      if (i + 1 < r.size() && crosses(v, pd.value[i + 1][j])) {
        const double t = (level - v) / (pd.value[i + 1][j] - v);
        pd.contour.emplace_back(B[j], r[i] + t * (r[i + 1] - r[i]));
      }
    }
  return pd;
}

std::vector<double> shell_mean_symbol(const ChannelSpec& ch, const Basis& basis, const BandSpec& band, int dim_z) {
  int ns = 0;
  const auto modes = expressible_modes(basis, band, false);
  for (std::size_t m : modes) ns = std::max(ns, basis.shell(m) + 1);
  std::vector<double> sum(ns, 0.0), cnt(ns, 0.0);
  for (std::size_t m : modes) {
    const int s = basis.shell(m);
    sum[s] += symbol_matrix(ch, mode_info(basis, m), dim_z).squaredNorm();
    cnt[s] += 1;
  }
  for (int s = 0; s < ns; ++s) sum[s] = cnt[s] > 0 ? sum[s] / cnt[s] : 0.0;
  return sum;
}

ShellCurve distortion_curve(const std::string& channel, int bits, const std::vector<double>& sigma,
                            const std::vector<double>& mbar2, const std::vector<double>& s_z) {
  const std::size_t n = std::min({sigma.size(), mbar2.size(), s_z.size()});
  ShellCurve c;
  c.channel = channel;
  c.bits = bits;
  c.D.assign(n, kNaN);
  c.L2.assign(n, kNaN);
  c.observed.assign(n, 0);
  for (std::size_t k = 0; k < n; ++k) {
    const double den = mbar2[k] * s_z[k];
    if (!(den > 0)) continue;
    c.D[k] = sigma[k] / den;
    c.L2[k] = std::sqrt(c.D[k]);
    c.observed[k] = 1;
  }
  return c;
}

std::vector<ShellCurve> distortion_curves(const ChannelCalibration& cal, const FamilyTemplate& t,
                                          const std::vector<std::pair<std::string, int>>& channels) {
  const BasisPtr basis = build_basis(cal.basis, cal.grid, cal.basis_params);
  std::vector<double> sz(cal.shells(), 0.0);
  for (int k = 0; k < cal.shells(); ++k) {
    for (double v : cal.s_z[k]) sz[k] += v;
    sz[k] /= cal.dim_z;
  }
  std::vector<ShellCurve> out;
  for (const auto& [id, b] : channels) {
    const ChannelStats& st = cal.channel(id);
    const int bi = cal.bit_index(b);
    if (bi < 0) fail(ErrorCode::MissingCalibration, "bit width " + std::to_string(b) + " is not calibrated");
    std::vector<double> mbar2 = shell_mean_symbol(t.channel(id), *basis, cal.band, cal.dim_z);
    mbar2.resize(cal.shells(), 0.0);
    ShellCurve c = distortion_curve(id, b, st.sigma[bi], mbar2, sz);
    for (std::size_t k = 0; k < c.observed.size(); ++k)
      if (!st.observed[k]) {
        c.observed[k] = 0;
        c.D[k] = c.L2[k] = kNaN;
      }
    out.push_back(std::move(c));
  }
  return out;
}

double crossover_shell(double sigma_u, double sigma_omega) {
  if (!(sigma_u > 0) || !(sigma_omega > 0)) fail(ErrorCode::DomainError, "residual variances must be positive");
  return std::sqrt(sigma_omega / sigma_u);
}

std::vector<int> curve_crossings(const std::vector<double>& a, const std::vector<double>& b, int from_shell) {
  std::vector<int> out;
  const int n = static_cast<int>(std::min(a.size(), b.size()));
  int prev = -1;
  double prev_diff = 0;
  for (int k = std::max(0, from_shell); k < n; ++k) {
    if (!std::isfinite(a[k]) || !std::isfinite(b[k])) continue;
    const double diff = a[k] - b[k];
    if (diff == 0) continue;
    if (prev >= 0 && (diff > 0) != (prev_diff > 0)) out.push_back(k);
    prev = k;
    prev_diff = diff;
  }
  return out;
}

}  // namespace cs
