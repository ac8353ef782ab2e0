#include "carrystate/metrics.hpp"

#include <cmath>

#include "carrystate/error.hpp"

namespace cs {

namespace {

void check_pair(const SpectralField& a, const SpectralField& b) {
  if (a.channels != b.channels || a.modes() != b.modes() || a.basis->kind() != b.basis->kind())
    fail(ErrorCode::ShapeMismatch, "pred and truth differ in shape");
}

struct BandSums {
  double err = 0, truth = 0, pred = 0;
};

template <class Sel>
BandSums sums(const SpectralField& pred, const SpectralField& truth, Sel sel) {
  check_pair(pred, truth);
  BandSums s;
  const Basis& b = *truth.basis;
  for (std::size_t m = 1; m < b.size(); ++m) {
    if (!sel(m)) continue;
    for (int c = 0; c < truth.channels; ++c) {
      s.err += std::norm(pred.at(c, m) - truth.at(c, m));
      s.truth += std::norm(truth.at(c, m));
      s.pred += std::norm(pred.at(c, m));
    }
  }
  return s;
}

}  // namespace

void MetricThresholds::validate() const {
  if (!(tau_Q > 1)) fail(ErrorCode::InvalidArgument, "tau_Q must exceed 1");
  if (!(tau_out > 0)) fail(ErrorCode::InvalidArgument, "tau_out must be positive");
}

double expr_rel(const SpectralField& pred, const SpectralField& truth, const BandSpec& band) {
  const Basis& b = *truth.basis;
  const BandSums s = sums(pred, truth, [&](std::size_t m) { return b.in_expressible(m, band); });
  if (!(s.truth > 0)) fail(ErrorCode::ZeroBandEnergy, "truth has no expressible energy");
  return std::sqrt(s.err / s.truth);
}

double fine_rel(const SpectralField& pred, const SpectralField& truth, const BandSpec& band) {
  const Basis& b = *truth.basis;
  const BandSums s = sums(pred, truth, [&](std::size_t m) { return b.in_fine(m, band); });
  if (!(s.truth > 0)) fail(ErrorCode::ZeroBandEnergy, "truth has no fine-band energy");
  return std::sqrt(s.err / s.truth);
}

double q_fine(const SpectralField& pred, const SpectralField& truth, const BandSpec& band, bool* flagged) {
  const Basis& b = *truth.basis;
  const BandSums e = sums(pred, truth, [&](std::size_t m) { return b.in_expressible(m, band); });
  const BandSums f = sums(pred, truth, [&](std::size_t m) { return b.in_fine(m, band); });
  if (!(f.truth > 0)) fail(ErrorCode::ZeroBandEnergy, "truth has no fine-band energy");
  if (flagged) *flagged = false;
  if (!(e.pred > 0)) {
    if (flagged) *flagged = true;
    return 0.0;
  }
  return (f.pred / e.pred) / (f.truth / e.truth);
}

double e_out(const SpectralField& pred, const SpectralField& truth, const BandSpec& band) {
  const Basis& b = *truth.basis;
  const BandSums in = sums(pred, truth, [&](std::size_t m) { return b.in_expressible(m, band); });
  const BandSums out = sums(pred, truth, [&](std::size_t m) { return !b.in_expressible(m, band); });
  if (!(in.truth > 0)) fail(ErrorCode::ZeroBandEnergy, "truth has no expressible energy");
  return out.pred / in.truth;
}

DetailValues detail_values(const SpectralField& pred, const SpectralField& truth, const BandSpec& band) {
  DetailValues v;
  v.expr_rel = expr_rel(pred, truth, band);
  v.fine_rel = fine_rel(pred, truth, band);
  v.q_fine = q_fine(pred, truth, band, &v.q_flag);
  v.e_out = e_out(pred, truth, band);
  return v;
}

bool input_pass(const DetailValues& v, const MetricThresholds& th) {
  return v.expr_rel < 1.0 && v.fine_rel < 1.0 && v.q_fine >= 1.0 / th.tau_Q && v.q_fine <= th.tau_Q &&
         v.e_out < th.tau_out;
}

double detail_horizon(const std::vector<DetailValues>& values, const MetricThresholds& th) {
  th.validate();
  if (values.empty()) fail(ErrorCode::InvalidArgument, "horizon needs at least the t = 0 values");
  const std::size_t tr = values.size() - 1;
  std::size_t t = 0;
  if (!input_pass(values[0], th)) return 0.0;
  while (t + 1 <= tr && input_pass(values[t + 1], th)) ++t;
  if (tr == 0) return 1.0;
  return static_cast<double>(t) / static_cast<double>(tr);
}

double pass_rate(const std::vector<DetailValues>& t0, const MetricThresholds& th) {
  if (t0.empty()) return 0.0;
  std::size_t n = 0;
  for (const auto& v : t0) n += input_pass(v, th) ? 1 : 0;
  return static_cast<double>(n) / static_cast<double>(t0.size());
}

double nrmse(const Field& pred, const Field& truth) {
  if (pred.data.size() != truth.data.size()) fail(ErrorCode::ShapeMismatch, "pred and truth differ in shape");
  double e = 0, t = 0;
  for (std::size_t i = 0; i < truth.data.size(); ++i) {
    e += (pred.data[i] - truth.data[i]) * (pred.data[i] - truth.data[i]);
    t += truth.data[i] * truth.data[i];
  }
  if (!(t > 0)) fail(ErrorCode::ZeroBandEnergy, "truth has zero energy");
  return std::sqrt(e / t);
}

double nrmse(const SpectralField& pred, const SpectralField& truth) {
  check_pair(pred, truth);
  double e = 0, t = 0;
  for (std::size_t i = 0; i < truth.coef.size(); ++i) {
    e += std::norm(pred.coef[i] - truth.coef[i]);
    t += std::norm(truth.coef[i]);
  }
  if (!(t > 0)) fail(ErrorCode::ZeroBandEnergy, "truth has zero energy");
  return std::sqrt(e / t);
}

std::array<double, 3> band_errors(const SpectralField& pred, const SpectralField& truth, const BandSpec& band,
                                  std::array<double, 2> edges) {
  if (!(edges[0] <= edges[1])) fail(ErrorCode::InvalidArgument, "band edges must be ordered");
  const Basis& b = *truth.basis;
  std::array<double, 3> out{};
  for (int k = 0; k < 3; ++k) {
    const BandSums s = sums(pred, truth, [&](std::size_t m) {
      if (!b.in_expressible(m, band)) return false;
      const double r = b.band_radius(m);
      const int part = r <= edges[0] ? 0 : (r <= edges[1] ? 1 : 2);
      return part == k;
    });
    out[k] = s.truth > 0 ? std::sqrt(s.err / s.truth) : 0.0;
  }
  return out;
}

std::array<double, 3> band_errors(const SpectralField& pred, const SpectralField& truth, const BandSpec& band) {
  return band_errors(pred, truth, band, {band.k_c / 3.0, 2.0 * band.k_c / 3.0});
}

}  // namespace cs
