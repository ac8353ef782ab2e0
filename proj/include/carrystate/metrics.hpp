#pragma once

#include <array>
#include <vector>

#include "carrystate/basis.hpp"

namespace cs {

struct MetricThresholds {
  double tau_Q = 2.0;
  double tau_out = 0.25;

  void validate() const;
};

/// Detail metrics at one time. The zero mode is excluded from every band.
struct DetailValues {
  double expr_rel = 0;
  double fine_rel = 0;
  double q_fine = 0;
  double e_out = 0;
  /// Set when pred had no expressible energy and Q_fine fell back to 0.
  bool q_flag = false;
};

double expr_rel(const SpectralField& pred, const SpectralField& truth, const BandSpec& band);
double fine_rel(const SpectralField& pred, const SpectralField& truth, const BandSpec& band);
double q_fine(const SpectralField& pred, const SpectralField& truth, const BandSpec& band, bool* flagged = nullptr);
double e_out(const SpectralField& pred, const SpectralField& truth, const BandSpec& band);
DetailValues detail_values(const SpectralField& pred, const SpectralField& truth, const BandSpec& band);

bool input_pass(const DetailValues& v, const MetricThresholds& th);
/// Largest passing prefix index over T_r = values.size() - 1, divided by T_r.
double detail_horizon(const std::vector<DetailValues>& values, const MetricThresholds& th);
double pass_rate(const std::vector<DetailValues>& t0, const MetricThresholds& th);

double nrmse(const Field& pred, const Field& truth);
double nrmse(const SpectralField& pred, const SpectralField& truth);

/// expr_rel restricted to low/mid/high parts of B_exp split at `edges` on
/// the band radius. Bands with zero truth energy report 0.
std::array<double, 3> band_errors(const SpectralField& pred, const SpectralField& truth, const BandSpec& band,
                                  std::array<double, 2> edges);
std::array<double, 3> band_errors(const SpectralField& pred, const SpectralField& truth, const BandSpec& band);

}  // namespace cs
