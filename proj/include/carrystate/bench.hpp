#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "carrystate/calib.hpp"
#include "carrystate/design.hpp"
#include "carrystate/gen.hpp"
#include "carrystate/metrics.hpp"

namespace cs {

/// BudgetRatio: tight 0.125, medium 0.25, relaxed 0.5, or a number.
double parse_budget_ratio(const std::string& s);
/// RetainFrac (N_c / N_f): coarse 1/8, medium 1/4, dense 1/2, or a number.
double parse_retain_frac(const std::string& s);
std::string budget_label(double ratio);
std::string retain_label(double frac);

struct BenchConfig {
  std::string family = "incomp_ns";
  double budget_ratio = 0.125;
  double retain_frac = 0.25;
  double gamma = 0.5;
  /// Fine points per axis; 0 picks 128 in 2D and 512 in 1D.
  int n_fine = 0;
  std::size_t samples = 200;
  std::size_t calib_samples = 200;
  std::uint64_t seed = 7;
  MetricThresholds thresholds;
  int T_r = 10;
  /// Decay rate of the synthetic trajectories; 0 picks 1 / (k_c^2 T_r).
  double nu = 0.0;
  std::vector<int> bit_steps{0, 2, 4, 6, 8, 10, 12};
  double clip_a = 4.0;
  bool lossless = false;
  double fine_emphasis = 1.0;
  FamilyGenParams gen;
  /// Spectrum override; alpha <= 0 keeps the per-dimension default.
  SpectrumModel model{0.0, 4.0, 16.0, 1.0};
  bool horizon = true;
  int threads = 0;
  /// Optional external data on the fine basis; synthetic samples otherwise.
  std::vector<SpectralField> train_samples;
  std::vector<SpectralField> test_samples;
  std::shared_ptr<const ChannelCalibration> cal;
};

struct ResolvedRegime {
  GridSpec grid;
  BandSpec band;
  double budget_B = 0;
  int m_primitive = 1;
  SpectrumModel model;
  double nu = 0;
  /// sqrt of the budget-only lower bound at this regime (NaN outside its domain).
  double dq_bound_sqrt = 0;
};

ResolvedRegime resolve_regime(const BenchConfig& cfg, const FamilyTemplate& t);

struct LadderRow {
  std::string label;
  std::string design;
  double score = 0;
  double expr_rel = 0;
  double fine_rel = 0;
  double q_fine = 0;
  double e_out = 0;
  double pass_rate = 0;
  double t_gen = 0;
  std::size_t samples = 0;
  bool degenerate = false;
  std::string note;
};

struct LadderResult {
  std::string family;
  ResolvedRegime regime;
  std::vector<LadderRow> rows;  // Primitive, BestSingleDerived, DerivBase, DerivOpt
  DesignChoice derivopt;
  ControlDesigns controls;
  std::shared_ptr<const ChannelCalibration> cal;
  /// Per-sample fineRel(0) per row, [row][sample].
  std::vector<std::vector<double>> fine_rel_samples;
};

/// Seeds for training (stream 1) and test (stream 2) samples; the streams never share indices.
std::uint64_t train_seed(std::uint64_t master, std::size_t i);
std::uint64_t test_seed(std::uint64_t master, std::size_t i);

std::shared_ptr<const ChannelCalibration> bench_calibration(const BenchConfig& cfg, const FamilyTemplate& t,
                                                            const ResolvedRegime& reg);

LadderResult run_input_stage_ladder(const BenchConfig& cfg);

struct SweepCell {
  std::string family;
  double budget_ratio = 0;
  double retain_frac = 0;
  bool ok = false;
  std::string error;
  LadderResult result;
};

struct SweepResult {
  std::vector<SweepCell> cells;
  /// Sample-weighted pooled means per row label.
  std::vector<LadderRow> pooled;
  /// Number of cells where each row has the smallest fineRel(0).
  std::vector<int> wins;
};

SweepResult sweep(const std::vector<std::string>& families, const std::vector<double>& budgets,
                  const std::vector<double>& retains, const BenchConfig& base);

}  // namespace cs
