#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "carrystate/calib.hpp"
#include "carrystate/fields.hpp"

namespace cs {

struct DesignProblem {
  FamilyTemplate tmpl;
  /// Candidate channel ids, in enumeration order.
  std::vector<std::string> candidates;
  double budget_B = 8.0;
  std::vector<int> bit_steps{0, 2, 4, 6, 8, 10, 12};
  std::shared_ptr<const ChannelCalibration> cal;
  /// Factor applied to weights on B_hf; 1 gives uniform weights on B_exp.
  double fine_emphasis = 1.0;
  /// Optional explicit per-mode weights on the fine basis.
  std::vector<double> weights;
  std::size_t enumeration_cap = 1000000;

  int m(std::size_t candidate) const;
  void validate() const;
};

/// One feasible design: bits per candidate, 0 meaning not carried.
struct Design {
  std::vector<int> bits;

  unsigned mask() const;
  bool empty() const { return mask() == 0; }
};

struct DesignChoice {
  std::vector<std::string> channels;
  std::vector<int> bits;
  double score = 0;
  std::string provenance;
  /// Weighted posterior trace per shell.
  std::vector<double> shell_trace;
  bool degenerate = false;
  std::string note;

  int total_bits(const FamilyTemplate& t) const;
};

/// Problem with candidates from the template and the given budget.
DesignProblem make_problem(const FamilyTemplate& t, std::shared_ptr<const ChannelCalibration> cal, double budget_B,
                           const std::vector<int>& bit_steps = {0, 2, 4, 6, 8, 10, 12});

/// Per-mode weights on the fine basis (zero outside B_exp and at the zero mode).
std::vector<double> target_weights(const Basis& basis, const BandSpec& band, double fine_emphasis);

std::size_t count_feasible(const DesignProblem& p);
/// Every feasible design by ascending subset mask, then lexicographic bits.
/// Includes the empty design. Refuses with EnumerationCap above the cap.
std::vector<Design> enumerate_feasible(const DesignProblem& p);

/// Posterior covariance at a single mode given per-channel gains and residuals.
Eigen::MatrixXcd posterior_covariance(const std::vector<Eigen::MatrixXcd>& symbols, const std::vector<double>& gains,
                                      const std::vector<double>& sigmas, const Eigen::VectorXd& prior);

/// Closed-form scorer with per-group precomputation over B_exp.
class DesignScorer {
 public:
  explicit DesignScorer(const DesignProblem& p);

  const DesignProblem& problem() const { return *p_; }
  double score(const Design& d) const;
  std::vector<double> shell_trace(const Design& d) const;
  /// Scalar precision-sum path for single-latent problems with |L|^2 = 1
  /// (incompressible flow); fails otherwise.
  double score_scalar(const Design& d) const;
  /// Posterior covariance at one mode of the fine basis.
  Eigen::MatrixXcd mode_covariance(const Design& d, std::size_t mode) const;
  BasisPtr basis() const { return basis_; }
  const std::vector<double>& weights() const { return weights_; }

 private:
  struct Group {
    int shell = 0;
    double weight_sum = 0;
    Eigen::MatrixXcd G;               // L* L
    std::vector<Eigen::MatrixXcd> P;  // M_c* M_c per candidate
    std::vector<double> mm;           // trace-free scalar |M_c|^2 for the scalar path
    double ll = 0;                    // |L|^2 for the scalar path
  };

  Eigen::MatrixXcd group_posterior(const Design& d, const Group& g) const;
  double precision_weight(std::size_t cand, int b, int shell) const;

  const DesignProblem* p_;
  BasisPtr basis_;
  std::vector<double> weights_;
  std::vector<Group> groups_;
  std::vector<int> mode_group_;
  std::vector<int> cand_index_;
};

double design_score(const Design& d, const DesignProblem& p);

DesignChoice make_choice(const DesignScorer& s, const Design& d, const std::string& provenance);
/// True if a is preferred over b under the score and tie-break rules.
bool design_better(double ja, const Design& a, double jb, const Design& b, const DesignProblem& p);

/// Exact argmin over the feasible set.
DesignChoice select(const DesignProblem& p, int threads = 0);

struct ControlDesigns {
  DesignChoice primitive;
  DesignChoice best_single;
  DesignChoice derivbase;
};

ControlDesigns control_designs(const DesignProblem& p, const DesignChoice& derivopt);

Design design_from_choice(const DesignProblem& p, const DesignChoice& c);

/// Decoded channel observation for a latent state at b bits per component.
SpectralField transmit(const ChannelCalibration& cal, const ChannelSpec& ch, int b, const LatentState& z);

/// MMSE latent estimate from decoded channel observations (one per carried
/// candidate, in candidate order; entries for non-carried candidates ignored).
LatentState posterior_decode(const DesignScorer& s, const Design& d, const std::vector<const SpectralField*>& obs,
                             const std::vector<cplx>& side, const std::vector<double>* gain_scale = nullptr);

enum class EmpiricalMetric { FineRel, PosteriorMSE };

struct EmpiricalResult {
  DesignChoice choice;
  std::size_t evaluations = 0;
  std::vector<double> values;  // per feasible design
};

EmpiricalResult empirical_select(const DesignProblem& p, const std::vector<SpectralField>& samples,
                                 EmpiricalMetric metric, int threads = 0);

/// Weighted squared target error sum_l w_l |L(l)(z_hat - z)(l)|^2.
double weighted_target_error(const DesignScorer& s, const LatentState& est, const LatentState& truth);

}  // namespace cs
