#pragma once

#include <optional>
#include <string>
#include <vector>

#include "carrystate/basis.hpp"
#include "carrystate/calib.hpp"
#include "carrystate/fields.hpp"

namespace cs {

struct TheoryParams {
  int d = 2;
  double B = 8.0;
  std::vector<int> bits;
  double r = 4.0;
  double gamma = 0.5;
  double alpha = 3.0;
  double K_f = 40.0;
  double a = 4.0;

  void validate() const;
};

/// Fraction of expressible-band energy above gamma for E(rho) ~ rho^-alpha on [r/K_f, 1].
double rho_hf(double r, double gamma, double alpha, double K_f);

/// Exact lattice distortion for the split `bits`. `theta` and `rho` override
/// the continuum values 1 - gamma^d and rho_hf when given.
double dq_exact(const TheoryParams& p, std::optional<double> theta = {}, std::optional<double> rho = {});
/// Split-free lower bound in the total budget B.
double dq_lower_bound(const TheoryParams& p);
/// Budget at which the lower bound equals one.
double unit_budget(const TheoryParams& p);

struct LatticeFractions {
  double theta = 0;  // |B_hf| over the coarse lattice size
  double rho = 0;    // expected fine-band share of B_exp energy (zero mode excluded)
  std::size_t n_fine_band = 0;
  std::size_t n_expressible = 0;
};

LatticeFractions lattice_fractions(const Basis& basis, const BandSpec& band, const std::vector<double>& mode_variance);

enum class GammaRule { Fixed, Tied };
GammaRule parse_gamma_rule(const std::string& s);
const char* gamma_rule_name(GammaRule g);

struct PhaseDiagram {
  std::vector<double> B;
  std::vector<double> r;
  /// sqrt(D_q) indexed [r][B]; NaN where the band is not valid.
  std::vector<std::vector<double>> value;
  std::vector<double> gamma;  // per r
  /// Level-1 crossing points (B, r) from bilinear interpolation.
  std::vector<std::pair<double, double>> contour;
  /// Unit budget per r from the closed form (NaN where invalid).
  std::vector<double> unit_B;
};

PhaseDiagram phase_diagram(const std::vector<double>& B, const std::vector<double>& r, GammaRule rule,
                           const TheoryParams& base, int threads = 0);

struct ShellCurve {
  std::string channel;
  int bits = 0;
  std::vector<double> D;    // per shell, NaN where unobserved
  std::vector<double> L2;   // sqrt(D)
  std::vector<char> observed;
};

/// Shell mean of ||M_c(l)||_F^2 over B_exp modes (zero mode excluded).
std::vector<double> shell_mean_symbol(const ChannelSpec& ch, const Basis& basis, const BandSpec& band, int dim_z);

/// D_c(kappa) = sigma / (|M_c|^2 S_z) from per-shell arrays.
ShellCurve distortion_curve(const std::string& channel, int bits, const std::vector<double>& sigma,
                            const std::vector<double>& mbar2, const std::vector<double>& s_z);

/// Curves from a calibration; S_z is averaged over latent dimensions.
std::vector<ShellCurve> distortion_curves(const ChannelCalibration& cal, const FamilyTemplate& t,
                                          const std::vector<std::pair<std::string, int>>& channels);

double crossover_shell(double sigma_u, double sigma_omega);

/// Shells kappa where sign(a - b) changes between kappa and the next observed shell.
std::vector<int> curve_crossings(const std::vector<double>& a, const std::vector<double>& b, int from_shell = 1);

}  // namespace cs
