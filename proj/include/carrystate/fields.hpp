#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "carrystate/basis.hpp"

namespace cs {

enum class Family { Advection, Burgers, DiffSorp, DiffReact, Rdb, IncompNS, CompNS, Darcy };

const char* family_name(Family family);
/// Accepts both underscore and dash spellings, e.g. "incomp_ns" and "incomp-ns".
Family parse_family(const std::string& name);
std::vector<Family> all_families();

/// Geometry of one mode as seen by channel symbols.
struct ModeInfo {
  std::array<double, 2> k{0.0, 0.0};
  double lambda = 0.0;
  double norm = 0.0;  // sqrt(lambda)
};

ModeInfo mode_info(const Basis& basis, std::size_t mode);

/// Writes the rows x cols complex matrix of a mode-wise map, row-major.
using SymbolFn = std::function<void(const ModeInfo&, cplx*)>;

struct ChannelSpec {
  std::string id;
  int m = 1;
  SymbolFn symbol;
};

Eigen::MatrixXcd symbol_matrix(const ChannelSpec& ch, const ModeInfo& mi, int dim_z);

struct FamilyTemplate {
  Family family = Family::Advection;
  std::string name;
  BasisKind basis_kind = BasisKind::Fourier;
  BasisParams basis_params;
  int d = 1;
  int dim_z = 1;
  std::string primitive;
  std::vector<ChannelSpec> candidates;
  std::vector<ChannelSpec> optional_channels;
  /// Target map L_g(l): primitive components x dim_z.
  int target_components = 1;
  SymbolFn target;
  std::string best_single;
  bool is_static = false;
  /// (u, v) -> (s, d) rotation; identity outside diffusion-reaction.
  Eigen::Matrix2d rotation = Eigen::Matrix2d::Identity();

  const ChannelSpec& channel(const std::string& id) const;
  int candidate_index(const std::string& id) const;
  Eigen::MatrixXcd target_matrix(const ModeInfo& mi) const;
};

FamilyTemplate family_template(Family family, const BasisParams& params = {});
FamilyTemplate family_template(const std::string& name);

/// Per-mode latent coefficients z(l), layout [mode][dim]. The zero mode is
/// not part of the latent: its primitive coefficients are kept in `side`.
struct LatentState {
  Family family = Family::Advection;
  BasisPtr basis;
  int dim_z = 1;
  std::vector<cplx> z;
  std::vector<cplx> side;

  cplx& at(std::size_t mode, int j) { return z[mode * dim_z + j]; }
  const cplx& at(std::size_t mode, int j) const { return z[mode * dim_z + j]; }
};

LatentState to_latent(const FamilyTemplate& t, const SpectralField& primitive);
LatentState to_latent(const FamilyTemplate& t, const BasisPtr& basis, const Field& primitive);
SpectralField from_latent_spectral(const FamilyTemplate& t, const LatentState& z);
Field from_latent(const FamilyTemplate& t, const LatentState& z);

/// x_c(l) = M_c(l) z(l) on every mode.
SpectralField channel_forward(const ChannelSpec& ch, const LatentState& z);

struct InvertResult {
  int dim_z = 1;
  std::vector<cplx> z;        // [mode][dim]
  std::vector<char> observed;  // 0 where the symbol vanishes
};

/// z_c(l) = M_c(l)^+ y_c(l); modes with a zero symbol are reported unobserved.
InvertResult channel_invert(const ChannelSpec& ch, const SpectralField& observed, int dim_z);

}  // namespace cs
