#include "carrystate/fields.hpp"

#include <algorithm>
#include <cmath>

#include "carrystate/error.hpp"

namespace cs {

namespace {

constexpr double kZero = 1e-300;
const cplx I(0.0, 1.0);

std::string normalize_name(std::string s) {
  std::replace(s.begin(), s.end(), '-', '_');
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

SymbolFn scalar(std::function<cplx(const ModeInfo&)> f) {
  return [f](const ModeInfo& mi, cplx* out) { out[0] = f(mi); };
}

cplx one(const ModeInfo&) { return 1.0; }
cplx root_lambda(const ModeInfo& mi) { return mi.norm; }
cplx lambda_of(const ModeInfo& mi) { return mi.lambda; }

void scalar_family(FamilyTemplate& t, const std::string& prim, const std::string& first,
                   const std::string& second, const std::string& best) {
  t.dim_z = 1;
  t.primitive = prim;
  t.candidates = {{prim, 1, scalar(one)}, {first, 1, scalar(root_lambda)}, {second, 1, scalar(lambda_of)}};
  t.target_components = 1;
  t.target = scalar(one);
  t.best_single = best;
}

}  // namespace

const char* family_name(Family family) {
  switch (family) {
    case Family::Advection: return "advection";
    case Family::Burgers: return "burgers";
    case Family::DiffSorp: return "diffsorp";
    case Family::DiffReact: return "diffreact";
    case Family::Rdb: return "rdb";
    case Family::IncompNS: return "incomp_ns";
    case Family::CompNS: return "comp_ns";
    case Family::Darcy: return "darcy";
  }
  return "unknown";
}

Family parse_family(const std::string& name) {
  const std::string s = normalize_name(name);
  for (Family f : all_families())
    if (s == family_name(f)) return f;
  fail(ErrorCode::UnknownFamily, "unknown family '" + name + "'");
}

std::vector<Family> all_families() {
  return {Family::Advection, Family::Burgers, Family::DiffSorp, Family::DiffReact,
          Family::Rdb,       Family::IncompNS, Family::CompNS,  Family::Darcy};
}

ModeInfo mode_info(const Basis& basis, std::size_t mode) {
  ModeInfo mi;
  mi.k = basis.wavevector(mode);
  mi.lambda = basis.lambda(mode);
  mi.norm = std::sqrt(mi.lambda);
  return mi;
}

Eigen::MatrixXcd symbol_matrix(const ChannelSpec& ch, const ModeInfo& mi, int dim_z) {
  Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> m(ch.m, dim_z);
  m.setZero();
  ch.symbol(mi, m.data());
  return m;
}

const ChannelSpec& FamilyTemplate::channel(const std::string& id) const {
  for (const auto& c : candidates)
    if (c.id == id) return c;
  for (const auto& c : optional_channels)
    if (c.id == id) return c;
  fail(ErrorCode::InvalidArgument, "family " + name + " has no channel '" + id + "'");
}

int FamilyTemplate::candidate_index(const std::string& id) const {
  for (std::size_t i = 0; i < candidates.size(); ++i)
    if (candidates[i].id == id) return static_cast<int>(i);
  return -1;
}

Eigen::MatrixXcd FamilyTemplate::target_matrix(const ModeInfo& mi) const {
  Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> m(target_components, dim_z);
  m.setZero();
  target(mi, m.data());
  return m;
}

FamilyTemplate family_template(Family family, const BasisParams& params) {
  FamilyTemplate t;
  t.family = family;
  t.name = family_name(family);
  t.basis_params = params;
  switch (family) {
    case Family::Advection:
    case Family::Burgers:
      t.basis_kind = BasisKind::Fourier;
      t.d = 1;
      scalar_family(t, "u", "Lambda_u", "Delta_u", "Lambda_u");
      break;
    case Family::DiffSorp:
      t.basis_kind = BasisKind::Eigen1D;
      t.d = 1;
      scalar_family(t, "u", "Lambda_R_u", "L_R_u", "Lambda_R_u");
      break;
    case Family::Rdb:
      t.basis_kind = BasisKind::CosineNeumann;
      t.d = 2;
      scalar_family(t, "h", "Lambda_N_h", "Delta_N_h", "Lambda_N_h");
      break;
    case Family::Darcy:
      t.basis_kind = BasisKind::CosineNeumann;
      t.d = 2;
      t.is_static = true;
      scalar_family(t, "a", "Lambda_E_a", "L_E_a", "Lambda_E_a");
      break;
    case Family::DiffReact: {
      t.basis_kind = BasisKind::CosineNeumann;
      t.d = 2;
      t.dim_z = 2;
      t.primitive = "q";
      const double s = 1.0 / std::sqrt(2.0);
      t.rotation << s, s, s, -s;
      // q = R^T z with z = (s, d); R is symmetric here.
      auto rot = [s](double g) {
        return [s, g](const ModeInfo& mi, cplx* out) {
          const double w = g < 0 ? mi.norm : (g > 0 ? mi.lambda : 1.0);
          out[0] = s * w;
          out[1] = s * w;
          out[2] = s * w;
          out[3] = -s * w;
        };
      };
      t.candidates = {{"q", 2, rot(0)},
                      {"Lambda_N_q", 2, rot(-1)},
                      {"Delta_N_q", 2, rot(1)},
                      {"d", 1, [](const ModeInfo&, cplx* out) {
                         out[0] = 0.0;
                         out[1] = 1.0;
                       }}};
      t.optional_channels = {{"s", 1, [](const ModeInfo&, cplx* out) {
                                out[0] = 1.0;
                                out[1] = 0.0;
                              }}};
      t.target_components = 2;
      t.target = rot(0);
      t.best_single = "d";
      break;
    }
    case Family::IncompNS: {
      t.basis_kind = BasisKind::Fourier;
      t.d = 2;
      t.dim_z = 1;
      t.primitive = "u";
      auto eperp = [](const ModeInfo& mi, cplx* out) {
        if (mi.norm < kZero) {
          out[0] = out[1] = 0.0;
          return;
        }
        out[0] = -mi.k[1] / mi.norm;
        out[1] = mi.k[0] / mi.norm;
      };
      t.candidates = {{"u", 2, eperp},
                      {"omega", 1, scalar([](const ModeInfo& mi) { return I * mi.norm; })}};
      t.optional_channels = {{"psi", 1, scalar([](const ModeInfo& mi) {
                                return mi.norm < kZero ? cplx(0.0) : -I / mi.norm;
                              })}};
      t.target_components = 2;
      t.target = eperp;
      t.best_single = "omega";
      break;
    }
    case Family::CompNS: {
      t.basis_kind = BasisKind::Fourier;
      t.d = 2;
      t.dim_z = 4;
      t.primitive = "q";
      // z = (rho, phi, psi, p), v = grad phi + grad_perp psi.
      auto q = [](const ModeInfo& mi, cplx* out) {
        std::fill(out, out + 16, cplx(0.0));
        out[0] = 1.0;
        out[5] = I * mi.k[0];
        out[6] = -I * mi.k[1];
        out[9] = I * mi.k[1];
        out[10] = I * mi.k[0];
        out[15] = 1.0;
      };
      t.candidates = {{"q", 4, q},
                      {"chi", 1, [](const ModeInfo& mi, cplx* out) {
                         out[0] = 0.0;
                         out[1] = -mi.lambda;
                         out[2] = 0.0;
                         out[3] = 0.0;
                       }},
                      {"omega", 1, [](const ModeInfo& mi, cplx* out) {
                         out[0] = 0.0;
                         out[1] = 0.0;
                         out[2] = -mi.lambda;
                         out[3] = 0.0;
                       }},
                      {"Lambda_p", 1, [](const ModeInfo& mi, cplx* out) {
                         out[0] = 0.0;
                         out[1] = 0.0;
                         out[2] = 0.0;
                         out[3] = mi.norm;
                       }}};
      t.target_components = 4;
      t.target = q;
      t.best_single = "chi";
      break;
    }
  }
  if (t.basis_kind == BasisKind::Eigen1D && t.d != 1) fail(ErrorCode::UnsupportedBasis, "eigen basis is 1D");
  return t;
}

FamilyTemplate family_template(const std::string& name) { return family_template(parse_family(name)); }

LatentState to_latent(const FamilyTemplate& t, const SpectralField& prim) {
  if (prim.channels != t.target_components)
    fail(ErrorCode::ShapeMismatch, "primitive field has the wrong number of components");
  if (prim.basis->kind() != t.basis_kind || prim.basis->d() != t.d)
    fail(ErrorCode::ShapeMismatch, "primitive field is not on the family basis");
  const Basis& b = *prim.basis;
  LatentState z;
  z.family = t.family;
  z.basis = prim.basis;
  z.dim_z = t.dim_z;
  z.z.assign(b.size() * t.dim_z, cplx(0.0));
  z.side.resize(t.target_components);
  for (int c = 0; c < t.target_components; ++c) z.side[c] = prim.at(c, 0);
  const double s = 1.0 / std::sqrt(2.0);
  for (std::size_t m = 1; m < b.size(); ++m) {
    switch (t.family) {
      case Family::IncompNS: {
        const ModeInfo mi = mode_info(b, m);
        if (mi.norm < kZero) break;
        z.at(m, 0) = (-mi.k[1] * prim.at(0, m) + mi.k[0] * prim.at(1, m)) / mi.norm;
        break;
      }
      case Family::CompNS: {
        const ModeInfo mi = mode_info(b, m);
        z.at(m, 0) = prim.at(0, m);
        z.at(m, 3) = prim.at(3, m);
        if (mi.lambda < kZero) break;
        const cplx vx = prim.at(1, m), vy = prim.at(2, m);
        z.at(m, 1) = -I * (mi.k[0] * vx + mi.k[1] * vy) / mi.lambda;
        z.at(m, 2) = -I * (-mi.k[1] * vx + mi.k[0] * vy) / mi.lambda;
        break;
      }
      case Family::DiffReact:
        z.at(m, 0) = s * (prim.at(0, m) + prim.at(1, m));
        z.at(m, 1) = s * (prim.at(0, m) - prim.at(1, m));
        break;
      default:
        z.at(m, 0) = prim.at(0, m);
        break;
    }
  }
  return z;
}

LatentState to_latent(const FamilyTemplate& t, const BasisPtr& basis, const Field& primitive) {
  return to_latent(t, analyze(basis, primitive));
}

SpectralField from_latent_spectral(const FamilyTemplate& t, const LatentState& z) {
  const Basis& b = *z.basis;
  SpectralField out(z.basis, t.target_components);
  std::vector<cplx> l(static_cast<std::size_t>(t.target_components) * t.dim_z);
  for (std::size_t m = 1; m < b.size(); ++m) {
    const ModeInfo mi = mode_info(b, m);
    std::fill(l.begin(), l.end(), cplx(0.0));
    t.target(mi, l.data());
    for (int r = 0; r < t.target_components; ++r) {
      cplx acc = 0.0;
      for (int j = 0; j < t.dim_z; ++j) acc += l[r * t.dim_z + j] * z.at(m, j);
      out.at(r, m) = acc;
    }
  }
  for (int r = 0; r < t.target_components && r < static_cast<int>(z.side.size()); ++r) out.at(r, 0) = z.side[r];
  return out;
}

Field from_latent(const FamilyTemplate& t, const LatentState& z) { return synthesize(from_latent_spectral(t, z)); }

SpectralField channel_forward(const ChannelSpec& ch, const LatentState& z) {
  const Basis& b = *z.basis;
  SpectralField out(z.basis, ch.m);
  std::vector<cplx> mat(static_cast<std::size_t>(ch.m) * z.dim_z);
  for (std::size_t m = 0; m < b.size(); ++m) {
    const ModeInfo mi = mode_info(b, m);
    std::fill(mat.begin(), mat.end(), cplx(0.0));
    ch.symbol(mi, mat.data());
    for (int r = 0; r < ch.m; ++r) {
      cplx acc = 0.0;
      for (int j = 0; j < z.dim_z; ++j) acc += mat[r * z.dim_z + j] * z.at(m, j);
      out.at(r, m) = acc;
    }
  }
  return out;
}

InvertResult channel_invert(const ChannelSpec& ch, const SpectralField& obs, int dim_z) {
  if (obs.channels != ch.m) fail(ErrorCode::ShapeMismatch, "observation has the wrong number of components");
  const Basis& b = *obs.basis;
  InvertResult r;
  r.dim_z = dim_z;
  r.z.assign(b.size() * dim_z, cplx(0.0));
  r.observed.assign(b.size(), 0);
  Eigen::VectorXcd y(ch.m);
  for (std::size_t m = 0; m < b.size(); ++m) {
    const Eigen::MatrixXcd mat = symbol_matrix(ch, mode_info(b, m), dim_z);
    if (mat.norm() < 1e-300) continue;
    for (int c = 0; c < ch.m; ++c) y[c] = obs.at(c, m);
    Eigen::VectorXcd z;
    if (ch.m == 1 && dim_z == 1) {
      z = y / mat(0, 0);
    } else {
      z = mat.completeOrthogonalDecomposition().pseudoInverse() * y;
    }
    for (int j = 0; j < dim_z; ++j) r.z[m * dim_z + j] = z[j];
    r.observed[m] = 1;
  }
  return r;
}

}  // namespace cs
