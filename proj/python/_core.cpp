#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "carrystate/bench.hpp"
#include "carrystate/codec.hpp"
#include "carrystate/error.hpp"
#include "carrystate/fields.hpp"
#include "carrystate/gen.hpp"
#include "carrystate/io.hpp"
#include "carrystate/metrics.hpp"
#include "carrystate/theory.hpp"

namespace py = pybind11;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

// Field layout (channel, x[, y]) maps onto a C-contiguous array of the same shape.
cs::Field to_field(const Array& a) {
  if (a.ndim() != 2 && a.ndim() != 3) throw py::value_error("expected an array of shape (c, n) or (c, n, n)");
  const int d = static_cast<int>(a.ndim()) - 1;
  const int c = static_cast<int>(a.shape(0)), n = static_cast<int>(a.shape(1));
  if (d == 2 && a.shape(2) != a.shape(1)) throw py::value_error("2D fields must be square");
  cs::Field f(d, n, c);
  std::copy(a.data(), a.data() + a.size(), f.data.begin());
  return f;
}

Array from_field(const cs::Field& f) {
  std::vector<py::ssize_t> shape{f.channels, f.n};
  if (f.d == 2) shape.push_back(f.n);
  Array a(shape);
  std::copy(f.data.begin(), f.data.end(), a.mutable_data());
  return a;
}

cs::CodecConfig codec_config(int d, int n_fine, int n_coarse, double gamma, const std::string& basis,
                             std::vector<int> bits, double clip_a, const std::vector<cs::Field>& train) {
  cs::CodecConfig cfg;
  cfg.grid = cs::GridSpec{d, n_fine, n_coarse};
  cfg.band = cs::BandSpec::make(cfg.grid, gamma);
  cfg.basis = cs::parse_basis_kind(basis);
  cfg.clip_a = clip_a;
  cfg.bits = std::move(bits);
  cfg.stats = cs::estimate_stats(cfg, train);
  return cfg;
}

py::dict row_dict(const cs::LadderRow& r) {
  py::dict d;
  d["label"] = r.label;
  d["design"] = r.design;
  d["score"] = r.score;
  d["expr_rel"] = r.expr_rel;
  d["fine_rel"] = r.fine_rel;
  d["q_fine"] = r.q_fine;
  d["e_out"] = r.e_out;
  d["pass_rate"] = r.pass_rate;
  d["t_gen"] = r.t_gen;
  d["samples"] = r.samples;
  d["degenerate"] = r.degenerate;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Budgeted carried-state coding, design and benchmarks";
  m.attr("__version__") = cs::kLibraryVersion;

  py::register_exception<cs::Error>(m, "CarrystateError");

  m.def("quantize", &cs::quantize, py::arg("x"), py::arg("b"), py::arg("a"));
  m.def("dequantize", &cs::dequantize, py::arg("index"), py::arg("b"), py::arg("a"));

  m.def("families", [] {
    std::vector<std::string> out;
    for (auto f : cs::all_families()) out.push_back(cs::family_name(f));
    return out;
  });

  m.def(
      "sample_family",
      [](const std::string& family, int n_fine, std::uint64_t seed) {
        const cs::FamilyTemplate t = cs::family_template(family);
        const cs::BasisPtr basis = cs::build_basis(t.basis_kind, t.d, n_fine, t.basis_params);
        return from_field(cs::sample_family_instance(t, cs::SpectrumModel::defaults(t.d, n_fine), basis, seed));
      },
      py::arg("family"), py::arg("n_fine"), py::arg("seed"),
      "Synthetic primitive field of shape (c, n) or (c, n, n).");

  m.def(
      "roundtrip",
      [](const Array& field, int n_coarse, std::vector<int> bits, double gamma, const std::string& basis,
         double clip_a) {
        const cs::Field f = to_field(field);
        if (bits.size() == 1) bits.assign(f.channels, bits[0]);
        const cs::CodecConfig cfg = codec_config(f.d, f.n, n_coarse, gamma, basis, bits, clip_a, {f});
        const cs::EncodedState e = cs::encode(f, cfg);
        return py::make_tuple(from_field(cs::decode(e, cfg)), e.payload_bits);
      },
      py::arg("field"), py::arg("n_coarse"), py::arg("bits"), py::arg("gamma") = 0.5, py::arg("basis") = "fourier",
      py::arg("clip_a") = 4.0, "Encode and decode one field; returns (decoded, payload_bits).");

  m.def(
      "detail_values",
      [](const Array& pred, const Array& truth, int n_coarse, double gamma, const std::string& basis) {
        const cs::Field p = to_field(pred), t = to_field(truth);
        const cs::GridSpec grid{t.d, t.n, n_coarse};
        const cs::BandSpec band = cs::BandSpec::make(grid, gamma);
        const cs::BasisPtr b = cs::build_basis(cs::parse_basis_kind(basis), grid);
        const cs::DetailValues v = cs::detail_values(cs::analyze(b, p), cs::analyze(b, t), band);
        py::dict d;
        d["expr_rel"] = v.expr_rel;
        d["fine_rel"] = v.fine_rel;
        d["q_fine"] = v.q_fine;
        d["e_out"] = v.e_out;
        d["q_flag"] = v.q_flag;
        return d;
      },
      py::arg("pred"), py::arg("truth"), py::arg("n_coarse"), py::arg("gamma") = 0.5, py::arg("basis") = "fourier");

  m.def("rho_hf", &cs::rho_hf, py::arg("r"), py::arg("gamma"), py::arg("alpha"), py::arg("K_f"));

  m.def(
      "dq_lower_bound",
      [](int d, double B, double r, double gamma, double alpha, double K_f, double a) {
        cs::TheoryParams p{d, B, {}, r, gamma, alpha, K_f, a};
        return cs::dq_lower_bound(p);
      },
      py::arg("d"), py::arg("B"), py::arg("r"), py::arg("gamma"), py::arg("alpha"), py::arg("K_f"), py::arg("a"));

  m.def(
      "dq_exact",
      [](int d, std::vector<int> bits, double r, double gamma, double alpha, double K_f, double a) {
        double B = 0;
        for (int b : bits) B += b;
        cs::TheoryParams p{d, B, std::move(bits), r, gamma, alpha, K_f, a};
        return cs::dq_exact(p);
      },
      py::arg("d"), py::arg("bits"), py::arg("r"), py::arg("gamma"), py::arg("alpha"), py::arg("K_f"), py::arg("a"));

  m.def(
      "phase_diagram",
      [](const std::vector<double>& B, const std::vector<double>& r, int d, double gamma, double alpha, double K_f,
         double a, const std::string& rule) {
        cs::TheoryParams base{d, 1.0, {}, 2.0, gamma, alpha, K_f, a};
        const cs::PhaseDiagram pd = cs::phase_diagram(B, r, cs::parse_gamma_rule(rule), base, 1);
        py::dict out;
        out["value"] = pd.value;
        out["contour"] = pd.contour;
        out["unit_B"] = pd.unit_B;
        out["gamma"] = pd.gamma;
        return out;
      },
      py::arg("B"), py::arg("r"), py::arg("d") = 2, py::arg("gamma") = 0.5, py::arg("alpha") = 3.0,
      py::arg("K_f") = 64.0, py::arg("a") = 4.0, py::arg("rule") = "fixed");

  m.def(
      "ladder",
      [](const std::string& family, const std::string& regime, const std::string& retain, std::size_t samples,
         std::size_t calib_samples, int n_fine, std::uint64_t seed, bool horizon) {
        cs::BenchConfig cfg;
        cfg.family = family;
        cfg.budget_ratio = cs::parse_budget_ratio(regime);
        cfg.retain_frac = cs::parse_retain_frac(retain);
        cfg.samples = samples;
        cfg.calib_samples = calib_samples;
        cfg.n_fine = n_fine;
        cfg.seed = seed;
        cfg.horizon = horizon;
        cs::LadderResult r;
        {
          py::gil_scoped_release release;
          r = cs::run_input_stage_ladder(cfg);
        }
        py::list rows;
        for (const auto& row : r.rows) rows.append(row_dict(row));
        return rows;
      },
      py::arg("family") = "incomp_ns", py::arg("regime") = "tight", py::arg("retain") = "medium",
      py::arg("samples") = 200, py::arg("calib_samples") = 200, py::arg("n_fine") = 0, py::arg("seed") = 7,
      py::arg("horizon") = true, "Input-stage ladder rows as dicts.");

  m.def(
      "write_field", [](const std::string& path, const Array& a) { cs::write_field(path, to_field(a)); },
      py::arg("path"), py::arg("field"));
  m.def(
      "read_field", [](const std::string& path) { return from_field(cs::read_field(path)); }, py::arg("path"));
}
