#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "carrystate/bench.hpp"
#include "carrystate/calib.hpp"
#include "carrystate/codec.hpp"
#include "carrystate/design.hpp"
#include "carrystate/error.hpp"
#include "carrystate/fields.hpp"
#include "carrystate/gen.hpp"
#include "carrystate/io.hpp"
#include "carrystate/metrics.hpp"
#include "carrystate/parallel.hpp"
#include "carrystate/rng.hpp"
#include "carrystate/svg.hpp"
#include "carrystate/theory.hpp"

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Common {
  int threads = 1;
  std::uint64_t seed = 7;
  std::string out_dir = ".";
  std::string format = "csv";
  std::string manifest;
};

struct RegimeOpts {
  std::string family = "incomp_ns";
  std::string regime = "tight";
  std::string retain = "medium";
  double gamma = 0.5;
  int n_fine = 0;
  std::string bits = "0,2,4,6,8,10,12";
  double clip_a = 4.0;
  std::size_t samples = 200;
  std::size_t calib_samples = 200;
  double tau_q = 2.0;
  double tau_out = 0.25;
  int T_r = 10;
  double nu = 0.0;
  double alpha = 0.0;
  double k0 = 4.0;
  double fine_emphasis = 1.0;
  std::string cal;
  std::string h5;
  std::string h5_key = "tensor";
  std::size_t h5_frame = 0;
  bool h5_channel_axis = false;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

double to_double(const std::string& s) {
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || s.empty()) cs::fail(cs::ErrorCode::Usage, "not a number: '" + s + "'");
  return v;
}

/// "a:b" (step 1), "a:b:s" or a comma list.
std::vector<double> parse_grid(const std::string& s) {
  if (s.find(':') == std::string::npos) {
    std::vector<double> v;
    for (const auto& t : split(s, ',')) v.push_back(to_double(t));
    if (v.empty()) cs::fail(cs::ErrorCode::Usage, "empty list");
    return v;
  }
  const auto parts = split(s, ':');
  if (parts.size() < 2 || parts.size() > 3) cs::fail(cs::ErrorCode::Usage, "range must be a:b or a:b:step");
  const double a = to_double(parts[0]), b = to_double(parts[1]);
  const double st = parts.size() == 3 ? to_double(parts[2]) : 1.0;
  if (!(st > 0) || b < a) cs::fail(cs::ErrorCode::Usage, "range '" + s + "' is empty");
  std::vector<double> v;
  const long n = static_cast<long>(std::floor((b - a) / st + 1e-9));
  for (long i = 0; i <= n; ++i) v.push_back(a + i * st);
  return v;
}

std::vector<int> parse_ints(const std::string& s) {
  std::vector<int> v;
  for (double x : parse_grid(s)) {
    if (x != std::floor(x)) cs::fail(cs::ErrorCode::Usage, "expected integers in '" + s + "'");
    v.push_back(static_cast<int>(x));
  }
  return v;
}

void add_common(CLI::App* app, Common& c) {
  app->add_option("--threads", c.threads, "Worker threads");
  app->add_option("--seed", c.seed, "Master seed");
  app->add_option("--out-dir", c.out_dir, "Output directory (default: $CARRYSTATE_OUT_DIR or .)");
  app->add_option("--format", c.format, "Report format")->check(CLI::IsMember({"csv", "json"}));
  app->add_option("--manifest", c.manifest, "Manifest path (default: <out-dir>/<command>.manifest.json)");
}

void add_regime(CLI::App* app, RegimeOpts& r) {
  app->add_option("--family", r.family, "Family template");
  app->add_option("--regime", r.regime, "Budget ratio: tight, medium, relaxed or a number");
  app->add_option("--retain", r.retain, "Retain fraction N_c/N_f: coarse, medium, dense or a number");
  app->add_option("--gamma", r.gamma, "Fine-band split gamma");
  app->add_option("--n-fine", r.n_fine, "Fine points per axis (0 = 128 in 2D, 512 in 1D)");
  app->add_option("--bits", r.bits, "Bit steps, e.g. 0,2,4,6 or 0:12:2");
  app->add_option("--clip-a", r.clip_a, "Quantizer clip");
  app->add_option("--samples", r.samples, "Test samples");
  app->add_option("--calib-samples", r.calib_samples, "Calibration samples");
  app->add_option("--tau-q", r.tau_q, "Q_fine tolerance");
  app->add_option("--tau-out", r.tau_out, "Out-of-band tolerance");
  app->add_option("--T-r", r.T_r, "Horizon trajectory length");
  app->add_option("--nu", r.nu, "Trajectory decay rate (0 = 1/(k_c^2 T_r))");
  app->add_option("--alpha", r.alpha, "Spectral slope (0 = per-dimension default)");
  app->add_option("--k0", r.k0, "Spectral plateau shell");
  app->add_option("--fine-emphasis", r.fine_emphasis, "Weight factor on the fine band");
  app->add_option("--cal", r.cal, "CAL1 calibration file");
  app->add_option("--h5", r.h5, "PDEBench HDF5 source (snapshot mode)");
  app->add_option("--h5-key", r.h5_key, "HDF5 dataset key");
  app->add_option("--h5-frame", r.h5_frame, "HDF5 frame index");
  app->add_flag("--h5-channel-axis", r.h5_channel_axis, "HDF5 data has a trailing channel axis");
}

json model_json(const cs::SpectrumModel& m) {
  return {{"alpha", m.alpha}, {"k0", m.k0}, {"K_f", m.K_f}, {"amplitude", m.amplitude}};
}

json gen_json(const cs::FamilyGenParams& g) {
  return {{"imbalance", g.imbalance}, {"compressive", g.compressive}, {"vortical", g.vortical}, {"thermo", g.thermo}};
}

json regime_json(const cs::ResolvedRegime& reg) {
  return {{"grid", {{"d", reg.grid.d}, {"n_fine", reg.grid.n_fine}, {"n_coarse", reg.grid.n_coarse}}},
          {"band", {{"k_c", reg.band.k_c}, {"k_1", reg.band.k_1}, {"gamma", reg.band.gamma}}},
          {"budget_B", reg.budget_B},
          {"m_primitive", reg.m_primitive},
          {"model", model_json(reg.model)},
          {"nu", reg.nu},
          {"dq_bound_sqrt", std::isfinite(reg.dq_bound_sqrt) ? json(reg.dq_bound_sqrt) : json(nullptr)}};
}

std::vector<cs::SpectralField> ingest_range(const RegimeOpts& r, const cs::FamilyTemplate& t,
                                            const cs::ResolvedRegime& reg, std::size_t first, std::size_t count) {
  cs::IngestOptions opt;
  opt.key = r.h5_key;
  opt.frame = r.h5_frame;
  opt.d = t.d;
  opt.channel_axis = r.h5_channel_axis;
  const cs::BasisPtr basis = cs::build_basis(t.basis_kind, reg.grid, t.basis_params);
  const int m = t.channel(t.primitive).m;
  std::vector<cs::SpectralField> out;
  for (std::size_t i = 0; i < count; ++i) {
    opt.sample = first + i;
    const cs::Field f = cs::ingest_pdebench(r.h5, opt);
    if (f.n != reg.grid.n_fine || f.channels != m)
      cs::fail(cs::ErrorCode::ShapeMismatch, "HDF5 sample does not match the fine grid or the primitive channels");
    out.push_back(cs::analyze(basis, f));
  }
  return out;
}

struct Bench {
  cs::BenchConfig cfg;
  cs::FamilyTemplate tmpl;
  cs::ResolvedRegime reg;
};

Bench make_bench(const RegimeOpts& r, const Common& c, bool load_cal = true) {
  Bench b;
  cs::BenchConfig& cfg = b.cfg;
  cfg.family = r.family;
  cfg.budget_ratio = cs::parse_budget_ratio(r.regime);
  cfg.retain_frac = cs::parse_retain_frac(r.retain);
  cfg.gamma = r.gamma;
  cfg.n_fine = r.n_fine;
  cfg.samples = r.samples;
  cfg.calib_samples = r.calib_samples;
  cfg.seed = c.seed;
  cfg.thresholds.tau_Q = r.tau_q;
  cfg.thresholds.tau_out = r.tau_out;
  cfg.T_r = r.T_r;
  cfg.nu = r.nu;
  cfg.bit_steps = parse_ints(r.bits);
  cfg.clip_a = r.clip_a;
  cfg.fine_emphasis = r.fine_emphasis;
  cfg.model.alpha = r.alpha;
  cfg.model.k0 = r.k0;
  cfg.threads = c.threads;
  b.tmpl = cs::family_template(r.family);
  b.reg = cs::resolve_regime(cfg, b.tmpl);
  if (!r.h5.empty()) {
    cfg.train_samples = ingest_range(r, b.tmpl, b.reg, 0, r.calib_samples);
    cfg.test_samples = ingest_range(r, b.tmpl, b.reg, r.calib_samples, r.samples);
  }
  if (load_cal && !r.cal.empty()) cfg.cal = std::make_shared<cs::ChannelCalibration>(cs::read_cal(r.cal));
  return b;
}

json bench_json(const Bench& b, const RegimeOpts& r) {
  const cs::BenchConfig& cfg = b.cfg;
  return {{"family", b.tmpl.name},
          {"budget_ratio", cfg.budget_ratio},
          {"retain_frac", cfg.retain_frac},
          {"gamma", cfg.gamma},
          {"samples", cfg.samples},
          {"calib_samples", cfg.calib_samples},
          {"thresholds", {{"tau_Q", cfg.thresholds.tau_Q}, {"tau_out", cfg.thresholds.tau_out}}},
          {"T_r", cfg.T_r},
          {"bit_steps", cfg.bit_steps},
          {"clip_a", cfg.clip_a},
          {"fine_emphasis", cfg.fine_emphasis},
          {"generator", gen_json(cfg.gen)},
          {"calibration", r.cal.empty() ? json("computed") : json(r.cal)},
          {"source", r.h5.empty() ? json("synthetic")
                                  : json({{"h5", r.h5}, {"key", r.h5_key}, {"frame", r.h5_frame},
                                          {"channel_axis", r.h5_channel_axis}})},
          {"regime", regime_json(b.reg)}};
}

class Run {
 public:
  Run(std::string command, const Common& c, std::vector<std::string> argv)
      : command_(std::move(command)), c_(c), argv_(std::move(argv)) {
    fs::create_directories(c_.out_dir);
  }

  std::string path(const std::string& name) {
    const std::string p = (fs::path(c_.out_dir) / name).string();
    outputs_.push_back(p);
    return p;
  }
  std::string report_path(const std::string& stem) { return path(stem + "." + c_.format); }
  void add_output(const std::string& p) { outputs_.push_back(p); }

  json config;

  void finish() {
    json m;
    m["command"] = command_;
    m["argv"] = argv_;
    m["config"] = config;
    m["seeds"] = {{"master", c_.seed},
                  {"splitting", "derive_seed(master, stream, index); stream 1 train, 2 test, 3 gen"}};
    m["threads"] = c_.threads;
    m["versions"] = {{"carrystate", cs::kLibraryVersion},
                     {"FLD1", cs::kFieldVersion},
                     {"ENC1", cs::kEncodedVersion},
                     {"CAL1", cs::kCalibrationVersion}};
    m["outputs"] = outputs_;
    const std::string mp =
        c_.manifest.empty() ? (fs::path(c_.out_dir) / (command_ + ".manifest.json")).string() : c_.manifest;
    cs::write_text(mp, m.dump(1) + "\n");
  }

 private:
  std::string command_;
  Common c_;
  std::vector<std::string> argv_;
  std::vector<std::string> outputs_;
};

json codec_config_json(const cs::CodecConfig& c) {
  return {{"grid", {{"d", c.grid.d}, {"n_fine", c.grid.n_fine}, {"n_coarse", c.grid.n_coarse}}},
          {"band", {{"k_c", c.band.k_c}, {"k_1", c.band.k_1}, {"gamma", c.band.gamma}}},
          {"basis", cs::basis_kind_name(c.basis)},
          {"robin", {c.basis_params.robin_left, c.basis_params.robin_right}},
          {"clip_a", c.clip_a},
          {"bits", c.bits},
          {"stats", {{"mean", c.stats.mean}, {"std", c.stats.std}}},
          {"lossless", c.lossless}};
}

cs::CodecConfig codec_config_from_json(const json& j) {
  try {
    cs::CodecConfig c;
    c.grid = cs::GridSpec{j.at("grid").at("d"), j.at("grid").at("n_fine"), j.at("grid").at("n_coarse")};
    c.band.k_c = j.at("band").at("k_c");
    c.band.k_1 = j.at("band").at("k_1");
    c.band.gamma = j.at("band").at("gamma");
    c.basis = cs::parse_basis_kind(j.at("basis"));
    c.basis_params.robin_left = j.at("robin").at(0);
    c.basis_params.robin_right = j.at("robin").at(1);
    c.clip_a = j.at("clip_a");
    c.bits = j.at("bits").get<std::vector<int>>();
    c.stats.mean = j.at("stats").at("mean").get<std::vector<double>>();
    c.stats.std = j.at("stats").at("std").get<std::vector<double>>();
    c.lossless = j.at("lossless");
    return c;
  } catch (const json::exception& e) {
    cs::fail(cs::ErrorCode::SchemaViolation, std::string("codec config: ") + e.what());
  }
}

cs::Table ladder_horizon_table(const cs::LadderResult& r, int T_r) {
  cs::Table t;
  t.columns = {"family", "label", "design", "t_gen", "pass_rate", "T_r", "nu"};
  for (const auto& row : r.rows)
    t.rows.push_back({r.family, row.label, row.design, row.t_gen, row.pass_rate, static_cast<long long>(T_r),
                      r.regime.nu});
  return t;
}

}  // namespace

int run_cli(std::vector<std::string> args);

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(std::move(args));
}

int run_cli(std::vector<std::string> args) {
  if (!args.empty() && args[0] == "replay") {
    if (args.size() < 2) {
      std::cerr << "usage: carrystate replay <manifest.json> [extra flags]\n";
      return 1;
    }
    try {
      const json m = json::parse(cs::read_text(args[1]));
      std::vector<std::string> re = m.at("argv").get<std::vector<std::string>>();
      re.insert(re.end(), args.begin() + 2, args.end());
      return run_cli(re);
    } catch (const cs::Error& e) {
      std::cerr << "error [" << cs::error_name(e.code()) << "]: " << e.what() << "\n";
      return cs::exit_code(e.code());
    } catch (const json::exception& e) {
      std::cerr << "error [SchemaViolation]: " << e.what() << "\n";
      return 2;
    }
  }

  CLI::App app{"Budgeted carried-state design, coding and benchmarks"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.set_version_flag("--version", cs::kLibraryVersion);

  Common common;
  if (const char* env = std::getenv("CARRYSTATE_OUT_DIR")) common.out_dir = env;
  RegimeOpts ro;

  // gen
  auto* gen = app.add_subcommand("gen", "Sample synthetic primitive fields (FLD1)");
  std::size_t gen_count = 1;
  add_common(gen, common);
  add_regime(gen, ro);
  gen->add_option("--count", gen_count, "Number of fields");

  // calibrate
  auto* calc = app.add_subcommand("calibrate", "Fit per-channel gains and residuals (CAL1)");
  std::string cal_out = "cal.json";
  add_common(calc, common);
  add_regime(calc, ro);
  calc->add_option("--out", cal_out, "Calibration file name inside the output directory");

  // design
  auto* des = app.add_subcommand("design", "Select the carried state under the budget");
  double design_B = 0;
  std::string design_out = "design.json";
  add_common(des, common);
  add_regime(des, ro);
  des->add_option("--B", design_B, "Explicit budget in bits per coarse point (overrides --regime)");
  des->add_option("--out", design_out, "Design file name inside the output directory");

  // codec
  auto* cod = app.add_subcommand("codec", "Encode, decode or round-trip a field");
  std::string codec_mode = "roundtrip", codec_in, codec_out, codec_cfg, codec_basis = "fourier", codec_bits = "8";
  int codec_nc = 0;
  double codec_gamma = 0.5, codec_clip = 4.0;
  add_common(cod, common);
  cod->add_option("--mode", codec_mode, "encode, decode or roundtrip")
      ->check(CLI::IsMember({"encode", "decode", "roundtrip"}));
  cod->add_option("--in", codec_in, "Input FLD1 (encode, roundtrip) or ENC1 (decode)")->required();
  cod->add_option("--out", codec_out, "Output file name inside the output directory");
  cod->add_option("--codec-config", codec_cfg, "Codec config JSON written by encode (decode only)");
  cod->add_option("--basis", codec_basis, "fourier, cosine or eigen-1d");
  cod->add_option("--bits", codec_bits, "Bits per component, one value or a comma list");
  cod->add_option("--n-coarse", codec_nc, "Coarse points per axis");
  cod->add_option("--gamma", codec_gamma, "Fine-band split gamma");
  cod->add_option("--clip-a", codec_clip, "Quantizer clip");

  // ladder / horizon
  auto* lad = app.add_subcommand("ladder", "Input-stage mechanism ladder");
  bool no_horizon = false;
  add_common(lad, common);
  add_regime(lad, ro);
  lad->add_flag("--no-horizon", no_horizon, "Skip the synthetic horizon trajectories");
  auto* hor = app.add_subcommand("horizon", "Detail-faithful horizon per ladder row");
  add_common(hor, common);
  add_regime(hor, ro);

  // sweep
  auto* swp = app.add_subcommand("sweep", "Ladder over families and regimes");
  std::string sw_fam = "advection,burgers,diffreact,rdb,incomp_ns", sw_bud = "tight,medium,relaxed",
              sw_ret = "coarse,medium,dense";
  add_common(swp, common);
  add_regime(swp, ro);
  swp->add_option("--families", sw_fam, "Comma list of families");
  swp->add_option("--budgets", sw_bud, "Comma list of budget ratios");
  swp->add_option("--retains", sw_ret, "Comma list of retain fractions");

  // phase-diagram
  auto* pdc = app.add_subcommand("phase-diagram", "sqrt(D_q) lower bound over (B, r)");
  cs::TheoryParams tp;
  tp.K_f = 64;
  std::string pd_B = "1:16", pd_r = "2:16", pd_rule = "fixed";
  add_common(pdc, common);
  pdc->add_option("--d", tp.d, "Dimension");
  pdc->add_option("--alpha", tp.alpha, "Spectral slope");
  pdc->add_option("--a", tp.a, "Quantizer clip");
  pdc->add_option("--Kf", tp.K_f, "Spectral cutoff K_f");
  pdc->add_option("--gamma", tp.gamma, "Fine-band split gamma");
  pdc->add_option("--gamma-rule", pd_rule, "fixed or tied")->check(CLI::IsMember({"fixed", "tied"}));
  pdc->add_option("--B", pd_B, "Budget grid");
  pdc->add_option("--r", pd_r, "Resolution ratio grid");

  // shell-curves
  auto* shc = app.add_subcommand("shell-curves", "Calibrated per-shell distortion curves");
  std::string sc_channels = "u:6,omega:6";
  add_common(shc, common);
  add_regime(shc, ro);
  shc->add_option("--channels", sc_channels, "Comma list of channel:bits");

  // metrics
  auto* met = app.add_subcommand("metrics", "Detail metrics of a prediction against a reference");
  std::string m_pred, m_truth, m_basis = "fourier";
  int m_nc = 0;
  double m_gamma = 0.5, m_tq = 2.0, m_to = 0.25;
  add_common(met, common);
  met->add_option("--pred", m_pred, "Predicted FLD1")->required();
  met->add_option("--truth", m_truth, "Reference FLD1")->required();
  met->add_option("--basis", m_basis, "fourier, cosine or eigen-1d");
  met->add_option("--n-coarse", m_nc, "Coarse points per axis")->required();
  met->add_option("--gamma", m_gamma, "Fine-band split gamma");
  met->add_option("--tau-q", m_tq, "Q_fine tolerance");
  met->add_option("--tau-out", m_to, "Out-of-band tolerance");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    cs::set_default_threads(common.threads);
    if (common.threads < 1) cs::fail(cs::ErrorCode::Usage, "--threads must be at least 1");
    CLI::App* sub = app.get_subcommands().front();
    Run run(sub->get_name(), common, args);

    if (sub == gen) {
      Bench b = make_bench(ro, common, false);
      const cs::BasisPtr basis = cs::build_basis(b.tmpl.basis_kind, b.reg.grid, b.tmpl.basis_params);
      json seeds = json::array();
      for (std::size_t i = 0; i < gen_count; ++i) {
        const std::uint64_t s = cs::derive_seed(common.seed, 3, i);
        char name[64];
        std::snprintf(name, sizeof name, "%s_%04zu.fld", b.tmpl.name.c_str(), i);
        cs::write_field(run.path(name), cs::sample_family_instance(b.tmpl, b.reg.model, basis, s, b.cfg.gen));
        seeds.push_back(s);
      }
      run.config = {{"family", b.tmpl.name},
                    {"n_fine", b.reg.grid.n_fine},
                    {"d", b.tmpl.d},
                    {"basis", cs::basis_kind_name(b.tmpl.basis_kind)},
                    {"model", model_json(b.reg.model)},
                    {"generator", gen_json(b.cfg.gen)},
                    {"count", gen_count},
                    {"sample_seeds", seeds}};
    } else if (sub == calc) {
      Bench b = make_bench(ro, common, false);
      auto cal = cs::bench_calibration(b.cfg, b.tmpl, b.reg);
      cs::write_cal(run.path(cal_out), *cal);
      run.config = bench_json(b, ro);
    } else if (sub == des) {
      Bench b = make_bench(ro, common);
      auto cal = b.cfg.cal ? b.cfg.cal : cs::bench_calibration(b.cfg, b.tmpl, b.reg);
      const double B = design_B > 0 ? design_B : b.reg.budget_B;
      cs::DesignProblem p = cs::make_problem(b.tmpl, cal, B, b.cfg.bit_steps);
      p.fine_emphasis = b.cfg.fine_emphasis;
      const cs::DesignChoice choice = cs::select(p, common.threads);
      const std::string text = cs::design_choice_to_json(choice, b.tmpl);
      cs::write_text(run.path(design_out), text);
      std::cout << text;
      run.config = bench_json(b, ro);
      run.config["budget_B"] = B;
    } else if (sub == cod) {
      if (codec_out.empty())
        codec_out = codec_mode == "encode" ? "encoded.enc" : (codec_mode == "decode" ? "decoded.fld" : "roundtrip.fld");
      if (codec_mode == "decode") {
        if (codec_cfg.empty()) cs::fail(cs::ErrorCode::Usage, "decode needs --codec-config");
        const cs::CodecConfig cfg = codec_config_from_json(json::parse(cs::read_text(codec_cfg)));
        const cs::EncodedState e = cs::read_encoded(codec_in);
        cs::write_field(run.path(codec_out), cs::decode(e, cfg));
        run.config = codec_config_json(cfg);
      } else {
        const cs::Field f = cs::read_field(codec_in);
        cs::CodecConfig cfg;
        cfg.grid = cs::GridSpec{f.d, f.n, codec_nc > 0 ? codec_nc : f.n / 4};
        cfg.band = cs::BandSpec::make(cfg.grid, codec_gamma);
        cfg.basis = cs::parse_basis_kind(codec_basis);
        cfg.clip_a = codec_clip;
        auto bits = parse_ints(codec_bits);
        if (bits.size() == 1) bits.assign(f.channels, bits[0]);
        cfg.bits = bits;
        cfg.stats = cs::estimate_stats(cfg, std::vector<cs::Field>{f});
        const cs::EncodedState e = cs::encode(f, cfg);
        run.config = codec_config_json(cfg);
        run.config["payload_bits"] = e.payload_bits;
        run.config["side_bits"] = e.side_bits();
        if (codec_mode == "encode") {
          cs::write_encoded(run.path(codec_out), e);
          cs::write_text(run.path(codec_out + ".codec.json"), codec_config_json(cfg).dump(1) + "\n");
        } else {
          const cs::Field g = cs::decode(e, cfg);
          cs::write_field(run.path(codec_out), g);
          const double hf = cs::roundtrip_hf_error(f, cfg);
          run.config["hf_rel_error"] = hf;
          std::cout << "payload_bits " << e.payload_bits << "\nhf_rel_error " << cs::format_double(hf) << "\n";
        }
      }
    } else if (sub == lad || sub == hor) {
      Bench b = make_bench(ro, common);
      b.cfg.horizon = sub == hor || !no_horizon;
      const cs::LadderResult r = cs::run_input_stage_ladder(b.cfg);
      if (sub == lad) {
        cs::write_report(run.report_path("ladder"), cs::ladder_table(r), common.format);
        cs::write_plot(run.path("ladder.svg"), cs::svg_ladder_bars(r));
        cs::write_text(run.path("derivopt.json"), cs::design_choice_to_json(r.derivopt, b.tmpl));
        std::cout << cs::table_to_csv(cs::ladder_table(r));
      } else {
        const cs::Table t = ladder_horizon_table(r, b.cfg.T_r);
        cs::write_report(run.report_path("horizon"), t, common.format);
        std::cout << cs::table_to_csv(t);
      }
      run.config = bench_json(b, ro);
      run.config["horizon"] = b.cfg.horizon;
    } else if (sub == swp) {
      Bench b = make_bench(ro, common, false);
      std::vector<double> budgets, retains;
      for (const auto& s : split(sw_bud, ',')) budgets.push_back(cs::parse_budget_ratio(s));
      for (const auto& s : split(sw_ret, ',')) retains.push_back(cs::parse_retain_frac(s));
      b.cfg.horizon = false;
      const cs::SweepResult s = cs::sweep(split(sw_fam, ','), budgets, retains, b.cfg);
      cs::write_report(run.report_path("sweep"), cs::sweep_table(s), common.format);
      run.config = bench_json(b, ro);
      run.config.erase("family");
      run.config.erase("regime");
      run.config["families"] = split(sw_fam, ',');
      run.config["budget_ratios"] = budgets;
      run.config["retain_fracs"] = retains;
    } else if (sub == pdc) {
      const cs::GammaRule rule = cs::parse_gamma_rule(pd_rule);
      const cs::PhaseDiagram pd = cs::phase_diagram(parse_grid(pd_B), parse_grid(pd_r), rule, tp, common.threads);
      cs::Table m;
      m.columns.push_back("r");
      for (double B : pd.B) m.columns.push_back("B=" + cs::format_double(B));
      m.columns.push_back("gamma");
      m.columns.push_back("unit_B");
      for (std::size_t i = 0; i < pd.r.size(); ++i) {
        std::vector<cs::Cell> row{pd.r[i]};
        for (double v : pd.value[i]) row.push_back(v);
        row.push_back(pd.gamma[i]);
        row.push_back(pd.unit_B[i]);
        m.rows.push_back(row);
      }
      cs::Table c;
      c.columns = {"B", "r"};
      for (const auto& [B, r] : pd.contour) c.rows.push_back({B, r});
      cs::write_report(run.report_path("phase_diagram"), m, common.format);
      cs::write_report(run.report_path("phase_contour"), c, common.format);
      cs::write_plot(run.path("phase_diagram.svg"), cs::svg_phase_diagram(pd));
      run.config = {{"d", tp.d},      {"alpha", tp.alpha}, {"a", tp.a},   {"K_f", tp.K_f},
                    {"gamma", tp.gamma}, {"gamma_rule", cs::gamma_rule_name(rule)}, {"B", pd.B}, {"r", pd.r}};
    } else if (sub == shc) {
      Bench b = make_bench(ro, common);
      auto cal = b.cfg.cal ? b.cfg.cal : cs::bench_calibration(b.cfg, b.tmpl, b.reg);
      std::vector<std::pair<std::string, int>> chans;
      for (const auto& item : split(sc_channels, ',')) {
        const auto pos = item.rfind(':');
        if (pos == std::string::npos) cs::fail(cs::ErrorCode::Usage, "channels take the form id:bits");
        chans.emplace_back(item.substr(0, pos), static_cast<int>(to_double(item.substr(pos + 1))));
      }
      const auto curves = cs::distortion_curves(*cal, b.tmpl, chans);
      cs::Table t;
      t.columns.push_back("shell");
      for (const auto& cv : curves) t.columns.push_back(cv.channel + "@" + std::to_string(cv.bits));
      std::size_t ns = 0;
      for (const auto& cv : curves) ns = std::max(ns, cv.L2.size());
      for (std::size_t k = 0; k < ns; ++k) {
        std::vector<cs::Cell> row{static_cast<long long>(k)};
        for (const auto& cv : curves) row.push_back(k < cv.L2.size() ? cv.L2[k] : std::nan(""));
        t.rows.push_back(row);
      }
      cs::write_report(run.report_path("shell_curves"), t, common.format);
      cs::write_plot(run.path("shell_curves.svg"), cs::svg_shell_curves(curves, b.tmpl.name + " shell distortion"));
      if (curves.size() == 2) {
        const auto x = cs::curve_crossings(curves[0].D, curves[1].D);
        std::cout << "crossings:";
        for (int k : x) std::cout << " " << k;
        std::cout << "\n";
      }
      run.config = bench_json(b, ro);
      run.config["channels"] = sc_channels;
    } else if (sub == met) {
      const cs::Field pf = cs::read_field(m_pred), tf = cs::read_field(m_truth);
      if (pf.d != tf.d || pf.n != tf.n || pf.channels != tf.channels)
        cs::fail(cs::ErrorCode::ShapeMismatch, "pred and truth differ in shape");
      const cs::GridSpec grid{tf.d, tf.n, m_nc};
      grid.validate();
      const cs::BandSpec band = cs::BandSpec::make(grid, m_gamma);
      const cs::BasisPtr basis = cs::build_basis(cs::parse_basis_kind(m_basis), grid);
      const cs::SpectralField ps = cs::analyze(basis, pf), ts = cs::analyze(basis, tf);
      const cs::DetailValues v = cs::detail_values(ps, ts, band);
      const cs::MetricThresholds th{m_tq, m_to};
      th.validate();
      const auto be = cs::band_errors(ps, ts, band);
      cs::Table t;
      t.columns = {"expr_rel", "fine_rel", "q_fine", "e_out", "q_flag", "input_pass", "nrmse",
                   "band_low", "band_mid", "band_high"};
      t.rows.push_back({v.expr_rel, v.fine_rel, v.q_fine, v.e_out, static_cast<long long>(v.q_flag),
                        static_cast<long long>(cs::input_pass(v, th)), cs::nrmse(pf, tf), be[0], be[1], be[2]});
      cs::write_report(run.report_path("metrics"), t, common.format);
      std::cout << cs::table_to_csv(t);
      run.config = {{"grid", {{"d", grid.d}, {"n_fine", grid.n_fine}, {"n_coarse", grid.n_coarse}}},
                    {"band", {{"k_c", band.k_c}, {"k_1", band.k_1}, {"gamma", band.gamma}}},
                    {"basis", m_basis},
                    {"thresholds", {{"tau_Q", th.tau_Q}, {"tau_out", th.tau_out}}}};
    }
    run.finish();
    return 0;
  } catch (const cs::Error& e) {
    std::cerr << "error [" << cs::error_name(e.code()) << "]: " << e.what() << "\n";
    return cs::exit_code(e.code());
  } catch (const json::exception& e) {
    std::cerr << "error [SchemaViolation]: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error [NumericFailure]: " << e.what() << "\n";
    return 3;
  }
}
