#include "carrystate/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <hdf5.h>
#include <json.hpp>

#include "carrystate/error.hpp"

namespace cs {

using json = nlohmann::json;

namespace {

class Writer {
 public:
  template <class T>
  void put(T v) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    // Hosts are little-endian; the format is defined little-endian.
    buf.insert(buf.end(), b, b + sizeof(T));
  }
  void raw(const void* p, std::size_t n) {
    const auto* c = static_cast<const std::uint8_t*>(p);
    buf.insert(buf.end(), c, c + n);
  }
  std::vector<std::uint8_t> buf;
};

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& b) : b_(b) {}
  template <class T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, b_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  void raw(void* p, std::size_t n) {
    need(n);
    std::memcpy(p, b_.data() + pos_, n);
    pos_ += n;
  }
  bool done() const { return pos_ == b_.size(); }

 private:
  void need(std::size_t n) const {
    if (b_.size() - pos_ < n) fail(ErrorCode::TruncatedPayload, "file ends early");
  }
  const std::vector<std::uint8_t>& b_;
  std::size_t pos_ = 0;
};

void check_magic(Reader& r, const char* magic) {
  char m[4];
  r.raw(m, 4);
  if (std::memcmp(m, magic, 4) != 0) fail(ErrorCode::MagicMismatch, std::string("not a ") + magic + " file");
}

template <class T>
std::vector<T> json_vec(const json& j, const char* what) {
  if (!j.is_array()) fail(ErrorCode::SchemaViolation, std::string(what) + " must be an array");
  std::vector<T> v;
  for (const auto& e : j) v.push_back(e.get<T>());
  return v;
}

const json& req(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) fail(ErrorCode::SchemaViolation, std::string("missing key '") + key + "'");
  return j.at(key);
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string o = "\"";
  for (char c : s) {
    if (c == '"') o += '"';
    o += c;
  }
  return o + "\"";
}

}  // namespace

std::vector<std::uint8_t> serialize_field(const Field& f) {
  if (f.d != 1 && f.d != 2) fail(ErrorCode::InvalidArgument, "field must be 1D or 2D");
  Writer w;
  w.raw("FLD1", 4);
  w.put<std::uint16_t>(kFieldVersion);
  w.put<std::uint8_t>(static_cast<std::uint8_t>(f.d));
  for (int i = 0; i < f.d; ++i) w.put<std::uint32_t>(static_cast<std::uint32_t>(f.n));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(f.channels));
  w.put<std::uint8_t>(1);
  const std::size_t pts = f.points();
  for (std::size_t p = 0; p < pts; ++p)
    for (int c = 0; c < f.channels; ++c) w.put<double>(f.channel(c)[p]);
  return w.buf;
}

Field deserialize_field(const std::vector<std::uint8_t>& bytes) {
  Reader r(bytes);
  check_magic(r, "FLD1");
  const auto ver = r.get<std::uint16_t>();
  if (ver != kFieldVersion) fail(ErrorCode::VersionMismatch, "unsupported FLD1 version " + std::to_string(ver));
  const int d = r.get<std::uint8_t>();
  if (d != 1 && d != 2) fail(ErrorCode::SchemaViolation, "FLD1 dimension must be 1 or 2");
  std::uint32_t dims[2] = {0, 0};
  for (int i = 0; i < d; ++i) dims[i] = r.get<std::uint32_t>();
  if (d == 2 && dims[0] != dims[1]) fail(ErrorCode::SchemaViolation, "only square 2D fields are supported");
  const auto ch = r.get<std::uint32_t>();
  const auto dtype = r.get<std::uint8_t>();
  if (dtype != 1) fail(ErrorCode::SchemaViolation, "FLD1 dtype must be f64");
  if (dims[0] == 0 || ch == 0) fail(ErrorCode::SchemaViolation, "empty FLD1 field");
  Field f(d, static_cast<int>(dims[0]), static_cast<int>(ch));
  const std::size_t pts = f.points();
  for (std::size_t p = 0; p < pts; ++p)
    for (std::uint32_t c = 0; c < ch; ++c) f.channel(static_cast<int>(c))[p] = r.get<double>();
  if (!r.done()) fail(ErrorCode::SchemaViolation, "trailing bytes after FLD1 payload");
  return f;
}

std::vector<std::uint8_t> serialize_encoded(const EncodedState& e) {
  Writer w;
  w.raw("ENC1", 4);
  w.put<std::uint16_t>(kEncodedVersion);
  w.put<std::uint8_t>(static_cast<std::uint8_t>(e.d));
  w.put<std::uint8_t>(e.raw.empty() ? 0 : 1);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(e.n_coarse));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(e.bits.size()));
  for (int b : e.bits) w.put<std::uint8_t>(static_cast<std::uint8_t>(b));
  w.put<std::uint64_t>(e.config_hash);
  w.put<std::uint64_t>(e.payload_bits);
  if (e.payload.size() != (e.payload_bits + 7) / 8) fail(ErrorCode::InvalidArgument, "payload size disagrees with its bit count");
  w.raw(e.payload.data(), e.payload.size());
  if (e.side.size() != e.bits.size()) fail(ErrorCode::InvalidArgument, "one side value per component");
  for (double s : e.side) w.put<double>(s);
  if (!e.raw.empty()) {
    w.put<std::uint64_t>(e.raw.size());
    for (double v : e.raw) w.put<double>(v);
  }
  return w.buf;
}

EncodedState deserialize_encoded(const std::vector<std::uint8_t>& bytes) {
  Reader r(bytes);
  check_magic(r, "ENC1");
  const auto ver = r.get<std::uint16_t>();
  if (ver != kEncodedVersion) fail(ErrorCode::VersionMismatch, "unsupported ENC1 version " + std::to_string(ver));
  EncodedState e;
  e.d = r.get<std::uint8_t>();
  const auto flags = r.get<std::uint8_t>();
  if (flags > 1) fail(ErrorCode::SchemaViolation, "unknown ENC1 flags");
  e.n_coarse = static_cast<int>(r.get<std::uint32_t>());
  const auto m = r.get<std::uint32_t>();
  if (m == 0 || m > 64) fail(ErrorCode::SchemaViolation, "ENC1 component count out of range");
  e.bits.resize(m);
  for (auto& b : e.bits) {
    b = r.get<std::uint8_t>();
    if (b > 16) fail(ErrorCode::SchemaViolation, "ENC1 bit width out of range");
  }
  e.config_hash = r.get<std::uint64_t>();
  e.payload_bits = r.get<std::uint64_t>();
  if (e.payload_bits > bytes.size() * 8ull) fail(ErrorCode::TruncatedPayload, "payload ends early");
  e.payload.resize((e.payload_bits + 7) / 8);
  r.raw(e.payload.data(), e.payload.size());
  e.side.resize(m);
  for (auto& s : e.side) s = r.get<double>();
  if (flags & 1) {
    const auto n = r.get<std::uint64_t>();
    if (n > bytes.size()) fail(ErrorCode::TruncatedPayload, "lossless block ends early");
    e.raw.resize(n);
    for (auto& v : e.raw) v = r.get<double>();
  }
  if (!r.done()) fail(ErrorCode::SchemaViolation, "trailing bytes after ENC1 payload");
  return e;
}

std::vector<std::uint8_t> read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoFailure, "cannot open '" + path + "'");
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

void write_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoFailure, "cannot write '" + path + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::IoFailure, "write to '" + path + "' failed");
}

void write_text(const std::string& path, const std::string& text) {
  write_bytes(path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

std::string read_text(const std::string& path) {
  const auto b = read_bytes(path);
  return std::string(b.begin(), b.end());
}

void write_field(const std::string& path, const Field& f) { write_bytes(path, serialize_field(f)); }
Field read_field(const std::string& path) { return deserialize_field(read_bytes(path)); }
void write_encoded(const std::string& path, const EncodedState& e) { write_bytes(path, serialize_encoded(e)); }
EncodedState read_encoded(const std::string& path) { return deserialize_encoded(read_bytes(path)); }

std::string calibration_to_json(const ChannelCalibration& cal) {
  json j;
  j["format"] = "CAL1";
  j["version"] = kCalibrationVersion;
  j["family"] = cal.family;
  j["grid"] = {{"d", cal.grid.d}, {"n_fine", cal.grid.n_fine}, {"n_coarse", cal.grid.n_coarse}};
  j["band"] = {{"k_c", cal.band.k_c}, {"k_1", cal.band.k_1}, {"gamma", cal.band.gamma}};
  j["basis"] = basis_kind_name(cal.basis);
  json bp = {{"robin_left", cal.basis_params.robin_left}, {"robin_right", cal.basis_params.robin_right}};
  if (cal.basis_params.left_rows) bp["left_rows"] = *cal.basis_params.left_rows;
  if (cal.basis_params.right_rows) bp["right_rows"] = *cal.basis_params.right_rows;
  j["basis_params"] = bp;
  j["clip_a"] = cal.clip_a;
  j["lossless"] = cal.lossless;
  j["bit_grid"] = cal.bit_grid;
  j["dim_z"] = cal.dim_z;
  j["s_z"] = cal.s_z;
  std::vector<int> avail(cal.shell_available.begin(), cal.shell_available.end());
  j["shell_available"] = avail;
  j["shell_bin"] = cal.shell_bin;
  j["samples"] = cal.samples;
  j["degenerate"] = cal.degenerate;
  j["provenance"] = {{"seed", cal.seed}, {"source", cal.provenance}};
  json chs = json::object();
  for (const auto& [id, c] : cal.channels) {
    std::vector<int> obs(c.observed.begin(), c.observed.end());
    chs[id] = {{"m", c.m},
               {"gains", c.gain},
               {"residuals", c.sigma},
               {"observed", obs},
               {"isotonic_applied", c.isotonic_applied},
               {"stats", {{"mean", c.stats.mean}, {"std", c.stats.std}}}};
  }
  j["channels"] = chs;
  return j.dump(1) + "\n";
}

ChannelCalibration calibration_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::SchemaViolation, std::string("calibration is not valid JSON: ") + e.what());
  }
  try {
    if (!j.is_object() || !j.contains("format") || j["format"] != "CAL1")
      fail(ErrorCode::MagicMismatch, "not a CAL1 calibration");
    if (req(j, "version").get<int>() != kCalibrationVersion)
      fail(ErrorCode::VersionMismatch, "unsupported CAL1 version");
    ChannelCalibration c;
    c.family = req(j, "family").get<std::string>();
    const json& g = req(j, "grid");
    c.grid = GridSpec{req(g, "d").get<int>(), req(g, "n_fine").get<int>(), req(g, "n_coarse").get<int>()};
    const json& b = req(j, "band");
    c.band.k_c = req(b, "k_c").get<double>();
    c.band.k_1 = req(b, "k_1").get<double>();
    c.band.gamma = req(b, "gamma").get<double>();
    c.basis = parse_basis_kind(req(j, "basis").get<std::string>());
    const json& bp = req(j, "basis_params");
    c.basis_params.robin_left = req(bp, "robin_left").get<double>();
    c.basis_params.robin_right = req(bp, "robin_right").get<double>();
    if (bp.contains("left_rows")) c.basis_params.left_rows = bp["left_rows"].get<std::array<double, 3>>();
    if (bp.contains("right_rows")) c.basis_params.right_rows = bp["right_rows"].get<std::array<double, 3>>();
    c.clip_a = req(j, "clip_a").get<double>();
    c.lossless = req(j, "lossless").get<bool>();
    c.bit_grid = json_vec<int>(req(j, "bit_grid"), "bit_grid");
    c.dim_z = req(j, "dim_z").get<int>();
    c.s_z = req(j, "s_z").get<std::vector<std::vector<double>>>();
    for (int v : json_vec<int>(req(j, "shell_available"), "shell_available")) c.shell_available.push_back(v != 0);
    c.shell_bin = json_vec<int>(req(j, "shell_bin"), "shell_bin");
    c.samples = req(j, "samples").get<std::size_t>();
    c.degenerate = req(j, "degenerate").get<bool>();
    const json& pv = req(j, "provenance");
    c.seed = req(pv, "seed").get<std::uint64_t>();
    c.provenance = req(pv, "source").get<std::string>();

    c.grid.validate();
    c.band.validate();
    const std::size_t ns = c.s_z.size();
    if (c.dim_z < 1) fail(ErrorCode::SchemaViolation, "dim_z must be positive");
    for (const auto& row : c.s_z)
      if (row.size() != static_cast<std::size_t>(c.dim_z)) fail(ErrorCode::SchemaViolation, "s_z rows must have dim_z entries");
    if (c.shell_available.size() != ns || c.shell_bin.size() != ns)
      fail(ErrorCode::SchemaViolation, "shell arrays differ in length");
    for (const auto& [id, cj] : req(j, "channels").items()) {
      ChannelStats s;
      s.id = id;
      s.m = req(cj, "m").get<int>();
      s.gain = req(cj, "gains").get<std::vector<std::vector<double>>>();
      s.sigma = req(cj, "residuals").get<std::vector<std::vector<double>>>();
      for (int v : json_vec<int>(req(cj, "observed"), "observed")) s.observed.push_back(v != 0);
      s.isotonic_applied = req(cj, "isotonic_applied").get<bool>();
      const json& st = req(cj, "stats");
      s.stats.mean = json_vec<double>(req(st, "mean"), "mean");
      s.stats.std = json_vec<double>(req(st, "std"), "std");
      if (s.gain.size() != c.bit_grid.size() || s.sigma.size() != c.bit_grid.size())
        fail(ErrorCode::SchemaViolation, "channel '" + id + "' tables do not match the bit grid");
      for (std::size_t k = 0; k < s.gain.size(); ++k)
        if (s.gain[k].size() != ns || s.sigma[k].size() != ns)
          fail(ErrorCode::SchemaViolation, "channel '" + id + "' tables do not match the shell count");
      if (s.observed.size() != ns) fail(ErrorCode::SchemaViolation, "channel '" + id + "' observed flags are short");
      if (s.stats.mean.size() != static_cast<std::size_t>(s.m) || s.stats.std.size() != static_cast<std::size_t>(s.m))
        fail(ErrorCode::SchemaViolation, "channel '" + id + "' stats do not match m");
      c.channels[id] = std::move(s);
    }
    return c;
  } catch (const json::exception& e) {
    fail(ErrorCode::SchemaViolation, std::string("calibration schema violation: ") + e.what());
  }
}

void write_cal(const std::string& path, const ChannelCalibration& cal) { write_text(path, calibration_to_json(cal)); }
ChannelCalibration read_cal(const std::string& path) { return calibration_from_json(read_text(path)); }

std::string design_choice_to_json(const DesignChoice& c, const FamilyTemplate& t) {
  json j;
  j["family"] = t.name;
  j["channels"] = c.channels;
  j["bits"] = c.bits;
  j["total_bits"] = c.total_bits(t);
  j["score"] = c.score;
  j["provenance"] = c.provenance;
  j["shell_trace"] = c.shell_trace;
  j["degenerate"] = c.degenerate;
  j["note"] = c.note;
  return j.dump(1) + "\n";
}

Field ingest_pdebench(const std::string& path, const IngestOptions& opt) {
  if (opt.d != 1 && opt.d != 2) fail(ErrorCode::InvalidArgument, "ingest dimension must be 1 or 2");
  H5Eset_auto2(H5E_DEFAULT, nullptr, nullptr);
  const hid_t file = H5Fopen(path.c_str(), H5F_ACC_RDONLY, H5P_DEFAULT);
  if (file < 0) fail(ErrorCode::IoFailure, "cannot open HDF5 file '" + path + "'");
  struct Closer {
    std::vector<std::pair<hid_t, herr_t (*)(hid_t)>> ids;
    ~Closer() {
      for (auto it = ids.rbegin(); it != ids.rend(); ++it) it->second(it->first);
    }
  } closer;
  closer.ids.emplace_back(file, H5Fclose);
  if (H5Lexists(file, opt.key.c_str(), H5P_DEFAULT) <= 0)
    fail(ErrorCode::MissingDataset, "dataset '" + opt.key + "' not found in '" + path + "'");
  const hid_t ds = H5Dopen2(file, opt.key.c_str(), H5P_DEFAULT);
  if (ds < 0) fail(ErrorCode::MissingDataset, "cannot open dataset '" + opt.key + "'");
  closer.ids.emplace_back(ds, H5Dclose);
  const hid_t space = H5Dget_space(ds);
  closer.ids.emplace_back(space, H5Sclose);
  const int rank = H5Sget_simple_extent_ndims(space);
  const int lead = opt.has_sample_axis ? 2 : 1;
  const int expect = lead + opt.d + (opt.channel_axis ? 1 : 0);
  if (rank != expect)
    fail(ErrorCode::RankMismatch, "dataset rank " + std::to_string(rank) + " does not match the expected " +
                                      std::to_string(expect));
  std::vector<hsize_t> dims(rank);
  H5Sget_simple_extent_dims(space, dims.data(), nullptr);
  if (opt.has_sample_axis && opt.sample >= dims[0]) fail(ErrorCode::IndexOutOfRange, "sample index out of range");
  if (opt.frame >= dims[lead - 1]) fail(ErrorCode::IndexOutOfRange, "frame index out of range");
  const hsize_t n = dims[lead];
  if (opt.d == 2 && dims[lead + 1] != n) fail(ErrorCode::RankMismatch, "only square 2D grids are supported");
  const hsize_t ch = opt.channel_axis ? dims[rank - 1] : 1;

  std::vector<hsize_t> start(rank, 0), count(dims);
  if (opt.has_sample_axis) {
    start[0] = opt.sample;
    count[0] = 1;
  }
  start[lead - 1] = opt.frame;
  count[lead - 1] = 1;
  H5Sselect_hyperslab(space, H5S_SELECT_SET, start.data(), nullptr, count.data(), nullptr);
  const hsize_t total = (opt.d == 2 ? n * n : n) * ch;
  const hid_t mem = H5Screate_simple(1, &total, nullptr);
  closer.ids.emplace_back(mem, H5Sclose);
  std::vector<double> buf(total);
  if (H5Dread(ds, H5T_NATIVE_DOUBLE, mem, space, H5P_DEFAULT, buf.data()) < 0)
    fail(ErrorCode::IoFailure, "reading dataset '" + opt.key + "' failed");

  Field f(opt.d, static_cast<int>(n), static_cast<int>(ch));
  const std::size_t pts = f.points();
  for (std::size_t p = 0; p < pts; ++p)
    for (hsize_t c = 0; c < ch; ++c) f.channel(static_cast<int>(c))[p] = buf[p * ch + c];
  return f;
}

std::vector<Field> ingest_pdebench_frames(const std::string& path, IngestOptions opt, std::size_t count) {
  std::vector<Field> out;
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(ingest_pdebench(path, opt));
    ++opt.frame;
  }
  return out;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string table_to_csv(const Table& t) {
  std::string s;
  for (std::size_t i = 0; i < t.columns.size(); ++i) s += (i ? "," : "") + csv_escape(t.columns[i]);
  s += "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) s += ",";
      if (const auto* str = std::get_if<std::string>(&row[i])) s += csv_escape(*str);
      else if (const auto* d = std::get_if<double>(&row[i])) s += format_double(*d);
      else s += std::to_string(std::get<long long>(row[i]));
    }
    s += "\n";
  }
  return s;
}

std::string table_to_json(const Table& t) {
  json arr = json::array();
  for (const auto& row : t.rows) {
    json o = json::object();
    for (std::size_t i = 0; i < row.size() && i < t.columns.size(); ++i) {
      if (const auto* str = std::get_if<std::string>(&row[i])) o[t.columns[i]] = *str;
      else if (const auto* d = std::get_if<double>(&row[i])) o[t.columns[i]] = std::isfinite(*d) ? json(*d) : json(nullptr);
      else o[t.columns[i]] = std::get<long long>(row[i]);
    }
    arr.push_back(o);
  }
  return json{{"columns", t.columns}, {"rows", arr}}.dump(1) + "\n";
}

void write_report(const std::string& path, const Table& t, const std::string& format) {
  if (format == "csv") write_text(path, table_to_csv(t));
  else if (format == "json") write_text(path, table_to_json(t));
  else fail(ErrorCode::InvalidArgument, "report format must be csv or json");
}

namespace {

const std::vector<std::string> kLadderColumns = {
    "family", "budget_ratio", "retain_frac", "n_fine", "n_coarse", "budget_B", "gamma", "label", "design",
    "score", "expr_rel", "fine_rel", "q_fine", "e_out", "pass_rate", "t_gen", "samples", "degenerate",
    "dq_bound_sqrt"};

std::vector<Cell> ladder_cells(const std::string& family, double br, double rf, const ResolvedRegime& reg,
                               const LadderRow& row) {
  return {family,
          br,
          rf,
          static_cast<long long>(reg.grid.n_fine),
          static_cast<long long>(reg.grid.n_coarse),
          reg.budget_B,
          reg.band.gamma,
          row.label,
          row.design,
          row.score,
          row.expr_rel,
          row.fine_rel,
          row.q_fine,
          row.e_out,
          row.pass_rate,
          row.t_gen,
          static_cast<long long>(row.samples),
          static_cast<long long>(row.degenerate ? 1 : 0),
          reg.dq_bound_sqrt};
}

}  // namespace

Table ladder_table(const LadderResult& r) {
  Table t;
  t.columns = kLadderColumns;
  const double br = r.regime.budget_B / (16.0 * r.regime.m_primitive);
  const double rf = static_cast<double>(r.regime.grid.n_coarse) / r.regime.grid.n_fine;
  for (const auto& row : r.rows) t.rows.push_back(ladder_cells(r.family, br, rf, r.regime, row));
  return t;
}

Table sweep_table(const SweepResult& s) {
  Table t;
  t.columns = kLadderColumns;
  t.columns.push_back("wins");
  t.columns.push_back("error");
  for (const auto& cell : s.cells) {
    if (!cell.ok) {
      std::vector<Cell> row(kLadderColumns.size(), Cell(std::string()));
      row[0] = cell.family;
      row[1] = cell.budget_ratio;
      row[2] = cell.retain_frac;
      row.push_back(0LL);
      row.push_back(cell.error);
      t.rows.push_back(row);
      continue;
    }
    int best = 0;
    for (int r = 1; r < 4; ++r)
      if (cell.result.rows[r].fine_rel < cell.result.rows[best].fine_rel) best = r;
    for (int r = 0; r < 4; ++r) {
      auto row = ladder_cells(cell.family, cell.budget_ratio, cell.retain_frac, cell.result.regime, cell.result.rows[r]);
      row.push_back(static_cast<long long>(r == best ? 1 : 0));
      row.push_back(std::string());
      t.rows.push_back(row);
    }
  }
  for (std::size_t r = 0; r < s.pooled.size(); ++r) {
    const LadderRow& p = s.pooled[r];
    const double nan = std::nan("");
    t.rows.push_back({std::string("pooled"), nan, nan, 0LL, 0LL, nan, nan, p.label, p.design, nan, p.expr_rel,
                      p.fine_rel, p.q_fine, p.e_out, p.pass_rate, p.t_gen, static_cast<long long>(p.samples), 0LL,
                      nan, static_cast<long long>(s.wins[r]), std::string()});
  }
  return t;
}

}  // namespace cs
