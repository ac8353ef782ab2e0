#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "carrystate/basis.hpp"
#include "carrystate/bench.hpp"
#include "carrystate/calib.hpp"
#include "carrystate/codec.hpp"
#include "carrystate/design.hpp"

namespace cs {

constexpr const char* kLibraryVersion = "0.1.0";
constexpr std::uint16_t kFieldVersion = 1;
constexpr std::uint16_t kEncodedVersion = 1;
constexpr int kCalibrationVersion = 1;

/// FLD1: magic, u16 version, u8 d, u32 dims, u32 channels, u8 dtype (1 = f64 LE),
/// then the payload row-major with channels fastest.
std::vector<std::uint8_t> serialize_field(const Field& f);
Field deserialize_field(const std::vector<std::uint8_t>& bytes);
void write_field(const std::string& path, const Field& f);
Field read_field(const std::string& path);

/// ENC1: header, packed index bitstream, side values and the lossless block.
std::vector<std::uint8_t> serialize_encoded(const EncodedState& e);
EncodedState deserialize_encoded(const std::vector<std::uint8_t>& bytes);
void write_encoded(const std::string& path, const EncodedState& e);
EncodedState read_encoded(const std::string& path);

/// CAL1 JSON.
std::string calibration_to_json(const ChannelCalibration& cal);
ChannelCalibration calibration_from_json(const std::string& text);
void write_cal(const std::string& path, const ChannelCalibration& cal);
ChannelCalibration read_cal(const std::string& path);

std::string design_choice_to_json(const DesignChoice& c, const FamilyTemplate& t);

struct IngestOptions {
  std::string key = "tensor";
  std::size_t sample = 0;
  std::size_t frame = 0;
  int d = 1;
  /// Trailing channel axis after the spatial axes.
  bool channel_axis = false;
  /// Datasets without the leading sample axis, i.e. (t, x[, y][, c]).
  bool has_sample_axis = true;
};

/// Reads one frame of a PDEBench-style HDF5 dataset (sample, t, x[, y][, c])
/// into a field laid out (channel, x[, y]).
Field ingest_pdebench(const std::string& path, const IngestOptions& opt);
std::vector<Field> ingest_pdebench_frames(const std::string& path, IngestOptions opt, std::size_t count);

/// Generic report table.
using Cell = std::variant<std::string, double, long long>;
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

std::string format_double(double v);
std::string table_to_csv(const Table& t);
std::string table_to_json(const Table& t);
void write_report(const std::string& path, const Table& t, const std::string& format);

Table ladder_table(const LadderResult& r);
Table sweep_table(const SweepResult& s);

std::vector<std::uint8_t> read_bytes(const std::string& path);
void write_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes);
void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

}  // namespace cs
