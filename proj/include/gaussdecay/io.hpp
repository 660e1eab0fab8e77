#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gaussdecay/decay.hpp"
#include "gaussdecay/grid.hpp"

namespace gd::io {

/// Binary snapshot, little-endian: int64 n, int64 N per axis (n values),
/// f64 L, f64 time, then interleaved re/im f64 in row-major order.
/// A sidecar `<path>.json` describes the layout.
void write_snapshot(const std::filesystem::path& path, const WaveField& u, const nlohmann::json& extra = {});
WaveField read_snapshot(const std::filesystem::path& path);

nlohmann::json to_json(const DecayReport& r);
nlohmann::json to_json(const ThresholdVerdict& v);
nlohmann::json to_json(const WeightedNorm& w, bool with_profile = false);

/// Round-trip exact formatting of doubles (%.17g); inf and nan spelled out.
std::string format_double(double v);

/// Minimal CSV writer: header once, then rows of preformatted cells.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::vector<std::string> header);
  void row(const std::vector<std::string>& cells);

 private:
  std::filesystem::path path_;
  std::size_t width_;
};

void write_json(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace gd::io
