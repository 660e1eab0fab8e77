#include "gaussdecay/io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>

namespace gd::io {

static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes a little-endian host");

namespace {

template <typename T>
void put(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw GridError("snapshot truncated");
  return v;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_snapshot(const std::filesystem::path& path, const WaveField& u, const nlohmann::json& extra) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw GridError("cannot open " + path.string() + " for writing");
  put<std::int64_t>(out, u.grid.dim);
  for (int d = 0; d < u.grid.dim; ++d) put<std::int64_t>(out, u.grid.points);
  put<double>(out, u.grid.half_width);
  put<double>(out, u.time);
  for (Eigen::Index i = 0; i < u.values.size(); ++i) {
    put<double>(out, u.values[i].real());
    put<double>(out, u.values[i].imag());
  }
  nlohmann::json side = {{"format", "gaussdecay-snapshot-v1"},
                         {"endianness", "little"},
                         {"dimension", u.grid.dim},
                         {"points_per_dim", std::vector<int>(u.grid.dim, u.grid.points)},
                         {"half_width", u.grid.half_width},
                         {"time", u.time},
                         {"layout", "int64 n; int64 N[n]; f64 L; f64 time; f64 (re, im) row-major"},
                         {"norm", u.norm()}};
  if (!extra.is_null()) side["extra"] = extra;
  write_json(path.string() + ".json", side);
}

WaveField read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw GridError("cannot open " + path.string());
  GridSpec g;
  g.dim = static_cast<int>(get<std::int64_t>(in));
  if (g.dim < 1 || g.dim > kMaxDim) throw GridError("snapshot dimension out of range");
  for (int d = 0; d < g.dim; ++d) {
    const auto n = get<std::int64_t>(in);
    if (d == 0) g.points = static_cast<int>(n);
    if (n != g.points) throw GridError("snapshot with unequal axis sizes is not supported");
  }
  g.half_width = get<double>(in);
  g.validate();
  const double t = get<double>(in);
  WaveField u(g, t);
  for (Eigen::Index i = 0; i < u.values.size(); ++i) {
    const double re = get<double>(in);
    const double im = get<double>(in);
    u.values[i] = cplx(re, im);
  }
  return u;
}

nlohmann::json to_json(const DecayReport& r) {
  return {{"rate", r.rate},
          {"poly_correction", r.poly_correction},
          {"fit_window", {r.r_min, r.r_max}},
          {"fit_residual", r.fit_residual},
          {"floor_hit", r.floor_hit},
          {"trusted", r.trusted},
          {"shells_used", r.shells_used}};
}

nlohmann::json to_json(const ThresholdVerdict& v) {
  return {{"product", v.product},
          {"threshold", v.threshold},
          {"kind", to_string(v.kind)},
          {"classification", to_string(v.classification)}};
}

nlohmann::json to_json(const WeightedNorm& w, bool with_profile) {
  nlohmann::json j = {{"value", w.divergent ? nlohmann::json("inf") : nlohmann::json(w.value)},
                      {"grid_value", w.grid_value},
                      {"log_value", w.log_value},
                      {"divergent", w.divergent},
                      {"outer_slope", w.outer_slope},
                      {"floor_radius", w.floor_radius}};
  if (with_profile) {
    j["shell_radius"] = w.shell_radius;
    std::vector<std::string> c;
    for (double v : w.shell_log_contribution) c.push_back(format_double(v));
    j["shell_log_contribution"] = c;
  }
  return j;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::vector<std::string> header)
    : path_(path), width_(header.size()) {
  std::ofstream out(path_, std::ios::trunc);
  if (!out) throw GridError("cannot open " + path.string() + " for writing");
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != width_) throw DomainError("CSV row width does not match header");
  std::ofstream out(path_, std::ios::app);
  for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
  out << '\n';
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw GridError("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
}

}  // namespace gd::io
