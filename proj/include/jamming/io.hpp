#pragma once

// CSV and JSON serialization.  CSV files always carry a header row, use LF
// line endings and print floating point values with 17 significant digits.

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "json.hpp"

#include "jamming/fit.hpp"
#include "jamming/graph.hpp"
#include "jamming/spatialsim.hpp"
#include "jamming/stats.hpp"

namespace jamming {

/// Malformed or missing input data; carries the source and line.
class DataError : public std::runtime_error {
 public:
  DataError(const std::string& source, std::size_t line, const std::string& what)
      : std::runtime_error(source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + what),
        line_(line) {}

  [[nodiscard]] std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x, std::chars_format::general, 17);
  return {buf.data(), res.ptr};
}

struct SampleRow {
  std::uint64_t trial = 0;
  std::uint64_t n_realized = 0;
  std::uint64_t x_inf = 0;

  friend bool operator==(const SampleRow&, const SampleRow&) = default;
};

struct TimedRow {
  std::uint64_t trial = 0;
  double t = 0.0;
  std::uint64_t x_t = 0;
};

inline void write_samples(std::ostream& out, std::span<const SampleRow> rows) {
  out << "trial,n_realized,x_inf\n";
  for (const auto& r : rows) out << r.trial << ',' << r.n_realized << ',' << r.x_inf << '\n';
}

inline void write_timed_samples(std::ostream& out, std::span<const TimedRow> rows) {
  out << "trial,t_seconds,x_t\n";
  for (const auto& r : rows) out << r.trial << ',' << format_double(r.t) << ',' << r.x_t << '\n';
}

inline void write_points_header(std::ostream& out, int coords) {
  out << "trial,particle,x_m,y_m" << (coords == 3 ? ",z_m" : "") << ",excited\n";
}

inline void write_points(std::ostream& out, std::uint64_t trial, const PointSet& points, int coords,
                         std::span<const Vertex> excited) {
  std::vector<char> is_excited(points.size(), 0);
  for (const Vertex v : excited) is_excited[v] = 1;
  for (std::size_t i = 0; i < points.size(); ++i) {
    out << trial << ',' << i;
    for (int a = 0; a < coords; ++a) out << ',' << format_double(points.positions[i][a]);
    out << ',' << (is_excited[i] ? 1 : 0) << '\n';
  }
}

inline void write_histogram(std::ostream& out, const Histogram& hist, std::span<const double> normal,
                            std::span<const double> poisson) {
  out << "bin_left,bin_right,count,normal_overlay,poisson_overlay\n";
  for (std::size_t i = 0; i < hist.bins.size(); ++i) {
    const auto& b = hist.bins[i];
    out << format_double(b.left) << ',' << format_double(b.right) << ',' << b.count << ',' << format_double(normal[i])
        << ',' << format_double(poisson[i]) << '\n';
  }
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t pos = 0;
  for (;;) {
    const std::size_t comma = line.find(',', pos);
    fields.emplace_back(trim(line.substr(pos, comma == std::string_view::npos ? comma : comma - pos)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return fields;
}

inline std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s == "inf" || s == "+inf" || s == "infinity") return std::numeric_limits<double>::infinity();
  double value = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

inline std::optional<std::uint64_t> parse_uint(std::string_view s) {
  s = trim(s);
  std::uint64_t value = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;

  [[nodiscard]] std::optional<std::size_t> column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    return std::nullopt;
  }
};

inline CsvTable read_csv(std::istream& in, const std::string& source) {
  CsvTable table;
  std::string line;
  std::size_t number = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty()) continue;
    auto fields = split_csv(line);
    if (!have_header) {
      table.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != table.header.size())
      throw DataError(source, number,
                      "expected " + std::to_string(table.header.size()) + " fields, found " + std::to_string(fields.size()));
    table.rows.push_back(std::move(fields));
    table.line_numbers.push_back(number);
  }
  if (table.rows.empty()) throw DataError(source, 0, "no data");
  return table;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path, 0, "cannot open file for reading");
  return in;
}

}  // namespace detail

inline std::vector<SampleRow> read_samples(std::istream& in, const std::string& source = "<input>") {
  const auto table = detail::read_csv(in, source);
  const auto trial = table.column("trial");
  const auto n = table.column("n_realized");
  const auto x = table.column("x_inf");
  if (!trial || !n || !x) throw DataError(source, 1, "header must be trial,n_realized,x_inf");
  std::vector<SampleRow> rows;
  rows.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& r = table.rows[i];
    const auto a = detail::parse_uint(r[*trial]);
    const auto b = detail::parse_uint(r[*n]);
    const auto c = detail::parse_uint(r[*x]);
    if (!a || !b || !c) throw DataError(source, table.line_numbers[i], "expected non-negative integers");
    rows.push_back({*a, *b, *c});
  }
  return rows;
}

/// Numeric column `name` of a headed CSV file.
inline std::vector<double> read_column(std::istream& in, const std::string& name, const std::string& source = "<input>") {
  const auto table = detail::read_csv(in, source);
  const auto col = table.column(name);
  if (!col) throw DataError(source, 1, "missing column '" + name + "'");
  std::vector<double> out;
  out.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto v = detail::parse_double(table.rows[i][*col]);
    if (!v) throw DataError(source, table.line_numbers[i], "malformed number in column '" + name + "'");
    out.push_back(*v);
  }
  return out;
}

/// CSV `t_seconds,count` with an optional `weight` column.
inline TimeSeries read_timeseries(std::istream& in, const std::string& source = "<input>") {
  const auto table = detail::read_csv(in, source);
  const auto t_col = table.column("t_seconds");
  const auto y_col = table.column("count");
  const auto w_col = table.column("weight");
  if (!t_col || !y_col) throw DataError(source, 1, "header must contain t_seconds,count");
  TimeSeries series;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const std::size_t line = table.line_numbers[i];
    const auto t = detail::parse_double(table.rows[i][*t_col]);
    const auto y = detail::parse_double(table.rows[i][*y_col]);
    if (!t || !y || !std::isfinite(*t) || !std::isfinite(*y)) throw DataError(source, line, "malformed number");
    if (*t < 0.0) throw DataError(source, line, "t_seconds must be >= 0");
    if (*y < 0.0) throw DataError(source, line, "count must be >= 0");
    if (!series.points.empty() && *t <= series.points.back().t)
      throw DataError(source, line, "t_seconds must be strictly increasing");
    series.points.push_back({*t, *y});
    if (w_col) {
      const auto w = detail::parse_double(table.rows[i][*w_col]);
      if (!w || !(*w > 0.0)) throw DataError(source, line, "weight must be > 0");
      series.weights.push_back(*w);
    }
  }
  return series;
}

inline TimeSeries read_timeseries(const std::string& path) {
  auto in = detail::open_input(path);
  return read_timeseries(in, path);
}

// --- JSON reports ----------------------------------------------------------

inline nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

inline nlohmann::json to_json(const SampleSummary& s) {
  return {{"count", s.count},   {"mean", s.mean},      {"variance", s.variance}, {"mandelQ", optional_json(s.mandel_q)},
          {"seMean", s.se_mean}, {"seQ", optional_json(s.se_q)}};
}

inline nlohmann::json to_json(const JamStats& s) {
  return {{"mean", s.mean}, {"variance", s.variance}, {"mandelQ", s.mandel_q}};
}

inline nlohmann::json to_json(const FitResult& r) {
  return {{"lambdaHz", r.rate}, {"c", r.neighbors},   {"A", r.amplitude},
          {"sse", r.sse},       {"iterations", r.iterations}, {"converged", r.converged}};
}

inline void write_report(std::ostream& out, const nlohmann::json& report) { out << report.dump(2) << '\n'; }

}  // namespace jamming
