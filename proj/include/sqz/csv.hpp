#pragma once

// CSV formats for measurement data. Comma separated, '.' decimal point, LF
// line endings, one header row. Numbers are written in shortest round-trip
// form so that read(write(x)) == x.

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <variant>
#include <vector>

#include "sqz/error.hpp"
#include "sqz/records.hpp"

namespace sqz {

/// Shortest representation that parses back to the same double.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

/// Fixed-point formatting, locale independent.
inline std::string format_fixed(double v, int digits) {
  if (!std::isfinite(v)) return format_number(v);
  char buf[128];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, digits);
  return std::string(buf, res.ptr);
}

inline std::optional<double> parse_number(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r'))
    text.remove_suffix(1);
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) return std::nullopt;
  return v;
}

enum class CsvKind { loss_sweep, shotnoise, trace };

inline const std::vector<std::string>& csv_header(CsvKind kind) {
  static const std::vector<std::string> loss_sweep{
      "added_loss", "sq_db", "anti_db", "sq_err_db", "anti_err_db", "lo_power_mw", "pump_mw"};
  static const std::vector<std::string> shotnoise{"lo_power_mw", "power_linear"};
  static const std::vector<std::string> trace{"time_s", "level_db"};
  switch (kind) {
    case CsvKind::loss_sweep: return loss_sweep;
    case CsvKind::shotnoise: return shotnoise;
    case CsvKind::trace: return trace;
  }
  return trace;
}

inline CsvKind parse_csv_kind(std::string_view name) {
  if (name == "loss_sweep" || name == "loss-sweep") return CsvKind::loss_sweep;
  if (name == "shotnoise") return CsvKind::shotnoise;
  if (name == "trace") return CsvKind::trace;
  throw ConfigError("unknown CSV kind '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Writing

namespace detail {

inline void write_header(std::ostream& out, CsvKind kind) {
  const auto& cols = csv_header(kind);
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
}

inline std::string optional_cell(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string{};
}

}  // namespace detail

inline void write_loss_sweep_csv(std::ostream& out, const std::vector<MeasurementRecord>& recs) {
  detail::write_header(out, CsvKind::loss_sweep);
  for (const auto& r : recs) {
    out << format_number(r.added_loss) << ',' << format_number(r.sq_db) << ','
        << format_number(r.anti_db) << ',' << format_number(r.sq_err_db) << ','
        << format_number(r.anti_err_db) << ',' << detail::optional_cell(r.lo_power_mw) << ','
        << detail::optional_cell(r.pump_mw) << '\n';
  }
}

inline void write_shotnoise_csv(std::ostream& out, const std::vector<ShotNoisePoint>& points) {
  detail::write_header(out, CsvKind::shotnoise);
  for (const auto& p : points)
    out << format_number(p.lo_power_mw) << ',' << format_number(p.power) << '\n';
}

inline void write_trace_csv(std::ostream& out, const Trace& trace) {
  detail::write_header(out, CsvKind::trace);
  for (std::size_t i = 0; i < trace.times.size(); ++i)
    out << format_number(trace.times[i]) << ',' << format_number(trace.levels_db[i]) << '\n';
}

// ---------------------------------------------------------------------------
// Reading

template <typename T>
struct Ingested {
  T data;
  std::vector<std::string> warnings;
};

using IngestedData = std::variant<Ingested<std::vector<MeasurementRecord>>,
                                  Ingested<std::vector<ShotNoisePoint>>, Ingested<Trace>>;

namespace detail {

inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(',', start);
    cells.emplace_back(line.substr(start, pos == std::string_view::npos ? line.npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  for (auto& c : cells) {
    while (!c.empty() && (c.back() == '\r' || c.back() == ' ')) c.pop_back();
    while (!c.empty() && c.front() == ' ') c.erase(c.begin());
  }
  return cells;
}

struct CsvTable {
  std::vector<std::vector<std::string>> rows;  // data rows only
  std::vector<std::string> warnings;
};

/// Validates the header against `kind`; extra trailing columns are dropped
/// with a warning.
inline CsvTable read_table(std::istream& in, CsvKind kind) {
  const auto& expected = csv_header(kind);
  std::string line;
  if (!std::getline(in, line)) throw IngestError(1, "", "missing header row");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const auto header = split_csv_line(line);

  CsvTable table;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (i >= header.size()) throw IngestError(1, expected[i], "missing column");
    if (header[i] != expected[i])
      throw IngestError(1, expected[i], "expected column '" + expected[i] + "', found '" +
                                            header[i] + "'");
  }
  for (std::size_t i = expected.size(); i < header.size(); ++i)
    table.warnings.push_back("ignoring extra column '" + header[i] + "'");

  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    auto cells = split_csv_line(line);
    if (cells.size() < expected.size())
      throw IngestError(row, expected[cells.size()], "missing cell");
    if (cells.size() > header.size())
      throw IngestError(row, "", "more cells than header columns");
    cells.resize(expected.size());
    table.rows.push_back(std::move(cells));
  }
  return table;
}

inline double required_number(const std::string& cell, std::size_t row, const std::string& col) {
  auto v = parse_number(cell);
  if (!v || !std::isfinite(*v)) throw IngestError(row, col, "not a finite number: '" + cell + "'");
  return *v;
}

inline std::optional<double> optional_number(const std::string& cell, std::size_t row,
                                             const std::string& col) {
  if (cell.empty()) return std::nullopt;
  return required_number(cell, row, col);
}

}  // namespace detail

inline Ingested<std::vector<MeasurementRecord>> read_loss_sweep_csv(std::istream& in) {
  auto table = detail::read_table(in, CsvKind::loss_sweep);
  const auto& cols = csv_header(CsvKind::loss_sweep);
  Ingested<std::vector<MeasurementRecord>> out{{}, std::move(table.warnings)};
  std::size_t row = 1;
  for (const auto& cells : table.rows) {
    ++row;
    MeasurementRecord r;
    r.added_loss = detail::required_number(cells[0], row, cols[0]);
    r.sq_db = detail::required_number(cells[1], row, cols[1]);
    r.anti_db = detail::required_number(cells[2], row, cols[2]);
    r.sq_err_db = detail::required_number(cells[3], row, cols[3]);
    r.anti_err_db = detail::required_number(cells[4], row, cols[4]);
    r.lo_power_mw = detail::optional_number(cells[5], row, cols[5]);
    r.pump_mw = detail::optional_number(cells[6], row, cols[6]);
    if (!(r.added_loss >= 0.0 && r.added_loss < 1.0))
      throw IngestError(row, cols[0], "added loss must lie in [0, 1)");
    if (!(r.sq_db < r.anti_db)) throw IngestError(row, cols[1], "sq_db must be below anti_db");
    if (r.sq_err_db < 0.0) throw IngestError(row, cols[3], "uncertainty must be >= 0");
    if (r.anti_err_db < 0.0) throw IngestError(row, cols[4], "uncertainty must be >= 0");
    out.data.push_back(r);
  }
  return out;
}

inline Ingested<std::vector<ShotNoisePoint>> read_shotnoise_csv(std::istream& in) {
  auto table = detail::read_table(in, CsvKind::shotnoise);
  const auto& cols = csv_header(CsvKind::shotnoise);
  Ingested<std::vector<ShotNoisePoint>> out{{}, std::move(table.warnings)};
  std::size_t row = 1;
  for (const auto& cells : table.rows) {
    ++row;
    ShotNoisePoint p{detail::required_number(cells[0], row, cols[0]),
                     detail::required_number(cells[1], row, cols[1])};
    if (p.lo_power_mw < 0.0) throw IngestError(row, cols[0], "LO power must be >= 0");
    out.data.push_back(p);
  }
  return out;
}

inline Ingested<Trace> read_trace_csv(std::istream& in, std::string label = {}) {
  auto table = detail::read_table(in, CsvKind::trace);
  const auto& cols = csv_header(CsvKind::trace);
  Ingested<Trace> out{{}, std::move(table.warnings)};
  out.data.label = std::move(label);
  std::size_t row = 1;
  for (const auto& cells : table.rows) {
    ++row;
    const double t = detail::required_number(cells[0], row, cols[0]);
    if (!out.data.times.empty() && !(t > out.data.times.back()))
      throw IngestError(row, cols[0], "times must be strictly increasing");
    out.data.times.push_back(t);
    out.data.levels_db.push_back(detail::required_number(cells[1], row, cols[1]));
  }
  return out;
}

/// Reads any of the three formats from a file.
inline IngestedData ingest_csv(const std::string& path, CsvKind kind) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError(0, "", "cannot open '" + path + "'");
  switch (kind) {
    case CsvKind::loss_sweep: return read_loss_sweep_csv(in);
    case CsvKind::shotnoise: return read_shotnoise_csv(in);
    case CsvKind::trace: return read_trace_csv(in, path);
  }
  throw ConfigError("unknown CSV kind");
}

}  // namespace sqz
