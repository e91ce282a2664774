#include "oscibench/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <system_error>

namespace oscibench {

std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::invalid_argument("parse_double: bad float '" + s + "'");
  return v;
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

void append_line(std::string& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += fields[i];
  }
  out += '\n';
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

std::string to_csv(const std::vector<std::string>& header,
                   const std::vector<std::vector<std::string>>& rows) {
  std::string out;
  append_line(out, header);
  for (const auto& r : rows) append_line(out, r);
  return out;
}

CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::size_t start = 0;
  bool first = true;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    const std::string line = text.substr(start, end - start);
    start = end + 1;
    if (line.empty()) continue;
    if (first) {
      t.header = split(line, ',');
      first = false;
    } else {
      t.rows.push_back(split(line, ','));
    }
  }
  return t;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!f) throw std::runtime_error("write failed: " + path);
}

const std::vector<std::string> kSweepHeader = {"method", "h", "omega",
                                               "h_omega_over_pi", "value", "status"};
const std::vector<std::string> kSeriesHeader = {"t", "I1", "I2", "I3", "I", "H"};
const std::vector<std::string> kGlobalErrorHeader = {"method", "h", "err_x0",
                                                     "err_y0", "status"};

namespace {

void require_header(const CsvTable& t, const std::vector<std::string>& expect,
                    const char* what) {
  if (t.header != expect)
    throw std::invalid_argument(std::string(what) + ": unexpected CSV header");
}

}  // namespace

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::vector<std::vector<std::string>> out;
  out.reserve(rows.size());
  for (const SweepRow& r : rows) {
    out.push_back({r.method, format_double(r.h), format_double(r.omega),
                   format_double(r.h_omega_over_pi),
                   r.status == RunStatus::ok ? format_double(r.value) : "",
                   to_string(r.status)});
  }
  return to_csv(kSweepHeader, out);
}

std::vector<SweepRow> sweep_from_csv(const std::string& text) {
  const CsvTable t = parse_csv(text);
  require_header(t, kSweepHeader, "sweep_from_csv");
  std::vector<SweepRow> rows;
  rows.reserve(t.rows.size());
  for (const auto& f : t.rows) {
    if (f.size() != 6) throw std::invalid_argument("sweep_from_csv: bad row");
    SweepRow r;
    r.method = f[0];
    r.h = parse_double(f[1]);
    r.omega = parse_double(f[2]);
    r.h_omega_over_pi = parse_double(f[3]);
    const auto st = run_status_from_string(f[5]);
    if (!st) throw std::invalid_argument("sweep_from_csv: bad status " + f[5]);
    r.status = *st;
    r.value = f[4].empty() ? kNaN : parse_double(f[4]);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string series_to_csv(const std::vector<SeriesRow>& rows) {
  std::vector<std::vector<std::string>> out;
  out.reserve(rows.size());
  for (const SeriesRow& r : rows)
    out.push_back({format_double(r.t), format_double(r.I1), format_double(r.I2),
                   format_double(r.I3), format_double(r.I), format_double(r.H)});
  return to_csv(kSeriesHeader, out);
}

std::vector<SeriesRow> series_from_csv(const std::string& text) {
  const CsvTable t = parse_csv(text);
  require_header(t, kSeriesHeader, "series_from_csv");
  std::vector<SeriesRow> rows;
  rows.reserve(t.rows.size());
  for (const auto& f : t.rows) {
    if (f.size() != 6) throw std::invalid_argument("series_from_csv: bad row");
    rows.push_back({parse_double(f[0]), parse_double(f[1]), parse_double(f[2]),
                    parse_double(f[3]), parse_double(f[4]), parse_double(f[5])});
  }
  return rows;
}

std::string global_error_to_csv(const std::vector<GlobalErrorRow>& rows) {
  std::vector<std::vector<std::string>> out;
  out.reserve(rows.size());
  for (const GlobalErrorRow& r : rows) {
    const bool ok = r.status == RunStatus::ok;
    out.push_back({r.method, format_double(r.h), ok ? format_double(r.err_x0) : "",
                   ok ? format_double(r.err_y0) : "", to_string(r.status)});
  }
  return to_csv(kGlobalErrorHeader, out);
}

std::vector<GlobalErrorRow> global_error_from_csv(const std::string& text) {
  const CsvTable t = parse_csv(text);
  require_header(t, kGlobalErrorHeader, "global_error_from_csv");
  std::vector<GlobalErrorRow> rows;
  rows.reserve(t.rows.size());
  for (const auto& f : t.rows) {
    if (f.size() != 5) throw std::invalid_argument("global_error_from_csv: bad row");
    GlobalErrorRow r;
    r.method = f[0];
    r.h = parse_double(f[1]);
    const auto st = run_status_from_string(f[4]);
    if (!st) throw std::invalid_argument("global_error_from_csv: bad status " + f[4]);
    r.status = *st;
    r.err_x0 = f[2].empty() ? kNaN : parse_double(f[2]);
    r.err_y0 = f[3].empty() ? kNaN : parse_double(f[3]);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace oscibench
