#pragma once

#include <string>
#include <vector>

#include "oscibench/experiments.hpp"

namespace oscibench {

/// Shortest decimal that round-trips to the same double (std::to_chars).
std::string format_double(double v);

/// Exact inverse of format_double; throws std::invalid_argument on garbage.
double parse_double(const std::string& s);

/// Minimal CSV: header row, comma-separated, LF line endings, UTF-8,
/// no quoting (fields never contain commas here).
std::string to_csv(const std::vector<std::string>& header,
                   const std::vector<std::vector<std::string>>& rows);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};
CsvTable parse_csv(const std::string& text);

void write_text_file(const std::string& path, const std::string& content);

// Typed schemas. Empty value fields encode non-ok statuses.
extern const std::vector<std::string> kSweepHeader;        // method,h,omega,h_omega_over_pi,value,status
extern const std::vector<std::string> kSeriesHeader;       // t,I1,I2,I3,I,H
extern const std::vector<std::string> kGlobalErrorHeader;  // method,h,err_x0,err_y0,status

std::string sweep_to_csv(const std::vector<SweepRow>& rows);
std::vector<SweepRow> sweep_from_csv(const std::string& text);

std::string series_to_csv(const std::vector<SeriesRow>& rows);
std::vector<SeriesRow> series_from_csv(const std::string& text);

std::string global_error_to_csv(const std::vector<GlobalErrorRow>& rows);
std::vector<GlobalErrorRow> global_error_from_csv(const std::string& text);

}  // namespace oscibench
