#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace lowrank::harness {

/// Shortest round-trip-safe form with 17 significant digits, '.' decimal
/// separator regardless of locale. Infinities print as "inf"/"-inf".
std::string format_double(double value);

struct CsvSeries {
  std::string label;
  std::vector<double> iters;
  std::vector<double> errors;
};

/// Reads the first two columns (iteration, error) of a trace CSV. Throws
/// std::runtime_error when the file has no data rows.
CsvSeries read_trace_csv(const std::filesystem::path& path);

/// Writes a self-contained SVG with one polyline per CSV: iteration on the
/// horizontal axis, log10(max(error, 1e-16)) on the vertical axis.
void emit_plot(const std::vector<std::filesystem::path>& csv_paths,
               const std::filesystem::path& out_path, const std::string& title = "");

}  // namespace lowrank::harness
