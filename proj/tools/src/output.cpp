#include "lowrank/harness/output.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <locale>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace lowrank::harness {
namespace {

constexpr double kErrorFloor = 1e-16;

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

double parse_field(const std::string& field, const std::filesystem::path& path) {
  if (field == "inf") return std::numeric_limits<double>::infinity();
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw std::runtime_error("malformed number '" + field + "' in " + path.string());
  }
  return v;
}

// Fixed palette: blue, orange, green, red, purple, brown, pink, grey.
constexpr const char* kColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                   "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

}  // namespace

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

CsvSeries read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  CsvSeries series;
  series.label = path.stem().string();
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty CSV: " + path.string());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string iter, err;
    if (!std::getline(row, iter, ',') || !std::getline(row, err, ',')) {
      throw std::runtime_error("CSV row needs at least two columns in " + path.string());
    }
    series.iters.push_back(parse_field(iter, path));
    series.errors.push_back(parse_field(err, path));
  }
  if (series.iters.empty()) throw std::runtime_error("empty CSV: " + path.string());
  return series;
}

void emit_plot(const std::vector<std::filesystem::path>& csv_paths,
               const std::filesystem::path& out_path, const std::string& title) {
  if (csv_paths.empty()) throw std::runtime_error("emit_plot: no CSV files given");
  std::vector<CsvSeries> series;
  for (const auto& p : csv_paths) series.push_back(read_trace_csv(p));

  double x_max = 1.0;
  double y_min = std::numeric_limits<double>::infinity();
  double y_max = -std::numeric_limits<double>::infinity();
  for (auto& s : series) {
    for (double& e : s.errors) {
      e = std::log10(std::max(std::isfinite(e) ? e : std::numeric_limits<double>::max(), kErrorFloor));
      y_min = std::min(y_min, e);
      y_max = std::max(y_max, e);
    }
    x_max = std::max(x_max, s.iters.back());
  }
  y_min = std::floor(y_min);
  y_max = std::ceil(y_max);
  if (y_max <= y_min) y_max = y_min + 1.0;

  const double width = 720, height = 480, left = 70, right = 180, top = 40, bottom = 50;
  const double pw = width - left - right, ph = height - top - bottom;
  auto sx = [&](double x) { return left + pw * x / x_max; };
  auto sy = [&](double y) { return top + ph * (y_max - y) / (y_max - y_min); };

  std::ostringstream svg;
  svg.imbue(std::locale::classic());
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!title.empty()) {
    svg << "<text x=\"" << left + pw / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">"
        << xml_escape(title) << "</text>\n";
  }
  svg << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";

  const int y_step = std::max(1, static_cast<int>(std::ceil((y_max - y_min) / 10.0)));
  for (int k = static_cast<int>(y_min); k <= static_cast<int>(y_max); k += y_step) {
    svg << "<line x1=\"" << left << "\" x2=\"" << left + pw << "\" y1=\"" << sy(k) << "\" y2=\""
        << sy(k) << "\" stroke=\"#dddddd\"/>\n"
        << "<text x=\"" << left - 6 << "\" y=\"" << sy(k) + 4 << "\" text-anchor=\"end\">1e"
        << k << "</text>\n";
  }
  for (int k = 0; k <= 5; ++k) {
    const double x = x_max * k / 5.0;
    svg << "<text x=\"" << sx(x) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">"
        << static_cast<long long>(std::llround(x)) << "</text>\n";
  }
  svg << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 10
      << "\" text-anchor=\"middle\">iteration</text>\n"
      << "<text x=\"16\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << top + ph / 2 << ")\">error (log10)</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kColors[i % (sizeof kColors / sizeof kColors[0])];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < series[i].iters.size(); ++k) {
      svg << (k ? " " : "") << sx(series[i].iters[k]) << ',' << sy(series[i].errors[k]);
    }
    svg << "\"/>\n";
    const double ly = top + 14 + 16 * static_cast<double>(i);
    svg << "<line x1=\"" << left + pw + 10 << "\" x2=\"" << left + pw + 30 << "\" y1=\"" << ly - 4
        << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << left + pw + 34 << "\" y=\"" << ly << "\">" << xml_escape(series[i].label)
        << "</text>\n";
  }
  svg << "</svg>\n";

  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot write " + out_path.string());
  out << svg.str();
  if (!out) throw std::runtime_error("write failed: " + out_path.string());
}

}  // namespace lowrank::harness
