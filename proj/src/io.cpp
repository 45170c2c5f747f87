// Copyright 2026 The fluxsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fluxsim/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "fluxsim/errors.hpp"

namespace fluxsim {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  // shortest representation that round-trips
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    if (back == v) return buf;
  }
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void atomic_write_file(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
  }
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw NumericalError("cannot open output file " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw NumericalError("short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw NumericalError("cannot rename " + tmp.string() + " to " + path + ": " + ec.message());
}

void CsvWriter::comment(const std::string& line) {
  out_ += "# ";
  out_ += line;
  out_ += "\n";
}

void CsvWriter::header(const std::vector<std::string>& columns) {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) out_ += ",";
    out_ += columns[i];
  }
  out_ += "\n";
}

void CsvWriter::row(const std::vector<std::string>& cells) { header(cells); }

void CsvWriter::row(const std::vector<double>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ += ",";
    out_ += format_double(cells[i]);
  }
  out_ += "\n";
}

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return static_cast<int>(i);
  }
  return -1;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open CSV file " + path);
  CsvTable table;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!have_header) {
      table.columns = cells;
      have_header = true;
      continue;
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) {
      if (c == "nan" || c.empty()) {
        row.push_back(std::nan(""));
      } else if (c == "inf") {
        row.push_back(std::numeric_limits<double>::infinity());
      } else if (c == "-inf") {
        row.push_back(-std::numeric_limits<double>::infinity());
      } else {
        row.push_back(std::stod(c));
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

namespace {

struct Extent {
  double lo = 0.0, hi = 1.0;
};

Extent finite_extent(const std::vector<double>& values) {
  Extent e{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (double v : values) {
    if (!std::isfinite(v)) continue;
    e.lo = std::min(e.lo, v);
    e.hi = std::max(e.hi, v);
  }
  if (!std::isfinite(e.lo)) return {0.0, 1.0};
  if (e.lo == e.hi) return {e.lo - 0.5, e.hi + 0.5};
  return e;
}

std::string color_map(double t) {
  // 5-stop blue -> teal -> green -> yellow -> warm ramp
  static const double stops[5][3] = {
      {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}};
  t = std::clamp(t, 0.0, 1.0) * 4.0;
  int k = std::min(3, static_cast<int>(t));
  double f = t - k;
  char buf[24];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x",
                static_cast<int>(stops[k][0] + f * (stops[k + 1][0] - stops[k][0])),
                static_cast<int>(stops[k][1] + f * (stops[k + 1][1] - stops[k][1])),
                static_cast<int>(stops[k][2] + f * (stops[k + 1][2] - stops[k][2])));
  return buf;
}

}  // namespace

std::string svg_line_chart(const std::vector<double>& x,
                           const std::vector<std::vector<double>>& series,
                           const std::vector<std::string>& labels,
                           const std::string& title) {
  const int width = 640, height = 420, margin = 50;
  Extent ex = finite_extent(x);
  std::vector<double> all_y;
  for (const auto& s : series) all_y.insert(all_y.end(), s.begin(), s.end());
  Extent ey = finite_extent(all_y);
  static const char* palette[] = {"#1f77b4", "#9467bd", "#2ca02c", "#d62728", "#ff7f0e", "#8c564b"};

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  out << "<!-- data-min=" << format_double(ey.lo) << " data-max=" << format_double(ey.hi) << " -->\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << title
      << "</text>\n";
  out << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << width - 2 * margin
      << "\" height=\"" << height - 2 * margin << "\" fill=\"none\" stroke=\"black\"/>\n";
  auto px = [&](double v) { return margin + (v - ex.lo) / (ex.hi - ex.lo) * (width - 2 * margin); };
  auto py = [&](double v) { return height - margin - (v - ey.lo) / (ey.hi - ey.lo) * (height - 2 * margin); };
  for (std::size_t s = 0; s < series.size(); ++s) {
    out << "<polyline fill=\"none\" stroke=\"" << palette[s % 6] << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < x.size() && i < series[s].size(); ++i) {
      if (!std::isfinite(series[s][i])) continue;
      out << px(x[i]) << "," << py(series[s][i]) << " ";
    }
    out << "\"/>\n";
    if (s < labels.size()) {
      out << "<text x=\"" << width - margin - 150 << "\" y=\"" << margin + 16 + 16 * s
          << "\" font-size=\"12\" fill=\"" << palette[s % 6] << "\">" << labels[s] << "</text>\n";
    }
  }
  out << "<text x=\"" << margin << "\" y=\"" << height - margin + 28 << "\" font-size=\"11\">"
      << format_double(ex.lo) << "</text>\n";
  out << "<text x=\"" << width - margin << "\" y=\"" << height - margin + 28
      << "\" text-anchor=\"end\" font-size=\"11\">" << format_double(ex.hi) << "</text>\n";
  out << "<text x=\"" << margin - 4 << "\" y=\"" << height - margin << "\" text-anchor=\"end\" font-size=\"11\">"
      << format_double(ey.lo) << "</text>\n";
  out << "<text x=\"" << margin - 4 << "\" y=\"" << margin + 8 << "\" text-anchor=\"end\" font-size=\"11\">"
      << format_double(ey.hi) << "</text>\n";
  out << "</svg>\n";
  return out.str();
}

std::string svg_heatmap(const std::vector<std::vector<double>>& cells, const std::string& title) {
  const int margin = 40;
  std::size_t nrows = cells.size();
  std::size_t ncols = nrows ? cells[0].size() : 0;
  const int cell_px = std::max<int>(3, static_cast<int>(480 / std::max<std::size_t>(1, std::max(nrows, ncols))));
  const int width = margin * 2 + cell_px * static_cast<int>(ncols);
  const int height = margin * 2 + cell_px * static_cast<int>(nrows);

  std::vector<double> all;
  for (const auto& r : cells) all.insert(all.end(), r.begin(), r.end());
  Extent e = finite_extent(all);

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  out << "<!-- data-min=" << format_double(e.lo) << " data-max=" << format_double(e.hi) << " -->\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" << title
      << "</text>\n";
  for (std::size_t r = 0; r < nrows; ++r) {
    for (std::size_t c = 0; c < cells[r].size(); ++c) {
      double v = cells[r][c];
      double t = std::isfinite(v) ? (v - e.lo) / (e.hi - e.lo) : 0.0;
      // row 0 is drawn at the bottom
      out << "<rect x=\"" << margin + cell_px * static_cast<int>(c) << "\" y=\""
          << margin + cell_px * static_cast<int>(nrows - 1 - r) << "\" width=\"" << cell_px
          << "\" height=\"" << cell_px << "\" fill=\"" << color_map(t) << "\"/>\n";
    }
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace fluxsim
