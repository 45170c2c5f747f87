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

#ifndef FLUXSIM_IO_HPP
#define FLUXSIM_IO_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace fluxsim {

/// Shortest round-trip decimal representation of a double.
std::string format_double(double v);

/// FNV-1a 64-bit hash, used to fingerprint resolved configs in file names
/// and CSV headers.
std::uint64_t fnv1a64(const std::string& bytes);
std::string hash_hex(std::uint64_t h);

/// Writes `content` to `path` atomically (temp file in the same directory,
/// then rename). Creates parent directories as needed.
void atomic_write_file(const std::string& path, const std::string& content);

/// Incremental CSV document with '#'-prefixed comment header lines.
class CsvWriter {
 public:
  void comment(const std::string& line);
  void header(const std::vector<std::string>& columns);
  void row(const std::vector<std::string>& cells);
  void row(const std::vector<double>& cells);
  const std::string& str() const { return out_; }

 private:
  std::string out_;
};

/// Parsed CSV: comment lines dropped, first non-comment row is the header.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  int column(const std::string& name) const;  // -1 when absent
};
CsvTable read_csv(const std::string& path);

/// Minimal SVG 1.1 renderers. No text beyond axis labels, no external deps;
/// data extrema are embedded in a leading comment so emitted artifacts can be
/// cross-checked against the CSV exactly.
std::string svg_line_chart(const std::vector<double>& x,
                           const std::vector<std::vector<double>>& series,
                           const std::vector<std::string>& labels,
                           const std::string& title);
std::string svg_heatmap(const std::vector<std::vector<double>>& cells,
                        const std::string& title);

}  // namespace fluxsim

#endif  // FLUXSIM_IO_HPP
