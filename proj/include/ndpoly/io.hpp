// Copyright 2026 The ndpoly Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NDPOLY_IO_HPP
#define NDPOLY_IO_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace ndpoly::io {

/// Flat key = value configuration document. Parsing is fail-closed: a key
/// outside the allowed set is an error.
class Config {
 public:
  static Config parse_file(const std::string& path, const std::vector<std::string>& allowed);
  static Config parse_text(const std::string& text, const std::vector<std::string>& allowed);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  const std::string& get(const std::string& key) const;
  double get_double(const std::string& key) const;
  double get_double_or(const std::string& key, double fallback) const;
  long long get_int(const std::string& key) const;
  long long get_int_or(const std::string& key, long long fallback) const;
  std::uint64_t get_u64_or(const std::string& key, std::uint64_t fallback) const;
  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  /// Canonical serialization (sorted keys) used for hashing.
  std::string canonical() const;
  std::uint64_t hash() const;

 private:
  std::map<std::string, std::string> values_;
};

/// Full-precision float formatting: round-trips exactly through parse.
std::string format_double(double v);

/// CSV with a fixed header written first, full float precision.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& columns);
  ~CsvWriter();
  void row(const std::vector<std::string>& cells);
  void row_values(const std::vector<double>& cells);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  void* out_;  // FILE*
  std::size_t columns_;
};

/// FNV-1a digest of a file's bytes.
std::uint64_t file_digest(const std::string& path);

/// Append-only JSONL run record.
struct RunRecord {
  std::uint64_t config_hash = 0;
  std::string experiment;
  std::uint64_t seed = 0;
  std::string started_utc;
  std::string finished_utc;
  std::vector<std::pair<std::string, std::uint64_t>> output_digests;
  std::vector<std::pair<std::string, std::string>> diagnostics;
};

void append_run_record(const std::string& path, const RunRecord& record);

std::string utc_now();

}  // namespace ndpoly::io

#endif  // NDPOLY_IO_HPP
