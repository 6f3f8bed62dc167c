// Copyright 2026 The dpattn Authors
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

#ifndef DPATTN_IO_H_
#define DPATTN_IO_H_

// Matrix CSV files (one row per line, comma-separated, no header; doubles in
// shortest round-trip form) and JSON helpers for configs and reports.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "Eigen/Dense"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "json.hpp"

namespace dpattn {

// Shortest decimal string that parses back to exactly `value`.
inline std::string FormatDouble(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

inline std::string MatrixToCsv(const Eigen::MatrixXd& m) {
  std::string out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out += ',';
      out += FormatDouble(m(i, j));
    }
    out += '\n';
  }
  return out;
}

inline absl::StatusOr<Eigen::MatrixXd> MatrixFromCsv(std::string_view text) {
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view()
                                         : text.substr(eol + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    std::vector<double>& row = rows.emplace_back();
    while (true) {
      const std::size_t comma = line.find(',');
      std::string_view field = line.substr(0, comma);
      while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
      while (!field.empty() && field.back() == ' ') field.remove_suffix(1);
      double value = 0;
      const auto [ptr, ec] =
          std::from_chars(field.data(), field.data() + field.size(), value);
      if (ec != std::errc() || ptr != field.data() + field.size() ||
          field.empty()) {
        return absl::InvalidArgumentError(
            "csv line " + std::to_string(line_no) + ": cannot parse '" +
            std::string(field) + "'");
      }
      row.push_back(value);
      if (comma == std::string_view::npos) break;
      line = line.substr(comma + 1);
    }
    if (row.size() != rows.front().size()) {
      return absl::InvalidArgumentError(
          "csv line " + std::to_string(line_no) + ": expected " +
          std::to_string(rows.front().size()) + " fields, got " +
          std::to_string(row.size()));
    }
  }
  if (rows.empty()) return absl::InvalidArgumentError("csv has no rows");
  Eigen::MatrixXd m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

inline absl::StatusOr<std::string> ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return absl::NotFoundError("cannot open " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline absl::Status WriteFile(const std::filesystem::path& path,
                              std::string_view contents) {
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return absl::UnavailableError("cannot write " + path.string());
  out << contents;
  out.close();
  if (!out) return absl::UnavailableError("error writing " + path.string());
  return absl::OkStatus();
}

inline absl::StatusOr<Eigen::MatrixXd> ReadMatrixCsv(
    const std::filesystem::path& path) {
  absl::StatusOr<std::string> text = ReadFile(path);
  if (!text.ok()) return text.status();
  absl::StatusOr<Eigen::MatrixXd> m = MatrixFromCsv(*text);
  if (!m.ok()) {
    return absl::InvalidArgumentError(path.string() + ": " +
                                      std::string(m.status().message()));
  }
  return m;
}

inline nlohmann::json MatrixToJson(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

// Typed access to a JSON config object that rejects unknown keys.
class ConfigReader {
 public:
  ConfigReader(const nlohmann::json& object, std::string context)
      : object_(object), context_(std::move(context)) {}

  absl::Status CheckKeys(const std::set<std::string>& allowed) const {
    if (!object_.is_object()) {
      return absl::InvalidArgumentError(context_ + ": expected a JSON object");
    }
    for (const auto& [key, value] : object_.items()) {
      if (!allowed.contains(key)) {
        return absl::InvalidArgumentError(context_ + ": unknown key '" + key +
                                          "'");
      }
    }
    return absl::OkStatus();
  }

  bool Has(const std::string& key) const { return object_.contains(key); }

  absl::StatusOr<double> Double(const std::string& key) const {
    if (!Has(key)) return Missing(key);
    const nlohmann::json& v = object_.at(key);
    if (!v.is_number()) return WrongType(key, "a number");
    return v.get<double>();
  }
  absl::StatusOr<double> Double(const std::string& key, double fallback) const {
    return Has(key) ? Double(key) : fallback;
  }

  absl::StatusOr<std::int64_t> Int(const std::string& key) const {
    if (!Has(key)) return Missing(key);
    const nlohmann::json& v = object_.at(key);
    if (!v.is_number_integer()) return WrongType(key, "an integer");
    return v.get<std::int64_t>();
  }

  // Seeds are non-negative integers below 2^64.
  absl::StatusOr<std::uint64_t> Seed(const std::string& key) const {
    if (!Has(key)) return Missing(key);
    const nlohmann::json& v = object_.at(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
      return static_cast<std::uint64_t>(v.get<std::int64_t>());
    }
    return WrongType(key, "a non-negative integer");
  }

  absl::StatusOr<std::string> String(const std::string& key) const {
    if (!Has(key)) return Missing(key);
    const nlohmann::json& v = object_.at(key);
    if (!v.is_string()) return WrongType(key, "a string");
    return v.get<std::string>();
  }
  absl::StatusOr<std::string> String(const std::string& key,
                                     std::string fallback) const {
    return Has(key) ? String(key) : fallback;
  }

  absl::StatusOr<std::vector<std::int64_t>> IntList(
      const std::string& key) const {
    if (!Has(key)) return Missing(key);
    const nlohmann::json& v = object_.at(key);
    if (!v.is_array()) return WrongType(key, "an array of integers");
    std::vector<std::int64_t> out;
    for (const nlohmann::json& item : v) {
      if (!item.is_number_integer()) {
        return WrongType(key, "an array of integers");
      }
      out.push_back(item.get<std::int64_t>());
    }
    return out;
  }

  const nlohmann::json& json() const { return object_; }
  const std::string& context() const { return context_; }

 private:
  absl::Status Missing(const std::string& key) const {
    return absl::InvalidArgumentError(context_ + ": missing required key '" +
                                      key + "'");
  }
  absl::Status WrongType(const std::string& key, const char* expected) const {
    return absl::InvalidArgumentError(context_ + ": '" + key + "' must be " +
                                      expected);
  }

  const nlohmann::json& object_;
  std::string context_;
};

}  // namespace dpattn

#endif  // DPATTN_IO_H_
