/*
 * Copyright 2026 The x2fs Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "x2fs/dataset.hpp"

#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace x2fs::runner {

namespace {

std::string trim(const std::string& s) {
  size_t begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  size_t end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

}  // namespace

std::vector<std::string> Dataset::ids() const {
  std::vector<std::string> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(row.id);
  return out;
}

chi2::BinaryVector Dataset::values() const {
  std::vector<uint8_t> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(row.value);
  return chi2::BinaryVector(std::move(out));
}

Dataset load_dataset(const std::string& path, const std::string& id_column,
                     const std::string& value_column) {
  std::ifstream file(path);
  if (!file) {
    throw Error(ErrorCode::InputUnreadable, "cannot open " + path);
  }

  std::string line;
  if (!std::getline(file, line)) {
    throw Error(ErrorCode::MissingColumn, "empty file " + path);
  }
  const auto header = split_csv_line(line);
  size_t id_index = header.size();
  size_t value_index = header.size();
  for (size_t i = 0; i < header.size(); ++i) {
    if (header[i] == id_column) id_index = i;
    if (header[i] == value_column) value_index = i;
  }
  if (id_index == header.size()) {
    throw Error(ErrorCode::MissingColumn, "no column '" + id_column + "'");
  }
  if (value_index == header.size()) {
    throw Error(ErrorCode::MissingColumn, "no column '" + value_column + "'");
  }

  Dataset ds;
  std::unordered_set<std::string> seen;
  size_t row_number = 0;  // 1-based over data rows
  while (std::getline(file, line)) {
    if (trim(line).empty()) continue;
    ++row_number;
    const auto fields = split_csv_line(line);
    if (fields.size() <= std::max(id_index, value_index)) {
      throw NonBinaryValueError(row_number);
    }
    const std::string& id = fields[id_index];
    const std::string& value = fields[value_index];
    if (value != "0" && value != "1") {
      throw NonBinaryValueError(row_number);
    }
    if (!seen.insert(id).second) {
      throw Error(ErrorCode::DuplicateId, "duplicate id '" + id + "'");
    }
    ds.rows.push_back({id, static_cast<uint8_t>(value == "1" ? 1 : 0)});
  }
  return ds;
}

chi2::BinaryVector align(const std::vector<std::string>& carol_ids,
                         const Dataset& felix_side) {
  std::unordered_map<std::string, uint8_t> by_id;
  by_id.reserve(felix_side.rows.size());
  for (const auto& row : felix_side.rows) by_id.emplace(row.id, row.value);

  std::vector<uint8_t> out;
  out.reserve(carol_ids.size());
  size_t missing = 0;
  for (const auto& id : carol_ids) {
    auto it = by_id.find(id);
    if (it == by_id.end()) {
      ++missing;
      continue;
    }
    out.push_back(it->second);
  }
  const size_t matched = out.size();
  const size_t extra = felix_side.rows.size() - matched;
  if (missing != 0 || extra != 0) {
    throw IdSetMismatchError(missing, extra);
  }
  return chi2::BinaryVector(std::move(out));
}

}  // namespace x2fs::runner
