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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "x2fs/chi2.hpp"
#include "x2fs/errors.hpp"

namespace x2fs::runner {

// One record per row, in file order; ids unique, values binary.
struct DatasetRow {
  std::string id;
  uint8_t value;
};

struct Dataset {
  std::vector<DatasetRow> rows;

  std::vector<std::string> ids() const;
  chi2::BinaryVector values() const;
};

class NonBinaryValueError : public Error {
 public:
  explicit NonBinaryValueError(size_t row)
      : Error(ErrorCode::NonBinaryValue,
              "row " + std::to_string(row) + " is not 0 or 1"),
        row_(row) {}
  size_t row() const { return row_; }

 private:
  size_t row_;  // 1-based data row
};

class IdSetMismatchError : public Error {
 public:
  IdSetMismatchError(size_t missing, size_t extra)
      : Error(ErrorCode::IdSetMismatch,
              "peer is missing " + std::to_string(missing) +
                  " id(s) and has " + std::to_string(extra) + " extra"),
        missing_(missing),
        extra_(extra) {}
  size_t missing() const { return missing_; }
  size_t extra() const { return extra_; }

 private:
  size_t missing_;
  size_t extra_;
};

// Minimal comma-separated parsing: header row must contain both columns,
// values must be exactly "0" or "1" after trimming. No quoting support.
Dataset load_dataset(const std::string& path, const std::string& id_column,
                     const std::string& value_column);

// Reorders the local dataset's values into the peer's id order. Both sides
// must hold exactly the same id set; the error carries counts only.
chi2::BinaryVector align(const std::vector<std::string>& carol_ids,
                         const Dataset& felix_side);

}  // namespace x2fs::runner
