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

#include "x2fs/bigmod.hpp"
#include "x2fs/errors.hpp"

namespace x2fs::chi2 {

using bigmod::Rational;

// Sequence of bits, length >= 1.
class BinaryVector {
 public:
  explicit BinaryVector(std::vector<uint8_t> values);
  // Convenience for literals: "00110".
  static BinaryVector parse(const std::string& bits);

  size_t size() const { return values_.size(); }
  uint8_t operator[](size_t i) const { return values_[i]; }
  uint64_t count_ones() const;
  const std::vector<uint8_t>& values() const { return values_; }

  bool operator==(const BinaryVector&) const = default;

 private:
  std::vector<uint8_t> values_;
};

// a = #{f=0,c=0}, b = #{f=0,c=1}, c = #{f=1,c=0}, d = #{f=1,c=1}.
struct ContingencyTable {
  uint64_t a = 0;
  uint64_t b = 0;
  uint64_t c = 0;
  uint64_t d = 0;
  uint64_t n = 0;
};

enum class Marginal : uint8_t {
  feature_zero,  // A + B
  feature_one,   // C + D
  class_zero,    // A + C
  class_one,     // B + D
};

const char* marginal_name(Marginal m);

class DegenerateTableError : public Error {
 public:
  explicit DegenerateTableError(Marginal which)
      : Error(ErrorCode::DegenerateTable,
              std::string("zero marginal ") + marginal_name(which)),
        which_(which) {}
  Marginal which() const { return which_; }

 private:
  Marginal which_;
};

ContingencyTable build_table(const BinaryVector& f, const BinaryVector& c);

// n(AD - BC)^2 / ((A+C)(A+B)(C+D)(B+D)), exact.
Rational chi2_exact(const ContingencyTable& t);

// Same value via the three-term split
//   n^3/((A+B)(C+D)) * D^2/((B+D)(A+C))
// + n(C+D)/(A+B) * (B+D)/(A+C)
// - 2n^2/(A+B) * D/(A+C)
// which is what the encrypted evaluation assembles.
Rational chi2_decomposed(const ContingencyTable& t);

enum class ConfidenceLevel : uint8_t {
  below_90,
  at_least_90,
  at_least_95,
  at_least_99,
  at_least_99_5,
  at_least_99_9,
};

const char* confidence_label(ConfidenceLevel level);

// Threshold lookup: 10.83, 7.88, 6.63, 3.84, 2.71 compared as exact
// rationals; a statistic exactly at a threshold earns that level.
ConfidenceLevel confidence(const Rational& chi2_value);

}  // namespace x2fs::chi2
