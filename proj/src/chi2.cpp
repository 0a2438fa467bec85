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

#include "x2fs/chi2.hpp"

#include <algorithm>
#include <stdexcept>

namespace x2fs::chi2 {

namespace {

using bigmod::Natural;

Rational ratio(const Natural& num, const Natural& den) {
  return Rational::from_ratio(num, den);
}

void require_marginals(const ContingencyTable& t) {
  if (t.a + t.c == 0) throw DegenerateTableError(Marginal::class_zero);
  if (t.b + t.d == 0) throw DegenerateTableError(Marginal::class_one);
  if (t.a + t.b == 0) throw DegenerateTableError(Marginal::feature_zero);
  if (t.c + t.d == 0) throw DegenerateTableError(Marginal::feature_one);
}

}  // namespace

BinaryVector::BinaryVector(std::vector<uint8_t> values)
    : values_(std::move(values)) {
  if (values_.empty()) throw std::invalid_argument("empty binary vector");
  for (uint8_t v : values_) {
    if (v > 1) throw std::invalid_argument("binary vector entry not in {0,1}");
  }
}

BinaryVector BinaryVector::parse(const std::string& bits) {
  std::vector<uint8_t> values;
  values.reserve(bits.size());
  for (char ch : bits) {
    if (ch != '0' && ch != '1') {
      throw std::invalid_argument("binary vector literal must be 0s and 1s");
    }
    values.push_back(static_cast<uint8_t>(ch - '0'));
  }
  return BinaryVector(std::move(values));
}

uint64_t BinaryVector::count_ones() const {
  uint64_t ones = 0;
  for (uint8_t v : values_) ones += v;
  return ones;
}

const char* marginal_name(Marginal m) {
  switch (m) {
    case Marginal::feature_zero: return "A+B (feature=0 row)";
    case Marginal::feature_one: return "C+D (feature=1 row)";
    case Marginal::class_zero: return "A+C (class=0 column)";
    case Marginal::class_one: return "B+D (class=1 column)";
  }
  return "?";
}

ContingencyTable build_table(const BinaryVector& f, const BinaryVector& c) {
  if (f.size() != c.size()) {
    throw Error(ErrorCode::LengthMismatch,
                "feature and class vectors have different lengths");
  }
  ContingencyTable t;
  t.n = f.size();
  for (size_t i = 0; i < f.size(); ++i) {
    if (f[i] == 0) {
      (c[i] == 0 ? t.a : t.b)++;
    } else {
      (c[i] == 0 ? t.c : t.d)++;
    }
  }
  return t;
}

Rational chi2_exact(const ContingencyTable& t) {
  require_marginals(t);
  const Natural ad = Natural(t.a) * Natural(t.d);
  const Natural bc = Natural(t.b) * Natural(t.c);
  const Natural diff = ad < bc ? checked_sub(bc, ad) : checked_sub(ad, bc);
  const Natural num = Natural(t.n) * diff * diff;
  const Natural den = Natural(t.a + t.c) * Natural(t.a + t.b) *
                      Natural(t.c + t.d) * Natural(t.b + t.d);
  return ratio(num, den);
}

Rational chi2_decomposed(const ContingencyTable& t) {
  require_marginals(t);
  const Natural n(t.n);
  const Natural ab(t.a + t.b);
  const Natural cd(t.c + t.d);
  const Natural ac(t.a + t.c);
  const Natural bd(t.b + t.d);
  const Natural d(t.d);

  const Rational term1 = ratio(n * n * n, ab * cd) * ratio(d * d, bd * ac);
  const Rational term2 = ratio(n * cd, ab) * ratio(bd, ac);
  const Rational term3 = Rational(2) * ratio(n * n, ab) * ratio(d, ac);
  return term1 + term2 - term3;
}

const char* confidence_label(ConfidenceLevel level) {
  switch (level) {
    case ConfidenceLevel::at_least_99_9: return ">=99.9%";
    case ConfidenceLevel::at_least_99_5: return ">=99.5%";
    case ConfidenceLevel::at_least_99: return ">=99%";
    case ConfidenceLevel::at_least_95: return ">=95%";
    case ConfidenceLevel::at_least_90: return ">=90%";
    case ConfidenceLevel::below_90: return "below 90%";
  }
  return "?";
}

ConfidenceLevel confidence(const Rational& chi2_value) {
  if (chi2_value.is_negative()) {
    throw Error(ErrorCode::NegativeStatistic, "chi-squared cannot be negative");
  }
  struct Row {
    int64_t hundredths;
    ConfidenceLevel level;
  };
  static constexpr Row kRows[] = {
      {1083, ConfidenceLevel::at_least_99_9},
      {788, ConfidenceLevel::at_least_99_5},
      {663, ConfidenceLevel::at_least_99},
      {384, ConfidenceLevel::at_least_95},
      {271, ConfidenceLevel::at_least_90},
  };
  for (const Row& row : kRows) {
    if (chi2_value >= Rational(row.hundredths, 100)) return row.level;
  }
  return ConfidenceLevel::below_90;
}

}  // namespace x2fs::chi2
