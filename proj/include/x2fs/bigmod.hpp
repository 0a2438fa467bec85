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

#include <gmp.h>

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "x2fs/bytes.hpp"
#include "x2fs/errors.hpp"
#include "x2fs/random.hpp"

namespace x2fs::bigmod {

// Non-negative arbitrary-precision integer. Canonical byte form is the
// big-endian magnitude with no leading zero byte (empty for zero).
class Natural {
 public:
  Natural() { mpz_init(z_); }
  explicit Natural(uint64_t v) { mpz_init_set_ui(z_, v); }
  Natural(const Natural& o) { mpz_init_set(z_, o.z_); }
  Natural(Natural&& o) noexcept {
    mpz_init(z_);
    mpz_swap(z_, o.z_);
  }
  Natural& operator=(const Natural& o) {
    if (this != &o) mpz_set(z_, o.z_);
    return *this;
  }
  Natural& operator=(Natural&& o) noexcept {
    mpz_swap(z_, o.z_);
    return *this;
  }
  ~Natural() { mpz_clear(z_); }

  static Natural from_decimal(const std::string& s);
  static Natural from_bytes(std::span<const uint8_t> be_magnitude);

  bool is_zero() const { return mpz_sgn(z_) == 0; }
  bool is_odd() const { return mpz_odd_p(z_) != 0; }
  size_t bit_length() const { return is_zero() ? 0 : mpz_sizeinbase(z_, 2); }
  uint64_t to_u64() const { return mpz_get_ui(z_); }
  bool fits_u64() const { return mpz_fits_ulong_p(z_) != 0; }

  std::vector<uint8_t> to_bytes() const;  // canonical, empty for zero
  std::string to_decimal() const;

  // Wire form: 4-byte big-endian length prefix + canonical magnitude bytes.
  void append_wire(Bytes& out) const;
  static Natural read_wire(ByteReader& in);  // throws Error(TransportError)

  friend std::strong_ordering operator<=>(const Natural& a, const Natural& b) {
    int c = mpz_cmp(a.z_, b.z_);
    return c < 0   ? std::strong_ordering::less
           : c > 0 ? std::strong_ordering::greater
                   : std::strong_ordering::equal;
  }
  friend bool operator==(const Natural& a, const Natural& b) {
    return mpz_cmp(a.z_, b.z_) == 0;
  }
  friend bool operator==(const Natural& a, uint64_t b) {
    return mpz_cmp_ui(a.z_, b) == 0;
  }

  friend Natural operator+(const Natural& a, const Natural& b) {
    Natural r;
    mpz_add(r.z_, a.z_, b.z_);
    return r;
  }
  friend Natural operator*(const Natural& a, const Natural& b) {
    Natural r;
    mpz_mul(r.z_, a.z_, b.z_);
    return r;
  }
  friend Natural operator%(const Natural& a, const Natural& b) {
    Natural r;
    mpz_mod(r.z_, a.z_, b.z_);
    return r;
  }
  // a - b, requiring a >= b.
  friend Natural checked_sub(const Natural& a, const Natural& b);
  friend Natural gcd(const Natural& a, const Natural& b) {
    Natural r;
    mpz_gcd(r.z_, a.z_, b.z_);
    return r;
  }
  friend Natural pow_ui(const Natural& base, unsigned long e) {
    Natural r;
    mpz_pow_ui(r.z_, base.z_, e);
    return r;
  }

  mpz_srcptr get() const { return z_; }
  mpz_ptr get() { return z_; }

 private:
  mpz_t z_;
};

// Element of Z_modulus; the constructor reduces the value. modulus >= 2.
class Residue {
 public:
  Residue(Natural value, Natural modulus);

  const Natural& value() const { return value_; }
  const Natural& modulus() const { return modulus_; }

  bool operator==(const Residue& o) const {
    return value_ == o.value_ && modulus_ == o.modulus_;
  }

 private:
  Natural value_;
  Natural modulus_;
};

// Signed rational, always stored reduced with positive denominator.
class Rational {
 public:
  Rational() { mpq_init(q_); }
  Rational(int64_t num, uint64_t den);
  explicit Rational(int64_t num) : Rational(num, 1) {}
  Rational(const Rational& o) {
    mpq_init(q_);
    mpq_set(q_, o.q_);
  }
  Rational(Rational&& o) noexcept {
    mpq_init(q_);
    mpq_swap(q_, o.q_);
  }
  Rational& operator=(const Rational& o) {
    if (this != &o) mpq_set(q_, o.q_);
    return *this;
  }
  Rational& operator=(Rational&& o) noexcept {
    mpq_swap(q_, o.q_);
    return *this;
  }
  ~Rational() { mpq_clear(q_); }

  // num/den with an explicit sign; den must be nonzero.
  static Rational from_ratio(const Natural& num, const Natural& den,
                             bool negative = false);

  bool is_negative() const { return mpq_sgn(q_) < 0; }
  bool is_zero() const { return mpq_sgn(q_) == 0; }
  Natural numerator_magnitude() const;
  Natural denominator() const;

  std::string to_string() const;  // "a/b", reduced
  // Fixed-point decimal rendering, round-half-even at `digits` fractional
  // digits. Display only; all comparisons stay exact.
  std::string to_decimal(int digits) const;

  friend bool operator==(const Rational& a, const Rational& b) {
    return mpq_equal(a.q_, b.q_) != 0;
  }
  friend std::strong_ordering operator<=>(const Rational& a,
                                          const Rational& b) {
    int c = mpq_cmp(a.q_, b.q_);
    return c < 0   ? std::strong_ordering::less
           : c > 0 ? std::strong_ordering::greater
                   : std::strong_ordering::equal;
  }
  friend Rational operator+(const Rational& a, const Rational& b) {
    Rational r;
    mpq_add(r.q_, a.q_, b.q_);
    return r;
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    Rational r;
    mpq_sub(r.q_, a.q_, b.q_);
    return r;
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    Rational r;
    mpq_mul(r.q_, a.q_, b.q_);
    return r;
  }

  mpq_srcptr get() const { return q_; }
  mpq_ptr get() { return q_; }

 private:
  mpq_t q_;
};

// base^exponent mod base.modulus(); exponent 0 yields 1.
Residue mod_pow(const Residue& base, const Natural& exponent);

// Multiplicative inverse; throws Error(NotInvertible) when gcd != 1.
Residue mod_inverse(const Residue& x);

Residue mod_mul(const Residue& a, const Residue& b);

// Interleaved fixed-window simultaneous exponentiation:
// prod_i bases[i]^exponents[i] mod modulus. Cheaper than len(bases)
// separate mod_pow calls once three or more bases share a modulus.
Natural mod_pow_multi(std::span<const Natural> bases,
                      std::span<const Natural> exponents,
                      const Natural& modulus);

// Maps a reduced rational into Z_modulus as num * den^-1; negative
// numerators land on modulus - |num| * den^-1.
Residue encode_rational(const Rational& q, const Natural& modulus);

// Inverse of encode_rational for fractions inside the uniqueness box
// |num| <= floor(sqrt(modulus/2)), den <= floor(sqrt(modulus/2)); extended
// Euclid on (modulus, value). Throws Error(ReconstructionFailed) when no
// such fraction exists.
Rational reconstruct_rational(const Residue& x);

// Largest numerator/denominator magnitude reconstruct_rational accepts.
Natural reconstruction_bound(const Natural& modulus);

// Uniform naturals. `random_below` is rejection-sampled; `random_unit`
// additionally requires gcd(result, modulus) == 1 and result >= 1.
Natural random_bits(RandomSource& rng, size_t bits);
Natural random_below(RandomSource& rng, const Natural& bound);
Natural random_unit(RandomSource& rng, const Natural& modulus);

// Miller-Rabin with `rounds` uniformly chosen bases.
bool is_probable_prime(const Natural& n, int rounds, RandomSource& rng);

// Uniform probable prime of exactly `bits` bits (top bit set).
Natural random_prime(RandomSource& rng, size_t bits, int mr_rounds);

}  // namespace x2fs::bigmod
