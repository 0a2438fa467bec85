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

#include "x2fs/bigmod.hpp"

#include <algorithm>
#include <cstring>
#include <stdexcept>

namespace x2fs::bigmod {

namespace {

// RAII mpz for scratch work inside this translation unit.
struct Mpz {
  mpz_t z;
  Mpz() { mpz_init(z); }
  explicit Mpz(unsigned long v) { mpz_init_set_ui(z, v); }
  ~Mpz() { mpz_clear(z); }
  Mpz(const Mpz&) = delete;
  Mpz& operator=(const Mpz&) = delete;
  operator mpz_ptr() { return z; }
  operator mpz_srcptr() const { return z; }
};

constexpr uint32_t kSmallPrimes[] = {
    3,   5,   7,   11,  13,  17,  19,  23,  29,  31,  37,  41,  43,  47,
    53,  59,  61,  67,  71,  73,  79,  83,  89,  97,  101, 103, 107, 109,
    113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191,
    193, 197, 199, 211, 223, 227, 229, 233, 239, 241, 251, 257, 263, 269,
    271, 277, 281, 283, 293, 307, 311, 313, 317, 331, 337, 347, 349, 353,
    359, 367, 373, 379, 383, 389, 397, 401, 409, 419, 421, 431, 433, 439,
    443, 449, 457, 461, 463, 467, 479, 487, 491, 499, 503, 509, 521, 523,
    541, 547, 557, 563, 569, 571, 577, 587, 593, 599, 601, 607, 613, 617,
    619, 631, 641, 643, 647, 653, 659, 661, 673, 677, 683, 691, 701, 709,
    719, 727, 733, 739, 743, 751, 757, 761, 769, 773, 787, 797, 809, 811,
    821, 823, 827, 829, 839, 853, 857, 859, 863, 877, 881, 883, 887, 907,
    911, 919, 929, 937, 941, 947, 953, 967, 971, 977, 983, 991, 997};

}  // namespace

Natural Natural::from_decimal(const std::string& s) {
  Natural r;
  if (mpz_set_str(r.z_, s.c_str(), 10) != 0 || mpz_sgn(r.z_) < 0) {
    throw std::invalid_argument("not a decimal natural: " + s);
  }
  return r;
}

Natural Natural::from_bytes(std::span<const uint8_t> be_magnitude) {
  Natural r;
  if (!be_magnitude.empty()) {
    mpz_import(r.z_, be_magnitude.size(), 1 /* msb first */, 1, 1, 0,
               be_magnitude.data());
  }
  return r;
}

std::vector<uint8_t> Natural::to_bytes() const {
  if (is_zero()) return {};
  size_t count = 0;
  std::vector<uint8_t> out((bit_length() + 7) / 8);
  mpz_export(out.data(), &count, 1, 1, 1, 0, z_);
  out.resize(count);
  return out;
}

std::string Natural::to_decimal() const {
  char* s = mpz_get_str(nullptr, 10, z_);
  std::string out(s);
  void (*freefn)(void*, size_t);
  mp_get_memory_functions(nullptr, nullptr, &freefn);
  freefn(s, std::strlen(s) + 1);
  return out;
}

void Natural::append_wire(Bytes& out) const {
  auto mag = to_bytes();
  append_u32_be(out, static_cast<uint32_t>(mag.size()));
  out.insert(out.end(), mag.begin(), mag.end());
}

Natural Natural::read_wire(ByteReader& in) {
  uint32_t len = 0;
  std::span<const uint8_t> mag;
  if (!in.try_u32(len) || !in.try_bytes(len, mag)) {
    throw Error(ErrorCode::TransportError, "truncated integer field");
  }
  if (!mag.empty() && mag[0] == 0) {
    throw Error(ErrorCode::TransportError,
                "non-canonical integer: leading zero byte");
  }
  return from_bytes(mag);
}

Natural checked_sub(const Natural& a, const Natural& b) {
  if (a < b) throw std::invalid_argument("checked_sub underflow");
  Natural r;
  mpz_sub(r.get(), a.get(), b.get());
  return r;
}

Residue::Residue(Natural value, Natural modulus)
    : value_(std::move(value)), modulus_(std::move(modulus)) {
  if (mpz_cmp_ui(modulus_.get(), 2) < 0) {
    throw std::invalid_argument("modulus must be >= 2");
  }
  mpz_mod(value_.get(), value_.get(), modulus_.get());
}

Rational::Rational(int64_t num, uint64_t den) {
  if (den == 0) throw std::invalid_argument("zero denominator");
  mpq_init(q_);
  mpq_set_si(q_, num, den);
  mpq_canonicalize(q_);
}

Rational Rational::from_ratio(const Natural& num, const Natural& den,
                              bool negative) {
  if (den.is_zero()) throw std::invalid_argument("zero denominator");
  Rational r;
  mpz_set(mpq_numref(r.q_), num.get());
  mpz_set(mpq_denref(r.q_), den.get());
  if (negative) mpz_neg(mpq_numref(r.q_), mpq_numref(r.q_));
  mpq_canonicalize(r.q_);
  return r;
}

Natural Rational::numerator_magnitude() const {
  Natural n;
  mpz_abs(n.get(), mpq_numref(q_));
  return n;
}

Natural Rational::denominator() const {
  Natural n;
  mpz_set(n.get(), mpq_denref(q_));
  return n;
}

std::string Rational::to_string() const {
  char* s = mpq_get_str(nullptr, 10, q_);
  std::string out(s);
  void (*freefn)(void*, size_t);
  mp_get_memory_functions(nullptr, nullptr, &freefn);
  freefn(s, std::strlen(s) + 1);
  if (out.find('/') == std::string::npos) out += "/1";
  return out;
}

std::string Rational::to_decimal(int digits) const {
  Mpz scale;
  mpz_ui_pow_ui(scale, 10, static_cast<unsigned long>(digits));

  Mpz num;
  mpz_mul(num, mpq_numref(q_), scale);
  bool negative = mpz_sgn(num.z) < 0;
  mpz_abs(num, num);

  Mpz quot, rem;
  mpz_tdiv_qr(quot, rem, num, mpq_denref(q_));

  // round half to even on the remainder
  Mpz twice_rem;
  mpz_mul_2exp(twice_rem, rem, 1);
  int c = mpz_cmp(twice_rem, mpq_denref(q_));
  if (c > 0 || (c == 0 && mpz_odd_p(quot.z))) mpz_add_ui(quot, quot, 1);

  Mpz ipart, fpart;
  mpz_tdiv_qr(ipart, fpart, quot, scale);

  char* s = mpz_get_str(nullptr, 10, ipart);
  std::string istr(s);
  void (*freefn)(void*, size_t);
  mp_get_memory_functions(nullptr, nullptr, &freefn);
  freefn(s, std::strlen(s) + 1);

  std::string out = negative && !(mpz_sgn(ipart.z) == 0 && mpz_sgn(fpart.z) == 0)
                        ? "-" + istr
                        : istr;
  if (digits > 0) {
    s = mpz_get_str(nullptr, 10, fpart);
    std::string fstr(s);
    freefn(s, std::strlen(s) + 1);
    out += "." + std::string(static_cast<size_t>(digits) - fstr.size(), '0') +
           fstr;
  }
  return out;
}

Residue mod_pow(const Residue& base, const Natural& exponent) {
  Natural r;
  mpz_powm(r.get(), base.value().get(), exponent.get(), base.modulus().get());
  return Residue(std::move(r), base.modulus());
}

Residue mod_inverse(const Residue& x) {
  Natural r;
  if (mpz_invert(r.get(), x.value().get(), x.modulus().get()) == 0) {
    throw Error(ErrorCode::NotInvertible,
                "gcd(value, modulus) != 1 for value " +
                    x.value().to_decimal() + " mod " +
                    x.modulus().to_decimal());
  }
  return Residue(std::move(r), x.modulus());
}

Residue mod_mul(const Residue& a, const Residue& b) {
  if (!(a.modulus() == b.modulus())) {
    throw std::invalid_argument("mod_mul: modulus mismatch");
  }
  Natural r;
  mpz_mul(r.get(), a.value().get(), b.value().get());
  return Residue(std::move(r), a.modulus());
}

Natural mod_pow_multi(std::span<const Natural> bases,
                      std::span<const Natural> exponents,
                      const Natural& modulus) {
  if (bases.size() != exponents.size()) {
    throw std::invalid_argument("mod_pow_multi: size mismatch");
  }
  const size_t k = bases.size();
  Natural one(1);
  if (k == 0) return one % modulus;

  size_t max_bits = 0;
  for (const auto& e : exponents) max_bits = std::max(max_bits, e.bit_length());
  if (max_bits == 0) return one % modulus;

  const unsigned w = max_bits >= 256 ? 4 : (max_bits >= 24 ? 3 : 1);
  const size_t table_size = size_t{1} << (w - 1);

  // Odd-power tables: table[i][j] = bases[i]^(2j+1).
  std::vector<std::vector<Natural>> table(k);
  for (size_t i = 0; i < k; ++i) {
    if (exponents[i].is_zero()) continue;
    table[i].reserve(table_size);
    Natural b = bases[i] % modulus;
    table[i].push_back(b);
    if (table_size > 1) {
      Mpz sq;
      mpz_mul(sq, b.get(), b.get());
      mpz_mod(sq, sq, modulus.get());
      for (size_t j = 1; j < table_size; ++j) {
        Natural next;
        mpz_mul(next.get(), table[i][j - 1].get(), sq);
        mpz_mod(next.get(), next.get(), modulus.get());
        table[i].push_back(std::move(next));
      }
    }
  }

  // Sliding-window decomposition: an event at bit position `pos` multiplies
  // by bases[i]^(odd window value).
  struct Event {
    uint32_t base;
    uint32_t index;
  };
  std::vector<std::vector<Event>> events(max_bits);
  for (size_t i = 0; i < k; ++i) {
    const mpz_srcptr e = exponents[i].get();
    ptrdiff_t bit = static_cast<ptrdiff_t>(exponents[i].bit_length()) - 1;
    while (bit >= 0) {
      if (mpz_tstbit(e, static_cast<mp_bitcnt_t>(bit)) == 0) {
        --bit;
        continue;
      }
      ptrdiff_t low = std::max<ptrdiff_t>(0, bit - static_cast<ptrdiff_t>(w) + 1);
      while (mpz_tstbit(e, static_cast<mp_bitcnt_t>(low)) == 0) ++low;
      uint32_t value = 0;
      for (ptrdiff_t b = bit; b >= low; --b) {
        value = (value << 1) | mpz_tstbit(e, static_cast<mp_bitcnt_t>(b));
      }
      events[static_cast<size_t>(low)].push_back(
          {static_cast<uint32_t>(i), (value - 1) >> 1});
      bit = low - 1;
    }
  }

  Natural acc(1);
  bool started = false;
  for (size_t pos = max_bits; pos-- > 0;) {
    if (started) {
      mpz_mul(acc.get(), acc.get(), acc.get());
      mpz_mod(acc.get(), acc.get(), modulus.get());
    }
    for (const Event& ev : events[pos]) {
      mpz_mul(acc.get(), acc.get(), table[ev.base][ev.index].get());
      mpz_mod(acc.get(), acc.get(), modulus.get());
      started = true;
    }
  }
  return acc;
}

Residue encode_rational(const Rational& q, const Natural& modulus) {
  Natural den = q.denominator();
  Residue den_inv = mod_inverse(Residue(den, modulus));
  Natural num;
  mpz_mod(num.get(), mpq_numref(q.get()), modulus.get());  // maps sign
  Natural r;
  mpz_mul(r.get(), num.get(), den_inv.value().get());
  return Residue(std::move(r), modulus);
}

Natural reconstruction_bound(const Natural& modulus) {
  Natural half;
  mpz_fdiv_q_2exp(half.get(), modulus.get(), 1);
  Natural bound;
  mpz_sqrt(bound.get(), half.get());
  return bound;
}

Rational reconstruct_rational(const Residue& x) {
  const Natural bound = reconstruction_bound(x.modulus());

  // Extended Euclid on (modulus, value) tracking r_i = t_i * value (mod m);
  // stop at the first remainder within the bound.
  Mpz r0, r1, t0, t1, q, tmp;
  mpz_set(r0, x.modulus().get());
  mpz_set(r1, x.value().get());
  mpz_set_ui(t0, 0);
  mpz_set_ui(t1, 1);

  while (mpz_cmp(r1, bound.get()) > 0) {
    mpz_fdiv_q(q, r0, r1);
    mpz_submul(r0, q, r1);  // r0 -= q*r1
    mpz_swap(r0, r1);
    mpz_submul(t0, q, t1);
    mpz_swap(t0, t1);
  }

  Natural num;
  mpz_set(num.get(), r1);
  Mpz den_abs;
  mpz_abs(den_abs, t1);
  bool negative = mpz_sgn(t1.z) < 0;

  Natural den;
  mpz_set(den.get(), den_abs);

  Mpz g;
  mpz_gcd(g, r1, t1);
  if (mpz_sgn(den_abs.z) == 0 || mpz_cmp(den_abs, bound.get()) > 0 ||
      mpz_cmp_ui(g.z, 1) != 0) {
    throw Error(ErrorCode::ReconstructionFailed,
                "no fraction within sqrt(m/2) bound for residue " +
                    x.value().to_decimal());
  }
  mpz_gcd(g, den_abs, x.modulus().get());
  if (mpz_cmp_ui(g.z, 1) != 0) {
    throw Error(ErrorCode::ReconstructionFailed,
                "denominator shares a factor with the modulus");
  }
  return Rational::from_ratio(num, den, negative);
}

Natural random_bits(RandomSource& rng, size_t bits) {
  if (bits == 0) return Natural(0);
  std::vector<uint8_t> buf((bits + 7) / 8);
  rng.fill(buf);
  const size_t excess = buf.size() * 8 - bits;
  buf[0] &= static_cast<uint8_t>(0xff >> excess);
  return Natural::from_bytes(buf);
}

Natural random_below(RandomSource& rng, const Natural& bound) {
  if (bound.is_zero()) throw std::invalid_argument("random_below: zero bound");
  const size_t bits = bound.bit_length();
  for (;;) {
    Natural candidate = random_bits(rng, bits);
    if (candidate < bound) return candidate;
  }
}

Natural random_unit(RandomSource& rng, const Natural& modulus) {
  for (;;) {
    Natural candidate = random_below(rng, modulus);
    if (candidate.is_zero()) continue;
    if (gcd(candidate, modulus) == 1) return candidate;
  }
}

bool is_probable_prime(const Natural& n, int rounds, RandomSource& rng) {
  if (n < Natural(2)) return false;
  for (uint32_t p : {2u, 3u}) {
    if (n == p) return true;
    if (mpz_divisible_ui_p(n.get(), p)) return false;
  }
  for (uint32_t p : kSmallPrimes) {
    if (n == p) return true;
    if (mpz_divisible_ui_p(n.get(), p)) return false;
  }

  // n - 1 = d * 2^s with d odd
  Mpz n_minus_1, d;
  mpz_sub_ui(n_minus_1, n.get(), 1);
  mpz_set(d, n_minus_1);
  mp_bitcnt_t s = mpz_scan1(d, 0);
  mpz_fdiv_q_2exp(d, d, s);

  Natural n_minus_3 = checked_sub(n, Natural(3));
  Mpz x;
  for (int round = 0; round < rounds; ++round) {
    Natural a = random_below(rng, n_minus_3) + Natural(2);  // [2, n-2]
    mpz_powm(x, a.get(), d, n.get());
    if (mpz_cmp_ui(x.z, 1) == 0 || mpz_cmp(x.z, n_minus_1.z) == 0) continue;
    bool composite = true;
    for (mp_bitcnt_t i = 1; i < s; ++i) {
      mpz_mul(x, x, x);
      mpz_mod(x, x, n.get());
      if (mpz_cmp(x.z, n_minus_1.z) == 0) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

Natural random_prime(RandomSource& rng, size_t bits, int mr_rounds) {
  if (bits < 2) throw std::invalid_argument("random_prime: bits < 2");
  for (;;) {
    Natural candidate = random_bits(rng, bits);
    mpz_setbit(candidate.get(), bits - 1);
    mpz_setbit(candidate.get(), 0);
    if (is_probable_prime(candidate, mr_rounds, rng)) return candidate;
  }
}

}  // namespace x2fs::bigmod
