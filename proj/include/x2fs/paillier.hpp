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
#include <utility>

#include "x2fs/bigmod.hpp"
#include "x2fs/digest.hpp"
#include "x2fs/random.hpp"

namespace x2fs::paillier {

using bigmod::Natural;
using bigmod::Residue;

// Prime bit length handed to modulus generation; N = p*q has ~2k bits.
struct SecurityParameter {
  unsigned prime_bits;

  explicit SecurityParameter(unsigned k) : prime_bits(k) {
    if (k < 16) throw std::invalid_argument("security parameter below 16");
  }
  // Convenience for configs that speak in modulus size.
  static SecurityParameter for_modulus_bits(unsigned n_bits) {
    return SecurityParameter(n_bits / 2);
  }
};

class PublicKey {
 public:
  explicit PublicKey(Natural n);

  const Natural& n() const { return n_; }
  const Natural& n_squared() const { return n_squared_; }
  const Sha256Digest& fingerprint() const { return fingerprint_; }

  void append_wire(Bytes& out) const { n_.append_wire(out); }
  static PublicKey read_wire(ByteReader& in) {
    return PublicKey(Natural::read_wire(in));
  }

  bool operator==(const PublicKey& o) const { return n_ == o.n_; }

 private:
  Natural n_;
  Natural n_squared_;
  Sha256Digest fingerprint_;
};

// Element of Z_{N^2} bound to the key it was produced under.
class Ciphertext {
 public:
  Ciphertext(Residue value, const Sha256Digest& key_fingerprint);

  const Residue& value() const { return value_; }
  const Sha256Digest& key_fingerprint() const { return key_fingerprint_; }

  void append_wire(Bytes& out) const;
  // Validates the fingerprint and range against the session key.
  static Ciphertext read_wire(ByteReader& in, const PublicKey& pk);

  bool operator==(const Ciphertext& o) const {
    return value_ == o.value_ && key_fingerprint_ == o.key_fingerprint_;
  }

 private:
  Residue value_;
  Sha256Digest key_fingerprint_;
};

struct KeyPair;
class SecretKey;
KeyPair keygen(const SecurityParameter& k, RandomSource& rng);

class SecretKey {
 public:
  // Factorization is kept private for CRT acceleration; the public contract
  // is (n, phi, phi_inverse).
  const Natural& n() const { return n_; }
  const Natural& phi() const { return phi_; }
  const Residue& phi_inverse() const { return phi_inverse_; }
  const Sha256Digest& fingerprint() const { return fingerprint_; }

 private:
  friend struct KeyPair;
  friend KeyPair keygen(const SecurityParameter&, RandomSource&);
  friend Residue decrypt(const SecretKey&, const Ciphertext&);
  friend Ciphertext encrypt_with_nonce(const SecretKey&, const Residue&,
                                       const Natural&);

  SecretKey(const Natural& p, const Natural& q);

  Natural n_, phi_;
  Residue phi_inverse_;
  Sha256Digest fingerprint_;

  // CRT precomputation
  Natural p_, q_, p2_, q2_, n2_;
  Natural enc_exp_p_, enc_exp_q_;  // N reduced in Z*_{p^2}, Z*_{q^2}
  Natural dec_h_p_, dec_h_q_;      // inverse L corrections mod p, q
  Natural p_inv_q_, p2_inv_q2_;
};

struct KeyPair {
  PublicKey pk;
  SecretKey sk;

  // Test hook: build a key pair from explicit primes (worked examples,
  // reproducible keys). Validates primality and phi invertibility.
  static KeyPair from_primes(const Natural& p, const Natural& q);
};

// N = pq for distinct probable primes of exactly k bits (64 Miller-Rabin
// rounds each); resamples internally until found.
KeyPair keygen(const SecurityParameter& k, RandomSource& rng);

// (1+N)^m * r^N mod N^2 with fresh r uniform in Z*_N.
Ciphertext encrypt(const PublicKey& pk, const Residue& m, RandomSource& rng);

// Deterministic encryption with a caller-supplied nonce r in Z*_N.
Ciphertext encrypt_with_nonce(const PublicKey& pk, const Residue& m,
                              const Natural& r);

// Same ciphertext as the PublicKey overloads, computed mod p^2 and q^2
// separately. For the key holder's bulk encryptions.
Ciphertext encrypt(const KeyPair& kp, const Residue& m, RandomSource& rng);
Ciphertext encrypt_with_nonce(const SecretKey& sk, const Residue& m,
                              const Natural& r);

// ([c^phi mod N^2] - 1)/N * phi^-1 mod N, evaluated through CRT.
Residue decrypt(const SecretKey& sk, const Ciphertext& c);

// Dec(hom_add(Enc(m1), Enc(m2))) = m1 + m2 mod N.
Ciphertext hom_add(const Ciphertext& c1, const Ciphertext& c2);

// Dec(hom_scalar_mul(a, Enc(m))) = a*m mod N; a is a residue mod N.
Ciphertext hom_scalar_mul(const Residue& a, const Ciphertext& c);

// Multiplies in a fresh s^N; decrypts unchanged, distribution matches a
// fresh encryption of the same plaintext.
Ciphertext rerandomize(const PublicKey& pk, const Ciphertext& c,
                       RandomSource& rng);

}  // namespace x2fs::paillier
