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

#include "x2fs/paillier.hpp"

#include <stdexcept>

namespace x2fs::paillier {

namespace {

constexpr int kMillerRabinRounds = 64;

Natural one_plus_mn(const Natural& m, const Natural& n,
                    const Natural& modulus) {
  // (1+N)^m = 1 + mN mod N^2; also exact mod p^2 since N^2 = 0 mod p^2.
  Natural r;
  mpz_mul(r.get(), m.get(), n.get());
  mpz_mod(r.get(), r.get(), modulus.get());
  mpz_add_ui(r.get(), r.get(), 1);
  mpz_mod(r.get(), r.get(), modulus.get());
  return r;
}

void require_plaintext(const PublicKey& pk, const Residue& m) {
  if (!(m.modulus() == pk.n())) {
    throw Error(ErrorCode::KeyMismatch, "plaintext modulus is not the key's N");
  }
}

void require_nonce(const Natural& n, const Natural& r) {
  if (r.is_zero() || !(r < n) || !(gcd(r, n) == 1)) {
    throw std::invalid_argument("encryption nonce must lie in Z*_N");
  }
}

}  // namespace

PublicKey::PublicKey(Natural n) : n_(std::move(n)) {
  if (n_ < Natural(2)) throw std::invalid_argument("modulus too small");
  mpz_mul(n_squared_.get(), n_.get(), n_.get());
  fingerprint_ = sha256(n_.to_bytes());
}

Ciphertext::Ciphertext(Residue value, const Sha256Digest& key_fingerprint)
    : value_(std::move(value)), key_fingerprint_(key_fingerprint) {
  if (value_.value().is_zero()) {
    throw Error(ErrorCode::MalformedCiphertext, "ciphertext value is zero");
  }
}

void Ciphertext::append_wire(Bytes& out) const {
  out.insert(out.end(), key_fingerprint_.begin(), key_fingerprint_.end());
  value_.value().append_wire(out);
}

Ciphertext Ciphertext::read_wire(ByteReader& in, const PublicKey& pk) {
  std::span<const uint8_t> fp;
  if (!in.try_bytes(32, fp)) {
    throw Error(ErrorCode::TransportError, "truncated ciphertext fingerprint");
  }
  Sha256Digest digest;
  std::copy(fp.begin(), fp.end(), digest.begin());
  if (digest != pk.fingerprint()) {
    throw Error(ErrorCode::KeyMismatch,
                "ciphertext fingerprint does not match session key");
  }
  Natural value = Natural::read_wire(in);
  if (value.is_zero() || !(value < pk.n_squared())) {
    throw Error(ErrorCode::MalformedCiphertext,
                "ciphertext value outside (0, N^2)");
  }
  return Ciphertext(Residue(std::move(value), pk.n_squared()), digest);
}

SecretKey::SecretKey(const Natural& p, const Natural& q)
    : n_(p * q),
      phi_(checked_sub(p, Natural(1)) * checked_sub(q, Natural(1))),
      phi_inverse_(bigmod::mod_inverse(Residue(phi_, n_))),
      fingerprint_(sha256(n_.to_bytes())),
      p_(p),
      q_(q),
      p2_(p * p),
      q2_(q * q),
      n2_(n_ * n_) {
  const Natural p_minus_1 = checked_sub(p, Natural(1));
  const Natural q_minus_1 = checked_sub(q, Natural(1));

  // s^N mod p^2 = s^(p * (q mod (p-1))) mod p^2 since ord | p(p-1)
  enc_exp_p_ = p_ * (q_ % p_minus_1);
  enc_exp_q_ = q_ * (p_ % q_minus_1);

  // (1+N)^(p-1) mod p^2 = 1 + (p-1)N, so L_p of it is (p-1)q mod p
  dec_h_p_ =
      bigmod::mod_inverse(Residue(p_minus_1 * q_, p_)).value();
  dec_h_q_ =
      bigmod::mod_inverse(Residue(q_minus_1 * p_, q_)).value();

  p_inv_q_ = bigmod::mod_inverse(Residue(p_, q_)).value();
  p2_inv_q2_ = bigmod::mod_inverse(Residue(p2_, q2_)).value();
}

KeyPair KeyPair::from_primes(const Natural& p, const Natural& q) {
  if (p == q) throw std::invalid_argument("p and q must be distinct");
  SeededRandom check_rng(uint64_t{0x70726d63});
  if (!bigmod::is_probable_prime(p, 16, check_rng) ||
      !bigmod::is_probable_prime(q, 16, check_rng)) {
    throw std::invalid_argument("p and q must be prime");
  }
  return KeyPair{PublicKey(p * q), SecretKey(p, q)};
}

KeyPair keygen(const SecurityParameter& k, RandomSource& rng) {
  const Natural p = bigmod::random_prime(rng, k.prime_bits, kMillerRabinRounds);
  Natural q;
  do {
    q = bigmod::random_prime(rng, k.prime_bits, kMillerRabinRounds);
  } while (q == p);
  return KeyPair{PublicKey(p * q), SecretKey(p, q)};
}

Ciphertext encrypt_with_nonce(const PublicKey& pk, const Residue& m,
                              const Natural& r) {
  require_plaintext(pk, m);
  require_nonce(pk.n(), r);
  Residue g_m(one_plus_mn(m.value(), pk.n(), pk.n_squared()), pk.n_squared());
  Residue r_n = bigmod::mod_pow(Residue(r, pk.n_squared()), pk.n());
  return Ciphertext(bigmod::mod_mul(g_m, r_n), pk.fingerprint());
}

Ciphertext encrypt(const PublicKey& pk, const Residue& m, RandomSource& rng) {
  return encrypt_with_nonce(pk, m, bigmod::random_unit(rng, pk.n()));
}

Ciphertext encrypt_with_nonce(const SecretKey& sk, const Residue& m,
                              const Natural& r) {
  if (!(m.modulus() == sk.n_)) {
    throw Error(ErrorCode::KeyMismatch, "plaintext modulus is not the key's N");
  }
  require_nonce(sk.n_, r);

  Natural x_p = one_plus_mn(m.value(), sk.n_, sk.p2_);
  mpz_mul(x_p.get(), x_p.get(),
          bigmod::mod_pow(Residue(r, sk.p2_), sk.enc_exp_p_).value().get());
  mpz_mod(x_p.get(), x_p.get(), sk.p2_.get());

  Natural x_q = one_plus_mn(m.value(), sk.n_, sk.q2_);
  mpz_mul(x_q.get(), x_q.get(),
          bigmod::mod_pow(Residue(r, sk.q2_), sk.enc_exp_q_).value().get());
  mpz_mod(x_q.get(), x_q.get(), sk.q2_.get());

  // c = x_p + p^2 * ((x_q - x_p) * (p^2)^-1 mod q^2)
  Natural t;
  mpz_sub(t.get(), x_q.get(), x_p.get());
  mpz_mul(t.get(), t.get(), sk.p2_inv_q2_.get());
  mpz_mod(t.get(), t.get(), sk.q2_.get());
  mpz_mul(t.get(), t.get(), sk.p2_.get());
  mpz_add(t.get(), t.get(), x_p.get());
  return Ciphertext(Residue(std::move(t), sk.n2_), sk.fingerprint_);
}

Ciphertext encrypt(const KeyPair& kp, const Residue& m, RandomSource& rng) {
  return encrypt_with_nonce(kp.sk, m, bigmod::random_unit(rng, kp.pk.n()));
}

Residue decrypt(const SecretKey& sk, const Ciphertext& c) {
  if (c.key_fingerprint() != sk.fingerprint_) {
    throw Error(ErrorCode::KeyMismatch,
                "ciphertext was produced under a different key");
  }
  const Natural& v = c.value().value();
  if (v.is_zero() || !(v < sk.n2_) || !(gcd(v, sk.n_) == 1)) {
    throw Error(ErrorCode::MalformedCiphertext,
                "ciphertext not a unit of Z_{N^2}");
  }

  auto half = [](const Natural& value, const Natural& prime,
                 const Natural& prime2, const Natural& h) {
    Natural u =
        bigmod::mod_pow(Residue(value, prime2), checked_sub(prime, Natural(1)))
            .value();
    mpz_sub_ui(u.get(), u.get(), 1);
    if (!mpz_divisible_p(u.get(), prime.get())) {
      throw Error(ErrorCode::MalformedCiphertext,
                  "decryption L-function is not divisible by the prime");
    }
    mpz_divexact(u.get(), u.get(), prime.get());
    mpz_mul(u.get(), u.get(), h.get());
    mpz_mod(u.get(), u.get(), prime.get());
    return u;
  };

  const Natural m_p = half(v, sk.p_, sk.p2_, sk.dec_h_p_);
  const Natural m_q = half(v, sk.q_, sk.q2_, sk.dec_h_q_);

  // m = m_p + p * ((m_q - m_p) * p^-1 mod q)
  Natural m;
  mpz_sub(m.get(), m_q.get(), m_p.get());
  mpz_mul(m.get(), m.get(), sk.p_inv_q_.get());
  mpz_mod(m.get(), m.get(), sk.q_.get());
  mpz_mul(m.get(), m.get(), sk.p_.get());
  mpz_add(m.get(), m.get(), m_p.get());
  return Residue(std::move(m), sk.n_);
}

Ciphertext hom_add(const Ciphertext& c1, const Ciphertext& c2) {
  if (c1.key_fingerprint() != c2.key_fingerprint()) {
    throw Error(ErrorCode::KeyMismatch, "hom_add across different keys");
  }
  return Ciphertext(bigmod::mod_mul(c1.value(), c2.value()),
                    c1.key_fingerprint());
}

Ciphertext hom_scalar_mul(const Residue& a, const Ciphertext& c) {
  if (!(a.modulus() * a.modulus() == c.value().modulus())) {
    throw Error(ErrorCode::KeyMismatch,
                "scalar modulus does not match the ciphertext key");
  }
  // exponent 0 yields the group identity, which is Enc(0)
  return Ciphertext(bigmod::mod_pow(c.value(), a.value()),
                    c.key_fingerprint());
}

Ciphertext rerandomize(const PublicKey& pk, const Ciphertext& c,
                       RandomSource& rng) {
  if (c.key_fingerprint() != pk.fingerprint()) {
    throw Error(ErrorCode::KeyMismatch,
                "ciphertext was produced under a different key");
  }
  const Natural s = bigmod::random_unit(rng, pk.n());
  Residue s_n = bigmod::mod_pow(Residue(s, pk.n_squared()), pk.n());
  return Ciphertext(bigmod::mod_mul(c.value(), s_n), c.key_fingerprint());
}

}  // namespace x2fs::paillier
