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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <set>

#include "doctest.h"
#include "test_support.hpp"
#include "x2fs/paillier.hpp"

using namespace x2fs;
using namespace x2fs::paillier;
using bigmod::Natural;
using bigmod::Residue;

namespace {

const KeyPair& small_key() {
  static const KeyPair kp = KeyPair::from_primes(Natural(5), Natural(7));
  return kp;
}

// one 512-bit key shared by the heavier cases
const KeyPair& test_key() {
  static const KeyPair kp = [] {
    SeededRandom rng(3001);
    return keygen(SecurityParameter(256), rng);
  }();
  return kp;
}

Residue msg(const PublicKey& pk, const Natural& m) {
  return Residue(m, pk.n());
}

}  // namespace

TEST_CASE("keygen meets the size contract") {
  SeededRandom rng(3002);
  const KeyPair kp = keygen(SecurityParameter(16), rng);
  const size_t bits = kp.pk.n().bit_length();
  CHECK(bits >= 31);
  CHECK(bits <= 32);
  CHECK(kp.pk.n_squared() == kp.pk.n() * kp.pk.n());

  // decrypt(encrypt(m)) = m over the whole small message space sample
  for (int i = 0; i < 100; ++i) {
    const Natural m = bigmod::random_below(rng, kp.pk.n());
    CHECK(decrypt(kp.sk, encrypt(kp.pk, msg(kp.pk, m), rng)).value() == m);
  }
  CHECK_THROWS_AS(SecurityParameter(15), std::invalid_argument);
}

TEST_CASE("injected primes give the textbook key") {
  const KeyPair& kp = small_key();
  CHECK(kp.pk.n() == 35);
  CHECK(kp.sk.phi() == 24);  // (5-1)(7-1)
  CHECK((kp.sk.phi() * kp.sk.phi_inverse().value()) % kp.pk.n() == 1);
  CHECK_THROWS_AS(KeyPair::from_primes(Natural(5), Natural(5)),
                  std::invalid_argument);
  CHECK_THROWS_AS(KeyPair::from_primes(Natural(6), Natural(7)),
                  std::invalid_argument);
}

TEST_CASE("worked encryptions under N = 35") {
  const KeyPair& kp = small_key();

  // m = 0 with unit nonce is the group identity
  CHECK(encrypt_with_nonce(kp.pk, msg(kp.pk, Natural(0)), Natural(1))
            .value()
            .value() == 1);

  // m = 3, r = 2: oracle is the direct formula 36^3 * 2^35 mod 1225
  const Natural n2(1225);
  const Natural oracle =
      (bigmod::mod_pow(Residue(Natural(36), n2), Natural(3)).value() *
       bigmod::mod_pow(Residue(Natural(2), n2), Natural(35)).value()) %
      n2;
  const Ciphertext c =
      encrypt_with_nonce(kp.pk, msg(kp.pk, Natural(3)), Natural(2));
  CHECK(c.value().value() == oracle);
  CHECK(c.value().value() == 683);
  CHECK(decrypt(kp.sk, c).value() == 3);

  // decryption of the identity ciphertext
  const Ciphertext one(Residue(Natural(1), kp.pk.n_squared()),
                       kp.pk.fingerprint());
  CHECK(decrypt(kp.sk, one).value().is_zero());
}

TEST_CASE("randomized encryption differs between calls") {
  SeededRandom rng(3003);
  const KeyPair& kp = test_key();
  const Residue m = msg(kp.pk, Natural(12345));
  const Ciphertext c1 = encrypt(kp.pk, m, rng);
  const Ciphertext c2 = encrypt(kp.pk, m, rng);
  CHECK(!(c1 == c2));
  CHECK(decrypt(kp.sk, c1).value() == decrypt(kp.sk, c2).value());
}

TEST_CASE("round trips at the boundary and at random") {
  SeededRandom rng(3004);
  const KeyPair& kp = test_key();
  const Natural n_minus_1 = checked_sub(kp.pk.n(), Natural(1));
  for (const Natural& m : {Natural(0), Natural(1), n_minus_1}) {
    CHECK(decrypt(kp.sk, encrypt(kp.pk, msg(kp.pk, m), rng)).value() == m);
  }
  for (int i = 0; i < 100; ++i) {
    const Natural m = bigmod::random_below(rng, kp.pk.n());
    CHECK(decrypt(kp.sk, encrypt(kp.pk, msg(kp.pk, m), rng)).value() == m);
  }
}

TEST_CASE("CRT encryption path equals the public path") {
  SeededRandom rng(3005);
  const KeyPair& kp = test_key();
  for (int i = 0; i < 25; ++i) {
    const Natural m = bigmod::random_below(rng, kp.pk.n());
    const Natural r = bigmod::random_unit(rng, kp.pk.n());
    const Ciphertext via_pk = encrypt_with_nonce(kp.pk, msg(kp.pk, m), r);
    const Ciphertext via_sk = encrypt_with_nonce(kp.sk, msg(kp.pk, m), r);
    CHECK(via_pk == via_sk);
  }
}

TEST_CASE("decrypt agrees with the textbook formula") {
  SeededRandom rng(3006);
  const KeyPair small = KeyPair::from_primes(
      bigmod::random_prime(rng, 64, 32), bigmod::random_prime(rng, 64, 32));
  for (int i = 0; i < 50; ++i) {
    const Natural m = bigmod::random_below(rng, small.pk.n());
    const Ciphertext c = encrypt(small.pk, msg(small.pk, m), rng);
    CHECK(decrypt(small.sk, c).value() == testing::decrypt_reference(small.sk, c));
  }
  const KeyPair& kp = test_key();
  const Natural m = bigmod::random_below(rng, kp.pk.n());
  const Ciphertext c = encrypt(kp.pk, msg(kp.pk, m), rng);
  CHECK(decrypt(kp.sk, c).value() == testing::decrypt_reference(kp.sk, c));
}

TEST_CASE("additive homomorphism") {
  SeededRandom rng(3007);
  const KeyPair kp = KeyPair::from_primes(bigmod::random_prime(rng, 128, 32),
                                          bigmod::random_prime(rng, 128, 32));
  const Natural& n = kp.pk.n();

  // identity and wraparound
  const Natural m(99);
  CHECK(decrypt(kp.sk, hom_add(encrypt(kp.pk, msg(kp.pk, Natural(0)), rng),
                               encrypt(kp.pk, msg(kp.pk, m), rng)))
            .value() == m);
  CHECK(decrypt(kp.sk,
                hom_add(encrypt(kp.pk, msg(kp.pk, checked_sub(n, Natural(1))),
                                rng),
                        encrypt(kp.pk, msg(kp.pk, Natural(1)), rng)))
            .value()
            .is_zero());

  for (int i = 0; i < 300; ++i) {
    const Natural m1 = bigmod::random_below(rng, n);
    const Natural m2 = bigmod::random_below(rng, n);
    const Ciphertext sum = hom_add(encrypt(kp.pk, msg(kp.pk, m1), rng),
                                   encrypt(kp.pk, msg(kp.pk, m2), rng));
    CHECK(decrypt(kp.sk, sum).value() == (m1 + m2) % n);
  }
}

TEST_CASE("plaintext-level associativity and commutativity") {
  SeededRandom rng(3008);
  const KeyPair kp = KeyPair::from_primes(bigmod::random_prime(rng, 128, 32),
                                          bigmod::random_prime(rng, 128, 32));
  for (int i = 0; i < 20; ++i) {
    const Ciphertext c1 =
        encrypt(kp.pk, msg(kp.pk, bigmod::random_below(rng, kp.pk.n())), rng);
    const Ciphertext c2 =
        encrypt(kp.pk, msg(kp.pk, bigmod::random_below(rng, kp.pk.n())), rng);
    const Ciphertext c3 =
        encrypt(kp.pk, msg(kp.pk, bigmod::random_below(rng, kp.pk.n())), rng);
    CHECK(decrypt(kp.sk, hom_add(hom_add(c1, c2), c3)).value() ==
          decrypt(kp.sk, hom_add(c1, hom_add(c2, c3))).value());
    CHECK(decrypt(kp.sk, hom_add(c1, c2)).value() ==
          decrypt(kp.sk, hom_add(c2, c1)).value());
  }
}

TEST_CASE("scalar multiplication homomorphism") {
  SeededRandom rng(3009);
  const KeyPair kp = KeyPair::from_primes(bigmod::random_prime(rng, 128, 32),
                                          bigmod::random_prime(rng, 128, 32));
  const Natural& n = kp.pk.n();
  const Natural m(1234);

  CHECK(decrypt(kp.sk, hom_scalar_mul(msg(kp.pk, Natural(1)),
                                      encrypt(kp.pk, msg(kp.pk, m), rng)))
            .value() == m);
  CHECK(decrypt(kp.sk, hom_scalar_mul(msg(kp.pk, Natural(0)),
                                      encrypt(kp.pk, msg(kp.pk, m), rng)))
            .value()
            .is_zero());

  for (int i = 0; i < 300; ++i) {
    const Natural a = bigmod::random_below(rng, n);
    const Natural v = bigmod::random_below(rng, n);
    const Ciphertext scaled =
        hom_scalar_mul(msg(kp.pk, a), encrypt(kp.pk, msg(kp.pk, v), rng));
    CHECK(decrypt(kp.sk, scaled).value() == (a * v) % n);
  }
}

TEST_CASE("rerandomization preserves plaintexts and refreshes values") {
  SeededRandom rng(3010);
  const KeyPair& kp = test_key();
  for (int i = 0; i < 100; ++i) {
    const Natural m = bigmod::random_below(rng, kp.pk.n());
    const Ciphertext c = encrypt(kp.pk, msg(kp.pk, m), rng);
    const Ciphertext r = rerandomize(kp.pk, c, rng);
    CHECK(decrypt(kp.sk, r).value() == m);
    CHECK(!(r == c));
  }
  // with forced input randomness 1, the refreshed value must move off 1
  const Ciphertext fixed =
      encrypt_with_nonce(kp.pk, msg(kp.pk, Natural(0)), Natural(1));
  CHECK(fixed.value().value() == 1);
  CHECK(!(rerandomize(kp.pk, fixed, rng).value().value() == 1));
}

TEST_CASE("key fingerprints catch cross-key use") {
  SeededRandom rng(3011);
  const KeyPair kp1 = KeyPair::from_primes(bigmod::random_prime(rng, 64, 32),
                                           bigmod::random_prime(rng, 64, 32));
  const KeyPair kp2 = KeyPair::from_primes(bigmod::random_prime(rng, 64, 32),
                                           bigmod::random_prime(rng, 64, 32));
  const Ciphertext c = encrypt(kp1.pk, msg(kp1.pk, Natural(3)), rng);

  CHECK_THROWS_AS(decrypt(kp2.sk, c), Error);
  const Ciphertext other = encrypt(kp2.pk, msg(kp2.pk, Natural(4)), rng);
  CHECK_THROWS_AS(hom_add(c, other), Error);
  CHECK_THROWS_AS(hom_scalar_mul(msg(kp2.pk, Natural(2)), c), Error);
  CHECK_THROWS_AS(rerandomize(kp2.pk, c, rng), Error);
  try {
    decrypt(kp2.sk, c);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::KeyMismatch);
  }
}

TEST_CASE("malformed ciphertexts are rejected") {
  const KeyPair& kp = small_key();
  // shares the factor 5 with N = 35
  const Ciphertext shared(Residue(Natural(5), kp.pk.n_squared()),
                          kp.pk.fingerprint());
  CHECK_THROWS_AS(decrypt(kp.sk, shared), Error);
  try {
    decrypt(kp.sk, shared);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MalformedCiphertext);
  }
  CHECK_THROWS_AS(
      Ciphertext(Residue(Natural(0), kp.pk.n_squared()), kp.pk.fingerprint()),
      Error);
}

TEST_CASE("200 encryptions of one plaintext are pairwise distinct") {
  SeededRandom rng(3012);
  const KeyPair& kp = test_key();
  std::set<std::string> seen;
  for (int i = 0; i < 200; ++i) {
    const Ciphertext c = encrypt(kp.pk, msg(kp.pk, Natural(7)), rng);
    seen.insert(c.value().value().to_decimal());
  }
  CHECK(seen.size() == 200);
}

TEST_CASE("ciphertext low byte is uniform") {
  SeededRandom rng(3013);
  const KeyPair kp = KeyPair::from_primes(bigmod::random_prime(rng, 128, 32),
                                          bigmod::random_prime(rng, 128, 32));
  std::vector<size_t> counts(256, 0);
  for (int i = 0; i < 5000; ++i) {
    const Ciphertext c = encrypt(kp.pk, msg(kp.pk, Natural(0)), rng);
    counts[mpz_fdiv_ui(c.value().value().get(), 256)]++;
  }
  CHECK(testing::chi2_uniformity_pvalue(counts) > 0.001);
}

TEST_CASE("ciphertext wire round trip") {
  SeededRandom rng(3014);
  const KeyPair& kp = test_key();
  const Ciphertext c = encrypt(kp.pk, msg(kp.pk, Natural(42)), rng);

  Bytes wire;
  c.append_wire(wire);
  ByteReader reader(wire);
  CHECK(Ciphertext::read_wire(reader, kp.pk) == c);
  CHECK(reader.done());

  Bytes pk_wire;
  kp.pk.append_wire(pk_wire);
  ByteReader pk_reader(pk_wire);
  const PublicKey parsed = PublicKey::read_wire(pk_reader);
  CHECK(parsed == kp.pk);
  CHECK(parsed.fingerprint() == kp.pk.fingerprint());
}
