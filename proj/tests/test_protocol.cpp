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
#include "doctest.h"
#include "test_support.hpp"
#include "x2fs/protocol.hpp"

using namespace x2fs;
using namespace x2fs::protocol;
using bigmod::Natural;
using bigmod::Rational;
using bigmod::Residue;
using chi2::BinaryVector;
using paillier::KeyPair;

namespace {

// ~32-bit modulus, enough headroom for vectors up to n = 6 (n^9 < N)
const KeyPair& tiny_key() {
  static const KeyPair kp = [] {
    SeededRandom rng(5001);
    return paillier::keygen(paillier::SecurityParameter(16), rng);
  }();
  return kp;
}

const KeyPair& wide_key() {  // 512-bit modulus
  static const KeyPair kp = [] {
    SeededRandom rng(5002);
    return paillier::keygen(paillier::SecurityParameter(256), rng);
  }();
  return kp;
}

Natural decrypt_value(const KeyPair& kp, const paillier::Ciphertext& c) {
  return paillier::decrypt(kp.sk, c).value();
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  throw std::runtime_error("expected an Error");
}

}  // namespace

TEST_CASE("carol aborts on degenerate class vectors before any encryption") {
  SeededRandom rng(5003);
  CHECK(code_of([&] {
          carol_round1(BinaryVector::parse("1111"),
                       paillier::SecurityParameter(16),
                       BlindingVariant::additive, rng);
        }) == ErrorCode::DegenerateClassVector);
  CHECK(code_of([&] {
          carol_round1(BinaryVector::parse("0000"), tiny_key(),
                       BlindingVariant::multiplicative, rng);
        }) == ErrorCode::DegenerateClassVector);
}

TEST_CASE("undersized keys are rejected") {
  SeededRandom rng(5004);
  const KeyPair kp35 = KeyPair::from_primes(Natural(5), Natural(7));
  CHECK(code_of([&] {
          carol_round1(BinaryVector::parse("0101"), kp35,
                       BlindingVariant::additive, rng);
        }) == ErrorCode::KeyTooSmall);
}

TEST_CASE("round 1 carries encrypted labels and the class ratio") {
  SeededRandom rng(5005);
  const KeyPair& kp = wide_key();
  const BinaryVector c = BinaryVector::parse("0101");
  auto [st, m1] = carol_round1(c, kp, BlindingVariant::additive, rng);

  CHECK(m1.count() == 4);
  CHECK(m1.variant == BlindingVariant::additive);
  for (size_t i = 0; i < 4; ++i) {
    CHECK(decrypt_value(kp, m1.encrypted_labels[i]) == Natural(c[i]));
    CHECK(m1.encrypted_labels[i].key_fingerprint() == kp.pk.fingerprint());
  }
  // (B+D)/(A+C) = 2/2 = 1/1
  CHECK(decrypt_value(kp, m1.encrypted_ratio) ==
        bigmod::encode_rational(Rational(1, 1), kp.pk.n()).value());
  CHECK(decrypt_value(kp, m1.encrypted_ratio) == 1);
}

TEST_CASE("felix validates length and degeneracy before computing") {
  SeededRandom rng(5006);
  auto [st, m1] = carol_round1(BinaryVector::parse("0101"), tiny_key(),
                               BlindingVariant::additive, rng);
  CHECK(code_of([&] {
          felix_round2(BinaryVector::parse("01010"), m1, rng);
        }) == ErrorCode::LengthMismatch);
  CHECK(code_of([&] {
          felix_round2(BinaryVector::parse("1111"), m1, rng);
        }) == ErrorCode::DegenerateFeatureVector);
  CHECK(code_of([&] {
          felix_round2(BinaryVector::parse("0000"), m1, rng);
        }) == ErrorCode::DegenerateFeatureVector);
}

TEST_CASE("additive blinding hides D as r + D") {
  SeededRandom rng(5007);
  const KeyPair& kp = tiny_key();
  const Natural& n_mod = kp.pk.n();
  // f = c = 0011: D = 2
  auto [cst, m1] = carol_round1(BinaryVector::parse("0011"), kp,
                                BlindingVariant::additive, rng);
  const Natural r(123456);
  auto [fst, m2] =
      felix_round2_with_blinding(BinaryVector::parse("0011"), m1, r, rng);
  const Natural t = decrypt_value(kp, m2.blinded_count);
  CHECK(t == (r + Natural(2)) % n_mod);
  CHECK(fst.blinding() == r);
}

TEST_CASE("multiplicative blinding hides D as r * D") {
  SeededRandom rng(5008);
  const KeyPair& kp = tiny_key();
  auto [cst, m1] = carol_round1(BinaryVector::parse("0011"), kp,
                                BlindingVariant::multiplicative, rng);
  const Natural r(987);
  auto [fst, m2] =
      felix_round2_with_blinding(BinaryVector::parse("0011"), m1, r, rng);
  // hand count: D = 2
  CHECK(decrypt_value(kp, m2.blinded_count) ==
        (r * Natural(2)) % kp.pk.n());
}

TEST_CASE("round 3 additive quintuple decrypts to the documented values") {
  SeededRandom rng(5009);
  const KeyPair& kp = wide_key();
  const Natural& n_mod = kp.pk.n();
  const BinaryVector c = BinaryVector::parse("011011");  // B+D=4, A+C=2
  auto [st, m1] = carol_round1(c, kp, BlindingVariant::additive, rng);
  auto [fst, m2] = felix_round2_with_blinding(BinaryVector::parse("010101"),
                                              m1, Natural(777), rng);
  auto st_copy = st;
  const Round3Message m3 = carol_round3(st_copy, m2, rng);
  REQUIRE(m3.ciphertexts.size() == 5);

  const Natural inv_ac =
      bigmod::mod_inverse(Residue(Natural(2), n_mod)).value();
  const Natural inv_bd_ac =
      bigmod::mod_inverse(Residue(Natural(8), n_mod)).value();
  const Natural t = decrypt_value(kp, m2.blinded_count);

  CHECK(decrypt_value(kp, m3.ciphertexts[4]) == inv_ac);
  CHECK(decrypt_value(kp, m3.ciphertexts[3]) == inv_bd_ac);
  CHECK(decrypt_value(kp, m3.ciphertexts[2]) == (t * inv_ac) % n_mod);
  CHECK(decrypt_value(kp, m3.ciphertexts[1]) == (t * inv_bd_ac) % n_mod);
  CHECK(decrypt_value(kp, m3.ciphertexts[0]) == (t * t * inv_bd_ac) % n_mod);
}

TEST_CASE("round 3 multiplicative with a zero count annihilates both values") {
  SeededRandom rng(5010);
  const KeyPair& kp = tiny_key();
  auto [st, m1] = carol_round1(BinaryVector::parse("0011"), kp,
                               BlindingVariant::multiplicative, rng);
  // white-box: a blinded count that decrypts to zero (D = 0 edge)
  const Round2Message m2{
      BlindingVariant::multiplicative,
      paillier::encrypt(kp.pk, Residue(Natural(0), kp.pk.n()), rng)};
  const Round3Message m3 = carol_round3(st, m2, rng);
  REQUIRE(m3.ciphertexts.size() == 2);
  CHECK(decrypt_value(kp, m3.ciphertexts[0]).is_zero());
  CHECK(decrypt_value(kp, m3.ciphertexts[1]).is_zero());
}

TEST_CASE("swapped-variant peers fail with WrongCiphertextCount") {
  SeededRandom rng(5011);
  const KeyPair& kp = tiny_key();

  // additive Felix receiving a multiplicative (2-ciphertext) round 3
  auto [cst_m, m1_m] = carol_round1(BinaryVector::parse("0011"), kp,
                                    BlindingVariant::multiplicative, rng);
  auto [cst_a, m1_a] = carol_round1(BinaryVector::parse("0011"), kp,
                                    BlindingVariant::additive, rng);
  auto [fst_a, m2_a] =
      felix_round2(BinaryVector::parse("0110"), m1_a, rng);
  auto [fst_m, m2_m] =
      felix_round2(BinaryVector::parse("0110"), m1_m, rng);

  Round3Message from_mult = carol_round3(cst_m, m2_m, rng);
  Round3Message from_add = carol_round3(cst_a, m2_a, rng);

  CHECK(code_of([&] { felix_round4(fst_a, from_mult, rng); }) ==
        ErrorCode::WrongCiphertextCount);
  CHECK(code_of([&] { felix_round4(fst_m, from_add, rng); }) ==
        ErrorCode::WrongCiphertextCount);
}

TEST_CASE("additive variant with r = 0 equals the unblinded path") {
  SeededRandom rng(5012);
  const KeyPair& kp = tiny_key();
  const BinaryVector c = BinaryVector::parse("0011");
  const BinaryVector f = BinaryVector::parse("0011");

  auto [cst, m1] = carol_round1(c, kp, BlindingVariant::additive, rng);
  auto [fst, m2] = felix_round2_with_blinding(f, m1, Natural(0), rng);
  const Round3Message m3 = carol_round3(cst, m2, rng);
  const Round4Message m4 = felix_round4(fst, m3, rng);
  const Rational result = carol_finish(cst, m4);
  CHECK(result == chi2::chi2_exact(chi2::build_table(f, c)));
  CHECK(result == Rational(4));  // perfect correlation, chi2 = n
}

TEST_CASE("end-to-end worked examples at 512 bits") {
  SeededRandom rng(5013);
  const KeyPair& kp = wide_key();

  for (const auto variant :
       {BlindingVariant::multiplicative, BlindingVariant::additive}) {
    const auto r1 = run_session(BinaryVector::parse("0011"),
                                BinaryVector::parse("0011"), variant, kp, rng);
    CHECK(r1.chi2_value == Rational(4));

    const auto r2 =
        run_session(BinaryVector::parse("01011"), BinaryVector::parse("00111"),
                    variant, kp, rng);
    CHECK(r2.chi2_value == Rational(5, 36));
  }
}

TEST_CASE("exhaustive oracle equivalence for short vectors") {
  SeededRandom rng(5014);
  const KeyPair& kp = tiny_key();
  size_t sessions = 0;
  for (uint64_t n = 2; n <= 5; ++n) {
    for (uint64_t cbits = 1; cbits + 1 < (uint64_t{1} << n); ++cbits) {
      std::vector<uint8_t> c(n);
      for (uint64_t i = 0; i < n; ++i) c[i] = (cbits >> i) & 1;
      const BinaryVector cv(c);
      if (cv.count_ones() == 0 || cv.count_ones() == n) continue;
      for (uint64_t fbits = 1; fbits + 1 < (uint64_t{1} << n); ++fbits) {
        std::vector<uint8_t> f(n);
        for (uint64_t i = 0; i < n; ++i) f[i] = (fbits >> i) & 1;
        const BinaryVector fv(f);
        if (fv.count_ones() == 0 || fv.count_ones() == n) continue;

        const Rational expected = chi2::chi2_exact(chi2::build_table(fv, cv));
        const auto mult = run_session(cv, fv, BlindingVariant::multiplicative,
                                      kp, rng);
        const auto add = run_session(cv, fv, BlindingVariant::additive, kp,
                                     rng);
        CHECK(mult.chi2_value == expected);
        CHECK(add.chi2_value == expected);
        sessions += 2;
      }
    }
  }
  CHECK(sessions == 2 * (4 + 36 + 196 + 900));
}

TEST_CASE("run_session produces four ordered transcript entries per party") {
  SeededRandom rng(5015);
  const auto outcome =
      run_session(BinaryVector::parse("0101"), BinaryVector::parse("0110"),
                  BlindingVariant::additive, tiny_key(), rng);

  for (const Transcript* t : {&outcome.carol_view, &outcome.felix_view}) {
    REQUIRE(t->entries.size() == 4);
    for (int round = 1; round <= 4; ++round) {
      CHECK(t->entries[static_cast<size_t>(round - 1)].round == round);
      CHECK(t->entries[static_cast<size_t>(round - 1)].payload_length > 0);
    }
  }
  using Direction = TranscriptEntry::Direction;
  CHECK(outcome.carol_view.entries[0].direction == Direction::sent);
  CHECK(outcome.carol_view.entries[1].direction == Direction::received);
  CHECK(outcome.felix_view.entries[0].direction == Direction::received);
  CHECK(outcome.felix_view.entries[1].direction == Direction::sent);
  CHECK(outcome.carol_view.outcome.substr(0, 5) == "chi2=");
  CHECK(outcome.felix_view.outcome == "completed");

  // the views agree on what crossed the wire
  for (size_t i = 0; i < 4; ++i) {
    CHECK(outcome.carol_view.entries[i].payload_digest ==
          outcome.felix_view.entries[i].payload_digest);
    CHECK(outcome.carol_view.entries[i].payload_length ==
          outcome.felix_view.entries[i].payload_length);
  }
}

TEST_CASE("deterministic seed reproduces transcripts") {
  auto run_once = [] {
    SeededRandom rng(5016);
    SessionOptions opts;
    opts.timestamp = [] { return std::string("1970-01-01T00:00:00Z"); };
    return run_session(BinaryVector::parse("010101"),
                       BinaryVector::parse("001101"),
                       BlindingVariant::additive,
                       paillier::SecurityParameter(16), rng, opts);
  };
  const auto a = run_once();
  const auto b = run_once();
  CHECK(a.chi2_value == b.chi2_value);
  REQUIRE(a.carol_view.entries.size() == b.carol_view.entries.size());
  for (size_t i = 0; i < a.carol_view.entries.size(); ++i) {
    CHECK(a.carol_view.entries[i].payload_digest ==
          b.carol_view.entries[i].payload_digest);
    CHECK(a.carol_view.entries[i].timestamp ==
          b.carol_view.entries[i].timestamp);
  }
}

TEST_CASE("round order is enforced by state tags") {
  SeededRandom rng(5017);
  const KeyPair& kp = tiny_key();
  auto [cst, m1] = carol_round1(BinaryVector::parse("0011"), kp,
                                BlindingVariant::additive, rng);
  auto [fst, m2] = felix_round2(BinaryVector::parse("0110"), m1, rng);
  const Round3Message m3 = carol_round3(cst, m2, rng);
  CHECK_THROWS_AS(carol_round3(cst, m2, rng), std::logic_error);
  const Round4Message m4 = felix_round4(fst, m3, rng);
  CHECK_THROWS_AS(felix_round4(fst, m3, rng), std::logic_error);
  (void)carol_finish(cst, m4);
  CHECK_THROWS_AS(carol_finish(cst, m4), std::logic_error);
}

TEST_CASE("message lengths do not depend on label values") {
  // same key and same randomness, every single-bit flip of c
  const BinaryVector base = BinaryVector::parse("01010011");
  auto lengths_for = [&](const BinaryVector& c) {
    SeededRandom rng(5018);
    const KeyPair& kp = wide_key();
    auto [cst, m1] = carol_round1(c, kp, BlindingVariant::additive, rng);
    auto [fst, m2] =
        felix_round2_with_blinding(BinaryVector::parse("01100101"), m1,
                                   Natural(424242), rng);
    const Round3Message m3 = carol_round3(cst, m2, rng);
    return std::tuple{serialize(m1).size(), m1.count(), serialize(m3).size(),
                      m3.ciphertexts.size()};
  };
  const auto reference = lengths_for(base);
  for (size_t flip = 0; flip < base.size(); ++flip) {
    std::vector<uint8_t> bits = base.values();
    bits[flip] ^= 1;
    CHECK(lengths_for(BinaryVector(bits)) == reference);
  }
}

TEST_CASE("additive round-2 plaintexts are uniform regardless of D") {
  SeededRandom rng(5019);
  const KeyPair kp = KeyPair::from_primes(bigmod::random_prime(rng, 128, 32),
                                          bigmod::random_prime(rng, 128, 32));
  const uint64_t n = 64;
  const int trials = 600;

  auto samples_for = [&](uint64_t d_value) {
    std::vector<double> out;
    const double n_d = mpz_get_d(kp.pk.n().get());
    const paillier::Ciphertext enc_d = paillier::encrypt(
        kp.pk, Residue(Natural(d_value), kp.pk.n()), rng);
    for (int i = 0; i < trials; ++i) {
      const Natural r =
          sample_blinding(BlindingVariant::additive, kp.pk, rng);
      const auto blinded =
          blind_count(BlindingVariant::additive, kp.pk, enc_d, r, rng);
      out.push_back(mpz_get_d(decrypt_value(kp, blinded).get()) / n_d);
    }
    return out;
  };

  const double p =
      testing::ks_two_sample_pvalue(samples_for(0), samples_for(n));
  CHECK(p > 0.01);
}

TEST_CASE("multiplicative round-2 plaintext sits on the coset of D") {
  SeededRandom rng(5020);
  const KeyPair kp = KeyPair::from_primes(bigmod::random_prime(rng, 128, 32),
                                          bigmod::random_prime(rng, 128, 32));

  // D = 0 is identically zero (the documented leak)
  const paillier::Ciphertext enc_zero =
      paillier::encrypt(kp.pk, Residue(Natural(0), kp.pk.n()), rng);
  for (int i = 0; i < 20; ++i) {
    const Natural r =
        sample_blinding(BlindingVariant::multiplicative, kp.pk, rng);
    const auto blinded =
        blind_count(BlindingVariant::multiplicative, kp.pk, enc_zero, r, rng);
    CHECK(decrypt_value(kp, blinded).is_zero());
  }

  // D != 0: t = rD with r a unit, so t * D^-1 must be a unit and vary
  const Natural d(7);
  const paillier::Ciphertext enc_d =
      paillier::encrypt(kp.pk, Residue(d, kp.pk.n()), rng);
  const Natural inv_d = bigmod::mod_inverse(Residue(d, kp.pk.n())).value();
  std::set<std::string> seen;
  for (int i = 0; i < 50; ++i) {
    const Natural r =
        sample_blinding(BlindingVariant::multiplicative, kp.pk, rng);
    const auto blinded =
        blind_count(BlindingVariant::multiplicative, kp.pk, enc_d, r, rng);
    const Natural t = decrypt_value(kp, blinded);
    const Natural unit = (t * inv_d) % kp.pk.n();
    CHECK(gcd(unit, kp.pk.n()) == 1);
    CHECK(unit == r % kp.pk.n());
    seen.insert(unit.to_decimal());
  }
  CHECK(seen.size() == 50);
}

TEST_CASE("felix's outgoing ciphertexts look freshly encrypted") {
  SeededRandom rng(5021);
  const KeyPair kp = KeyPair::from_primes(bigmod::random_prime(rng, 128, 32),
                                          bigmod::random_prime(rng, 128, 32));
  const BinaryVector c = BinaryVector::parse("0101");
  const BinaryVector f = BinaryVector::parse("0110");

  for (const auto variant :
       {BlindingVariant::multiplicative, BlindingVariant::additive}) {
    std::vector<size_t> counts_r2(256, 0);
    std::vector<size_t> counts_r4(256, 0);
    const auto [cst0, m1] = carol_round1(c, kp, variant, rng);
    for (int i = 0; i < 2000; ++i) {
      auto cst = cst0;
      auto [fst, m2] = felix_round2(f, m1, rng);
      counts_r2[testing::randomizer_low_byte(
          kp.pk, m2.blinded_count,
          decrypt_value(kp, m2.blinded_count))]++;
      const Round3Message m3 = carol_round3(cst, m2, rng);
      const Round4Message m4 = felix_round4(fst, m3, rng);
      counts_r4[testing::randomizer_low_byte(
          kp.pk, m4.encrypted_chi2,
          decrypt_value(kp, m4.encrypted_chi2))]++;
    }
    CHECK(testing::chi2_uniformity_pvalue(counts_r2) > 0.001);
    CHECK(testing::chi2_uniformity_pvalue(counts_r4) > 0.001);
  }
}

TEST_CASE("protocol message serialization round trips") {
  SeededRandom rng(5022);
  const KeyPair& kp = tiny_key();
  auto [cst, m1] = carol_round1(BinaryVector::parse("01101"), kp,
                                BlindingVariant::additive, rng);
  auto [fst, m2] = felix_round2(BinaryVector::parse("01011"), m1, rng);
  const Round3Message m3 = carol_round3(cst, m2, rng);
  const Round4Message m4 = felix_round4(fst, m3, rng);

  const Round1Message p1 = parse_round1(serialize(m1));
  CHECK(p1.variant == m1.variant);
  CHECK(p1.pk == m1.pk);
  REQUIRE(p1.count() == m1.count());
  for (size_t i = 0; i < p1.count(); ++i) {
    CHECK(p1.encrypted_labels[i] == m1.encrypted_labels[i]);
  }
  CHECK(p1.encrypted_ratio == m1.encrypted_ratio);

  CHECK(parse_round2(serialize(m2), kp.pk).blinded_count == m2.blinded_count);
  const Round3Message p3 = parse_round3(serialize(m3), kp.pk);
  REQUIRE(p3.ciphertexts.size() == m3.ciphertexts.size());
  for (size_t i = 0; i < p3.ciphertexts.size(); ++i) {
    CHECK(p3.ciphertexts[i] == m3.ciphertexts[i]);
  }
  CHECK(parse_round4(serialize(m4), kp.pk).encrypted_chi2 ==
        m4.encrypted_chi2);

  // foreign-key ciphertexts are rejected at parse time
  const KeyPair other = KeyPair::from_primes(Natural(65537), Natural(65539));
  CHECK_THROWS_AS(parse_round2(serialize(m2), other.pk), Error);
}
