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

#include "x2fs/protocol.hpp"

#include <ctime>
#include <stdexcept>

namespace x2fs::protocol {

namespace {

Natural mul_mod(const Natural& a, const Natural& b, const Natural& m) {
  Natural r;
  mpz_mul(r.get(), a.get(), b.get());
  mpz_mod(r.get(), r.get(), m.get());
  return r;
}

Natural negate_mod(const Natural& a, const Natural& m) {
  Natural r;
  mpz_sub(r.get(), m.get(), a.get());
  mpz_mod(r.get(), r.get(), m.get());
  return r;
}

Residue plaintext(const Natural& v, const paillier::PublicKey& pk) {
  return Residue(v, pk.n());
}

void check_session_key(const paillier::Ciphertext& c,
                       const paillier::PublicKey& pk) {
  if (c.key_fingerprint() != pk.fingerprint()) {
    throw Error(ErrorCode::KeyMismatch,
                "ciphertext does not belong to the session key");
  }
}

Error tag_round(int round, const Error& e) {
  return Error(e.code(), "round " + std::to_string(round) + ": " + e.what());
}

TranscriptEntry entry(TranscriptEntry::Direction dir, int round,
                      const Bytes& payload, const SessionOptions& opts) {
  return TranscriptEntry{dir, round, sha256(payload), payload.size(),
                         opts.timestamp()};
}

}  // namespace

const char* variant_name(BlindingVariant v) {
  return v == BlindingVariant::multiplicative ? "multiplicative" : "additive";
}

std::pair<CarolState, Round1Message> carol_round1(
    const BinaryVector& c, const paillier::SecurityParameter& k,
    BlindingVariant variant, RandomSource& rng) {
  // degenerate labels abort before any key material is produced
  const uint64_t ones = c.count_ones();
  if (ones == 0 || ones == c.size()) {
    throw Error(ErrorCode::DegenerateClassVector,
                "class vector has a zero marginal");
  }
  return carol_round1(c, paillier::keygen(k, rng), variant, rng);
}

std::pair<CarolState, Round1Message> carol_round1(const BinaryVector& c,
                                                  paillier::KeyPair keys,
                                                  BlindingVariant variant,
                                                  RandomSource& rng) {
  const uint64_t n = c.size();
  const uint64_t ones = c.count_ones();
  if (ones == 0 || ones == n) {
    throw Error(ErrorCode::DegenerateClassVector,
                "class vector has a zero marginal");
  }
  // n^9 < N keeps the reduced statistic inside the reconstruction box
  if (!(pow_ui(Natural(n), 9) < keys.pk.n())) {
    throw Error(ErrorCode::KeyTooSmall,
                "n^9 >= N for n = " + std::to_string(n));
  }

  const paillier::PublicKey& pk = keys.pk;
  std::vector<paillier::Ciphertext> labels;
  labels.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    labels.push_back(
        paillier::encrypt(keys, plaintext(Natural(c[i]), pk), rng));
  }

  // (B+D)/(A+C) from the label sum alone
  Natural class_ones(ones);
  Natural class_zeros(n - ones);
  const Rational ratio = Rational::from_ratio(class_ones, class_zeros);
  paillier::Ciphertext encrypted_ratio = paillier::encrypt(
      keys, bigmod::encode_rational(ratio, pk.n()), rng);

  std::array<uint8_t, 16> nonce;
  rng.fill(nonce);

  Round1Message msg{variant, pk, std::move(labels), std::move(encrypted_ratio)};
  CarolState st(std::move(keys), n, std::move(class_ones),
                std::move(class_zeros), variant, nonce);
  return {std::move(st), std::move(msg)};
}

Natural sample_blinding(BlindingVariant variant, const paillier::PublicKey& pk,
                        RandomSource& rng) {
  // r^-1 and r^-2 are needed later in the multiplicative variant, so r is
  // drawn from Z*_N there; additive blinding works for any r in Z_N.
  return variant == BlindingVariant::multiplicative
             ? bigmod::random_unit(rng, pk.n())
             : bigmod::random_below(rng, pk.n());
}

paillier::Ciphertext blind_count(BlindingVariant variant,
                                 const paillier::PublicKey& pk,
                                 const paillier::Ciphertext& encrypted_count,
                                 const Natural& r, RandomSource& rng) {
  if (variant == BlindingVariant::multiplicative) {
    // Enc(rD), refreshed so the outgoing ciphertext looks newly encrypted
    return paillier::rerandomize(
        pk, paillier::hom_scalar_mul(plaintext(r, pk), encrypted_count), rng);
  }
  // Enc(r) carries fresh randomness, so the product needs no extra refresh
  return paillier::hom_add(paillier::encrypt(pk, plaintext(r, pk), rng),
                           encrypted_count);
}

std::pair<FelixState, Round2Message> felix_round2_with_blinding(
    const BinaryVector& f, const Round1Message& m1, Natural r,
    RandomSource& rng) {
  if (f.size() != m1.count()) {
    throw Error(ErrorCode::LengthMismatch,
                "feature vector length differs from the label count");
  }
  const uint64_t ones = f.count_ones();
  if (ones == 0 || ones == f.size()) {
    throw Error(ErrorCode::DegenerateFeatureVector,
                "feature vector has a zero marginal");
  }

  // Enc(D) = sum of f_i * c_i under encryption; f_i = 0 terms contribute
  // nothing and are skipped, f_i = 1 terms are plain hom_add.
  std::optional<paillier::Ciphertext> enc_d;
  for (size_t i = 0; i < f.size(); ++i) {
    if (f[i] == 0) continue;
    enc_d = enc_d ? paillier::hom_add(*enc_d, m1.encrypted_labels[i])
                  : m1.encrypted_labels[i];
  }

  Round2Message msg{m1.variant,
                    blind_count(m1.variant, m1.pk, *enc_d, r, rng)};
  FelixState st(f, m1.pk, std::move(r), Natural(ones),
                Natural(f.size() - ones), m1.encrypted_ratio, m1.variant);
  return {std::move(st), std::move(msg)};
}

std::pair<FelixState, Round2Message> felix_round2(const BinaryVector& f,
                                                  const Round1Message& m1,
                                                  RandomSource& rng) {
  return felix_round2_with_blinding(
      f, m1, sample_blinding(m1.variant, m1.pk, rng), rng);
}

Round3Message carol_round3(CarolState& st, const Round2Message& m2,
                           RandomSource& rng) {
  if (st.stage_ != CarolState::Stage::awaiting_round2) {
    throw std::logic_error("carol_round3 called out of order");
  }
  const paillier::PublicKey& pk = st.keys_.pk;
  const Natural& n_mod = pk.n();

  const Natural t = paillier::decrypt(st.keys_.sk, m2.blinded_count).value();

  const Natural inv_ac =
      bigmod::mod_inverse(Residue(st.class_zeros_, n_mod)).value();
  const Natural inv_bd_ac = mul_mod(
      bigmod::mod_inverse(Residue(st.class_ones_, n_mod)).value(), inv_ac,
      n_mod);
  const Natural t_sq = mul_mod(t, t, n_mod);

  std::vector<Natural> values;
  if (st.variant_ == BlindingVariant::multiplicative) {
    // t = rD: send t^2/((B+D)(A+C)) and t/(A+C)
    values.push_back(mul_mod(t_sq, inv_bd_ac, n_mod));
    values.push_back(mul_mod(t, inv_ac, n_mod));
  } else {
    // t = r+D: the quintuple Felix needs to eliminate r homomorphically
    values.push_back(mul_mod(t_sq, inv_bd_ac, n_mod));
    values.push_back(mul_mod(t, inv_bd_ac, n_mod));
    values.push_back(mul_mod(t, inv_ac, n_mod));
    values.push_back(inv_bd_ac);
    values.push_back(inv_ac);
  }

  std::vector<paillier::Ciphertext> cts;
  cts.reserve(values.size());
  for (const Natural& v : values) {
    cts.push_back(paillier::encrypt(st.keys_, plaintext(v, pk), rng));
  }
  st.stage_ = CarolState::Stage::awaiting_round4;
  return Round3Message{st.variant_, std::move(cts)};
}

Round4Message felix_round4(FelixState& st, const Round3Message& m3,
                           RandomSource& rng) {
  if (st.stage_ != FelixState::Stage::awaiting_round3) {
    throw std::logic_error("felix_round4 called out of order");
  }
  const size_t expected =
      st.variant_ == BlindingVariant::multiplicative ? 2 : 5;
  if (m3.ciphertexts.size() != expected) {
    throw Error(ErrorCode::WrongCiphertextCount,
                "expected " + std::to_string(expected) + " ciphertexts for " +
                    variant_name(st.variant_) + " blinding, got " +
                    std::to_string(m3.ciphertexts.size()));
  }
  const paillier::PublicKey& pk = st.pk_;
  const Natural& n_mod = pk.n();
  for (const auto& c : m3.ciphertexts) check_session_key(c, pk);
  check_session_key(st.encrypted_ratio_, pk);

  // Feature-side scalars, reduced into Z_N as rational encodings.
  const uint64_t n = st.f_.size();
  const Natural nn(n);
  auto encode = [&](const Rational& q) {
    return bigmod::encode_rational(q, n_mod).value();
  };
  const Natural s1 = encode(Rational::from_ratio(
      nn * nn * nn, st.feature_zeros_ * st.feature_ones_));
  const Natural s2 = encode(
      Rational::from_ratio(nn * st.feature_ones_, st.feature_zeros_));
  const Natural s3 = encode(Rational::from_ratio(
      Natural(2) * nn * nn, st.feature_zeros_, /*negative=*/true));

  // The whole round is one simultaneous exponentiation mod N^2; the final
  // s^N base refreshes the output's randomness.
  std::vector<Natural> bases;
  std::vector<Natural> exps;
  auto emit = [&](const paillier::Ciphertext& c, Natural e) {
    bases.push_back(c.value().value());
    exps.push_back(std::move(e));
  };

  if (st.variant_ == BlindingVariant::multiplicative) {
    // r^-2 (x) ct0 then (x) s1 collapses to one exponent, same for ct1
    const Natural inv_r = bigmod::mod_inverse(Residue(st.r_, n_mod)).value();
    const Natural inv_r2 = mul_mod(inv_r, inv_r, n_mod);
    emit(m3.ciphertexts[0], mul_mod(inv_r2, s1, n_mod));
    emit(st.encrypted_ratio_, s2);
    emit(m3.ciphertexts[1], mul_mod(inv_r, s3, n_mod));
  } else {
    // D^2 path: E1 + r^2 E4 - 2r E2, then scaled by s1
    // D path:   E3 - r E5, then scaled by s3
    const Natural r = st.r_ % n_mod;
    const Natural r_sq = mul_mod(r, r, n_mod);
    const Natural neg_r = negate_mod(r, n_mod);
    const Natural neg_2r = negate_mod(mul_mod(Natural(2), r, n_mod), n_mod);
    emit(m3.ciphertexts[0], s1);
    emit(m3.ciphertexts[3], mul_mod(r_sq, s1, n_mod));
    emit(m3.ciphertexts[1], mul_mod(neg_2r, s1, n_mod));
    emit(st.encrypted_ratio_, s2);
    emit(m3.ciphertexts[2], s3);
    emit(m3.ciphertexts[4], mul_mod(neg_r, s3, n_mod));
  }
  const Natural s = bigmod::random_unit(rng, n_mod);
  bases.push_back(s);
  exps.push_back(n_mod);

  Natural value = bigmod::mod_pow_multi(bases, exps, pk.n_squared());
  st.stage_ = FelixState::Stage::done;
  return Round4Message{
      st.variant_,
      paillier::Ciphertext(Residue(std::move(value), pk.n_squared()),
                           pk.fingerprint())};
}

Rational carol_finish(CarolState& st, const Round4Message& m4) {
  if (st.stage_ != CarolState::Stage::awaiting_round4) {
    throw std::logic_error("carol_finish called out of order");
  }
  const Residue m = paillier::decrypt(st.keys_.sk, m4.encrypted_chi2);
  st.stage_ = CarolState::Stage::done;
  return bigmod::reconstruct_rational(m);
}

std::string utc_now_iso8601() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

SessionOutcome run_session(const BinaryVector& c, const BinaryVector& f,
                           BlindingVariant variant,
                           const paillier::SecurityParameter& k,
                           RandomSource& rng, SessionOptions opts) {
  if (c.count_ones() == 0 || c.count_ones() == c.size()) {
    throw tag_round(1, Error(ErrorCode::DegenerateClassVector,
                             "class vector has a zero marginal"));
  }
  return run_session(c, f, variant, paillier::keygen(k, rng), rng,
                     std::move(opts));
}

SessionOutcome run_session(const BinaryVector& c, const BinaryVector& f,
                           BlindingVariant variant, paillier::KeyPair keys,
                           RandomSource& rng, SessionOptions opts) {
  using Direction = TranscriptEntry::Direction;
  Transcript carol_view;
  Transcript felix_view;

  auto record = [&](int round, const Bytes& payload, bool carol_sent) {
    carol_view.entries.push_back(
        entry(carol_sent ? Direction::sent : Direction::received, round,
              payload, opts));
    felix_view.entries.push_back(
        entry(carol_sent ? Direction::received : Direction::sent, round,
              payload, opts));
  };

  auto run_round = [&](int round, auto&& fn) {
    try {
      return fn();
    } catch (const Error& e) {
      throw tag_round(round, e);
    }
  };

  auto [carol, m1] = run_round(
      1, [&] { return carol_round1(c, std::move(keys), variant, rng); });
  record(1, serialize(m1), true);

  auto [felix, m2] =
      run_round(2, [&] { return felix_round2(f, m1, rng); });
  record(2, serialize(m2), false);

  Round3Message m3 =
      run_round(3, [&] { return carol_round3(carol, m2, rng); });
  record(3, serialize(m3), true);

  Round4Message m4 =
      run_round(4, [&] { return felix_round4(felix, m3, rng); });
  record(4, serialize(m4), false);

  Rational result = run_round(4, [&] { return carol_finish(carol, m4); });
  carol_view.outcome = "chi2=" + result.to_string();
  felix_view.outcome = "completed";
  return SessionOutcome{std::move(result), std::move(carol_view),
                        std::move(felix_view)};
}

}  // namespace x2fs::protocol
