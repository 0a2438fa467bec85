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

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "x2fs/bigmod.hpp"
#include "x2fs/chi2.hpp"
#include "x2fs/digest.hpp"
#include "x2fs/paillier.hpp"

// Two-party encrypted chi-squared evaluation between Carol, who holds the
// class vector and the decryption key, and Felix, who holds the feature
// vector. Four messages; Felix masks the joint count D with a blinding
// value r before Carol ever decrypts it. Transport-agnostic: callers move
// the message structs (or their canonical byte form) between the parties.
namespace x2fs::protocol {

using bigmod::Natural;
using bigmod::Rational;
using bigmod::Residue;
using chi2::BinaryVector;

enum class BlindingVariant : uint8_t {
  multiplicative = 0x01,  // Felix sends Enc(r*D), r in Z*_N
  additive = 0x02,        // Felix sends Enc(r+D), r in Z_N
};

const char* variant_name(BlindingVariant v);

// Round 1, Carol -> Felix: key, per-record encrypted labels, and the
// encrypted class ratio (B+D)/(A+C) as a Z_N rational encoding.
struct Round1Message {
  BlindingVariant variant;
  paillier::PublicKey pk;
  std::vector<paillier::Ciphertext> encrypted_labels;
  paillier::Ciphertext encrypted_ratio;

  size_t count() const { return encrypted_labels.size(); }
};

// Round 2, Felix -> Carol: the blinded joint count.
struct Round2Message {
  BlindingVariant variant;
  paillier::Ciphertext blinded_count;
};

// Round 3, Carol -> Felix: 2 ciphertexts (multiplicative) or 5 (additive).
struct Round3Message {
  BlindingVariant variant;
  std::vector<paillier::Ciphertext> ciphertexts;
};

// Round 4, Felix -> Carol: the encrypted statistic.
struct Round4Message {
  BlindingVariant variant;
  paillier::Ciphertext encrypted_chi2;
};

class CarolState {
 public:
  const paillier::PublicKey& public_key() const { return keys_.pk; }
  const paillier::KeyPair& keys() const { return keys_; }
  BlindingVariant variant() const { return variant_; }
  const std::array<uint8_t, 16>& session_nonce() const { return nonce_; }
  uint64_t n() const { return n_; }

 private:
  friend std::pair<CarolState, Round1Message> carol_round1(const BinaryVector&,
                                                           paillier::KeyPair,
                                                           BlindingVariant,
                                                           RandomSource&);
  friend Round3Message carol_round3(CarolState&, const Round2Message&,
                                    RandomSource&);
  friend Rational carol_finish(CarolState&, const Round4Message&);

  enum class Stage { awaiting_round2, awaiting_round4, done };

  CarolState(paillier::KeyPair keys, uint64_t n, Natural class_ones,
             Natural class_zeros, BlindingVariant variant,
             std::array<uint8_t, 16> nonce)
      : keys_(std::move(keys)),
        n_(n),
        class_ones_(std::move(class_ones)),
        class_zeros_(std::move(class_zeros)),
        variant_(variant),
        nonce_(nonce) {}

  paillier::KeyPair keys_;
  uint64_t n_;
  Natural class_ones_;   // B + D
  Natural class_zeros_;  // A + C
  BlindingVariant variant_;
  std::array<uint8_t, 16> nonce_;
  Stage stage_ = Stage::awaiting_round2;
};

class FelixState {
 public:
  const paillier::PublicKey& public_key() const { return pk_; }
  BlindingVariant variant() const { return variant_; }
  // Blinding value; exposed so distribution tests can check masked
  // plaintexts against it.
  const Natural& blinding() const { return r_; }
  uint64_t n() const { return f_.size(); }

 private:
  friend std::pair<FelixState, Round2Message> felix_round2_with_blinding(
      const BinaryVector&, const Round1Message&, Natural, RandomSource&);
  friend Round4Message felix_round4(FelixState&, const Round3Message&,
                                    RandomSource&);

  enum class Stage { awaiting_round3, done };

  FelixState(BinaryVector f, paillier::PublicKey pk, Natural r,
             Natural feature_ones, Natural feature_zeros,
             paillier::Ciphertext encrypted_ratio, BlindingVariant variant)
      : f_(std::move(f)),
        pk_(std::move(pk)),
        r_(std::move(r)),
        feature_ones_(std::move(feature_ones)),
        feature_zeros_(std::move(feature_zeros)),
        encrypted_ratio_(std::move(encrypted_ratio)),
        variant_(variant) {}

  BinaryVector f_;
  paillier::PublicKey pk_;
  Natural r_;
  Natural feature_ones_;   // C + D
  Natural feature_zeros_;  // A + B
  paillier::Ciphertext encrypted_ratio_;
  BlindingVariant variant_;
  Stage stage_ = Stage::awaiting_round3;
};

// Generates a fresh key pair of the given size, encrypts the labels and the
// class ratio. Throws DegenerateClassVector when all labels agree and
// KeyTooSmall when n^9 >= N (rational reconstruction headroom).
std::pair<CarolState, Round1Message> carol_round1(
    const BinaryVector& c, const paillier::SecurityParameter& k,
    BlindingVariant variant, RandomSource& rng);

// Same with a caller-supplied key pair (key reuse across sessions).
std::pair<CarolState, Round1Message> carol_round1(const BinaryVector& c,
                                                  paillier::KeyPair keys,
                                                  BlindingVariant variant,
                                                  RandomSource& rng);

// Accumulates Enc(D) = prod over f_i=1 of Enc(c_i), blinds it per the
// negotiated variant, and emits the result. Throws LengthMismatch and
// DegenerateFeatureVector (all feature values equal).
std::pair<FelixState, Round2Message> felix_round2(const BinaryVector& f,
                                                  const Round1Message& m1,
                                                  RandomSource& rng);

// Test hook: as felix_round2 but with a caller-chosen blinding value.
std::pair<FelixState, Round2Message> felix_round2_with_blinding(
    const BinaryVector& f, const Round1Message& m1, Natural r,
    RandomSource& rng);

// Decrypts the blinded count t and returns encryptions of
//   multiplicative: t^2/((B+D)(A+C)), t/(A+C)
//   additive:       t^2/((B+D)(A+C)), t/((B+D)(A+C)), t/(A+C),
//                   1/((B+D)(A+C)), 1/(A+C)
Round3Message carol_round3(CarolState& st, const Round2Message& m2,
                           RandomSource& rng);

// Strips r, applies the feature-side scalars
//   n^3/((A+B)(C+D)), n(C+D)/(A+B), -2n^2/(A+B)
// and returns a freshly randomized encryption of the statistic.
// Throws WrongCiphertextCount when the ciphertext count does not match the
// negotiated variant.
Round4Message felix_round4(FelixState& st, const Round3Message& m3,
                           RandomSource& rng);

// Decrypts and reconstructs the exact rational statistic.
Rational carol_finish(CarolState& st, const Round4Message& m4);

// Blinding internals shared with the distribution tests.
Natural sample_blinding(BlindingVariant variant, const paillier::PublicKey& pk,
                        RandomSource& rng);
paillier::Ciphertext blind_count(BlindingVariant variant,
                                 const paillier::PublicKey& pk,
                                 const paillier::Ciphertext& encrypted_count,
                                 const Natural& r, RandomSource& rng);

// Canonical byte form: message type byte, variant byte, then the fields in
// declaration order (big-endian integers, 4-byte counts).
Bytes serialize(const Round1Message& m);
Bytes serialize(const Round2Message& m);
Bytes serialize(const Round3Message& m);
Bytes serialize(const Round4Message& m);

Round1Message parse_round1(std::span<const uint8_t> payload);
Round2Message parse_round2(std::span<const uint8_t> payload,
                           const paillier::PublicKey& pk);
Round3Message parse_round3(std::span<const uint8_t> payload,
                           const paillier::PublicKey& pk);
Round4Message parse_round4(std::span<const uint8_t> payload,
                           const paillier::PublicKey& pk);

// A party's view of the exchange: one entry per protocol message it sent
// or received, payload digests only.
struct TranscriptEntry {
  enum class Direction : uint8_t { sent, received };
  Direction direction;
  int round;
  Sha256Digest payload_digest;
  size_t payload_length;
  std::string timestamp;
};

struct Transcript {
  std::vector<TranscriptEntry> entries;
  std::string outcome;
};

std::string utc_now_iso8601();

struct SessionOptions {
  std::function<std::string()> timestamp = utc_now_iso8601;
};

struct SessionOutcome {
  Rational chi2_value;
  Transcript carol_view;
  Transcript felix_view;
};

// In-process driver chaining the four rounds; exactly four messages cross.
SessionOutcome run_session(const BinaryVector& c, const BinaryVector& f,
                           BlindingVariant variant,
                           const paillier::SecurityParameter& k,
                           RandomSource& rng, SessionOptions opts = {});
SessionOutcome run_session(const BinaryVector& c, const BinaryVector& f,
                           BlindingVariant variant, paillier::KeyPair keys,
                           RandomSource& rng, SessionOptions opts = {});

}  // namespace x2fs::protocol
