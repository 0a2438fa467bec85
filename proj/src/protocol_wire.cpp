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

namespace x2fs::protocol {

namespace {

constexpr uint8_t kTagRound1 = 0x01;
constexpr uint8_t kTagRound2 = 0x02;
constexpr uint8_t kTagRound3 = 0x03;
constexpr uint8_t kTagRound4 = 0x04;

void expect_tag(ByteReader& in, uint8_t tag) {
  uint8_t got = 0;
  if (!in.try_u8(got) || got != tag) {
    throw Error(ErrorCode::TransportError,
                "unexpected message tag (wanted " + std::to_string(tag) +
                    ", got " + std::to_string(got) + ")");
  }
}

BlindingVariant read_variant(ByteReader& in) {
  uint8_t v = 0;
  if (!in.try_u8(v) ||
      (v != static_cast<uint8_t>(BlindingVariant::multiplicative) &&
       v != static_cast<uint8_t>(BlindingVariant::additive))) {
    throw Error(ErrorCode::TransportError, "invalid blinding variant byte");
  }
  return static_cast<BlindingVariant>(v);
}

void expect_end(const ByteReader& in) {
  if (!in.done()) {
    throw Error(ErrorCode::TransportError, "trailing bytes after message");
  }
}

}  // namespace

Bytes serialize(const Round1Message& m) {
  Bytes out;
  out.push_back(kTagRound1);
  out.push_back(static_cast<uint8_t>(m.variant));
  m.pk.append_wire(out);
  append_u32_be(out, static_cast<uint32_t>(m.encrypted_labels.size()));
  for (const auto& c : m.encrypted_labels) c.append_wire(out);
  m.encrypted_ratio.append_wire(out);
  return out;
}

Bytes serialize(const Round2Message& m) {
  Bytes out;
  out.push_back(kTagRound2);
  out.push_back(static_cast<uint8_t>(m.variant));
  m.blinded_count.append_wire(out);
  return out;
}

Bytes serialize(const Round3Message& m) {
  Bytes out;
  out.push_back(kTagRound3);
  out.push_back(static_cast<uint8_t>(m.variant));
  append_u32_be(out, static_cast<uint32_t>(m.ciphertexts.size()));
  for (const auto& c : m.ciphertexts) c.append_wire(out);
  return out;
}

Bytes serialize(const Round4Message& m) {
  Bytes out;
  out.push_back(kTagRound4);
  out.push_back(static_cast<uint8_t>(m.variant));
  m.encrypted_chi2.append_wire(out);
  return out;
}

Round1Message parse_round1(std::span<const uint8_t> payload) {
  ByteReader in(payload);
  expect_tag(in, kTagRound1);
  const BlindingVariant variant = read_variant(in);
  paillier::PublicKey pk = paillier::PublicKey::read_wire(in);

  uint32_t count = 0;
  if (!in.try_u32(count) || count == 0) {
    throw Error(ErrorCode::TransportError, "round 1 must carry n >= 1 labels");
  }
  std::vector<paillier::Ciphertext> labels;
  labels.reserve(std::min<size_t>(count, in.remaining() / 36));
  for (uint32_t i = 0; i < count; ++i) {
    labels.push_back(paillier::Ciphertext::read_wire(in, pk));
  }
  paillier::Ciphertext ratio = paillier::Ciphertext::read_wire(in, pk);
  expect_end(in);
  return Round1Message{variant, std::move(pk), std::move(labels),
                       std::move(ratio)};
}

Round2Message parse_round2(std::span<const uint8_t> payload,
                           const paillier::PublicKey& pk) {
  ByteReader in(payload);
  expect_tag(in, kTagRound2);
  const BlindingVariant variant = read_variant(in);
  paillier::Ciphertext ct = paillier::Ciphertext::read_wire(in, pk);
  expect_end(in);
  return Round2Message{variant, std::move(ct)};
}

Round3Message parse_round3(std::span<const uint8_t> payload,
                           const paillier::PublicKey& pk) {
  ByteReader in(payload);
  expect_tag(in, kTagRound3);
  const BlindingVariant variant = read_variant(in);
  uint32_t count = 0;
  if (!in.try_u32(count)) {
    throw Error(ErrorCode::TransportError, "round 3 missing count");
  }
  std::vector<paillier::Ciphertext> cts;
  cts.reserve(std::min<size_t>(count, in.remaining() / 36));
  for (uint32_t i = 0; i < count; ++i) {
    cts.push_back(paillier::Ciphertext::read_wire(in, pk));
  }
  expect_end(in);
  return Round3Message{variant, std::move(cts)};
}

Round4Message parse_round4(std::span<const uint8_t> payload,
                           const paillier::PublicKey& pk) {
  ByteReader in(payload);
  expect_tag(in, kTagRound4);
  const BlindingVariant variant = read_variant(in);
  paillier::Ciphertext ct = paillier::Ciphertext::read_wire(in, pk);
  expect_end(in);
  return Round4Message{variant, std::move(ct)};
}

}  // namespace x2fs::protocol
