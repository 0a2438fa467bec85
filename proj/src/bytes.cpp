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

#include "x2fs/bytes.hpp"

#include <stdexcept>

#include "x2fs/errors.hpp"

namespace x2fs {

namespace {
constexpr char kHexDigits[] = "0123456789abcdef";

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}
}  // namespace

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotInvertible: return "NotInvertible";
    case ErrorCode::ReconstructionFailed: return "ReconstructionFailed";
    case ErrorCode::KeyMismatch: return "KeyMismatch";
    case ErrorCode::MalformedCiphertext: return "MalformedCiphertext";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::DegenerateTable: return "DegenerateTable";
    case ErrorCode::NegativeStatistic: return "NegativeStatistic";
    case ErrorCode::DegenerateClassVector: return "DegenerateClassVector";
    case ErrorCode::DegenerateFeatureVector: return "DegenerateFeatureVector";
    case ErrorCode::KeyTooSmall: return "KeyTooSmall";
    case ErrorCode::WrongCiphertextCount: return "WrongCiphertextCount";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::NonBinaryValue: return "NonBinaryValue";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::IdSetMismatch: return "IdSetMismatch";
    case ErrorCode::HandshakeVersionMismatch: return "HandshakeVersionMismatch";
    case ErrorCode::BadHandshake: return "BadHandshake";
    case ErrorCode::PeerAbort: return "PeerAbort";
    case ErrorCode::TransportError: return "TransportError";
    case ErrorCode::InputUnreadable: return "InputUnreadable";
  }
  return "UnknownError";
}

std::string to_hex(std::span<const uint8_t> data) {
  std::string out;
  out.reserve(data.size() * 2);
  for (uint8_t b : data) {
    out.push_back(kHexDigits[b >> 4]);
    out.push_back(kHexDigits[b & 0x0f]);
  }
  return out;
}

Bytes from_hex(const std::string& hex) {
  if (hex.size() % 2 != 0) {
    throw std::invalid_argument("hex string has odd length");
  }
  Bytes out;
  out.reserve(hex.size() / 2);
  for (size_t i = 0; i < hex.size(); i += 2) {
    const int hi = hex_value(hex[i]);
    const int lo = hex_value(hex[i + 1]);
    if (hi < 0 || lo < 0) {
      throw std::invalid_argument("invalid hex digit");
    }
    out.push_back(static_cast<uint8_t>((hi << 4) | lo));
  }
  return out;
}

}  // namespace x2fs
