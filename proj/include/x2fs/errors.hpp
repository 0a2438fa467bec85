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
#include <stdexcept>
#include <string>

namespace x2fs {

// Stable error identifiers. The low byte is carried in abort frames on the
// wire, so values must not be reordered once released.
enum class ErrorCode : uint8_t {
  NotInvertible = 1,
  ReconstructionFailed = 2,
  KeyMismatch = 3,
  MalformedCiphertext = 4,
  LengthMismatch = 5,
  DegenerateTable = 6,
  NegativeStatistic = 7,
  DegenerateClassVector = 8,
  DegenerateFeatureVector = 9,
  KeyTooSmall = 10,
  WrongCiphertextCount = 11,
  MissingColumn = 12,
  NonBinaryValue = 13,
  DuplicateId = 14,
  IdSetMismatch = 15,
  HandshakeVersionMismatch = 16,
  BadHandshake = 17,
  PeerAbort = 18,
  TransportError = 19,
  InputUnreadable = 20,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Raised when a peer reports an abort; carries the round it failed in and
// the peer's error code.
class PeerAbortError : public Error {
 public:
  PeerAbortError(int round, ErrorCode peer_code)
      : Error(ErrorCode::PeerAbort,
              "round " + std::to_string(round) + ", " +
                  error_code_name(peer_code)),
        round_(round),
        peer_code_(peer_code) {}

  int round() const { return round_; }
  ErrorCode peer_code() const { return peer_code_; }

 private:
  int round_;
  ErrorCode peer_code_;
};

}  // namespace x2fs
