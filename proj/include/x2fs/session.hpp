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

#include <optional>
#include <string>

#include "x2fs/dataset.hpp"
#include "x2fs/protocol.hpp"
#include "x2fs/wire.hpp"

namespace x2fs::runner {

enum class Role : uint8_t { carol, felix };

const char* role_name(Role role);

struct SessionConfig {
  Role role = Role::carol;
  protocol::BlindingVariant variant = protocol::BlindingVariant::additive;
  unsigned key_bits = 1024;  // modulus size; prime size is half
  std::string listen;        // exactly one of listen/connect, "host:port"
  std::string connect;
  std::string input_path;
  std::string id_column = "id";
  std::string value_column = "value";
  std::string transcript_path;  // optional
  std::optional<Bytes> seed;    // deterministic test runs only
};

struct SessionReport {
  Role role = Role::carol;
  bool success = false;
  // Carol only: the statistic three ways (exact, 6-digit decimal, label).
  std::optional<bigmod::Rational> chi2_value;
  std::string chi2_decimal;
  std::string confidence;
  std::string outcome;  // human-readable status line
  protocol::Transcript transcript;
};

std::string format_report(const SessionReport& report);

// Runs one party of the protocol over framed TCP. Carol speaks first with
// the handshake (magic, variant, record-id order); four protocol frames
// follow. Local failures are mirrored to the peer as abort frames.
SessionReport serve_session(const SessionConfig& cfg);

struct LocalOptions {
  std::string id_column = "id";
  std::string value_column = "value";
  std::string carol_transcript;
  std::string felix_transcript;
  std::optional<Bytes> seed;
};

struct LocalReports {
  SessionReport carol;
  SessionReport felix;
};

// Same contract as serve_session for both parties, no network.
LocalReports run_local(const std::string& carol_csv,
                       const std::string& felix_csv,
                       protocol::BlindingVariant variant, unsigned key_bits,
                       const LocalOptions& opts = {});

// CLI exit classes: 0 success, 2 data error, 3 protocol abort, 4 transport.
int exit_code_for(ErrorCode code);

void write_transcript_file(const std::string& path,
                           const protocol::Transcript& transcript);

}  // namespace x2fs::runner
