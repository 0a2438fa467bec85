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

#include "x2fs/session.hpp"

#include <fstream>
#include <functional>
#include <memory>
#include <sstream>

namespace x2fs::runner {

namespace {

using protocol::BlindingVariant;
using protocol::Transcript;
using protocol::TranscriptEntry;
using TimestampFn = std::function<std::string()>;

std::string fixed_epoch() { return "1970-01-01T00:00:00Z"; }

std::unique_ptr<RandomSource> make_rng(const std::optional<Bytes>& seed) {
  if (seed) {
    return std::make_unique<SeededRandom>(std::span<const uint8_t>(*seed));
  }
  return std::make_unique<SystemRandom>();
}

TimestampFn make_timestamp(const std::optional<Bytes>& seed) {
  return seed ? TimestampFn(fixed_epoch)
              : TimestampFn(protocol::utc_now_iso8601);
}

void check_key_bits(unsigned key_bits) {
#ifndef X2FS_TEST_HOOKS
  if (key_bits < 512) {
    throw Error(ErrorCode::KeyTooSmall, "key-bits below 512");
  }
#endif
  if (key_bits < 32) {
    throw Error(ErrorCode::KeyTooSmall, "key-bits below 32");
  }
}

void add_entry(Transcript& transcript, TranscriptEntry::Direction dir,
               int round, const Bytes& payload, const TimestampFn& timestamp) {
  transcript.entries.push_back(TranscriptEntry{
      dir, round, sha256(payload), payload.size(), timestamp()});
}

void send_abort(Stream& stream, uint8_t round, ErrorCode code) {
  try {
    write_frame(stream, encode_abort(Abort{round, code}));
  } catch (const Error&) {
    // peer already gone; the local error is the one to surface
  }
}

// Reads the next protocol frame, surfacing peer aborts as PeerAbortError.
Bytes read_protocol_frame(Stream& stream) {
  Bytes payload = read_frame(stream);
  if (auto abort = try_parse_abort(payload)) {
    throw PeerAbortError(abort->round, abort->code);
  }
  return payload;
}

void fill_carol_result(SessionReport& report, const bigmod::Rational& value) {
  report.chi2_value = value;
  report.chi2_decimal = value.to_decimal(6);
  report.confidence = chi2::confidence_label(chi2::confidence(value));
  report.outcome = "chi2 = " + value.to_string() + " (" +
                   report.chi2_decimal + "), confidence " + report.confidence;
  report.transcript.outcome = "chi2=" + value.to_string();
}

void run_carol(const SessionConfig& cfg, Stream& stream, RandomSource& rng,
               const TimestampFn& timestamp, const Dataset& ds,
               SessionReport& report) {
  write_frame(stream, encode_handshake(Handshake{cfg.variant, ds.ids()}));

  const chi2::BinaryVector c = ds.values();
  const auto k = paillier::SecurityParameter::for_modulus_bits(cfg.key_bits);

  std::optional<std::pair<protocol::CarolState, protocol::Round1Message>> r1;
  try {
    r1.emplace(protocol::carol_round1(c, k, cfg.variant, rng));
  } catch (const Error& e) {
    send_abort(stream, 1, e.code());
    throw;
  }
  auto& [st, m1] = *r1;

  const Bytes m1_bytes = protocol::serialize(m1);
  write_frame(stream, m1_bytes);
  add_entry(report.transcript, TranscriptEntry::Direction::sent, 1, m1_bytes,
            timestamp);

  const Bytes m2_bytes = read_protocol_frame(stream);
  const auto m2 = protocol::parse_round2(m2_bytes, st.public_key());
  add_entry(report.transcript, TranscriptEntry::Direction::received, 2,
            m2_bytes, timestamp);

  protocol::Round3Message m3{cfg.variant, {}};
  try {
    m3 = protocol::carol_round3(st, m2, rng);
  } catch (const Error& e) {
    send_abort(stream, 3, e.code());
    throw;
  }
  const Bytes m3_bytes = protocol::serialize(m3);
  write_frame(stream, m3_bytes);
  add_entry(report.transcript, TranscriptEntry::Direction::sent, 3, m3_bytes,
            timestamp);

  const Bytes m4_bytes = read_protocol_frame(stream);
  const auto m4 = protocol::parse_round4(m4_bytes, st.public_key());
  add_entry(report.transcript, TranscriptEntry::Direction::received, 4,
            m4_bytes, timestamp);

  fill_carol_result(report, protocol::carol_finish(st, m4));
}

void run_felix(const SessionConfig& cfg, Stream& stream, RandomSource& rng,
               const TimestampFn& timestamp, const Dataset& ds,
               SessionReport& report) {
  const Bytes hs_bytes = read_frame(stream);
  if (auto abort = try_parse_abort(hs_bytes)) {
    throw PeerAbortError(abort->round, abort->code);
  }
  const Handshake hs = parse_handshake(hs_bytes);

  std::optional<chi2::BinaryVector> f;
  try {
    f.emplace(align(hs.record_ids, ds));
  } catch (const Error& e) {
    send_abort(stream, 0, e.code());
    throw;
  }

  const Bytes m1_bytes = read_protocol_frame(stream);
  const auto m1 = protocol::parse_round1(m1_bytes);
  if (m1.variant != hs.variant) {
    const Error e(ErrorCode::BadHandshake,
                  "round-1 variant differs from the handshake");
    send_abort(stream, 1, e.code());
    throw e;
  }
  add_entry(report.transcript, TranscriptEntry::Direction::received, 1,
            m1_bytes, timestamp);

  std::optional<std::pair<protocol::FelixState, protocol::Round2Message>> r2;
  try {
    r2.emplace(protocol::felix_round2(*f, m1, rng));
  } catch (const Error& e) {
    send_abort(stream, 2, e.code());
    throw;
  }
  auto& [st, m2] = *r2;

  const Bytes m2_bytes = protocol::serialize(m2);
  write_frame(stream, m2_bytes);
  add_entry(report.transcript, TranscriptEntry::Direction::sent, 2, m2_bytes,
            timestamp);

  const Bytes m3_bytes = read_protocol_frame(stream);
  const auto m3 = protocol::parse_round3(m3_bytes, st.public_key());
  add_entry(report.transcript, TranscriptEntry::Direction::received, 3,
            m3_bytes, timestamp);

  std::optional<protocol::Round4Message> m4;
  try {
    m4.emplace(protocol::felix_round4(st, m3, rng));
  } catch (const Error& e) {
    send_abort(stream, 4, e.code());
    throw;
  }
  const Bytes m4_bytes = protocol::serialize(*m4);
  write_frame(stream, m4_bytes);
  add_entry(report.transcript, TranscriptEntry::Direction::sent, 4, m4_bytes,
            timestamp);

  report.outcome = "completed";
  report.transcript.outcome = "completed";
}

}  // namespace

const char* role_name(Role role) {
  return role == Role::carol ? "carol" : "felix";
}

std::string format_report(const SessionReport& report) {
  std::ostringstream out;
  out << "role: " << role_name(report.role) << "\n";
  out << "status: " << (report.success ? "ok" : "failed") << "\n";
  if (report.chi2_value) {
    out << "chi2: " << report.chi2_value->to_string() << "\n";
    out << "chi2_decimal: " << report.chi2_decimal << "\n";
    out << "confidence: " << report.confidence << "\n";
  }
  if (!report.outcome.empty()) out << "outcome: " << report.outcome << "\n";
  return out.str();
}

SessionReport serve_session(const SessionConfig& cfg) {
  if (cfg.listen.empty() == cfg.connect.empty()) {
    throw Error(ErrorCode::TransportError,
                "exactly one of listen/connect must be set");
  }
  check_key_bits(cfg.key_bits);

  auto rng = make_rng(cfg.seed);
  const TimestampFn timestamp = make_timestamp(cfg.seed);
  const Dataset ds =
      load_dataset(cfg.input_path, cfg.id_column, cfg.value_column);

  std::optional<TcpStream> stream;
  if (!cfg.listen.empty()) {
    auto [host, port] = parse_endpoint(cfg.listen);
    TcpListener listener = TcpListener::bind(host, port);
    stream.emplace(listener.accept_one());
  } else {
    auto [host, port] = parse_endpoint(cfg.connect);
    stream.emplace(TcpStream::connect(host, port));
  }

  SessionReport report;
  report.role = cfg.role;
  try {
    if (cfg.role == Role::carol) {
      run_carol(cfg, *stream, *rng, timestamp, ds, report);
    } else {
      run_felix(cfg, *stream, *rng, timestamp, ds, report);
    }
    report.success = true;
  } catch (const Error& e) {
    report.outcome = e.what();
    report.transcript.outcome = std::string("abort: ") + e.what();
    if (!cfg.transcript_path.empty()) {
      write_transcript_file(cfg.transcript_path, report.transcript);
    }
    throw;
  }
  if (!cfg.transcript_path.empty()) {
    write_transcript_file(cfg.transcript_path, report.transcript);
  }
  return report;
}

LocalReports run_local(const std::string& carol_csv,
                       const std::string& felix_csv,
                       protocol::BlindingVariant variant, unsigned key_bits,
                       const LocalOptions& opts) {
  check_key_bits(key_bits);
  auto rng = make_rng(opts.seed);

  protocol::SessionOptions sopts;
  sopts.timestamp = make_timestamp(opts.seed);

  const Dataset cd = load_dataset(carol_csv, opts.id_column, opts.value_column);
  const Dataset fd = load_dataset(felix_csv, opts.id_column, opts.value_column);
  const chi2::BinaryVector c = cd.values();
  const chi2::BinaryVector f = align(cd.ids(), fd);

  auto outcome = protocol::run_session(
      c, f, variant, paillier::SecurityParameter::for_modulus_bits(key_bits),
      *rng, sopts);

  LocalReports reports;
  reports.carol.role = Role::carol;
  reports.carol.success = true;
  reports.carol.transcript = std::move(outcome.carol_view);
  fill_carol_result(reports.carol, outcome.chi2_value);

  reports.felix.role = Role::felix;
  reports.felix.success = true;
  reports.felix.outcome = "completed";
  reports.felix.transcript = std::move(outcome.felix_view);
  reports.felix.transcript.outcome = "completed";

  if (!opts.carol_transcript.empty()) {
    write_transcript_file(opts.carol_transcript, reports.carol.transcript);
  }
  if (!opts.felix_transcript.empty()) {
    write_transcript_file(opts.felix_transcript, reports.felix.transcript);
  }
  return reports;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingColumn:
    case ErrorCode::NonBinaryValue:
    case ErrorCode::DuplicateId:
    case ErrorCode::IdSetMismatch:
    case ErrorCode::DegenerateClassVector:
    case ErrorCode::DegenerateFeatureVector:
    case ErrorCode::DegenerateTable:
    case ErrorCode::LengthMismatch:
    case ErrorCode::KeyTooSmall:
    case ErrorCode::InputUnreadable:
      return 2;
    case ErrorCode::TransportError:
      return 4;
    default:
      return 3;  // protocol abort
  }
}

void write_transcript_file(const std::string& path,
                           const protocol::Transcript& transcript) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::InputUnreadable,
                "cannot write transcript " + path);
  }
  for (const auto& e : transcript.entries) {
    out << "direction="
        << (e.direction == TranscriptEntry::Direction::sent ? "sent"
                                                            : "received")
        << " round=" << e.round << " sha256=" << digest_hex(e.payload_digest)
        << " length=" << e.payload_length << " timestamp=" << e.timestamp
        << "\n";
  }
  out << "outcome=" << transcript.outcome << "\n";
}

}  // namespace x2fs::runner
