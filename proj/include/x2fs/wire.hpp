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
#include <optional>
#include <string>
#include <vector>

#include "x2fs/bytes.hpp"
#include "x2fs/errors.hpp"
#include "x2fs/protocol.hpp"

namespace x2fs::runner {

// Frame layout: 4-byte big-endian payload length, 1-byte protocol version,
// payload bytes.
inline constexpr uint8_t kFrameVersion = 0x01;
inline constexpr size_t kMaxFramePayload = 64ull << 20;
inline constexpr char kHandshakeMagic[4] = {'X', '2', 'F', 'S'};
inline constexpr uint8_t kTagAbort = 0x7f;

class Stream {
 public:
  virtual ~Stream() = default;
  virtual void write_all(std::span<const uint8_t> data) = 0;
  virtual void read_all(std::span<uint8_t> out) = 0;  // throws on EOF
};

class TcpStream final : public Stream {
 public:
  explicit TcpStream(int fd) : fd_(fd) {}
  TcpStream(TcpStream&& o) noexcept : fd_(o.fd_) { o.fd_ = -1; }
  TcpStream& operator=(TcpStream&&) = delete;
  ~TcpStream() override;

  // Retries for a few seconds while the listener comes up.
  static TcpStream connect(const std::string& host, uint16_t port);

  void write_all(std::span<const uint8_t> data) override;
  void read_all(std::span<uint8_t> out) override;

 private:
  int fd_;
};

class TcpListener {
 public:
  static TcpListener bind(const std::string& host, uint16_t port);
  TcpListener(TcpListener&& o) noexcept : fd_(o.fd_) { o.fd_ = -1; }
  ~TcpListener();

  TcpStream accept_one();
  uint16_t port() const { return port_; }

 private:
  TcpListener(int fd, uint16_t port) : fd_(fd), port_(port) {}
  int fd_;
  uint16_t port_;
};

// "host:port"
std::pair<std::string, uint16_t> parse_endpoint(const std::string& endpoint);

void write_frame(Stream& stream, std::span<const uint8_t> payload);
// Throws HandshakeVersionMismatch on a foreign version byte and
// TransportError on oversized or truncated frames.
Bytes read_frame(Stream& stream);

struct Handshake {
  protocol::BlindingVariant variant;
  std::vector<std::string> record_ids;  // Carol's row order
};

Bytes encode_handshake(const Handshake& hs);
Handshake parse_handshake(std::span<const uint8_t> payload);

struct Abort {
  uint8_t round;
  ErrorCode code;
};

Bytes encode_abort(const Abort& abort);
// Engaged when the payload is an abort notice.
std::optional<Abort> try_parse_abort(std::span<const uint8_t> payload);

}  // namespace x2fs::runner
