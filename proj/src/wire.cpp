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

#include "x2fs/wire.hpp"

#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <array>
#include <chrono>
#include <cstring>
#include <thread>

namespace x2fs::runner {

namespace {

struct AddrInfo {
  addrinfo* res = nullptr;
  ~AddrInfo() {
    if (res) freeaddrinfo(res);
  }
};

AddrInfo resolve(const std::string& host, uint16_t port) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  AddrInfo out;
  const std::string service = std::to_string(port);
  if (getaddrinfo(host.c_str(), service.c_str(), &hints, &out.res) != 0 ||
      out.res == nullptr) {
    throw Error(ErrorCode::TransportError, "cannot resolve " + host);
  }
  return out;
}

}  // namespace

TcpStream::~TcpStream() {
  if (fd_ >= 0) close(fd_);
}

TcpStream TcpStream::connect(const std::string& host, uint16_t port) {
  const auto deadline =
      std::chrono::steady_clock::now() + std::chrono::seconds(10);
  for (;;) {
    AddrInfo info = resolve(host, port);
    for (addrinfo* ai = info.res; ai != nullptr; ai = ai->ai_next) {
      int fd = socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
      if (fd < 0) continue;
      if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) {
        int one = 1;
        setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
        return TcpStream(fd);
      }
      close(fd);
    }
    if (std::chrono::steady_clock::now() >= deadline) {
      throw Error(ErrorCode::TransportError,
                  "cannot connect to " + host + ":" + std::to_string(port));
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
  }
}

void TcpStream::write_all(std::span<const uint8_t> data) {
  const uint8_t* p = data.data();
  size_t left = data.size();
  while (left > 0) {
    ssize_t sent = ::send(fd_, p, left, MSG_NOSIGNAL);
    if (sent <= 0) {
      if (sent < 0 && errno == EINTR) continue;
      throw Error(ErrorCode::TransportError, "send failed");
    }
    p += sent;
    left -= static_cast<size_t>(sent);
  }
}

void TcpStream::read_all(std::span<uint8_t> out) {
  uint8_t* p = out.data();
  size_t left = out.size();
  while (left > 0) {
    ssize_t got = ::recv(fd_, p, left, 0);
    if (got == 0) {
      throw Error(ErrorCode::TransportError, "peer closed the connection");
    }
    if (got < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::TransportError, "recv failed");
    }
    p += got;
    left -= static_cast<size_t>(got);
  }
}

TcpListener::~TcpListener() {
  if (fd_ >= 0) close(fd_);
}

TcpListener TcpListener::bind(const std::string& host, uint16_t port) {
  AddrInfo info = resolve(host, port);
  for (addrinfo* ai = info.res; ai != nullptr; ai = ai->ai_next) {
    int fd = socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    int one = 1;
    setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    if (::bind(fd, ai->ai_addr, ai->ai_addrlen) == 0 && ::listen(fd, 1) == 0) {
      sockaddr_storage addr{};
      socklen_t len = sizeof(addr);
      uint16_t bound = port;
      if (getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len) == 0) {
        if (addr.ss_family == AF_INET) {
          bound = ntohs(reinterpret_cast<sockaddr_in*>(&addr)->sin_port);
        } else if (addr.ss_family == AF_INET6) {
          bound = ntohs(reinterpret_cast<sockaddr_in6*>(&addr)->sin6_port);
        }
      }
      return TcpListener(fd, bound);
    }
    close(fd);
  }
  throw Error(ErrorCode::TransportError,
              "cannot listen on " + host + ":" + std::to_string(port));
}

TcpStream TcpListener::accept_one() {
  for (;;) {
    int fd = ::accept(fd_, nullptr, nullptr);
    if (fd >= 0) {
      int one = 1;
      setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
      return TcpStream(fd);
    }
    if (errno != EINTR) {
      throw Error(ErrorCode::TransportError, "accept failed");
    }
  }
}

std::pair<std::string, uint16_t> parse_endpoint(const std::string& endpoint) {
  const size_t colon = endpoint.rfind(':');
  if (colon == std::string::npos || colon == 0 ||
      colon + 1 >= endpoint.size()) {
    throw Error(ErrorCode::TransportError,
                "endpoint must be HOST:PORT, got '" + endpoint + "'");
  }
  const std::string host = endpoint.substr(0, colon);
  const int port = std::stoi(endpoint.substr(colon + 1));
  if (port <= 0 || port > 65535) {
    throw Error(ErrorCode::TransportError, "port out of range");
  }
  return {host, static_cast<uint16_t>(port)};
}

void write_frame(Stream& stream, std::span<const uint8_t> payload) {
  if (payload.size() > kMaxFramePayload) {
    throw Error(ErrorCode::TransportError, "frame payload exceeds 64 MiB");
  }
  Bytes header;
  append_u32_be(header, static_cast<uint32_t>(payload.size()));
  header.push_back(kFrameVersion);
  stream.write_all(header);
  stream.write_all(payload);
}

Bytes read_frame(Stream& stream) {
  std::array<uint8_t, 5> header;
  stream.read_all(header);
  const uint32_t length = read_u32_be(std::span<const uint8_t>(header).first(4));
  if (length > kMaxFramePayload) {
    throw Error(ErrorCode::TransportError, "frame payload exceeds 64 MiB");
  }
  if (header[4] != kFrameVersion) {
    throw Error(ErrorCode::HandshakeVersionMismatch,
                "peer speaks protocol version " + std::to_string(header[4]));
  }
  Bytes payload(length);
  stream.read_all(payload);
  return payload;
}

Bytes encode_handshake(const Handshake& hs) {
  Bytes out;
  out.insert(out.end(), kHandshakeMagic, kHandshakeMagic + 4);
  out.push_back(static_cast<uint8_t>(hs.variant));
  append_u32_be(out, static_cast<uint32_t>(hs.record_ids.size()));
  for (const auto& id : hs.record_ids) {
    append_u32_be(out, static_cast<uint32_t>(id.size()));
    out.insert(out.end(), id.begin(), id.end());
  }
  return out;
}

Handshake parse_handshake(std::span<const uint8_t> payload) {
  ByteReader in(payload);
  std::span<const uint8_t> magic;
  if (!in.try_bytes(4, magic) ||
      std::memcmp(magic.data(), kHandshakeMagic, 4) != 0) {
    throw Error(ErrorCode::BadHandshake, "missing X2FS magic");
  }
  uint8_t variant = 0;
  uint32_t count = 0;
  if (!in.try_u8(variant) ||
      (variant != static_cast<uint8_t>(
                      protocol::BlindingVariant::multiplicative) &&
       variant != static_cast<uint8_t>(protocol::BlindingVariant::additive)) ||
      !in.try_u32(count)) {
    throw Error(ErrorCode::BadHandshake, "malformed handshake");
  }
  Handshake hs{static_cast<protocol::BlindingVariant>(variant), {}};
  hs.record_ids.reserve(std::min<size_t>(count, in.remaining() / 4 + 1));
  for (uint32_t i = 0; i < count; ++i) {
    uint32_t len = 0;
    std::span<const uint8_t> id;
    if (!in.try_u32(len) || !in.try_bytes(len, id)) {
      throw Error(ErrorCode::BadHandshake, "truncated id list");
    }
    hs.record_ids.emplace_back(id.begin(), id.end());
  }
  if (!in.done()) {
    throw Error(ErrorCode::BadHandshake, "trailing bytes after handshake");
  }
  return hs;
}

Bytes encode_abort(const Abort& abort) {
  return Bytes{kTagAbort, abort.round, static_cast<uint8_t>(abort.code)};
}

std::optional<Abort> try_parse_abort(std::span<const uint8_t> payload) {
  if (payload.size() != 3 || payload[0] != kTagAbort) return std::nullopt;
  return Abort{payload[1], static_cast<ErrorCode>(payload[2])};
}

}  // namespace x2fs::runner
