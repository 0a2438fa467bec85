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

#include "x2fs/random.hpp"

#include <openssl/evp.h>
#include <sys/random.h>

#include <array>
#include <cstring>
#include <stdexcept>

#include "x2fs/digest.hpp"

namespace x2fs {

void SystemRandom::fill(std::span<uint8_t> out) {
  uint8_t* p = out.data();
  size_t left = out.size();
  while (left > 0) {
    ssize_t got = getrandom(p, left, 0);
    if (got < 0) {
      if (errno == EINTR) continue;
      throw std::runtime_error("getrandom failed");
    }
    p += got;
    left -= static_cast<size_t>(got);
  }
}

struct SeededRandom::Impl {
  EVP_CIPHER_CTX* ctx = nullptr;
  ~Impl() {
    if (ctx) EVP_CIPHER_CTX_free(ctx);
  }
};

SeededRandom::SeededRandom(std::span<const uint8_t> seed)
    : impl_(std::make_unique<Impl>()) {
  const Sha256Digest key = sha256(seed);
  const std::array<uint8_t, 16> iv{};  // zero counter and nonce
  impl_->ctx = EVP_CIPHER_CTX_new();
  if (!impl_->ctx ||
      EVP_EncryptInit_ex(impl_->ctx, EVP_chacha20(), nullptr, key.data(),
                         iv.data()) != 1) {
    throw std::runtime_error("chacha20 init failed");
  }
}

SeededRandom::SeededRandom(uint64_t seed)
    : SeededRandom([&] {
        std::array<uint8_t, 8> bytes;
        for (int i = 0; i < 8; ++i) {
          bytes[static_cast<size_t>(i)] = static_cast<uint8_t>(seed >> (8 * i));
        }
        return bytes;
      }()) {}

SeededRandom::~SeededRandom() = default;

void SeededRandom::fill(std::span<uint8_t> out) {
  static constexpr std::array<uint8_t, 512> kZeros{};
  uint8_t* p = out.data();
  size_t left = out.size();
  while (left > 0) {
    const int chunk = static_cast<int>(std::min(left, kZeros.size()));
    int written = 0;
    if (EVP_EncryptUpdate(impl_->ctx, p, &written, kZeros.data(), chunk) != 1 ||
        written != chunk) {
      throw std::runtime_error("chacha20 keystream failed");
    }
    p += chunk;
    left -= static_cast<size_t>(chunk);
  }
}

}  // namespace x2fs
