/*
 * Copyright 2026 The VSA Authors.
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

// Symmetric primitives backed by OpenSSL: SHA3, the AES-128 block function
// and an AES-CTR pseudorandom generator.

#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string_view>

#include "vsa/bytes.hpp"
#include "vsa/field.hpp"

namespace vsa {

using Digest256 = std::array<uint8_t, 32>;
using Digest512 = std::array<uint8_t, 64>;
using Block128 = std::array<uint8_t, 16>;

Digest256 Sha3_256(ByteSpan data);
Digest512 Sha3_512(ByteSpan data);

void RandomBytes(std::span<uint8_t> out);

// AES-256-GCM with a 12-byte nonce; output is ciphertext || 16-byte tag.
using Key256 = std::array<uint8_t, 32>;
using GcmNonce = std::array<uint8_t, 12>;
Bytes Aes256GcmSeal(const Key256& key, const GcmNonce& nonce, ByteSpan aad, ByteSpan plaintext);
// Returns nullopt when authentication fails.
std::optional<Bytes> Aes256GcmOpen(const Key256& key, const GcmNonce& nonce, ByteSpan aad, ByteSpan sealed);

// AES-128 block encryption (ECB over whole blocks). Move-only.
class Aes128 {
 public:
  explicit Aes128(const Block128& key);
  ~Aes128();
  Aes128(Aes128&&) noexcept;
  Aes128& operator=(Aes128&&) noexcept;

  Block128 Encrypt(const Block128& in) const;
  // `in` and `out` hold `blocks` consecutive 16-byte blocks; may alias.
  void EncryptBlocks(const uint8_t* in, uint8_t* out, size_t blocks) const;

 private:
  struct Ctx;
  std::unique_ptr<Ctx> ctx_;
};

// AES-128 in counter mode as a seekable pseudorandom generator.
// Block i of the stream is AES_k(i) with i encoded little-endian.
class Prg {
 public:
  using Key = Block128;

  explicit Prg(const Key& key) : aes_(key) {}
  // Deterministic generator: key = first 16 bytes of SHA3-256(domain || seed).
  static Prg FromSeed(uint64_t seed, std::string_view domain = "vsa-prg");
  // Keyed from OS randomness.
  static Prg Secure();

  void Fill(std::span<uint8_t> out);
  uint64_t NextU64();
  bool NextBit() { return (NextU64() & 1) != 0; }
  Key NextKey();
  // Uniform element by rejection sampling.
  FieldElement NextField(const FieldParams& params);

  // Random access to the stream; does not move the sequential cursor.
  void BlocksAt(uint64_t first_block, size_t count, uint8_t* out) const;

 private:
  Aes128 aes_;
  uint64_t next_block_ = 0;
  Block128 buffer_{};
  size_t buffer_pos_ = 16;
};

}  // namespace vsa
