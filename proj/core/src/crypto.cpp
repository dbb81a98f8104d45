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

#include "vsa/crypto.hpp"

#include <openssl/evp.h>
#include <openssl/rand.h>

#include <cstring>
#include <vector>

#include "vsa/error.hpp"

namespace vsa {
namespace {

template <size_t N>
std::array<uint8_t, N> Digest(const EVP_MD* md, ByteSpan data) {
  std::array<uint8_t, N> out{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), out.data(), &len, md, nullptr) != 1 || len != N) {
    throw Error(ErrorCode::kCrypto, "digest failed");
  }
  return out;
}

}  // namespace

Digest256 Sha3_256(ByteSpan data) { return Digest<32>(EVP_sha3_256(), data); }
Digest512 Sha3_512(ByteSpan data) { return Digest<64>(EVP_sha3_512(), data); }

void RandomBytes(std::span<uint8_t> out) {
  if (RAND_bytes(out.data(), static_cast<int>(out.size())) != 1) {
    throw Error(ErrorCode::kCrypto, "RAND_bytes failed");
  }
}

namespace {

struct CipherCtx {
  EVP_CIPHER_CTX* ctx = EVP_CIPHER_CTX_new();
  ~CipherCtx() { EVP_CIPHER_CTX_free(ctx); }
};

}  // namespace

Bytes Aes256GcmSeal(const Key256& key, const GcmNonce& nonce, ByteSpan aad, ByteSpan plaintext) {
  CipherCtx c;
  Bytes out(plaintext.size() + 16);
  int len = 0;
  int total = 0;
  bool ok = c.ctx != nullptr &&
            EVP_EncryptInit_ex(c.ctx, EVP_aes_256_gcm(), nullptr, key.data(), nonce.data()) == 1 &&
            EVP_EncryptUpdate(c.ctx, nullptr, &len, aad.data(), static_cast<int>(aad.size())) == 1 &&
            EVP_EncryptUpdate(c.ctx, out.data(), &len, plaintext.data(), static_cast<int>(plaintext.size())) == 1;
  total = len;
  ok = ok && EVP_EncryptFinal_ex(c.ctx, out.data() + total, &len) == 1;
  total += len;
  ok = ok && EVP_CIPHER_CTX_ctrl(c.ctx, EVP_CTRL_GCM_GET_TAG, 16, out.data() + total) == 1;
  if (!ok || static_cast<size_t>(total) != plaintext.size()) throw Error(ErrorCode::kCrypto, "AES-GCM seal failed");
  return out;
}

std::optional<Bytes> Aes256GcmOpen(const Key256& key, const GcmNonce& nonce, ByteSpan aad, ByteSpan sealed) {
  if (sealed.size() < 16) return std::nullopt;
  size_t n = sealed.size() - 16;
  CipherCtx c;
  Bytes out(n);
  int len = 0;
  uint8_t tag[16];
  std::memcpy(tag, sealed.data() + n, 16);
  if (c.ctx == nullptr ||
      EVP_DecryptInit_ex(c.ctx, EVP_aes_256_gcm(), nullptr, key.data(), nonce.data()) != 1 ||
      EVP_DecryptUpdate(c.ctx, nullptr, &len, aad.data(), static_cast<int>(aad.size())) != 1 ||
      EVP_DecryptUpdate(c.ctx, out.data(), &len, sealed.data(), static_cast<int>(n)) != 1 ||
      EVP_CIPHER_CTX_ctrl(c.ctx, EVP_CTRL_GCM_SET_TAG, 16, tag) != 1) {
    throw Error(ErrorCode::kCrypto, "AES-GCM open failed");
  }
  int fin = 0;
  if (EVP_DecryptFinal_ex(c.ctx, out.data() + len, &fin) != 1) return std::nullopt;
  return out;
}

struct Aes128::Ctx {
  EVP_CIPHER_CTX* ctx = nullptr;
  ~Ctx() { EVP_CIPHER_CTX_free(ctx); }
};

Aes128::Aes128(const Block128& key) : ctx_(std::make_unique<Ctx>()) {
  ctx_->ctx = EVP_CIPHER_CTX_new();
  if (ctx_->ctx == nullptr ||
      EVP_EncryptInit_ex(ctx_->ctx, EVP_aes_128_ecb(), nullptr, key.data(), nullptr) != 1) {
    throw Error(ErrorCode::kCrypto, "AES key setup failed");
  }
  EVP_CIPHER_CTX_set_padding(ctx_->ctx, 0);
}

Aes128::~Aes128() = default;
Aes128::Aes128(Aes128&&) noexcept = default;
Aes128& Aes128::operator=(Aes128&&) noexcept = default;

void Aes128::EncryptBlocks(const uint8_t* in, uint8_t* out, size_t blocks) const {
  int len = 0;
  if (EVP_EncryptUpdate(ctx_->ctx, out, &len, in, static_cast<int>(blocks * 16)) != 1 ||
      static_cast<size_t>(len) != blocks * 16) {
    throw Error(ErrorCode::kCrypto, "AES encryption failed");
  }
}

Block128 Aes128::Encrypt(const Block128& in) const {
  Block128 out{};
  EncryptBlocks(in.data(), out.data(), 1);
  return out;
}

Prg Prg::FromSeed(uint64_t seed, std::string_view domain) {
  ByteWriter w;
  w.Str(domain);
  w.U64(seed);
  Digest256 d = Sha3_256(w.bytes());
  Key key{};
  std::memcpy(key.data(), d.data(), 16);
  return Prg(key);
}

Prg Prg::Secure() {
  Key key{};
  RandomBytes(key);
  return Prg(key);
}

void Prg::BlocksAt(uint64_t first_block, size_t count, uint8_t* out) const {
  std::memset(out, 0, count * 16);
  for (size_t i = 0; i < count; ++i) {
    uint64_t idx = first_block + i;
    for (int b = 0; b < 8; ++b) out[16 * i + static_cast<size_t>(b)] = static_cast<uint8_t>(idx >> (8 * b));
  }
  aes_.EncryptBlocks(out, out, count);
}

void Prg::Fill(std::span<uint8_t> out) {
  size_t pos = 0;
  while (pos < out.size()) {
    if (buffer_pos_ == 16) {
      // Bulk path for whole blocks.
      size_t whole = (out.size() - pos) / 16;
      if (whole > 0) {
        BlocksAt(next_block_, whole, out.data() + pos);
        next_block_ += whole;
        pos += whole * 16;
        continue;
      }
      BlocksAt(next_block_++, 1, buffer_.data());
      buffer_pos_ = 0;
    }
    size_t take = std::min<size_t>(16 - buffer_pos_, out.size() - pos);
    std::memcpy(out.data() + pos, buffer_.data() + buffer_pos_, take);
    buffer_pos_ += take;
    pos += take;
  }
}

uint64_t Prg::NextU64() {
  uint8_t b[8];
  Fill(b);
  uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

Prg::Key Prg::NextKey() {
  Key k{};
  Fill(k);
  return k;
}

FieldElement Prg::NextField(const FieldParams& params) {
  if (params.is_production()) {
    const Uint192& p = params.modulus();
    uint8_t b[17];
    for (;;) {
      Fill(b);
      Uint192 v;
      for (int i = 15; i >= 0; --i) v.lo = (v.lo << 8) | b[i];
      v.hi = b[16] & 1;
      if (v < p) return FieldElement::FromInteger(params, v);
    }
  }
  uint64_t p = static_cast<uint64_t>(params.modulus().lo);
  uint64_t mask = 1;
  while (mask < p) mask = (mask << 1) | 1;
  for (;;) {
    uint64_t v = NextU64() & mask;
    if (v < p) return FieldElement(params, v);
  }
}

}  // namespace vsa
