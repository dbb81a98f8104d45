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

// Public-key primitives backed by OpenSSL.
//
// Signatures: Ed25519 (64-byte signatures) or RSA-2048 with PKCS#1 v1.5
// padding over SHA-256 (256-byte signatures).
//
// Hybrid encryption: X25519 key agreement with an ephemeral key, HKDF-SHA256
// over the shared secret, AES-256-GCM for the payload. Sealed layout:
//   ephemeral public key (32) | ciphertext | GCM tag (16)

#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string_view>

#include "vsa/bytes.hpp"

struct evp_pkey_st;

namespace vsa {

enum class SignatureScheme : uint8_t { kEd25519 = 1, kRsa2048 = 2 };

std::string_view SignatureSchemeName(SignatureScheme scheme);
SignatureScheme ParseSignatureScheme(std::string_view name);
size_t SignatureSize(SignatureScheme scheme);

class VerifyKey {
 public:
  VerifyKey() = default;

  SignatureScheme scheme() const { return scheme_; }
  bool valid() const { return key_ != nullptr; }
  bool Verify(ByteSpan message, ByteSpan signature) const;

  // scheme byte | raw key (Ed25519) or DER SubjectPublicKeyInfo (RSA).
  Bytes Encode() const;
  static VerifyKey Decode(ByteSpan bytes);
  friend bool operator==(const VerifyKey& a, const VerifyKey& b) { return a.Encode() == b.Encode(); }

 private:
  friend class SigningKey;
  SignatureScheme scheme_ = SignatureScheme::kEd25519;
  std::shared_ptr<evp_pkey_st> key_;
};

class SigningKey {
 public:
  SigningKey() = default;

  static SigningKey Generate(SignatureScheme scheme);
  // Deterministic Ed25519 key from a 32-byte seed (fixtures and tests).
  static SigningKey Ed25519FromSeed(const std::array<uint8_t, 32>& seed);

  SignatureScheme scheme() const { return scheme_; }
  bool valid() const { return key_ != nullptr; }
  Bytes Sign(ByteSpan message) const;
  VerifyKey Public() const;

  // scheme byte | raw seed (Ed25519) or DER PKCS#8 (RSA).
  Bytes Encode() const;
  static SigningKey Decode(ByteSpan bytes);

 private:
  SignatureScheme scheme_ = SignatureScheme::kEd25519;
  std::shared_ptr<evp_pkey_st> key_;
};

using X25519Bytes = std::array<uint8_t, 32>;

class KemPublicKey {
 public:
  KemPublicKey() = default;
  explicit KemPublicKey(const X25519Bytes& bytes) : bytes_(bytes) {}

  const X25519Bytes& bytes() const { return bytes_; }
  // Fresh ephemeral key per call. `aad` is bound but not transmitted.
  Bytes Seal(ByteSpan plaintext, ByteSpan aad) const;
  friend bool operator==(const KemPublicKey&, const KemPublicKey&) = default;

 private:
  X25519Bytes bytes_{};
};

class KemPrivateKey {
 public:
  KemPrivateKey() = default;
  static KemPrivateKey Generate();
  static KemPrivateKey FromBytes(const X25519Bytes& secret);

  const X25519Bytes& secret() const { return secret_; }
  KemPublicKey Public() const;
  // Throws Error(kCrypto) when the sealed bytes fail authentication.
  Bytes Open(ByteSpan sealed, ByteSpan aad) const;

 private:
  X25519Bytes secret_{};
};

inline constexpr size_t kKemOverhead = 32 + 16;

}  // namespace vsa
