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

#include "vsa/pubkey.hpp"

#include <openssl/evp.h>
#include <openssl/kdf.h>
#include <openssl/x509.h>

#include <algorithm>
#include <cstring>

#include "vsa/crypto.hpp"
#include "vsa/error.hpp"

namespace vsa {
namespace {

using PkeyPtr = std::shared_ptr<EVP_PKEY>;

PkeyPtr Wrap(EVP_PKEY* key, const char* what) {
  if (key == nullptr) throw Error(ErrorCode::kCrypto, what);
  return PkeyPtr(key, EVP_PKEY_free);
}

struct MdCtx {
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  ~MdCtx() { EVP_MD_CTX_free(ctx); }
};

struct PkeyCtx {
  EVP_PKEY_CTX* ctx;
  explicit PkeyCtx(EVP_PKEY_CTX* c) : ctx(c) {}
  ~PkeyCtx() { EVP_PKEY_CTX_free(ctx); }
};

const EVP_MD* DigestFor(SignatureScheme scheme) {
  return scheme == SignatureScheme::kRsa2048 ? EVP_sha256() : nullptr;
}

SignatureScheme SchemeByte(uint8_t b) {
  if (b != static_cast<uint8_t>(SignatureScheme::kEd25519) && b != static_cast<uint8_t>(SignatureScheme::kRsa2048)) {
    throw Error(ErrorCode::kDecode, "unknown signature scheme " + std::to_string(b));
  }
  return static_cast<SignatureScheme>(b);
}

void CheckRsaSize(EVP_PKEY* key) {
  if (EVP_PKEY_get_base_id(key) != EVP_PKEY_RSA || EVP_PKEY_get_bits(key) != 2048) {
    throw Error(ErrorCode::kDecode, "expected an RSA-2048 key");
  }
}

}  // namespace

std::string_view SignatureSchemeName(SignatureScheme scheme) {
  return scheme == SignatureScheme::kRsa2048 ? "rsa2048" : "ed25519";
}

SignatureScheme ParseSignatureScheme(std::string_view name) {
  if (name == "ed25519") return SignatureScheme::kEd25519;
  if (name == "rsa2048") return SignatureScheme::kRsa2048;
  throw Error(ErrorCode::kInvalidArgument, "unknown signature scheme '" + std::string(name) + "'");
}

size_t SignatureSize(SignatureScheme scheme) { return scheme == SignatureScheme::kRsa2048 ? 256 : 64; }

bool VerifyKey::Verify(ByteSpan message, ByteSpan signature) const {
  if (!key_ || signature.size() != SignatureSize(scheme_)) return false;
  MdCtx c;
  if (c.ctx == nullptr || EVP_DigestVerifyInit(c.ctx, nullptr, DigestFor(scheme_), nullptr, key_.get()) != 1) {
    throw Error(ErrorCode::kCrypto, "verify init failed");
  }
  return EVP_DigestVerify(c.ctx, signature.data(), signature.size(), message.data(), message.size()) == 1;
}

Bytes VerifyKey::Encode() const {
  if (!key_) throw Error(ErrorCode::kInvalidArgument, "empty verification key");
  Bytes out{static_cast<uint8_t>(scheme_)};
  if (scheme_ == SignatureScheme::kEd25519) {
    size_t len = 32;
    out.resize(1 + len);
    if (EVP_PKEY_get_raw_public_key(key_.get(), out.data() + 1, &len) != 1 || len != 32) {
      throw Error(ErrorCode::kCrypto, "raw public key export failed");
    }
    return out;
  }
  unsigned char* der = nullptr;
  int len = i2d_PUBKEY(key_.get(), &der);
  if (len <= 0) throw Error(ErrorCode::kCrypto, "public key export failed");
  out.insert(out.end(), der, der + len);
  OPENSSL_free(der);
  return out;
}

VerifyKey VerifyKey::Decode(ByteSpan bytes) {
  if (bytes.empty()) throw Error(ErrorCode::kDecode, "empty verification key");
  VerifyKey k;
  k.scheme_ = SchemeByte(bytes[0]);
  ByteSpan body = bytes.subspan(1);
  if (k.scheme_ == SignatureScheme::kEd25519) {
    if (body.size() != 32) throw Error(ErrorCode::kDecode, "Ed25519 public key must be 32 bytes");
    k.key_ = Wrap(EVP_PKEY_new_raw_public_key(EVP_PKEY_ED25519, nullptr, body.data(), body.size()),
                  "bad Ed25519 public key");
    return k;
  }
  const unsigned char* p = body.data();
  EVP_PKEY* raw = d2i_PUBKEY(nullptr, &p, static_cast<long>(body.size()));
  if (raw == nullptr || p != body.data() + body.size()) {
    EVP_PKEY_free(raw);
    throw Error(ErrorCode::kDecode, "bad RSA public key");
  }
  k.key_ = Wrap(raw, "bad RSA public key");
  CheckRsaSize(raw);
  return k;
}

SigningKey SigningKey::Generate(SignatureScheme scheme) {
  SigningKey k;
  k.scheme_ = scheme;
  if (scheme == SignatureScheme::kEd25519) {
    k.key_ = Wrap(EVP_PKEY_Q_keygen(nullptr, nullptr, "ED25519"), "Ed25519 keygen failed");
  } else {
    k.key_ = Wrap(EVP_PKEY_Q_keygen(nullptr, nullptr, "RSA", static_cast<size_t>(2048)), "RSA keygen failed");
  }
  return k;
}

SigningKey SigningKey::Ed25519FromSeed(const std::array<uint8_t, 32>& seed) {
  SigningKey k;
  k.scheme_ = SignatureScheme::kEd25519;
  k.key_ = Wrap(EVP_PKEY_new_raw_private_key(EVP_PKEY_ED25519, nullptr, seed.data(), seed.size()),
                "Ed25519 key from seed failed");
  return k;
}

Bytes SigningKey::Sign(ByteSpan message) const {
  if (!key_) throw Error(ErrorCode::kCrypto, "empty signing key");
  MdCtx c;
  size_t len = SignatureSize(scheme_);
  Bytes sig(len);
  if (c.ctx == nullptr || EVP_DigestSignInit(c.ctx, nullptr, DigestFor(scheme_), nullptr, key_.get()) != 1 ||
      EVP_DigestSign(c.ctx, sig.data(), &len, message.data(), message.size()) != 1 || len != sig.size()) {
    throw Error(ErrorCode::kCrypto, "signing failed");
  }
  return sig;
}

VerifyKey SigningKey::Public() const {
  if (!key_) throw Error(ErrorCode::kCrypto, "empty signing key");
  VerifyKey v;
  v.scheme_ = scheme_;
  if (scheme_ == SignatureScheme::kEd25519) {
    std::array<uint8_t, 32> pub{};
    size_t len = pub.size();
    if (EVP_PKEY_get_raw_public_key(key_.get(), pub.data(), &len) != 1) {
      throw Error(ErrorCode::kCrypto, "raw public key export failed");
    }
    v.key_ = Wrap(EVP_PKEY_new_raw_public_key(EVP_PKEY_ED25519, nullptr, pub.data(), len), "public key failed");
    return v;
  }
  unsigned char* der = nullptr;
  int len = i2d_PUBKEY(key_.get(), &der);
  if (len <= 0) throw Error(ErrorCode::kCrypto, "public key export failed");
  const unsigned char* p = der;
  EVP_PKEY* raw = d2i_PUBKEY(nullptr, &p, len);
  OPENSSL_free(der);
  v.key_ = Wrap(raw, "public key import failed");
  return v;
}

Bytes SigningKey::Encode() const {
  if (!key_) throw Error(ErrorCode::kInvalidArgument, "empty signing key");
  Bytes out{static_cast<uint8_t>(scheme_)};
  if (scheme_ == SignatureScheme::kEd25519) {
    size_t len = 32;
    out.resize(1 + len);
    if (EVP_PKEY_get_raw_private_key(key_.get(), out.data() + 1, &len) != 1 || len != 32) {
      throw Error(ErrorCode::kCrypto, "raw private key export failed");
    }
    return out;
  }
  unsigned char* der = nullptr;
  int len = i2d_PrivateKey(key_.get(), &der);
  if (len <= 0) throw Error(ErrorCode::kCrypto, "private key export failed");
  out.insert(out.end(), der, der + len);
  OPENSSL_cleanse(der, len);
  OPENSSL_free(der);
  return out;
}

SigningKey SigningKey::Decode(ByteSpan bytes) {
  if (bytes.empty()) throw Error(ErrorCode::kDecode, "empty signing key");
  SignatureScheme scheme = SchemeByte(bytes[0]);
  ByteSpan body = bytes.subspan(1);
  if (scheme == SignatureScheme::kEd25519) {
    if (body.size() != 32) throw Error(ErrorCode::kDecode, "Ed25519 private key must be 32 bytes");
    std::array<uint8_t, 32> seed{};
    std::copy(body.begin(), body.end(), seed.begin());
    return Ed25519FromSeed(seed);
  }
  SigningKey k;
  k.scheme_ = scheme;
  const unsigned char* p = body.data();
  EVP_PKEY* raw = d2i_AutoPrivateKey(nullptr, &p, static_cast<long>(body.size()));
  k.key_ = Wrap(raw, "bad RSA private key");
  CheckRsaSize(raw);
  return k;
}

namespace {

PkeyPtr X25519Private(const X25519Bytes& secret) {
  return Wrap(EVP_PKEY_new_raw_private_key(EVP_PKEY_X25519, nullptr, secret.data(), secret.size()),
              "X25519 private key failed");
}

X25519Bytes X25519PublicOf(const X25519Bytes& secret) {
  PkeyPtr key = X25519Private(secret);
  X25519Bytes pub{};
  size_t len = pub.size();
  if (EVP_PKEY_get_raw_public_key(key.get(), pub.data(), &len) != 1 || len != 32) {
    throw Error(ErrorCode::kCrypto, "X25519 public key failed");
  }
  return pub;
}

X25519Bytes X25519Shared(const X25519Bytes& secret, const X25519Bytes& peer_public) {
  PkeyPtr mine = X25519Private(secret);
  PkeyPtr peer = Wrap(EVP_PKEY_new_raw_public_key(EVP_PKEY_X25519, nullptr, peer_public.data(), peer_public.size()),
                      "X25519 peer key failed");
  PkeyCtx c(EVP_PKEY_CTX_new(mine.get(), nullptr));
  X25519Bytes shared{};
  size_t len = shared.size();
  if (c.ctx == nullptr || EVP_PKEY_derive_init(c.ctx) != 1 || EVP_PKEY_derive_set_peer(c.ctx, peer.get()) != 1 ||
      EVP_PKEY_derive(c.ctx, shared.data(), &len) != 1 || len != 32) {
    throw Error(ErrorCode::kCrypto, "X25519 key agreement failed");
  }
  // Low-order peer points give an all-zero secret.
  if (std::all_of(shared.begin(), shared.end(), [](uint8_t b) { return b == 0; })) {
    throw Error(ErrorCode::kCrypto, "degenerate X25519 shared secret");
  }
  return shared;
}

struct DemKey {
  Key256 key;
  GcmNonce nonce;
};

DemKey Hkdf(const X25519Bytes& shared, const X25519Bytes& eph_pub, const X25519Bytes& recipient) {
  static constexpr std::string_view kInfo = "vsa-kem-v1";
  std::array<uint8_t, 64> salt{};
  std::copy(eph_pub.begin(), eph_pub.end(), salt.begin());
  std::copy(recipient.begin(), recipient.end(), salt.begin() + 32);
  std::array<uint8_t, 44> okm{};
  size_t len = okm.size();
  PkeyCtx c(EVP_PKEY_CTX_new_id(EVP_PKEY_HKDF, nullptr));
  if (c.ctx == nullptr || EVP_PKEY_derive_init(c.ctx) != 1 || EVP_PKEY_CTX_set_hkdf_md(c.ctx, EVP_sha256()) != 1 ||
      EVP_PKEY_CTX_set1_hkdf_salt(c.ctx, salt.data(), salt.size()) != 1 ||
      EVP_PKEY_CTX_set1_hkdf_key(c.ctx, shared.data(), shared.size()) != 1 ||
      EVP_PKEY_CTX_add1_hkdf_info(c.ctx, reinterpret_cast<const unsigned char*>(kInfo.data()), kInfo.size()) != 1 ||
      EVP_PKEY_derive(c.ctx, okm.data(), &len) != 1) {
    throw Error(ErrorCode::kCrypto, "HKDF failed");
  }
  DemKey out;
  std::copy(okm.begin(), okm.begin() + 32, out.key.begin());
  std::copy(okm.begin() + 32, okm.end(), out.nonce.begin());
  OPENSSL_cleanse(okm.data(), okm.size());
  return out;
}

}  // namespace

Bytes KemPublicKey::Seal(ByteSpan plaintext, ByteSpan aad) const {
  X25519Bytes eph{};
  RandomBytes(eph);
  X25519Bytes eph_pub = X25519PublicOf(eph);
  DemKey dem = Hkdf(X25519Shared(eph, bytes_), eph_pub, bytes_);
  OPENSSL_cleanse(eph.data(), eph.size());
  Bytes out(eph_pub.begin(), eph_pub.end());
  Bytes body = Aes256GcmSeal(dem.key, dem.nonce, aad, plaintext);
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

KemPrivateKey KemPrivateKey::Generate() {
  X25519Bytes secret{};
  RandomBytes(secret);
  return FromBytes(secret);
}

KemPrivateKey KemPrivateKey::FromBytes(const X25519Bytes& secret) {
  KemPrivateKey k;
  k.secret_ = secret;
  return k;
}

KemPublicKey KemPrivateKey::Public() const { return KemPublicKey(X25519PublicOf(secret_)); }

Bytes KemPrivateKey::Open(ByteSpan sealed, ByteSpan aad) const {
  if (sealed.size() < kKemOverhead) throw Error(ErrorCode::kCrypto, "sealed box too short");
  X25519Bytes eph_pub{};
  std::copy(sealed.begin(), sealed.begin() + 32, eph_pub.begin());
  DemKey dem = Hkdf(X25519Shared(secret_, eph_pub), eph_pub, Public().bytes());
  auto plain = Aes256GcmOpen(dem.key, dem.nonce, aad, sealed.subspan(32));
  if (!plain) throw Error(ErrorCode::kCrypto, "sealed box failed authentication");
  return std::move(*plain);
}

}  // namespace vsa
