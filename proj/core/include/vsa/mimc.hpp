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

// MiMC over F_p and the modes built on it: tweaked CTR encryption and
// Enc-then-Hash-then-MAC tagging.
//
// Cipher:  x_0 = x,  x_{i+1} = (x_i + k + c_i)^3,  E_k(x) = x_r + k
// with c_0 = 0 and c_i = SHA3-256("VSA-MIMC-v1" || u32le i) mod p.
// Cubing is a permutation because p = 2 (mod 3).

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "vsa/engine.hpp"
#include "vsa/field.hpp"

namespace vsa {

class Mimc {
 public:
  // Standard constants, r = field.mimc_rounds().
  explicit Mimc(const FieldParams& field);
  // Explicit constants (r = constants.size()); used for toy examples.
  Mimc(const FieldParams& field, std::vector<FieldElement> constants);

  // Shared instance with standard constants for a registered field.
  static const Mimc& For(const FieldParams& field);

  const FieldParams& field() const { return *field_; }
  unsigned rounds() const { return static_cast<unsigned>(constants_.size()); }
  const std::vector<FieldElement>& constants() const { return constants_; }

  FieldElement Encrypt(const FieldElement& key, const FieldElement& x) const;
  FieldElement Decrypt(const FieldElement& key, const FieldElement& y) const;

 private:
  const FieldParams* field_;
  std::vector<FieldElement> constants_;
};

// How a shared cube is computed. kSquareMultiply spends two products per
// round (depth 2r); kCubeTuple opens x - s against a preprocessed
// (s, s^2, s^3) and spends one round per cipher round (depth r).
enum class MimcStrategy { kSquareMultiply, kCubeTuple };

unsigned MimcDepth(const Mimc& mimc, MimcStrategy strategy);
TapeCounts MimcNeed(const Mimc& mimc, size_t calls, MimcStrategy strategy);

// E_{keys[i]}(xs[i]) for all i as one parallel chain. A single key is
// broadcast to every input.
Task<std::vector<RepShare>> MimcEncryptShared(Engine& e, const Mimc& mimc, std::vector<RepShare> keys,
                                              std::vector<RepShare> xs, MimcStrategy strategy);

struct TaggedCiphertext {
  FieldElement nonce;
  std::vector<FieldElement> blocks;

  // nonce || u16 block count || blocks, canonical element encodings.
  Bytes Encode() const;
  static TaggedCiphertext Decode(const FieldParams& field, ByteSpan bytes);
  static TaggedCiphertext Read(const FieldParams& field, ByteReader& r);
  friend bool operator==(const TaggedCiphertext&, const TaggedCiphertext&) = default;
};

// Keystream E_k(N + j) for j = 1..len.
std::vector<FieldElement> CtrKeystream(const Mimc& mimc, const FieldElement& key, const FieldElement& tweak,
                                       size_t len);
// N = E_k(nonce), ct_j = m_j + E_k(N + j).
TaggedCiphertext CtrEncrypt(const Mimc& mimc, const FieldElement& key, const FieldElement& nonce,
                            std::span<const FieldElement> message);
std::vector<FieldElement> CtrDecrypt(const Mimc& mimc, const FieldElement& key, const TaggedCiphertext& ct);

// Shared keystream for a known-shared tweak: one parallel chain.
Task<std::vector<RepShare>> CtrKeystreamShared(Engine& e, const Mimc& mimc, RepShare key, RepShare tweak, size_t len,
                                               MimcStrategy strategy);
// Shared ciphertext blocks: a tweak chain followed by a keystream chain.
Task<std::vector<RepShare>> CtrEncryptShared(Engine& e, const Mimc& mimc, RepShare key, RepShare nonce,
                                             std::vector<RepShare> message, MimcStrategy strategy);

// First 128 bits of SHA3-256(nonce || blocks), little-endian, as a field
// element. Below p for the production field.
FieldElement CiphertextDigest(const TaggedCiphertext& ct);

struct HtmacOutput {
  TaggedCiphertext ct;  // CTR encryption of the message under tag_enc, nonce 1
  FieldElement tag;     // E_{tag_mac}(digest(ct))
  friend bool operator==(const HtmacOutput&, const HtmacOutput&) = default;
};

HtmacOutput HtmacTag(const Mimc& mimc, const FieldElement& tag_enc, const FieldElement& tag_mac,
                     std::span<const FieldElement> message);
bool HtmacVerify(const Mimc& mimc, const FieldElement& tag_enc, const FieldElement& tag_mac,
                 std::span<const FieldElement> message, const FieldElement& tag);

// Shared tag over a shared message; ct and tag are opened. When `tweak`
// (= E_{tag_enc}(1)) is supplied by the key holder the tweak chain is
// skipped, leaving one keystream chain, an open and the MAC chain.
Task<HtmacOutput> HtmacTagShared(Engine& e, const Mimc& mimc, RepShare tag_enc, std::optional<RepShare> tweak,
                                 RepShare tag_mac, std::vector<RepShare> message, MimcStrategy strategy);

}  // namespace vsa
