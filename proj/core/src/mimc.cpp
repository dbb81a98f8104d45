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

#include "vsa/mimc.hpp"

#include <map>
#include <mutex>

#include "vsa/crypto.hpp"

namespace vsa {

namespace {

constexpr std::string_view kConstantTag = "VSA-MIMC-v1";

std::vector<FieldElement> StandardConstants(const FieldParams& field) {
  std::vector<FieldElement> c;
  c.reserve(field.mimc_rounds());
  c.push_back(FieldElement::Zero(field));
  for (uint32_t i = 1; i < field.mimc_rounds(); ++i) {
    ByteWriter w;
    w.Str(kConstantTag);
    w.U32(i);
    Digest256 d = Sha3_256(w.bytes());
    c.push_back(FieldElement::FromWide(field, d));
  }
  return c;
}

}  // namespace

Mimc::Mimc(const FieldParams& field) : field_(&field), constants_(StandardConstants(field)) {}

Mimc::Mimc(const FieldParams& field, std::vector<FieldElement> constants)
    : field_(&field), constants_(std::move(constants)) {
  if (constants_.empty()) throw Error(ErrorCode::kInvalidArgument, "MiMC needs at least one round");
}

const Mimc& Mimc::For(const FieldParams& field) {
  static std::mutex mu;
  static std::map<const FieldParams*, std::unique_ptr<Mimc>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[&field];
  if (!slot) slot = std::make_unique<Mimc>(field);
  return *slot;
}

FieldElement Mimc::Encrypt(const FieldElement& key, const FieldElement& x) const {
  FieldElement v = x;
  for (const auto& c : constants_) v = (v + key + c).Cube();
  return v + key;
}

FieldElement Mimc::Decrypt(const FieldElement& key, const FieldElement& y) const {
  FieldElement v = y - key;
  for (size_t i = constants_.size(); i-- > 0;) v = v.CubeRoot() - key - constants_[i];
  return v;
}

unsigned MimcDepth(const Mimc& mimc, MimcStrategy strategy) {
  return strategy == MimcStrategy::kCubeTuple ? mimc.rounds() : 2 * mimc.rounds();
}

TapeCounts MimcNeed(const Mimc& mimc, size_t calls, MimcStrategy strategy) {
  TapeCounts t;
  if (strategy == MimcStrategy::kCubeTuple) {
    t.cube_tuples = calls * mimc.rounds();
  } else {
    t.zero_shares = 2 * calls * mimc.rounds();
  }
  return t;
}

Task<std::vector<RepShare>> MimcEncryptShared(Engine& e, const Mimc& mimc, std::vector<RepShare> keys,
                                              std::vector<RepShare> xs, MimcStrategy strategy) {
  if (keys.size() == 1 && xs.size() > 1) keys.resize(xs.size(), keys[0]);
  if (keys.size() != xs.size()) throw Error(ErrorCode::kParameterMismatch, "one key per input or a single key");
  const size_t n = xs.size();
  std::vector<RepShare> t(n);
  for (const auto& c : mimc.constants()) {
    for (size_t i = 0; i < n; ++i) t[i] = (xs[i] + keys[i]).AddPublic(c);
    if (strategy == MimcStrategy::kCubeTuple) {
      xs = co_await e.CubeWithTuple(t);
    } else {
      std::vector<RepShare> sq = co_await e.Mul(t, t);
      xs = co_await e.Mul(std::move(sq), t);
    }
  }
  for (size_t i = 0; i < n; ++i) xs[i] += keys[i];
  co_return xs;
}

Bytes TaggedCiphertext::Encode() const {
  if (blocks.size() > 0xFFFF) throw Error(ErrorCode::kInvalidArgument, "too many ciphertext blocks");
  ByteWriter w;
  nonce.EncodeTo(w);
  w.U16(static_cast<uint16_t>(blocks.size()));
  for (const auto& b : blocks) b.EncodeTo(w);
  return std::move(w).bytes();
}

TaggedCiphertext TaggedCiphertext::Read(const FieldParams& field, ByteReader& r) {
  TaggedCiphertext ct;
  ct.nonce = FieldElement::Read(field, r);
  uint16_t count = r.U16();
  ct.blocks.reserve(count);
  for (uint16_t i = 0; i < count; ++i) ct.blocks.push_back(FieldElement::Read(field, r));
  return ct;
}

TaggedCiphertext TaggedCiphertext::Decode(const FieldParams& field, ByteSpan bytes) {
  ByteReader r(bytes);
  TaggedCiphertext ct = Read(field, r);
  r.ExpectDone();
  return ct;
}

std::vector<FieldElement> CtrKeystream(const Mimc& mimc, const FieldElement& key, const FieldElement& tweak,
                                       size_t len) {
  std::vector<FieldElement> ks;
  ks.reserve(len);
  for (size_t j = 1; j <= len; ++j) ks.push_back(mimc.Encrypt(key, tweak + FieldElement(mimc.field(), j)));
  return ks;
}

TaggedCiphertext CtrEncrypt(const Mimc& mimc, const FieldElement& key, const FieldElement& nonce,
                            std::span<const FieldElement> message) {
  auto ks = CtrKeystream(mimc, key, mimc.Encrypt(key, nonce), message.size());
  TaggedCiphertext ct{nonce, {}};
  for (size_t j = 0; j < message.size(); ++j) ct.blocks.push_back(message[j] + ks[j]);
  return ct;
}

std::vector<FieldElement> CtrDecrypt(const Mimc& mimc, const FieldElement& key, const TaggedCiphertext& ct) {
  auto ks = CtrKeystream(mimc, key, mimc.Encrypt(key, ct.nonce), ct.blocks.size());
  std::vector<FieldElement> m;
  for (size_t j = 0; j < ct.blocks.size(); ++j) m.push_back(ct.blocks[j] - ks[j]);
  return m;
}

Task<std::vector<RepShare>> CtrKeystreamShared(Engine& e, const Mimc& mimc, RepShare key, RepShare tweak, size_t len,
                                               MimcStrategy strategy) {
  std::vector<RepShare> inputs;
  for (size_t j = 1; j <= len; ++j) inputs.push_back(tweak.AddPublic(FieldElement(mimc.field(), j)));
  co_return co_await MimcEncryptShared(e, mimc, {key}, std::move(inputs), strategy);
}

Task<std::vector<RepShare>> CtrEncryptShared(Engine& e, const Mimc& mimc, RepShare key, RepShare nonce,
                                             std::vector<RepShare> message, MimcStrategy strategy) {
  auto tweak = co_await MimcEncryptShared(e, mimc, {key}, {nonce}, strategy);
  auto ks = co_await CtrKeystreamShared(e, mimc, key, tweak[0], message.size(), strategy);
  for (size_t j = 0; j < message.size(); ++j) message[j] += ks[j];
  co_return message;
}

FieldElement CiphertextDigest(const TaggedCiphertext& ct) {
  ByteWriter w;
  ct.nonce.EncodeTo(w);
  for (const auto& b : ct.blocks) b.EncodeTo(w);
  Digest256 d = Sha3_256(w.bytes());
  std::array<uint8_t, 32> wide{};
  std::copy_n(d.begin(), 16, wide.begin());
  return FieldElement::FromWide(ct.nonce.params(), wide);
}

HtmacOutput HtmacTag(const Mimc& mimc, const FieldElement& tag_enc, const FieldElement& tag_mac,
                     std::span<const FieldElement> message) {
  HtmacOutput out;
  out.ct = CtrEncrypt(mimc, tag_enc, FieldElement::One(mimc.field()), message);
  out.tag = mimc.Encrypt(tag_mac, CiphertextDigest(out.ct));
  return out;
}

bool HtmacVerify(const Mimc& mimc, const FieldElement& tag_enc, const FieldElement& tag_mac,
                 std::span<const FieldElement> message, const FieldElement& tag) {
  return HtmacTag(mimc, tag_enc, tag_mac, message).tag == tag;
}

Task<HtmacOutput> HtmacTagShared(Engine& e, const Mimc& mimc, RepShare tag_enc, std::optional<RepShare> tweak,
                                 RepShare tag_mac, std::vector<RepShare> message, MimcStrategy strategy) {
  const FieldElement one = FieldElement::One(mimc.field());
  if (!tweak) {
    auto t = co_await MimcEncryptShared(e, mimc, {tag_enc}, {e.Constant(one)}, strategy);
    tweak = t[0];
  }
  auto ks = co_await CtrKeystreamShared(e, mimc, tag_enc, *tweak, message.size(), strategy);
  for (size_t j = 0; j < message.size(); ++j) message[j] += ks[j];
  HtmacOutput out;
  out.ct.nonce = one;
  out.ct.blocks = co_await e.Open(std::move(message));
  FieldElement digest = CiphertextDigest(out.ct);
  auto tag = co_await MimcEncryptShared(e, mimc, {tag_mac}, {e.Constant(digest)}, strategy);
  auto opened = co_await e.Open(std::move(tag));
  out.tag = opened[0];
  co_return out;
}

}  // namespace vsa
