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

#include "vsa/repshare.hpp"

#include <optional>

#include "vsa/error.hpp"

namespace vsa {

RepShare& RepShare::operator+=(const RepShare& o) {
  lo += o.lo;
  hi += o.hi;
  return *this;
}

RepShare& RepShare::operator-=(const RepShare& o) {
  lo -= o.lo;
  hi -= o.hi;
  return *this;
}

RepShare RepShare::AddPublic(const FieldElement& c) const {
  RepShare out = *this;
  if (party == 0) out.lo += c;
  if (party == 2) out.hi += c;
  return out;
}

void RepShare::EncodeTo(ByteWriter& w) const {
  w.U8(party);
  lo.EncodeTo(w);
  hi.EncodeTo(w);
}

RepShare RepShare::Read(const FieldParams& params, ByteReader& r) {
  RepShare s;
  s.party = r.U8();
  if (s.party >= kParties) throw Error(ErrorCode::kDecode, "party id out of range");
  s.lo = FieldElement::Read(params, r);
  s.hi = FieldElement::Read(params, r);
  return s;
}

RepShare ConstantShare(int party, const FieldElement& c) {
  FieldElement zero = FieldElement::Zero(c.params());
  RepShare s{static_cast<uint8_t>(party), zero, zero};
  return s.AddPublic(c);
}

std::array<RepShare, 3> ShareWith(const FieldElement& secret, const FieldElement& r0,
                                  const FieldElement& r1) {
  FieldElement r2 = secret - r0 - r1;
  return {RepShare{0, r0, r1}, RepShare{1, r1, r2}, RepShare{2, r2, r0}};
}

std::array<RepShare, 3> Share(const FieldElement& secret, Prg& prg) {
  const FieldParams& f = secret.params();
  FieldElement r0 = prg.NextField(f);
  FieldElement r1 = prg.NextField(f);
  return ShareWith(secret, r0, r1);
}

std::array<std::vector<RepShare>, 3> ShareVector(std::span<const FieldElement> secrets, Prg& prg) {
  std::array<std::vector<RepShare>, 3> out;
  for (auto& v : out) v.reserve(secrets.size());
  for (const auto& s : secrets) {
    auto sh = Share(s, prg);
    for (int i = 0; i < kParties; ++i) out[i].push_back(sh[i]);
  }
  return out;
}

FieldElement Reconstruct(std::span<const RepShare> shares) {
  std::array<std::optional<FieldElement>, 3> comp;
  std::array<bool, 3> seen{};
  size_t distinct = 0;
  auto put = [&](int idx, const FieldElement& v) {
    if (comp[idx] && !(*comp[idx] == v)) {
      throw Error(ErrorCode::kIntegrity, "inconsistent replicated components");
    }
    comp[idx] = v;
  };
  for (const auto& s : shares) {
    if (s.party >= kParties) throw Error(ErrorCode::kInvalidArgument, "party id out of range");
    if (!seen[s.party]) {
      seen[s.party] = true;
      ++distinct;
    }
    put(s.party, s.lo);
    put(NextParty(s.party), s.hi);
  }
  if (distinct < 2) throw Error(ErrorCode::kRefused, "reconstruction needs shares from two parties");
  return *comp[0] + *comp[1] + *comp[2];
}

FieldElement Reconstruct(const RepShare& a, const RepShare& b) {
  std::array<RepShare, 2> both{a, b};
  return Reconstruct(both);
}

std::vector<FieldElement> ReconstructVector(std::span<const std::vector<RepShare>> per_party) {
  if (per_party.empty()) throw Error(ErrorCode::kRefused, "no shares");
  size_t n = per_party[0].size();
  for (const auto& v : per_party) {
    if (v.size() != n) throw Error(ErrorCode::kParameterMismatch, "share vectors differ in length");
  }
  std::vector<FieldElement> out;
  out.reserve(n);
  std::vector<RepShare> tmp(per_party.size());
  for (size_t i = 0; i < n; ++i) {
    for (size_t p = 0; p < per_party.size(); ++p) tmp[p] = per_party[p][i];
    out.push_back(Reconstruct(tmp));
  }
  return out;
}

BitShares& BitShares::operator^=(const BitShares& o) {
  lo ^= o.lo;
  hi ^= o.hi;
  return *this;
}

BitShares BitShares::Not() const {
  BitShares out = *this;
  if (party == 0) out.lo = ~out.lo;
  if (party == 2) out.hi = ~out.hi;
  return out;
}

BitShares BitShares::XorPublic(const BitVector& c) const {
  BitShares out = *this;
  if (party == 0) out.lo ^= c;
  if (party == 2) out.hi ^= c;
  return out;
}

BitShares BitShares::AndPublic(const BitVector& c) const {
  return BitShares{party, lo & c, hi & c};
}

BitShares BitShares::Slice(size_t offset, size_t count) const {
  return BitShares{party, lo.Slice(offset, count), hi.Slice(offset, count)};
}

void BitShares::Append(const BitShares& o) {
  lo.Append(o.lo);
  hi.Append(o.hi);
}

void BitShares::EncodeTo(ByteWriter& w) const {
  w.U8(party);
  lo.EncodeTo(w);
  hi.EncodeTo(w);
}

BitShares BitShares::Read(ByteReader& r) {
  BitShares s;
  s.party = r.U8();
  if (s.party >= kParties) throw Error(ErrorCode::kDecode, "party id out of range");
  s.lo = BitVector::Read(r);
  s.hi = BitVector::Read(r);
  if (s.lo.size() != s.hi.size()) throw Error(ErrorCode::kDecode, "bit share halves differ in length");
  return s;
}

BitShares ConstantBitShares(int party, const BitVector& c) {
  return EmptyBitShares(party, c.size()).XorPublic(c);
}

BitShares EmptyBitShares(int party, size_t size) {
  return BitShares{static_cast<uint8_t>(party), BitVector(size), BitVector(size)};
}

std::array<BitShares, 3> ShareBits(const BitVector& secret, Prg& prg) {
  size_t n = secret.size();
  BitVector r0(n), r1(n);
  for (auto& w : r0.mutable_words()) w = prg.NextU64();
  for (auto& w : r1.mutable_words()) w = prg.NextU64();
  r0.ClearPadding();
  r1.ClearPadding();
  BitVector r2 = secret ^ r0 ^ r1;
  return {BitShares{0, r0, r1}, BitShares{1, r1, r2}, BitShares{2, r2, r0}};
}

BitVector ReconstructBits(std::span<const BitShares> shares) {
  std::array<std::optional<BitVector>, 3> comp;
  std::array<bool, 3> seen{};
  size_t distinct = 0;
  auto put = [&](int idx, const BitVector& v) {
    if (comp[idx] && !(*comp[idx] == v)) {
      throw Error(ErrorCode::kIntegrity, "inconsistent replicated bit components");
    }
    comp[idx] = v;
  };
  for (const auto& s : shares) {
    if (s.party >= kParties) throw Error(ErrorCode::kInvalidArgument, "party id out of range");
    if (!seen[s.party]) {
      seen[s.party] = true;
      ++distinct;
    }
    put(s.party, s.lo);
    put(NextParty(s.party), s.hi);
  }
  if (distinct < 2) throw Error(ErrorCode::kRefused, "reconstruction needs shares from two parties");
  return *comp[0] ^ *comp[1] ^ *comp[2];
}

}  // namespace vsa
