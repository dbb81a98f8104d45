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

// Semi-honest 2-out-of-3 replicated secret sharing.
//
// A secret x is split into additive components r0 + r1 + r2 = x and party i
// holds the pair (r_i, r_{i+1 mod 3}) as (lo, hi). Any two parties hold all
// three components; one party alone holds two uniformly random values.
//
// Public constants enter through component r0: party 0 adds to lo, party 2
// adds to hi, party 1 is untouched.

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "vsa/bitvector.hpp"
#include "vsa/crypto.hpp"
#include "vsa/field.hpp"

namespace vsa {

inline constexpr int kParties = 3;
inline int NextParty(int i) { return (i + 1) % kParties; }
inline int PrevParty(int i) { return (i + kParties - 1) % kParties; }

struct RepShare {
  uint8_t party = 0;
  FieldElement lo;  // r_party
  FieldElement hi;  // r_{party+1}

  RepShare& operator+=(const RepShare& o);
  RepShare& operator-=(const RepShare& o);
  friend RepShare operator+(RepShare a, const RepShare& b) { return a += b; }
  friend RepShare operator-(RepShare a, const RepShare& b) { return a -= b; }
  friend RepShare operator*(RepShare a, const FieldElement& c) {
    a.lo *= c;
    a.hi *= c;
    return a;
  }
  friend bool operator==(const RepShare&, const RepShare&) = default;

  RepShare AddPublic(const FieldElement& c) const;
  void EncodeTo(ByteWriter& w) const;
  static RepShare Read(const FieldParams& params, ByteReader& r);
};

// Share of the public constant c held by `party`.
RepShare ConstantShare(int party, const FieldElement& c);

// Fresh sharing: r0, r1 uniform from `prg`, r2 = secret - r0 - r1.
std::array<RepShare, 3> Share(const FieldElement& secret, Prg& prg);
// Sharing with caller-chosen r0 and r1.
std::array<RepShare, 3> ShareWith(const FieldElement& secret, const FieldElement& r0,
                                  const FieldElement& r1);
std::array<std::vector<RepShare>, 3> ShareVector(std::span<const FieldElement> secrets, Prg& prg);

// Reconstruction from two or three parties' pairs. The components held by
// more than one party must agree, otherwise Error(kIntegrity). Fewer than two
// distinct parties is refused with Error(kRefused).
FieldElement Reconstruct(std::span<const RepShare> shares);
FieldElement Reconstruct(const RepShare& a, const RepShare& b);
std::vector<FieldElement> ReconstructVector(std::span<const std::vector<RepShare>> per_party);

// Packed replicated shares of a vector of bits (GF(2) components).
struct BitShares {
  uint8_t party = 0;
  BitVector lo;
  BitVector hi;

  size_t size() const { return lo.size(); }
  BitShares& operator^=(const BitShares& o);
  friend BitShares operator^(BitShares a, const BitShares& b) { return a ^= b; }
  friend bool operator==(const BitShares&, const BitShares&) = default;
  // Bitwise complement of the shared value.
  BitShares Not() const;
  // XOR with a public vector.
  BitShares XorPublic(const BitVector& c) const;
  // AND with a public vector (local).
  BitShares AndPublic(const BitVector& c) const;
  BitShares Slice(size_t offset, size_t count) const;
  void Append(const BitShares& o);
  bool GetLo(size_t i) const { return lo.Get(i); }

  void EncodeTo(ByteWriter& w) const;
  static BitShares Read(ByteReader& r);
};

BitShares ConstantBitShares(int party, const BitVector& c);
BitShares EmptyBitShares(int party, size_t size);
std::array<BitShares, 3> ShareBits(const BitVector& secret, Prg& prg);
BitVector ReconstructBits(std::span<const BitShares> shares);

}  // namespace vsa
