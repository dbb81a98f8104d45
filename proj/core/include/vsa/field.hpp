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

// Prime-field arithmetic.
//
// The production field is F_p with p = 2^128 + 385, the smallest prime above
// 2^128 with p = 2 (mod 3); x -> x^3 is then a permutation of F_p, which MiMC
// needs, and every 128-bit protocol block embeds as exactly one element.
// F_11 and F_101 are small test fields with the same permutation property so
// that oracles can enumerate them.
//
// Arithmetic is not constant time.

#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>

#include "vsa/bytes.hpp"

namespace vsa {

using u128 = unsigned __int128;

// Unsigned integer of up to 192 bits (value = hi * 2^128 + lo). Field
// residues use at most 129 bits; the extra room absorbs carries.
struct Uint192 {
  u128 lo = 0;
  uint64_t hi = 0;

  friend bool operator==(const Uint192&, const Uint192&) = default;
  friend std::strong_ordering operator<=>(const Uint192& a, const Uint192& b) {
    if (a.hi != b.hi) return a.hi <=> b.hi;
    if (a.lo != b.lo) return a.lo < b.lo ? std::strong_ordering::less : std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  bool Bit(unsigned i) const {
    return i < 128 ? ((lo >> i) & 1) != 0 : ((hi >> (i - 128)) & 1) != 0;
  }
  unsigned BitLength() const;
  std::string ToDecimal() const;
  static Uint192 FromDecimal(std::string_view s);
};

Uint192 Add(const Uint192& a, const Uint192& b);
// Requires a >= b.
Uint192 Sub(const Uint192& a, const Uint192& b);
// Returns (quotient, remainder).
std::pair<Uint192, uint64_t> DivSmall(const Uint192& a, uint64_t d);

class FieldParams {
 public:
  static const FieldParams& Production();
  static const FieldParams& Test11();
  static const FieldParams& Test101();
  // Throws Error(kInvalidArgument) for unknown labels.
  static const FieldParams& ByLabel(std::string_view label);

  const std::string& label() const { return label_; }
  const Uint192& modulus() const { return modulus_; }
  unsigned mimc_rounds() const { return mimc_rounds_; }
  // Canonical wire size of one element: 17 bytes for the production field,
  // 2 bytes for the test fields.
  size_t encoded_size() const { return encoded_size_; }
  bool is_production() const { return production_; }
  unsigned bit_length() const { return modulus_.BitLength(); }
  // (2p - 1) / 3, the exponent of the inverse cube map.
  const Uint192& cube_root_exponent() const { return cube_root_exp_; }

  FieldParams(const FieldParams&) = delete;
  FieldParams& operator=(const FieldParams&) = delete;

 private:
  FieldParams(std::string label, Uint192 modulus, size_t encoded_size, bool production);

  std::string label_;
  Uint192 modulus_;
  unsigned mimc_rounds_;
  size_t encoded_size_;
  bool production_;
  Uint192 cube_root_exp_;
  uint64_t small_modulus_ = 0;     // valid when !production_
  uint64_t small_two128_ = 0;      // 2^128 mod p, for wide reduction

  friend class FieldElement;
};

// Returns the production parameters: smallest prime p > 2^128 with
// p = 2 (mod 3), fixed at build time to 2^128 + 385, and
// mimc_rounds = ceil(log_3 p) = 81.
const FieldParams& SelectProductionPrime();

// ceil(log_3 m), computed exactly by repeated multiplication.
unsigned CeilLog3(const Uint192& m);

class FieldElement {
 public:
  // An unbound element; any arithmetic on it raises kParameterMismatch.
  FieldElement() = default;
  FieldElement(const FieldParams& params, uint64_t value);

  // Reduces an arbitrary 192-bit integer into the field.
  static FieldElement FromInteger(const FieldParams& params, const Uint192& value);
  // Reduces a 256-bit little-endian integer into the field.
  static FieldElement FromWide(const FieldParams& params, std::span<const uint8_t, 32> bytes);
  static FieldElement Zero(const FieldParams& params) { return {params, 0}; }
  static FieldElement One(const FieldParams& params) { return {params, 1}; }

  const FieldParams& params() const;
  bool bound() const { return params_ != nullptr; }
  Uint192 value() const { return {lo_, hi_}; }
  uint64_t low64() const { return static_cast<uint64_t>(lo_); }
  bool IsZero() const { return lo_ == 0 && hi_ == 0; }

  FieldElement& operator+=(const FieldElement& o);
  FieldElement& operator-=(const FieldElement& o);
  FieldElement& operator*=(const FieldElement& o);
  friend FieldElement operator+(FieldElement a, const FieldElement& b) { return a += b; }
  friend FieldElement operator-(FieldElement a, const FieldElement& b) { return a -= b; }
  friend FieldElement operator*(FieldElement a, const FieldElement& b) { return a *= b; }
  FieldElement operator-() const;
  friend bool operator==(const FieldElement& a, const FieldElement& b) {
    return a.params_ == b.params_ && a.lo_ == b.lo_ && a.hi_ == b.hi_;
  }

  FieldElement Pow(const Uint192& exponent) const;
  FieldElement Square() const { return *this * *this; }
  FieldElement Cube() const { return Square() * *this; }
  // x^(p-2); throws Error(kDivisionByZero) for zero.
  FieldElement Inverse() const;
  // Inverse of x -> x^3.
  FieldElement CubeRoot() const;

  void EncodeTo(ByteWriter& w) const;
  Bytes Encode() const;
  // Rejects non-canonical encodings (value >= p) with Error(kDecode).
  static FieldElement Decode(const FieldParams& params, ByteSpan bytes);
  static FieldElement Read(const FieldParams& params, ByteReader& r);

  std::string ToString() const { return value().ToDecimal(); }

 private:
  FieldElement(const FieldParams* params, u128 lo, uint8_t hi) : lo_(lo), params_(params), hi_(hi) {}
  void CheckSame(const FieldElement& o) const;

  u128 lo_ = 0;
  const FieldParams* params_ = nullptr;
  uint8_t hi_ = 0;
};

// Free-function spellings of the field operations.
inline FieldElement FeAdd(const FieldElement& a, const FieldElement& b) { return a + b; }
inline FieldElement FeMul(const FieldElement& a, const FieldElement& b) { return a * b; }
inline FieldElement FeInv(const FieldElement& a) { return a.Inverse(); }

}  // namespace vsa
