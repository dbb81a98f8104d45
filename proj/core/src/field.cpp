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

#include "vsa/field.hpp"

#include <algorithm>

#include "vsa/error.hpp"

namespace vsa {
namespace {

// p = 2^128 + kProdC.
constexpr uint64_t kProdC = 385;

// Full 128x128 -> 256 bit product, returned as (high, low).
inline std::pair<u128, u128> Mul128(u128 a, u128 b) {
  const u128 mask = ~static_cast<uint64_t>(0);
  u128 a0 = a & mask, a1 = a >> 64, b0 = b & mask, b1 = b >> 64;
  u128 p00 = a0 * b0, p01 = a0 * b1, p10 = a1 * b0, p11 = a1 * b1;
  u128 mid = (p00 >> 64) + (p01 & mask) + (p10 & mask);
  u128 lo = (p00 & mask) | (mid << 64);
  u128 hi = p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64);
  return {hi, lo};
}

// (pos_lo + pos_hi * 2^128) - r mod p for the production prime, where
// pos < 2^128 + 2^64 and r < 2^128.
inline void ProdSubReduce(u128 pos_lo, uint64_t pos_hi, u128 r, u128& out_lo, uint8_t& out_hi) {
  // p as (lo, hi) = (kProdC, 1).
  if (pos_hi > 0 || pos_lo >= r) {
    u128 d_lo = pos_lo - r;
    uint64_t d_hi = pos_hi - (pos_lo < r ? 1 : 0);
    // d < 2p; subtract p once if needed.
    if (d_hi > 1 || (d_hi == 1 && d_lo >= kProdC)) {
      u128 e_lo = d_lo - kProdC;
      d_hi = d_hi - 1 - (d_lo < kProdC ? 1 : 0);
      d_lo = e_lo;
    }
    out_lo = d_lo;
    out_hi = static_cast<uint8_t>(d_hi);
  } else {
    // pos - r + p, with pos < r < 2^128, lands in (0, p).
    u128 d = pos_lo - r;  // wraps: equals pos - r + 2^128
    u128 res_lo = d + kProdC;
    uint8_t res_hi = res_lo < d ? 1 : 0;
    out_lo = res_lo;
    out_hi = res_hi;
  }
}

// Reduces (hi * 2^128 + lo) modulo the production prime for any lo and
// hi < 2^128.
inline void ProdReduceWide(u128 hi, u128 lo, u128& out_lo, uint8_t& out_hi) {
  // x = hi*2^128 + lo = lo - C*hi (mod p); C*hi = q*2^128 + r with q < 2^9.
  auto [q, r] = Mul128(hi, kProdC);
  u128 cq = q * kProdC;
  u128 pos_lo = lo + cq;
  uint64_t pos_hi = pos_lo < lo ? 1 : 0;
  ProdSubReduce(pos_lo, pos_hi, r, out_lo, out_hi);
}

unsigned Uint128BitLength(u128 v) {
  unsigned n = 0;
  while (v != 0) {
    ++n;
    v >>= 1;
  }
  return n;
}

Uint192 MulSmall(const Uint192& a, uint64_t m) {
  auto [h, l] = Mul128(a.lo, m);
  Uint192 out;
  out.lo = l;
  out.hi = static_cast<uint64_t>(h) + a.hi * m;
  return out;
}

}  // namespace

unsigned Uint192::BitLength() const {
  if (hi != 0) return 128 + Uint128BitLength(hi);
  return Uint128BitLength(lo);
}

Uint192 Add(const Uint192& a, const Uint192& b) {
  Uint192 out;
  out.lo = a.lo + b.lo;
  out.hi = a.hi + b.hi + (out.lo < a.lo ? 1 : 0);
  return out;
}

Uint192 Sub(const Uint192& a, const Uint192& b) {
  Uint192 out;
  out.lo = a.lo - b.lo;
  out.hi = a.hi - b.hi - (a.lo < b.lo ? 1 : 0);
  return out;
}

std::pair<Uint192, uint64_t> DivSmall(const Uint192& a, uint64_t d) {
  // Long division over 64-bit limbs, most significant first.
  uint64_t limbs[3] = {static_cast<uint64_t>(a.lo), static_cast<uint64_t>(a.lo >> 64), a.hi};
  uint64_t q[3] = {0, 0, 0};
  u128 rem = 0;
  for (int i = 2; i >= 0; --i) {
    u128 cur = (rem << 64) | limbs[i];
    q[i] = static_cast<uint64_t>(cur / d);
    rem = cur % d;
  }
  Uint192 out;
  out.lo = (static_cast<u128>(q[1]) << 64) | q[0];
  out.hi = q[2];
  return {out, static_cast<uint64_t>(rem)};
}

std::string Uint192::ToDecimal() const {
  if (lo == 0 && hi == 0) return "0";
  std::string digits;
  Uint192 cur = *this;
  while (!(cur.lo == 0 && cur.hi == 0)) {
    auto [q, r] = DivSmall(cur, 10);
    digits.push_back(static_cast<char>('0' + r));
    cur = q;
  }
  std::reverse(digits.begin(), digits.end());
  return digits;
}

Uint192 Uint192::FromDecimal(std::string_view s) {
  if (s.empty()) throw Error(ErrorCode::kDecode, "empty decimal string");
  Uint192 out;
  for (char c : s) {
    if (c < '0' || c > '9') throw Error(ErrorCode::kDecode, "invalid decimal digit");
    if (out.hi > (~static_cast<uint64_t>(0)) / 16) throw Error(ErrorCode::kDecode, "decimal too large");
    out = Add(MulSmall(out, 10), Uint192{static_cast<u128>(c - '0'), 0});
  }
  return out;
}

unsigned CeilLog3(const Uint192& m) {
  // Smallest r with 3^r >= m.
  Uint192 pow{1, 0};
  unsigned r = 0;
  while (pow < m) {
    pow = MulSmall(pow, 3);
    ++r;
  }
  return r;
}

FieldParams::FieldParams(std::string label, Uint192 modulus, size_t encoded_size, bool production)
    : label_(std::move(label)),
      modulus_(modulus),
      mimc_rounds_(CeilLog3(modulus)),
      encoded_size_(encoded_size),
      production_(production) {
  // (2p - 1) / 3 is an integer because p = 2 (mod 3).
  Uint192 two_p_minus_1 = Sub(Add(modulus, modulus), Uint192{1, 0});
  cube_root_exp_ = DivSmall(two_p_minus_1, 3).first;
  if (!production_) {
    small_modulus_ = static_cast<uint64_t>(modulus.lo);
    u128 t = (static_cast<u128>(1) << 64) % small_modulus_;
    small_two128_ = static_cast<uint64_t>((t * t) % small_modulus_);
  }
}

const FieldParams& FieldParams::Production() {
  static const FieldParams params("prod", Uint192{kProdC, 1}, 17, true);
  return params;
}

const FieldParams& FieldParams::Test11() {
  static const FieldParams params("test11", Uint192{11, 0}, 2, false);
  return params;
}

const FieldParams& FieldParams::Test101() {
  static const FieldParams params("test101", Uint192{101, 0}, 2, false);
  return params;
}

const FieldParams& FieldParams::ByLabel(std::string_view label) {
  if (label == "prod") return Production();
  if (label == "test11") return Test11();
  if (label == "test101") return Test101();
  throw Error(ErrorCode::kInvalidArgument, "unknown field label '" + std::string(label) + "'");
}

const FieldParams& SelectProductionPrime() { return FieldParams::Production(); }

FieldElement::FieldElement(const FieldParams& params, uint64_t value) : params_(&params) {
  if (params.production_) {
    lo_ = value;
  } else {
    lo_ = value % params.small_modulus_;
  }
}

FieldElement FieldElement::FromInteger(const FieldParams& params, const Uint192& value) {
  if (params.production_) {
    FieldElement out(&params, 0, 0);
    ProdReduceWide(value.hi, value.lo, out.lo_, out.hi_);
    return out;
  }
  uint64_t p = params.small_modulus_;
  u128 hi = static_cast<u128>(value.hi % p) * params.small_two128_ % p;
  u128 lo = value.lo % p;
  return FieldElement(&params, (hi + lo) % p, 0);
}

FieldElement FieldElement::FromWide(const FieldParams& params, std::span<const uint8_t, 32> bytes) {
  u128 lo = 0, hi = 0;
  for (int i = 15; i >= 0; --i) {
    lo = (lo << 8) | bytes[static_cast<size_t>(i)];
    hi = (hi << 8) | bytes[static_cast<size_t>(i) + 16];
  }
  if (params.production_) {
    FieldElement out(&params, 0, 0);
    ProdReduceWide(hi, lo, out.lo_, out.hi_);
    return out;
  }
  uint64_t p = params.small_modulus_;
  u128 h = (hi % p) * params.small_two128_ % p;
  return FieldElement(&params, (h + lo % p) % p, 0);
}

const FieldParams& FieldElement::params() const {
  if (params_ == nullptr) throw Error(ErrorCode::kParameterMismatch, "unbound field element");
  return *params_;
}

void FieldElement::CheckSame(const FieldElement& o) const {
  if (params_ != o.params_ || params_ == nullptr) {
    throw Error(ErrorCode::kParameterMismatch,
                "operands belong to different fields (" + (params_ ? params_->label_ : "unbound") +
                    " vs " + (o.params_ ? o.params_->label_ : "unbound") + ")");
  }
}

FieldElement& FieldElement::operator+=(const FieldElement& o) {
  CheckSame(o);
  if (params_->production_) {
    u128 lo = lo_ + o.lo_;
    uint64_t hi = static_cast<uint64_t>(hi_) + o.hi_ + (lo < lo_ ? 1 : 0);
    // Subtract p once if the sum reached it.
    if (hi > 1 || (hi == 1 && lo >= kProdC)) {
      u128 nlo = lo - kProdC;
      hi = hi - 1 - (lo < kProdC ? 1 : 0);
      lo = nlo;
    }
    lo_ = lo;
    hi_ = static_cast<uint8_t>(hi);
  } else {
    lo_ = (lo_ + o.lo_) % params_->small_modulus_;
  }
  return *this;
}

FieldElement& FieldElement::operator-=(const FieldElement& o) {
  CheckSame(o);
  if (params_->production_) {
    // Compare as 129-bit integers.
    bool ge = hi_ != o.hi_ ? hi_ > o.hi_ : lo_ >= o.lo_;
    if (ge) {
      u128 lo = lo_ - o.lo_;
      hi_ = static_cast<uint8_t>(hi_ - o.hi_ - (lo_ < o.lo_ ? 1 : 0));
      lo_ = lo;
    } else {
      // a - b + p; a + p first (fits in 130 bits), then subtract b.
      u128 lo = lo_ + kProdC;
      uint64_t hi = static_cast<uint64_t>(hi_) + 1 + (lo < lo_ ? 1 : 0);
      u128 rlo = lo - o.lo_;
      hi = hi - o.hi_ - (lo < o.lo_ ? 1 : 0);
      lo_ = rlo;
      hi_ = static_cast<uint8_t>(hi);
    }
  } else {
    uint64_t p = params_->small_modulus_;
    lo_ = (lo_ + p - o.lo_) % p;
  }
  return *this;
}

FieldElement& FieldElement::operator*=(const FieldElement& o) {
  CheckSame(o);
  if (params_->production_) {
    // a = a1*2^128 + a0, b likewise, with a1, b1 in {0, 1}.
    auto [h, l] = Mul128(lo_, o.lo_);
    u128 mid = h;
    uint64_t mid_hi = 0;
    if (hi_) {
      mid += o.lo_;
      mid_hi += mid < o.lo_ ? 1 : 0;
    }
    if (o.hi_) {
      u128 prev = mid;
      mid += lo_;
      mid_hi += mid < prev ? 1 : 0;
    }
    uint64_t a1b1 = static_cast<uint64_t>(hi_ & o.hi_);
    // x = l + 2^128*mid + 2^128*2^128*(mid_hi + a1b1)
    //   = l - C*mid_lo + C^2*(mid_hi + a1b1)            (2^128 = -C)
    //   = l - r + C*q + C^2*(mid_hi + a1b1)  with C*mid_lo = q*2^128 + r.
    auto [q, r] = Mul128(mid, kProdC);
    u128 add = q * kProdC + static_cast<u128>(kProdC * kProdC) * (mid_hi + a1b1);
    u128 pos_lo = l + add;
    uint64_t pos_hi = pos_lo < l ? 1 : 0;
    ProdSubReduce(pos_lo, pos_hi, r, lo_, hi_);
  } else {
    lo_ = (lo_ * o.lo_) % params_->small_modulus_;
  }
  return *this;
}

FieldElement FieldElement::operator-() const { return Zero(params()) - *this; }

FieldElement FieldElement::Pow(const Uint192& exponent) const {
  FieldElement result = One(params());
  for (int i = static_cast<int>(exponent.BitLength()) - 1; i >= 0; --i) {
    result *= result;
    if (exponent.Bit(static_cast<unsigned>(i))) result *= *this;
  }
  return result;
}

FieldElement FieldElement::Inverse() const {
  if (IsZero()) throw Error(ErrorCode::kDivisionByZero, "inverse of zero");
  return Pow(Sub(params().modulus(), Uint192{2, 0}));
}

FieldElement FieldElement::CubeRoot() const { return Pow(params().cube_root_exponent()); }

void FieldElement::EncodeTo(ByteWriter& w) const {
  const FieldParams& p = params();
  if (p.production_) {
    for (int i = 0; i < 16; ++i) w.U8(static_cast<uint8_t>(lo_ >> (8 * i)));
    w.U8(hi_);
  } else {
    w.U16(static_cast<uint16_t>(lo_));
  }
}

Bytes FieldElement::Encode() const {
  ByteWriter w;
  EncodeTo(w);
  return std::move(w).bytes();
}

FieldElement FieldElement::Read(const FieldParams& params, ByteReader& r) {
  if (params.production_) {
    ByteSpan raw = r.Raw(17);
    u128 lo = 0;
    for (int i = 15; i >= 0; --i) lo = (lo << 8) | raw[static_cast<size_t>(i)];
    uint8_t hi = raw[16];
    if (hi > 1 || (hi == 1 && lo >= kProdC)) {
      throw Error(ErrorCode::kDecode, "non-canonical field element encoding");
    }
    return FieldElement(&params, lo, hi);
  }
  uint16_t v = r.U16();
  if (v >= params.small_modulus_) throw Error(ErrorCode::kDecode, "non-canonical field element encoding");
  return FieldElement(&params, v, 0);
}

FieldElement FieldElement::Decode(const FieldParams& params, ByteSpan bytes) {
  ByteReader r(bytes);
  FieldElement out = Read(params, r);
  r.ExpectDone();
  return out;
}

}  // namespace vsa
