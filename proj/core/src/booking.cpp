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

#include "vsa/booking.hpp"

#include <algorithm>

#include "vsa/error.hpp"

namespace vsa {
namespace {

constexpr std::string_view kCertMagic = "VSACERT1";
constexpr size_t kPackedBytes = 93;

template <class T>
void PutBe(uint8_t* out, T v) {
  for (size_t i = 0; i < sizeof(T); ++i) out[i] = static_cast<uint8_t>(v >> (8 * (sizeof(T) - 1 - i)));
}

template <class T>
T GetBe(const uint8_t* in) {
  T v = 0;
  for (size_t i = 0; i < sizeof(T); ++i) v = static_cast<T>((v << 8) | in[i]);
  return v;
}

}  // namespace

uint32_t Conditions::MakeFlags(uint32_t revision, bool revoked) {
  if (revision >= (1u << 24)) throw Error(ErrorCode::kInvalidArgument, "revision exceeds 24 bits");
  return (revision << 8) | (revoked ? kRevoked : 0);
}

std::array<uint8_t, BookingDetails::kBytes> BookingDetails::Pack() const {
  std::array<uint8_t, kBytes> out{};
  uint8_t* p = out.data();
  std::copy(cert_hash.begin(), cert_hash.end(), p);
  p += 64;
  PutBe(p, vehicle_id);
  PutBe(p + 4, location);
  PutBe(p + 12, conditions.start);
  PutBe(p + 16, conditions.end);
  PutBe(p + 20, conditions.flags);
  p[24] = access_rights;
  PutBe(p + 25, booking_id);
  return out;
}

BookingDetails BookingDetails::Unpack(ByteSpan bytes) {
  if (bytes.size() != kBytes) {
    throw Error(ErrorCode::kDecode, "booking details must be " + std::to_string(kBytes) + " bytes");
  }
  if (std::any_of(bytes.begin() + kPackedBytes, bytes.end(), [](uint8_t b) { return b != 0; })) {
    throw Error(ErrorCode::kDecode, "non-zero booking padding");
  }
  BookingDetails bd;
  std::copy(bytes.begin(), bytes.begin() + 64, bd.cert_hash.begin());
  const uint8_t* p = bytes.data() + 64;
  bd.vehicle_id = GetBe<uint32_t>(p);
  bd.location = GetBe<uint64_t>(p + 4);
  bd.conditions.start = GetBe<uint32_t>(p + 12);
  bd.conditions.end = GetBe<uint32_t>(p + 16);
  bd.conditions.flags = GetBe<uint32_t>(p + 20);
  bd.access_rights = p[24];
  bd.booking_id = GetBe<uint32_t>(p + 25);
  return bd;
}

void BookingDetails::Validate() const {
  if (conditions.revoked()) {
    if (conditions.start != 0 || conditions.end != 0) {
      throw Error(ErrorCode::kInvalidArgument, "a revocation carries the (0, 0) window");
    }
    return;
  }
  if (conditions.start >= conditions.end) {
    throw Error(ErrorCode::kInvalidArgument, "booking window needs start < end");
  }
}

FieldElement BlockToField(const FieldParams& field, const Block128& block) {
  u128 v = 0;
  for (int i = 15; i >= 0; --i) v = (v << 8) | block[i];
  return FieldElement::FromInteger(field, Uint192{v, 0});
}

Block128 FieldToBlock(const FieldElement& x) {
  Uint192 v = x.value();
  if (v.hi != 0) throw Error(ErrorCode::kDecode, "field element does not fit in a 128-bit block");
  Block128 out{};
  for (int i = 0; i < 16; ++i) out[i] = static_cast<uint8_t>(v.lo >> (8 * i));
  return out;
}

SignedBooking SignedBooking::Sign(const BookingDetails& bd, const SigningKey& key) {
  bd.Validate();
  auto packed = bd.Pack();
  return SignedBooking{bd, key.Sign(packed)};
}

bool SignedBooking::Verify(const VerifyKey& key) const {
  auto packed = bd.Pack();
  return key.Verify(packed, signature);
}

size_t SignedBookingBlocks(SignatureScheme scheme) { return (BookingDetails::kBytes + SignatureSize(scheme)) / 16; }

Bytes SignedBooking::Encode() const {
  auto packed = bd.Pack();
  Bytes out(packed.begin(), packed.end());
  out.insert(out.end(), signature.begin(), signature.end());
  return out;
}

SignedBooking SignedBooking::Decode(ByteSpan bytes) {
  if (bytes.size() != BookingDetails::kBytes + SignatureSize(SignatureScheme::kEd25519) &&
      bytes.size() != BookingDetails::kBytes + SignatureSize(SignatureScheme::kRsa2048)) {
    throw Error(ErrorCode::kDecode, "signed booking has unexpected length " + std::to_string(bytes.size()));
  }
  SignedBooking out;
  out.bd = BookingDetails::Unpack(bytes.first(BookingDetails::kBytes));
  out.signature.assign(bytes.begin() + BookingDetails::kBytes, bytes.end());
  return out;
}

std::vector<Block128> SignedBooking::Blocks() const {
  Bytes raw = Encode();
  if (raw.size() % 16 != 0) throw Error(ErrorCode::kInvalidArgument, "signature is not whole blocks");
  std::vector<Block128> out(raw.size() / 16);
  for (size_t i = 0; i < out.size(); ++i) std::copy_n(raw.begin() + 16 * i, 16, out[i].begin());
  return out;
}

SignedBooking SignedBooking::FromBlocks(std::span<const Block128> blocks) {
  Bytes raw;
  raw.reserve(16 * blocks.size());
  for (const auto& b : blocks) raw.insert(raw.end(), b.begin(), b.end());
  return Decode(raw);
}

std::vector<FieldElement> SignedBooking::ToField(const FieldParams& field) const {
  std::vector<FieldElement> out;
  for (const auto& b : Blocks()) out.push_back(BlockToField(field, b));
  return out;
}

SignedBooking SignedBooking::FromField(std::span<const FieldElement> blocks) {
  std::vector<Block128> raw;
  raw.reserve(blocks.size());
  for (const auto& x : blocks) raw.push_back(FieldToBlock(x));
  return FromBlocks(raw);
}

Bytes Certificate::Encode() const {
  Bytes key_bytes = key.Encode();
  if (subject.size() > 0xFFFF) throw Error(ErrorCode::kInvalidArgument, "certificate subject too long");
  ByteWriter w;
  w.Str(kCertMagic);
  w.U16(static_cast<uint16_t>(subject.size()));
  w.Str(subject);
  w.U16(static_cast<uint16_t>(key_bytes.size()));
  w.Raw(key_bytes);
  return std::move(w).bytes();
}

Certificate Certificate::Decode(ByteSpan bytes) {
  ByteReader r(bytes);
  if (r.Str(kCertMagic.size()) != kCertMagic) throw Error(ErrorCode::kDecode, "bad certificate magic");
  Certificate c;
  c.subject = r.Str(r.U16());
  c.key = VerifyKey::Decode(r.Raw(r.U16()));
  r.ExpectDone();
  return c;
}

Bytes AccessToken::Encode() const {
  ByteWriter w;
  w.U8(static_cast<uint8_t>(backend));
  w.U64(nonce);
  w.U16(static_cast<uint16_t>(blocks()));
  if (backend == Backend::kMimc) {
    for (const auto& x : field_blocks) x.EncodeTo(w);
  } else {
    for (const auto& b : aes_blocks) w.Raw(b);
  }
  return std::move(w).bytes();
}

AccessToken AccessToken::Decode(const FieldParams& field, ByteSpan bytes) {
  ByteReader r(bytes);
  AccessToken t;
  t.backend = BackendFromByte(r.U8());
  t.nonce = r.U64();
  size_t n = r.U16();
  for (size_t i = 0; i < n; ++i) {
    if (t.backend == Backend::kMimc) {
      t.field_blocks.push_back(FieldElement::Read(field, r));
    } else {
      Block128 b{};
      ByteSpan raw = r.Raw(16);
      std::copy(raw.begin(), raw.end(), b.begin());
      t.aes_blocks.push_back(b);
    }
  }
  r.ExpectDone();
  return t;
}

Bytes AccessConfirmation::SignedBytes(const BookingDetails& bd, uint64_t ts_access) {
  auto packed = bd.Pack();
  Bytes out(packed.begin(), packed.end());
  out.resize(out.size() + 8);
  PutBe(out.data() + packed.size(), ts_access);
  return out;
}

bool AccessConfirmation::Verify(const VerifyKey& vehicle_key, const BookingDetails& bd) const {
  return booking_id == bd.booking_id && vehicle_key.Verify(SignedBytes(bd, ts_access), signature);
}

}  // namespace vsa
