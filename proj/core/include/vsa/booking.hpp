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

// Cleartext booking artifacts handled by owners, consumers and vehicles:
// booking details, signed bookings, certificates, access tokens and access
// confirmations. Server code must not include this header.
//
// Packed booking details (big-endian within fields, 96 bytes):
//   cert_hash 64 | vehicle_id 4 | location 8 | start 4 | end 4 | flags 4 |
//   access_rights 1 | booking_id 4 | zero padding 3

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vsa/backend.hpp"
#include "vsa/bytes.hpp"
#include "vsa/crypto.hpp"
#include "vsa/field.hpp"
#include "vsa/pubkey.hpp"

namespace vsa {

enum AccessRight : uint8_t {
  kRightUnlock = 1,
  kRightLock = 2,
  kRightStartEngine = 4,
  kRightOpenTrunk = 8,
};

struct Conditions {
  static constexpr uint32_t kRevoked = 1;

  uint32_t start = 0;  // epoch seconds, inclusive
  uint32_t end = 0;    // epoch seconds, exclusive
  uint32_t flags = 0;  // bit 0 revoked, bits 8..31 revision

  bool revoked() const { return (flags & kRevoked) != 0; }
  uint32_t revision() const { return flags >> 8; }
  static uint32_t MakeFlags(uint32_t revision, bool revoked);
  friend bool operator==(const Conditions&, const Conditions&) = default;
};

struct BookingDetails {
  static constexpr size_t kBlocks = 6;
  static constexpr size_t kBytes = 16 * kBlocks;

  Digest512 cert_hash{};
  uint32_t vehicle_id = 0;
  uint64_t location = 0;
  Conditions conditions;
  uint8_t access_rights = 0;
  uint32_t booking_id = 0;

  std::array<uint8_t, kBytes> Pack() const;
  // Error(kDecode) on a wrong length or non-zero padding.
  static BookingDetails Unpack(ByteSpan bytes);
  // start < end; a revocation carries the (0, 0) window instead.
  // Error(kInvalidArgument) otherwise.
  void Validate() const;
  // Counter nonce of the access token: revision << 32 | booking_id.
  uint64_t token_nonce() const { return (uint64_t{conditions.revision()} << 32) | booking_id; }
  friend bool operator==(const BookingDetails&, const BookingDetails&) = default;
};

// Little-endian block <-> field element. FieldToBlock rejects values
// of 2^128 and above with Error(kDecode).
FieldElement BlockToField(const FieldParams& field, const Block128& block);
Block128 FieldToBlock(const FieldElement& x);

// Booking details followed by the owner's signature over the packed bytes.
// Ed25519 gives 6 + 4 = 10 blocks; RSA-2048 gives 6 + 16 = 22.
struct SignedBooking {
  BookingDetails bd;
  Bytes signature;

  // Validates `bd` first.
  static SignedBooking Sign(const BookingDetails& bd, const SigningKey& key);
  bool Verify(const VerifyKey& key) const;

  size_t blocks() const { return (BookingDetails::kBytes + signature.size()) / 16; }
  Bytes Encode() const;
  // Accepts 64- and 256-byte signatures.
  static SignedBooking Decode(ByteSpan bytes);
  std::vector<Block128> Blocks() const;
  static SignedBooking FromBlocks(std::span<const Block128> blocks);
  std::vector<FieldElement> ToField(const FieldParams& field) const;
  static SignedBooking FromField(std::span<const FieldElement> blocks);
  friend bool operator==(const SignedBooking&, const SignedBooking&) = default;
};

size_t SignedBookingBlocks(SignatureScheme scheme);

// Self-contained consumer certificate: a subject name bound to a key.
struct Certificate {
  std::string subject;
  VerifyKey key;

  // "VSACERT1" | u16 subject length | subject | u16 key length | key
  Bytes Encode() const;
  static Certificate Decode(ByteSpan bytes);
  Digest512 Hash() const { return Sha3_512(Encode()); }
};

// The signed booking encrypted in counter mode under the vehicle key with
// nonce token_nonce(). MiMC tokens carry field elements, AES tokens blocks.
struct AccessToken {
  Backend backend = Backend::kMimc;
  uint64_t nonce = 0;
  std::vector<FieldElement> field_blocks;
  std::vector<Block128> aes_blocks;

  size_t blocks() const { return backend == Backend::kMimc ? field_blocks.size() : aes_blocks.size(); }
  // u8 backend | u64 nonce | u16 count | blocks (17- or 16-byte each)
  Bytes Encode() const;
  static AccessToken Decode(const FieldParams& field, ByteSpan bytes);
  friend bool operator==(const AccessToken&, const AccessToken&) = default;
};

// Vehicle-signed proof of access: signature over packed BD || u64 BE time.
struct AccessConfirmation {
  uint32_t booking_id = 0;
  uint64_t ts_access = 0;
  Bytes signature;

  static Bytes SignedBytes(const BookingDetails& bd, uint64_t ts_access);
  bool Verify(const VerifyKey& vehicle_key, const BookingDetails& bd) const;
};

}  // namespace vsa
