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

// Share-level token generation run jointly by the three servers. Everything
// here is either a share or a value the servers are allowed to learn
// (owner id, sizes, the consumer ciphertext and the tag).
//
// Arithmetic backend, per session:
//   eq_y   = [id == id_y]                    all rows in parallel
//   k_veh  = sum_y eq_y * k_y
//   tweak  = E_{k_veh}(nonce)
//   at_j   = m_j + E_{k_veh}(tweak + j)      j = 1..|m|
//   c_j    = x_j + E_{k_enc}(enc_tweak + j)  x = at || (id + 2^32 nonce)
//   tag    = HtMAC over the 6 booking blocks with tag_enc, tag_mac
// enc_tweak = E_{k_enc}(1) and tag_tweak = E_{k_tag_enc}(1) come shared
// from the consumer, so only the vehicle tweak is computed jointly.
//
// Boolean backend: the same dataflow with AES-128 in counter mode (counter
// block nonce || j), key selection by a bitwise equality tree and a
// CBC-MAC over the booking blocks. The 11th block carries id in bits 0..31
// and the nonce in bits 32..95.

#pragma once

#include <cstdint>
#include <vector>

#include "vsa/backend.hpp"
#include "vsa/engine.hpp"
#include "vsa/equality.hpp"
#include "vsa/mimc.hpp"
#include "vsa/transport.hpp"

namespace vsa {

inline constexpr size_t kBookingBlocks = 6;

// One registered vehicle as stored by one server.
struct VehicleRow {
  uint64_t owner_id = 0;
  uint32_t index = 0;
  RepShare vehicle_id;
  RepShare key;
  BitShares vehicle_id_bits;  // 32 bits
  BitShares key_bits;         // 128 bits

  Bytes Encode() const;
  static VehicleRow Decode(const FieldParams& field, ByteSpan bytes);
  friend bool operator==(const VehicleRow&, const VehicleRow&) = default;
};

// One server's shares of the consumer's session material.
//   arithmetic: enc, tag_enc, tag_mac, enc_tweak, tag_tweak
//   Boolean:    enc (128 bits) || tag_mac (128 bits)
struct SessionKeyShares {
  static constexpr size_t kFieldValues = 5;
  static constexpr size_t kBits = 256;

  Backend backend = Backend::kMimc;
  std::vector<RepShare> field;
  BitShares bits;

  Bytes Encode() const;
  static SessionKeyShares Decode(const FieldParams& field, ByteSpan bytes);
  void Check(int party) const;
};

// One server's shares of the owner's input: the signed booking blocks, the
// vehicle id and the token nonce.
struct BookingShares {
  Backend backend = Backend::kMimc;
  std::vector<RepShare> m;
  RepShare vehicle_id;
  RepShare nonce;
  BitShares m_bits;           // 128 per block
  BitShares vehicle_id_bits;  // 32
  BitShares nonce_bits;       // 64

  size_t blocks() const { return backend == Backend::kMimc ? m.size() : m_bits.size() / 128; }
  Bytes Encode() const;
  static BookingShares Decode(const FieldParams& field, ByteSpan bytes);
  void Check(int party) const;
  friend bool operator==(const BookingShares&, const BookingShares&) = default;
};

// Public consumer ciphertext: counter mode under k_enc with nonce 1.
struct ConsumerCipher {
  Backend backend = Backend::kMimc;
  TaggedCiphertext mimc;            // arithmetic backend
  std::vector<Block128> aes_blocks;  // Boolean backend

  size_t blocks() const { return backend == Backend::kMimc ? mimc.blocks.size() : aes_blocks.size(); }
  // u8 backend | TaggedCiphertext encoding, or u16 count | blocks
  Bytes Encode() const;
  static ConsumerCipher Decode(const FieldParams& field, ByteSpan bytes);
};

// Published artifacts of one session.
struct Step2Result {
  Bytes cipher;  // ConsumerCipher encoding
  Bytes tag;     // field element encoding (17 bytes) or AES block (16)
  friend bool operator==(const Step2Result&, const Step2Result&) = default;
};

struct Step2Params {
  Backend backend = Backend::kMimc;
  size_t rows = 1;
  size_t m_blocks = 10;
  EqzConfig eqz;
};

// Exact preprocessing one session consumes.
TapeCounts Step2Need(const FieldParams& field, const Step2Params& params);

// Counts from the construction, for reporting: PRF (cipher) calls and, for
// the Boolean backend, AND gates.
size_t Step2PrfCalls(const Step2Params& params);
size_t Step2AndGates(const Step2Params& params);

// Runs the backend named by `booking.backend`; every row must belong to the
// same owner. Throws Error(kParameterMismatch) on inconsistent inputs.
Task<Step2Result> Step2Generate(Engine& e, const std::vector<VehicleRow>& rows, SessionKeyShares keys,
                                BookingShares booking, EqzConfig eqz = {});

}  // namespace vsa
