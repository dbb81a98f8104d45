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

// Control-plane messages exchanged between owner, consumer, servers, ledger
// and vehicle. On the wire each is a JSON object with a "type" tag, binary
// payloads in base64, session ids in hex. Payloads are opaque bytes here;
// interpreting them is up to the receiving role.

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

#include "vsa/backend.hpp"
#include "vsa/bytes.hpp"
#include "vsa/crypto.hpp"
#include "vsa/error.hpp"
#include "vsa/transport.hpp"

namespace vsa {

// Owner -> consumer: please derive session keys for this booking.
struct SesKGenReq {
  uint32_t booking_id = 0;
  Backend backend = Backend::kMimc;
  friend bool operator==(const SesKGenReq&, const SesKGenReq&) = default;
};

// Consumer -> owner: per-server sealed session-key shares.
struct SesKGenAck {
  uint32_t booking_id = 0;
  std::array<Bytes, 3> bundles;
  friend bool operator==(const SesKGenAck&, const SesKGenAck&) = default;
};

// Owner -> server i: everything server i needs for one session.
struct AtGenReq {
  SessionId session{};
  uint64_t owner_id = 0;
  Backend backend = Backend::kMimc;
  Bytes key_bundle;      // sealed by the consumer to this server
  Bytes booking_bundle;  // sealed by the owner to this server
  friend bool operator==(const AtGenReq&, const AtGenReq&) = default;
};

// Server -> ledger.
struct AtPubReq {
  SessionId session{};
  Bytes cipher;
  Bytes tag;
  friend bool operator==(const AtPubReq&, const AtPubReq&) = default;
};

// Ledger -> server.
struct MPubAck {
  SessionId session{};
  uint64_t ts = 0;
  friend bool operator==(const MPubAck&, const MPubAck&) = default;
};

// Server -> owner.
struct AtPubAck {
  SessionId session{};
  uint64_t ts = 0;
  friend bool operator==(const AtPubAck&, const AtPubAck&) = default;
};

// Vehicle -> consumer.
struct AccessChallenge {
  uint32_t booking_id = 0;
  Block128 nonce{};
  friend bool operator==(const AccessChallenge&, const AccessChallenge&) = default;
};

// Consumer -> vehicle.
struct AccessReq {
  uint32_t booking_id = 0;
  uint32_t vehicle_id = 0;
  uint8_t action = 0;
  Block128 challenge{};
  Bytes token;
  Bytes certificate;
  Bytes challenge_signature;
  friend bool operator==(const AccessReq&, const AccessReq&) = default;
};

// Vehicle -> consumer / owner.
struct AccessConfirm {
  uint32_t booking_id = 0;
  uint64_t ts_access = 0;
  Bytes signature;
  friend bool operator==(const AccessConfirm&, const AccessConfirm&) = default;
};

using Message = std::variant<SesKGenReq, SesKGenAck, AtGenReq, AtPubReq, MPubAck, AtPubAck, AccessChallenge,
                             AccessReq, AccessConfirm>;

// Associated data binding a sealed bundle to its server (and session).
Bytes KeyBundleAad(int party);
Bytes BookingBundleAad(int party, const SessionId& session);

// "SES_K_GEN_REQ", "SES_K_GEN_ACK", "AT_GEN_REQ", "AT_PUB_REQ", "M_PUB_ACK",
// "AT_PUB_ACK", "ACCESS_CHALLENGE", "ACCESS_REQ", "ACCESS_CONFIRM".
std::string_view MessageTypeName(const Message& m);

std::string ToJson(const Message& m);
// Validates the object against the schema of its type tag: required fields,
// field types, hex / base64 syntax, no unknown fields. Error(kParse) otherwise.
Message ParseMessage(std::string_view json);

// ParseMessage plus a check of the expected type.
template <class T>
T ParseMessageAs(std::string_view json) {
  Message m = ParseMessage(json);
  if (auto* v = std::get_if<T>(&m)) return std::move(*v);
  throw Error(ErrorCode::kParse, "unexpected message type " + std::string(MessageTypeName(m)));
}

}  // namespace vsa
