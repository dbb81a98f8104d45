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

// Client-side roles: the vehicle manufacturer's registry, the owner, the
// consumer and the vehicle's on-board unit, plus the single-process
// reference computation of a token and audit reconstruction. These handle
// cleartext and are never linked into server code paths.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "vsa/audit.hpp"
#include "vsa/booking.hpp"
#include "vsa/kdf.hpp"
#include "vsa/messages.hpp"
#include "vsa/pubkey.hpp"
#include "vsa/step2.hpp"

namespace vsa {

// Low 128 bits of a field element, little-endian; the AES form of a key.
Block128 LowBlock(const FieldElement& x);

// ---- vehicle manufacturer ----

struct VehicleRecord {
  uint64_t owner_id = 0;
  uint32_t vehicle_id = 0;
  Block128 key{};
  friend bool operator==(const VehicleRecord&, const VehicleRecord&) = default;
};

class VehicleManufacturer {
 public:
  // Error(kDuplicate) when (owner, vehicle) already exists.
  void AddVehicle(const VehicleRecord& record);
  const VehicleRecord& Find(uint64_t owner_id, uint32_t vehicle_id) const;
  std::vector<VehicleRecord> records() const;

  // Shares the vehicle's id and key into one row per server. The vehicle
  // must exist and not be registered yet (Error(kNotFound) / kDuplicate).
  std::array<VehicleRow, 3> Register(const FieldParams& field, uint64_t owner_id, uint32_t vehicle_id, Prg& prg);
  size_t registered(uint64_t owner_id) const;

  void Save(const std::filesystem::path& path) const;
  static VehicleManufacturer Load(const std::filesystem::path& path);

 private:
  std::map<std::pair<uint64_t, uint32_t>, VehicleRecord> vehicles_;
  std::map<std::pair<uint64_t, uint32_t>, uint32_t> registered_;  // -> row index
  std::map<uint64_t, uint32_t> next_index_;
};

// ---- consumer ----

struct ConsumerSession {
  uint32_t booking_id = 0;
  Backend backend = Backend::kMimc;
  SessionKeys keys;
};

// What the consumer learns from a ledger entry.
struct TokenDelivery {
  AccessToken token;
  uint32_t vehicle_id = 0;
};

// Expected tag of a booking under the given session keys (public bytes).
Bytes ExpectedTag(const FieldParams& field, Backend backend, const SessionKeys& keys, const BookingDetails& bd);

// Splits the consumer ciphertext into the access token and the vehicle id.
// A trailer block with non-zero padding is Error(kDecode); a garbled token
// block is not detected here, the vehicle makes that decision.
TokenDelivery OpenConsumerCipher(const FieldParams& field, const SessionKeys& keys, const ConsumerCipher& c);

// Session key shares for the three servers (before sealing).
std::array<SessionKeyShares, 3> ShareSessionKeys(const FieldParams& field, Backend backend, const SessionKeys& keys,
                                                 Prg& prg);

class Consumer {
 public:
  // `watermark` may be null (counters then only checked in memory).
  Consumer(const FieldParams& field, FieldElement master, SigningKey certificate_key, std::string subject,
           KdfWatermark* watermark = nullptr);

  const Certificate& certificate() const { return certificate_; }

  // Step 1: derives fresh session keys (counter 0 = next unused), shares
  // them and seals server i's bundle under servers[i].
  SesKGenAck Step1(const SesKGenReq& req, const std::array<KemPublicKey, 3>& servers, Prg& prg,
                   uint64_t counter = 0);
  const ConsumerSession& session(uint32_t booking_id) const;
  // Re-derives the keys of a session started by an earlier process; the
  // counter must already be below the watermark.
  const ConsumerSession& Resume(uint32_t booking_id, Backend backend, uint64_t counter);

  // Step 3 on a given ledger entry: the tag must equal the expected one
  // (Error(kTagInvalid) otherwise), then the ciphertext is opened.
  TokenDelivery Step3(const BookingDetails& bd, ByteSpan cipher, ByteSpan tag) const;
  Bytes ExpectedTagFor(const BookingDetails& bd) const;

  // Step 4, consumer side: answers the vehicle's challenge.
  AccessReq RequestAccess(const TokenDelivery& delivery, uint32_t booking_id, uint8_t action,
                          const AccessChallenge& challenge) const;

 private:
  const FieldParams* field_;
  FieldElement master_;
  SigningKey certificate_key_;
  Certificate certificate_;
  KdfWatermark own_watermark_;
  KdfWatermark* watermark_;
  std::map<uint32_t, ConsumerSession> sessions_;
};

// Bytes signed in the challenge-response.
Bytes ChallengeMessage(const Block128& challenge, uint32_t vehicle_id);

// ---- owner ----

class Owner {
 public:
  Owner(uint64_t owner_id, SigningKey signing_key);

  uint64_t id() const { return id_; }
  VerifyKey public_key() const { return key_.Public(); }

  SignedBooking Sign(const BookingDetails& bd) const { return SignedBooking::Sign(bd, key_); }
  // Secret shares of the owner's input for each server.
  static std::array<BookingShares, 3> ShareBooking(const FieldParams& field, Backend backend,
                                                   const SignedBooking& signed_booking, Prg& prg);

  // Step 1, owner side: signs `bd`, shares it and addresses one request to
  // each server, carrying the consumer's sealed bundle for that server.
  std::array<AtGenReq, 3> Step1(const FieldParams& field, const BookingDetails& bd, Backend backend,
                                const SesKGenAck& ack, const std::array<KemPublicKey, 3>& servers,
                                const SessionId& session, Prg& prg) const;

  // Booking details for the next revision of `bd`: a new window, or a
  // revocation ((0, 0) window, revoked flag, no rights) when `window` is
  // empty. `cert_hash` names who will present the token.
  static BookingDetails NextRevision(const BookingDetails& bd, std::optional<std::pair<uint32_t, uint32_t>> window,
                                     const Digest512& cert_hash);

 private:
  uint64_t id_;
  SigningKey key_;
};

// ---- vehicle ----

enum class AccessOutcome {
  kGranted,
  kRevocationRecorded,
  kWrongVehicle,
  kBadToken,
  kBadSignature,
  kSuperseded,
  kCertMismatch,
  kChallengeFailed,
  kNotYetValid,
  kExpired,
  kActionDenied,
};
std::string_view AccessOutcomeName(AccessOutcome outcome);

struct AccessDecision {
  AccessOutcome outcome = AccessOutcome::kBadToken;
  std::optional<AccessConfirm> confirmation;
  std::optional<BookingDetails> bd;

  bool granted() const { return outcome == AccessOutcome::kGranted; }
};

class VehicleObu {
 public:
  using Clock = std::function<uint64_t()>;

  VehicleObu(const FieldParams& field, uint32_t vehicle_id, Block128 key, VerifyKey owner_key, SigningKey vehicle_key,
             Clock clock);

  uint32_t vehicle_id() const { return vehicle_id_; }
  VerifyKey public_key() const { return vehicle_key_.Public(); }

  // Fresh single-use challenge.
  AccessChallenge Challenge(uint32_t booking_id);
  // Checks the request; every failure has its own outcome.
  AccessDecision Decide(const AccessReq& req);
  std::optional<uint32_t> revision(uint32_t booking_id) const;

  // Outstanding challenges and highest revisions seen, for persistence.
  struct Memory {
    std::set<Block128> challenges;
    std::map<uint32_t, uint32_t> revisions;
  };
  Memory memory() const { return {challenges_, revisions_}; }
  void Restore(Memory m);

 private:
  const FieldParams* field_;
  uint32_t vehicle_id_;
  Block128 key_;
  VerifyKey owner_key_;
  SigningKey vehicle_key_;
  Clock clock_;
  std::set<Block128> challenges_;
  std::map<uint32_t, uint32_t> revisions_;
};

// Decrypts a token under the vehicle key; Error(kDecode) when the result
// is not a well-formed signed booking.
SignedBooking DecryptToken(const FieldParams& field, const Block128& vehicle_key, const AccessToken& token);

// ---- single-process reference ----

struct OracleInput {
  Backend backend = Backend::kMimc;
  SessionKeys keys;
  SignedBooking booking;
  std::vector<std::pair<uint32_t, Block128>> vehicles;  // the owner's registered (id, key) rows
  uint32_t vehicle_id = 0;
  uint64_t nonce = 0;
};

struct OracleOutput {
  Step2Result published;
  AccessToken token;
};

// Token generation by one trusted party, with the same arithmetic as the
// distributed computation (key = sum / XOR of the matching rows' keys).
OracleOutput ClearOracle(const FieldParams& field, const OracleInput& in);

// ---- audit ----

struct AuditResult {
  SignedBooking booking;
  bool signature_valid = false;
};

// Needs records of one session from at least two distinct servers
// (Error(kRefused) otherwise).
AuditResult AuditReconstruct(const std::vector<AuditRecord>& records, const SessionId& session,
                             const VerifyKey& owner_key);

}  // namespace vsa
