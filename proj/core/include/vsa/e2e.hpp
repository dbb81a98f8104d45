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

// Client-side driver for a full booking: registration, booking agreement,
// session keys, token generation by the servers, retrieval from the ledger
// and access at the vehicle. Talks to a deployment over HTTP only.

#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vsa/deployment.hpp"
#include "vsa/roles.hpp"

namespace vsa {

enum class Tamper { kNone, kLedgerCipher, kLedgerTag, kToken, kCertificate };
std::string_view TamperName(Tamper t);
// "none", "ledger-c", "ledger-tag", "token", "cert"; Error(kInvalidArgument).
Tamper ParseTamper(std::string_view name);

struct E2eOptions {
  Backend backend = Backend::kMimc;
  size_t vehicles = 1;
  size_t target = 0;  // which vehicle the booking is for
  uint64_t seed = 1;
  SignatureScheme owner_scheme = SignatureScheme::kEd25519;
  Tamper tamper = Tamper::kNone;
  bool revoke_after_publish = false;
  int step2_attempts = 1;  // each retry runs under a fresh session id
  std::chrono::milliseconds timeout{120000};
};

struct E2eReport {
  bool granted = false;
  bool confirmation_verified = false;
  std::string failed_step;  // "A", "B", "1".."4", "revoke"; empty on success
  std::string error;
  std::optional<AccessOutcome> outcome;
  std::optional<AccessOutcome> revocation_outcome;
  uint64_t owner_id = 0;
  uint32_t vehicle_id = 0;
  uint32_t booking_id = 0;
  SessionId session{};
  uint64_t ts_pub = 0;
  int step2_attempts = 0;
  std::vector<std::pair<std::string, double>> step_ms;

  bool ok() const { return granted && confirmation_verified; }
  std::string ToJson() const;
};

struct MutationTally {
  size_t trials = 0;
  size_t grants = 0;
  std::map<std::string, size_t> trials_by_target;
  std::map<std::string, size_t> grants_by_target;
  size_t controls = 0;        // unmodified presentations interleaved
  size_t control_grants = 0;
};

class E2eFlow {
 public:
  E2eFlow(Endpoints endpoints, E2eOptions options);
  ~E2eFlow();
  E2eFlow(const E2eFlow&) = delete;
  E2eFlow& operator=(const E2eFlow&) = delete;

  E2eReport Run();

  // After an honest Run: each trial flips one random bit of the ledger
  // ciphertext, the ledger tag, the token or the certificate (in turn) and
  // presents the result to the vehicle with a fresh challenge.
  MutationTally Mutate(size_t trials, uint64_t seed);

  const BookingDetails& booking() const;
  VerifyKey owner_public_key() const;
  // Cleartext no server may ever store or log: the packed booking, the
  // signed booking, the session keys and the vehicle keys. Available once
  // Run got past Step 1.
  std::vector<Bytes> Sentinels() const;

 private:
  struct State;
  std::unique_ptr<State> s_;
};

}  // namespace vsa
