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

// A complete booking scenario for tests: a manufacturer with n vehicles
// registered for one owner, a consumer, three server key pairs, and a
// helper that runs Step 2 at the three parties from the AT_GEN_REQs.

#pragma once

#include <array>
#include <vector>

#include "mpc_harness.hpp"
#include "vsa/roles.hpp"
#include "vsa/session_inputs.hpp"

namespace vsa::testing {

inline std::array<uint8_t, 32> SeedBytes(uint64_t seed, uint8_t domain) {
  std::array<uint8_t, 32> out{};
  Prg prg = Prg::FromSeed(seed * 131 + domain, "vsa-test-keys");
  prg.Fill(out);
  return out;
}

struct Scenario {
  const FieldParams* field = &FieldParams::Production();
  Backend backend = Backend::kMimc;
  uint64_t owner_id = 7;
  VehicleManufacturer vm;
  std::vector<std::pair<uint32_t, Block128>> vehicles;
  std::array<std::vector<VehicleRow>, 3> rows;
  SigningKey owner_key;
  SigningKey consumer_key;
  FieldElement master;
  std::array<KemPrivateKey, 3> kem;
  std::array<KemPublicKey, 3> kem_pub;
  std::string subject;
  BookingDetails bd;
  SessionId session{};
};

// n vehicles with ids 1000 + 17 i; the booking targets vehicle `target`.
inline Scenario MakeScenario(Backend backend, size_t n, uint64_t seed, size_t target = 0) {
  Scenario s;
  s.backend = backend;
  Prg prg = Prg::FromSeed(seed, "vsa-test-scenario");
  for (size_t i = 0; i < n; ++i) {
    VehicleRecord rec{s.owner_id, static_cast<uint32_t>(1000 + 17 * i), prg.NextKey()};
    s.vm.AddVehicle(rec);
    s.vehicles.emplace_back(rec.vehicle_id, rec.key);
    auto rows = s.vm.Register(*s.field, s.owner_id, rec.vehicle_id, prg);
    for (int p = 0; p < 3; ++p) s.rows[p].push_back(rows[p]);
  }
  s.owner_key = SigningKey::Ed25519FromSeed(SeedBytes(seed, 1));
  s.consumer_key = SigningKey::Ed25519FromSeed(SeedBytes(seed, 2));
  s.master = prg.NextField(*s.field);
  for (int p = 0; p < 3; ++p) {
    s.kem[p] = KemPrivateKey::FromBytes(SeedBytes(seed, static_cast<uint8_t>(10 + p)));
    s.kem_pub[p] = s.kem[p].Public();
  }
  s.subject = "consumer-" + std::to_string(seed);
  Certificate cert{s.subject, s.consumer_key.Public()};
  s.bd.cert_hash = cert.Hash();
  s.bd.vehicle_id = s.vehicles[target].first;
  s.bd.location = prg.NextU64();
  s.bd.conditions = Conditions{1'700'000'000, 1'700'086'400, 0};
  s.bd.access_rights = kRightUnlock | kRightLock;
  s.bd.booking_id = static_cast<uint32_t>(prg.NextU64());
  s.session = SessionIdFromSeed(seed ^ 0x5e55);
  return s;
}

// Runs Step 1 for `consumer` (which keeps the session keys).
inline std::array<AtGenReq, 3> RunStep1(Scenario& s, Consumer& consumer, const BookingDetails& bd, uint64_t seed) {
  Prg prg = Prg::FromSeed(seed, "vsa-test-step1");
  SesKGenAck ack = consumer.Step1(SesKGenReq{bd.booking_id, s.backend}, s.kem_pub, prg);
  Owner owner(s.owner_id, s.owner_key);
  return owner.Step1(*s.field, bd, s.backend, ack, s.kem_pub, s.session, prg);
}

inline ThreePartyResult<Step2Result> RunStep2(Scenario& s, const std::array<AtGenReq, 3>& reqs, uint64_t seed,
                                              LinkFactory links = {}) {
  Step2Params params;
  params.backend = s.backend;
  params.rows = s.rows[0].size();
  params.m_blocks = SignedBookingBlocks(s.owner_key.scheme());
  TapeCounts need = Step2Need(*s.field, params);
  return RunThreeParties<Step2Result>(
      *s.field, need, seed,
      [&](PartyContext ctx) {
        SessionInputs in = OpenSessionInputs(*s.field, ctx.party, s.kem[ctx.party], reqs[ctx.party]);
        return Step2Generate(ctx.engine, s.rows[ctx.party], std::move(in.keys), std::move(in.booking));
      },
      false, std::move(links));
}

inline Consumer MakeConsumer(const Scenario& s) {
  return Consumer(*s.field, s.master, s.consumer_key, s.subject);
}

}  // namespace vsa::testing
