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

#include "vsa/roles.hpp"

#include <gtest/gtest.h>

#include <filesystem>

#include <unistd.h>

#include "../support/scenario.hpp"
#include "vsa/boolcirc.hpp"

namespace vsa {
namespace {

using testing::MakeConsumer;
using testing::MakeScenario;
using testing::RunStep1;
using testing::RunStep2;
using testing::Scenario;
using testing::SeedBytes;

std::filesystem::path TempPath(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("vsa_roles_" + std::to_string(::getpid()) + "_" + name);
}

// One vehicle with a settable clock.
struct Bench {
  Scenario s;
  Consumer consumer;
  uint64_t now = 1'700'000'100;
  VehicleObu obu;
  SigningKey vehicle_key;

  Bench(Backend b, size_t n, uint64_t seed, size_t target = 0)
      : s(MakeScenario(b, n, seed, target)),
        consumer(MakeConsumer(s)),
        obu(*s.field, s.vehicles[target].first, s.vehicles[target].second, s.owner_key.Public(),
            SigningKey::Ed25519FromSeed(SeedBytes(seed, 30)), [this] { return now; }),
        vehicle_key(SigningKey::Ed25519FromSeed(SeedBytes(seed, 30))) {}

  // Steps 1-3 for `bd`; returns the published artifacts.
  Step2Result Publish(const BookingDetails& bd, uint64_t seed) {
    s.session = SessionIdFromSeed(seed);
    auto reqs = RunStep1(s, consumer, bd, seed);
    return RunStep2(s, reqs, seed).values[0];
  }

  AccessDecision Present(const TokenDelivery& d, uint32_t booking_id, uint8_t action = kRightUnlock) {
    AccessChallenge ch = obu.Challenge(booking_id);
    return obu.Decide(consumer.RequestAccess(d, booking_id, action, ch));
  }
};

TEST(Manufacturer, RegisterAndDuplicate) {
  const FieldParams& f = FieldParams::Production();
  VehicleManufacturer vm;
  Prg prg = Prg::FromSeed(1);
  std::vector<VehicleRecord> recs;
  for (uint32_t i = 0; i < 3; ++i) {
    recs.push_back({5, 100 + i, prg.NextKey()});
    vm.AddVehicle(recs.back());
  }
  EXPECT_THROW(vm.AddVehicle(recs[0]), Error);
  for (uint32_t i = 0; i < 3; ++i) {
    auto rows = vm.Register(f, 5, 100 + i, prg);
    for (int p = 0; p < 3; ++p) {
      EXPECT_EQ(rows[p].owner_id, 5u);
      EXPECT_EQ(rows[p].index, i);
    }
    std::vector<RepShare> ids = {rows[0].vehicle_id, rows[2].vehicle_id};
    EXPECT_EQ(Reconstruct(ids), FieldElement(f, 100 + i));
    EXPECT_EQ(FieldToBlock(Reconstruct(rows[1].key, rows[2].key)), recs[i].key);
    std::vector<BitShares> kb = {rows[0].key_bits, rows[1].key_bits};
    EXPECT_EQ(BitsBlock(ReconstructBits(kb), 0), recs[i].key);
  }
  EXPECT_EQ(vm.registered(5), 3u);
  EXPECT_EQ(vm.registered(6), 0u);
  try {
    vm.Register(f, 5, 100, prg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDuplicate);
  }
  try {
    vm.Register(f, 5, 999, prg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotFound);
  }
  auto path = TempPath("vm.json");
  vm.Save(path);
  VehicleManufacturer back = VehicleManufacturer::Load(path);
  EXPECT_EQ(back.records(), vm.records());
  EXPECT_EQ(back.registered(5), 3u);
  EXPECT_THROW(back.Register(f, 5, 101, prg), Error);
  std::filesystem::remove(path);
}

TEST(Consumer, Step1SharesOpenToSessionKeys) {
  for (Backend b : {Backend::kMimc, Backend::kAes}) {
    Scenario s = MakeScenario(b, 1, 21);
    Consumer consumer = MakeConsumer(s);
    auto reqs = RunStep1(s, consumer, s.bd, 21);
    std::array<SessionInputs, 3> in;
    for (int p = 0; p < 3; ++p) in[p] = OpenSessionInputs(*s.field, p, s.kem[p], reqs[p]);
    const SessionKeys& keys = consumer.session(s.bd.booking_id).keys;
    EXPECT_EQ(keys.counter, 1u);
    if (b == Backend::kMimc) {
      std::vector<std::vector<RepShare>> per = {in[0].keys.field, in[2].keys.field};
      auto v = ReconstructVector(per);
      const Mimc& mimc = Mimc::For(*s.field);
      EXPECT_EQ(v[0], keys.enc);
      EXPECT_EQ(v[1], keys.tag_enc);
      EXPECT_EQ(v[2], keys.tag_mac);
      EXPECT_EQ(v[3], mimc.Encrypt(keys.enc, FieldElement::One(*s.field)));
      EXPECT_EQ(v[4], mimc.Encrypt(keys.tag_enc, FieldElement::One(*s.field)));
    } else {
      std::vector<BitShares> bits = {in[1].keys.bits, in[2].keys.bits};
      BitVector v = ReconstructBits(bits);
      EXPECT_EQ(BitsBlock(v, 0), LowBlock(keys.enc));
      EXPECT_EQ(BitsBlock(v, 128), LowBlock(keys.tag_mac));
    }
    // The owner's shares open to the signed booking.
    SignedBooking expected = SignedBooking::Sign(s.bd, s.owner_key);
    if (b == Backend::kMimc) {
      std::vector<std::vector<RepShare>> per = {in[0].booking.m, in[1].booking.m};
      EXPECT_EQ(SignedBooking::FromField(ReconstructVector(per)), expected);
    } else {
      std::vector<BitShares> bits = {in[0].booking.m_bits, in[2].booking.m_bits};
      BitVector v = ReconstructBits(bits);
      std::vector<Block128> blocks;
      for (size_t j = 0; j < 10; ++j) blocks.push_back(BitsBlock(v, 128 * j));
      EXPECT_EQ(SignedBooking::FromBlocks(blocks), expected);
    }
  }
}

TEST(Consumer, CountersAreFreshAndDistinct) {
  Scenario s = MakeScenario(Backend::kMimc, 1, 22);
  auto path = TempPath("watermark");
  std::filesystem::remove(path);
  {
    KdfWatermark wm(path);
    Consumer consumer(*s.field, s.master, s.consumer_key, s.subject, &wm);
    Prg prg = Prg::FromSeed(1);
    consumer.Step1(SesKGenReq{1, Backend::kMimc}, s.kem_pub, prg, 1);
    consumer.Step1(SesKGenReq{2, Backend::kMimc}, s.kem_pub, prg, 2);
    EXPECT_NE(consumer.session(1).keys.enc, consumer.session(2).keys.enc);
    EXPECT_NE(consumer.session(1).keys.tag_mac, consumer.session(2).keys.tag_mac);
    try {
      consumer.Step1(SesKGenReq{3, Backend::kMimc}, s.kem_pub, prg, 2);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kCounterReuse);
    }
  }
  // The watermark survives a restart.
  KdfWatermark wm(path);
  Consumer consumer(*s.field, s.master, s.consumer_key, s.subject, &wm);
  Prg prg = Prg::FromSeed(2);
  EXPECT_THROW(consumer.Step1(SesKGenReq{3, Backend::kMimc}, s.kem_pub, prg, 1), Error);
  consumer.Step1(SesKGenReq{3, Backend::kMimc}, s.kem_pub, prg);
  EXPECT_EQ(consumer.session(3).keys.counter, 3u);
  std::filesystem::remove(path);
}

TEST(Owner, Step1RejectsMismatchedAck) {
  Scenario s = MakeScenario(Backend::kMimc, 1, 23);
  Consumer consumer = MakeConsumer(s);
  Prg prg = Prg::FromSeed(3);
  SesKGenAck ack = consumer.Step1(SesKGenReq{s.bd.booking_id + 1, Backend::kMimc}, s.kem_pub, prg);
  Owner owner(s.owner_id, s.owner_key);
  EXPECT_THROW(owner.Step1(*s.field, s.bd, Backend::kMimc, ack, s.kem_pub, s.session, prg), Error);
}

class RoleFlow : public ::testing::TestWithParam<Backend> {};

TEST_P(RoleFlow, HonestRunGrantsAndConfirms) {
  Bench b(GetParam(), 2, 31, 1);
  Step2Result pub = b.Publish(b.s.bd, 31);
  TokenDelivery d = b.consumer.Step3(b.s.bd, pub.cipher, pub.tag);
  EXPECT_EQ(d.vehicle_id, b.s.bd.vehicle_id);
  AccessDecision dec = b.Present(d, b.s.bd.booking_id);
  ASSERT_EQ(dec.outcome, AccessOutcome::kGranted) << AccessOutcomeName(dec.outcome);
  ASSERT_TRUE(dec.confirmation.has_value());
  AccessConfirmation conf{dec.confirmation->booking_id, dec.confirmation->ts_access, dec.confirmation->signature};
  EXPECT_TRUE(conf.Verify(b.vehicle_key.Public(), b.s.bd));
  EXPECT_EQ(conf.ts_access, b.now);

  // Boundaries: start inclusive, end exclusive.
  b.now = b.s.bd.conditions.start;
  EXPECT_EQ(b.Present(d, b.s.bd.booking_id).outcome, AccessOutcome::kGranted);
  b.now = b.s.bd.conditions.start - 1;
  EXPECT_EQ(b.Present(d, b.s.bd.booking_id).outcome, AccessOutcome::kNotYetValid);
  b.now = b.s.bd.conditions.end;
  EXPECT_EQ(b.Present(d, b.s.bd.booking_id).outcome, AccessOutcome::kExpired);
  b.now = b.s.bd.conditions.end - 1;
  EXPECT_EQ(b.Present(d, b.s.bd.booking_id, kRightStartEngine).outcome, AccessOutcome::kActionDenied);
  EXPECT_EQ(b.Present(d, b.s.bd.booking_id, kRightUnlock | kRightLock).outcome, AccessOutcome::kActionDenied);
  EXPECT_EQ(b.Present(d, b.s.bd.booking_id, 0).outcome, AccessOutcome::kActionDenied);
  EXPECT_EQ(b.Present(d, b.s.bd.booking_id, kRightLock).outcome, AccessOutcome::kGranted);
}

TEST_P(RoleFlow, VehicleRejectsEachFailedCheck) {
  Bench b(GetParam(), 1, 32);
  Step2Result pub = b.Publish(b.s.bd, 32);
  TokenDelivery d = b.consumer.Step3(b.s.bd, pub.cipher, pub.tag);
  const uint32_t bid = b.s.bd.booking_id;

  TokenDelivery wrong = d;
  wrong.vehicle_id += 1;
  EXPECT_EQ(b.Present(wrong, bid).outcome, AccessOutcome::kWrongVehicle);

  EXPECT_EQ(b.Present(d, bid + 1).outcome, AccessOutcome::kBadToken);

  // Another consumer presenting the token.
  {
    Consumer thief(*b.s.field, b.s.master, SigningKey::Ed25519FromSeed(SeedBytes(99, 1)), b.s.subject);
    AccessChallenge ch = b.obu.Challenge(bid);
    EXPECT_EQ(b.obu.Decide(thief.RequestAccess(d, bid, kRightUnlock, ch)).outcome, AccessOutcome::kCertMismatch);
  }
  // Replayed challenge.
  {
    AccessChallenge ch = b.obu.Challenge(bid);
    AccessReq req = b.consumer.RequestAccess(d, bid, kRightUnlock, ch);
    EXPECT_EQ(b.obu.Decide(req).outcome, AccessOutcome::kGranted);
    EXPECT_EQ(b.obu.Decide(req).outcome, AccessOutcome::kChallengeFailed);
  }
  // Signature over a different challenge.
  {
    AccessChallenge ch = b.obu.Challenge(bid);
    AccessChallenge other = b.obu.Challenge(bid);
    AccessReq req = b.consumer.RequestAccess(d, bid, kRightUnlock, other);
    req.challenge = ch.nonce;
    EXPECT_EQ(b.obu.Decide(req).outcome, AccessOutcome::kChallengeFailed);
  }
  // Garbage token bytes.
  {
    AccessChallenge ch = b.obu.Challenge(bid);
    AccessReq req = b.consumer.RequestAccess(d, bid, kRightUnlock, ch);
    req.token.resize(5);
    EXPECT_EQ(b.obu.Decide(req).outcome, AccessOutcome::kBadToken);
  }
  // A token from a different owner key.
  {
    VehicleObu other(*b.s.field, b.obu.vehicle_id(), b.s.vehicles[0].second,
                     SigningKey::Ed25519FromSeed(SeedBytes(77, 1)).Public(), b.vehicle_key, [] { return 1'700'000'100; });
    AccessChallenge ch = other.Challenge(bid);
    EXPECT_EQ(other.Decide(b.consumer.RequestAccess(d, bid, kRightUnlock, ch)).outcome,
              AccessOutcome::kBadSignature);
  }
}

TEST_P(RoleFlow, TamperedLedgerEntry) {
  Bench b(GetParam(), 1, 33);
  Step2Result pub = b.Publish(b.s.bd, 33);
  // Tag flip: the consumer rejects at once.
  Bytes tag = pub.tag;
  tag[3] ^= 1;
  try {
    b.consumer.Step3(b.s.bd, pub.cipher, tag);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTagInvalid);
  }
  // Ciphertext flip inside a token block: the tag still matches, the
  // vehicle rejects.
  Bytes c = pub.cipher;
  c[c.size() / 2] ^= 0x10;
  TokenDelivery d;
  try {
    d = b.consumer.Step3(b.s.bd, c, pub.tag);
  } catch (const Error&) {
    return;  // not decodable at all is fine too
  }
  EXPECT_FALSE(b.Present(d, b.s.bd.booking_id).granted());
}

TEST_P(RoleFlow, WrongSessionKeysFindNoEntry) {
  Bench b(GetParam(), 1, 34);
  Step2Result pub = b.Publish(b.s.bd, 34);
  Scenario other = MakeScenario(GetParam(), 1, 35);
  other.bd = b.s.bd;
  Consumer stranger = MakeConsumer(other);
  Prg prg = Prg::FromSeed(9);
  stranger.Step1(SesKGenReq{b.s.bd.booking_id, GetParam()}, b.s.kem_pub, prg);
  EXPECT_NE(stranger.ExpectedTagFor(b.s.bd), pub.tag);
  EXPECT_EQ(b.consumer.ExpectedTagFor(b.s.bd), pub.tag);
}

TEST_P(RoleFlow, RandomTokenBitFlipsNeverGrant) {
  Bench b(GetParam(), 1, 36);
  Step2Result pub = b.Publish(b.s.bd, 36);
  TokenDelivery d = b.consumer.Step3(b.s.bd, pub.cipher, pub.tag);
  Prg prg = Prg::FromSeed(36);
  const Bytes token = d.token.Encode();
  int grants = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    AccessChallenge ch = b.obu.Challenge(b.s.bd.booking_id);
    AccessReq req = b.consumer.RequestAccess(d, b.s.bd.booking_id, kRightUnlock, ch);
    size_t bit = prg.NextU64() % (8 * token.size());
    req.token[bit / 8] ^= static_cast<uint8_t>(1 << (bit % 8));
    if (b.obu.Decide(req).granted()) ++grants;
  }
  EXPECT_EQ(grants, 0);
}

TEST_P(RoleFlow, EveryCipherAndTokenBitFlipIsRejected) {
  Bench b(GetParam(), 2, 41, 1);
  Step2Result pub = b.Publish(b.s.bd, 41);
  int grants = 0;
  for (size_t bit = 0; bit < 8 * pub.cipher.size(); ++bit) {
    Bytes c = pub.cipher;
    c[bit / 8] ^= static_cast<uint8_t>(1 << (bit % 8));
    try {
      if (b.Present(b.consumer.Step3(b.s.bd, c, pub.tag), b.s.bd.booking_id).granted()) ++grants;
    } catch (const Error&) {
      // Rejected by the consumer.
    }
  }
  EXPECT_EQ(grants, 0);

  TokenDelivery d = b.consumer.Step3(b.s.bd, pub.cipher, pub.tag);
  const Bytes token = d.token.Encode();
  for (size_t bit = 0; bit < 8 * token.size(); ++bit) {
    AccessChallenge ch = b.obu.Challenge(b.s.bd.booking_id);
    AccessReq req = b.consumer.RequestAccess(d, b.s.bd.booking_id, kRightUnlock, ch);
    req.token[bit / 8] ^= static_cast<uint8_t>(1 << (bit % 8));
    if (b.obu.Decide(req).granted()) ++grants;
  }
  EXPECT_EQ(grants, 0);
  EXPECT_TRUE(b.Present(d, b.s.bd.booking_id).granted());
}

TEST_P(RoleFlow, RevocationSupersedesTheOriginalToken) {
  Bench b(GetParam(), 1, 37);
  const BookingDetails original = b.s.bd;
  Step2Result pub = b.Publish(original, 37);
  TokenDelivery d = b.consumer.Step3(original, pub.cipher, pub.tag);
  EXPECT_TRUE(b.Present(d, original.booking_id).granted());

  // The owner revokes alone: it plays the consumer role for the new
  // session keys, addressed to the same certificate hash.
  BookingDetails revoked = Owner::NextRevision(original, std::nullopt, original.cert_hash);
  EXPECT_TRUE(revoked.conditions.revoked());
  EXPECT_EQ(revoked.conditions.revision(), 1u);
  Consumer owner_as_consumer(*b.s.field, b.s.master + FieldElement::One(*b.s.field), b.s.consumer_key, b.s.subject);
  b.s.session = SessionIdFromSeed(38);
  auto reqs = RunStep1(b.s, owner_as_consumer, revoked, 38);
  Step2Result rpub = RunStep2(b.s, reqs, 38).values[0];
  EXPECT_EQ(rpub.cipher.size(), pub.cipher.size());
  EXPECT_EQ(rpub.tag.size(), pub.tag.size());
  TokenDelivery rd = owner_as_consumer.Step3(revoked, rpub.cipher, rpub.tag);
  AccessChallenge ch = b.obu.Challenge(revoked.booking_id);
  AccessDecision dec = b.obu.Decide(b.consumer.RequestAccess(rd, revoked.booking_id, kRightUnlock, ch));
  EXPECT_EQ(dec.outcome, AccessOutcome::kRevocationRecorded);
  EXPECT_EQ(b.obu.revision(original.booking_id), 1u);
  EXPECT_EQ(b.Present(d, original.booking_id).outcome, AccessOutcome::kSuperseded);
}

TEST_P(RoleFlow, UpdatedWindowGrantsOnlyInsideIt) {
  Bench b(GetParam(), 1, 39);
  const BookingDetails original = b.s.bd;
  Step2Result pub = b.Publish(original, 39);
  TokenDelivery d = b.consumer.Step3(original, pub.cipher, pub.tag);

  const uint32_t start = original.conditions.end + 1000, end = start + 3600;
  BookingDetails updated = Owner::NextRevision(original, std::make_pair(start, end), original.cert_hash);
  Consumer c2(*b.s.field, b.s.master, b.s.consumer_key, b.s.subject);
  Prg prg = Prg::FromSeed(40);
  b.s.session = SessionIdFromSeed(40);
  SesKGenAck ack = c2.Step1(SesKGenReq{updated.booking_id, GetParam()}, b.s.kem_pub, prg, 7);
  Owner owner(b.s.owner_id, b.s.owner_key);
  auto reqs = owner.Step1(*b.s.field, updated, GetParam(), ack, b.s.kem_pub, b.s.session, prg);
  Step2Result upub = RunStep2(b.s, reqs, 40).values[0];
  TokenDelivery ud = c2.Step3(updated, upub.cipher, upub.tag);

  b.now = start - 1;
  EXPECT_EQ(b.Present(ud, updated.booking_id).outcome, AccessOutcome::kNotYetValid);
  b.now = start;
  EXPECT_TRUE(b.Present(ud, updated.booking_id).granted());
  b.now = end;
  EXPECT_EQ(b.Present(ud, updated.booking_id).outcome, AccessOutcome::kExpired);
  // The old window's token is now stale.
  b.now = original.conditions.start;
  EXPECT_EQ(b.Present(d, original.booking_id).outcome, AccessOutcome::kSuperseded);
}

TEST_P(RoleFlow, OracleAgreesWithItsOwnVehicle) {
  Scenario s = MakeScenario(GetParam(), 1, 41);
  OracleInput in;
  in.backend = GetParam();
  in.keys = Kdf(Mimc::For(*s.field), s.master, 1);
  in.booking = SignedBooking::Sign(s.bd, s.owner_key);
  in.vehicles = s.vehicles;
  in.vehicle_id = s.bd.vehicle_id;
  in.nonce = s.bd.token_nonce();
  OracleOutput a = ClearOracle(*s.field, in);
  EXPECT_EQ(ClearOracle(*s.field, in).published, a.published);
  EXPECT_EQ(DecryptToken(*s.field, s.vehicles[0].second, a.token), in.booking);
}

TEST_P(RoleFlow, AuditNeedsTwoServers) {
  Scenario s = MakeScenario(GetParam(), 1, 42);
  Consumer consumer = MakeConsumer(s);
  auto reqs = RunStep1(s, consumer, s.bd, 42);
  std::vector<AuditRecord> records;
  for (int p = 0; p < 3; ++p) {
    SessionInputs in = OpenSessionInputs(*s.field, p, s.kem[p], reqs[p]);
    AuditRecord r;
    r.session = s.session;
    r.party = p;
    r.owner_id = s.owner_id;
    r.backend = GetParam();
    r.m = in.booking.m;
    r.m_bits = in.booking.m_bits;
    records.push_back(AuditRecord::FromJson(*s.field, r.ToJson()));
  }
  for (auto [i, j] : {std::pair{0, 1}, std::pair{0, 2}, std::pair{1, 2}}) {
    AuditResult res = AuditReconstruct({records[i], records[j]}, s.session, s.owner_key.Public());
    EXPECT_EQ(res.booking.bd, s.bd);
    EXPECT_TRUE(res.signature_valid);
  }
  for (int p = 0; p < 3; ++p) {
    try {
      AuditReconstruct({records[p]}, s.session, s.owner_key.Public());
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kRefused);
    }
    EXPECT_THROW(AuditReconstruct({records[p], records[p]}, s.session, s.owner_key.Public()), Error);
  }
  SessionId other = s.session;
  other[0] ^= 1;
  EXPECT_THROW(AuditReconstruct({records[0], records[1]}, other, s.owner_key.Public()), Error);
  AuditResult wrong_key =
      AuditReconstruct({records[0], records[1]}, s.session, SigningKey::Ed25519FromSeed(SeedBytes(5, 5)).Public());
  EXPECT_FALSE(wrong_key.signature_valid);
}

INSTANTIATE_TEST_SUITE_P(Backends, RoleFlow, ::testing::Values(Backend::kMimc, Backend::kAes),
                         [](const auto& info) { return std::string(BackendName(info.param)); });

TEST(Audit, RecordFileRoundTrip) {
  const FieldParams& f = FieldParams::Production();
  AuditRecord r;
  r.session = SessionIdFromSeed(8);
  r.party = 2;
  r.owner_id = 9;
  r.ts_pub = 4;
  Prg prg = Prg::FromSeed(8);
  r.m = {Share(FieldElement(f, 5), prg)[2]};
  auto path = TempPath(AuditFileName(r.session, r.party));
  EXPECT_NE(path.string().find(".p2.json"), std::string::npos);
  r.Save(path);
  AuditRecord back = AuditRecord::Load(f, path);
  EXPECT_EQ(back.ToJson(), r.ToJson());
  std::filesystem::remove(path);
  EXPECT_THROW(AuditRecord::FromJson(f, "{}"), Error);
  EXPECT_THROW(AuditRecord::FromJson(f, "[]"), Error);
}

}  // namespace
}  // namespace vsa
