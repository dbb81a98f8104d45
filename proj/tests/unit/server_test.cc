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

#include "vsa/server.hpp"

#include <gtest/gtest.h>

#include <thread>

#include "../support/scan.hpp"
#include "../support/temp_dir.hpp"
#include "vsa/deployment.hpp"
#include "vsa/e2e.hpp"
#include "vsa/error.hpp"
#include "vsa/server_db.hpp"
#include "vsa/session_inputs.hpp"
#include "vsa/tape_allocator.hpp"

namespace vsa {
namespace {

using testing::ScopedTempDir;

const FieldParams& F() { return FieldParams::Production(); }

LocalDeployment::Options SmallDeployment(const ScopedTempDir& dir, size_t sessions = 24) {
  LocalDeployment::Options o;
  o.dir = dir.path();
  Step2Params mimc{Backend::kMimc, 4, 10, {}};
  Step2Params aes{Backend::kAes, 2, 10, {}};
  o.tape = TapeBudget(F(), {mimc, aes}, sessions);
  o.session_timeout = std::chrono::milliseconds(3000);
  return o;
}

std::vector<VehicleRow> RowsFor(int party, uint64_t owner, size_t n, uint64_t seed) {
  VehicleManufacturer vm;
  Prg prg = Prg::FromSeed(seed);
  std::vector<VehicleRow> out;
  for (size_t i = 0; i < n; ++i) {
    vm.AddVehicle({owner, static_cast<uint32_t>(500 + i), prg.NextKey()});
    out.push_back(vm.Register(F(), owner, static_cast<uint32_t>(500 + i), prg)[party]);
  }
  return out;
}

TEST(ServerDbTest, LoadQueryDuplicateAndReopen) {
  ScopedTempDir dir("serverdb");
  auto path = dir / "db.jsonl";
  auto rows = RowsFor(1, 9, 3, 1);
  {
    ServerDb db(F(), 1, path);
    db.Load(rows);
    EXPECT_EQ(db.Rows(9), rows);
    EXPECT_EQ(db.Indices(9), (std::vector<uint32_t>{0, 1, 2}));
    EXPECT_TRUE(db.Rows(10).empty());
    try {
      db.Load({rows[1]});
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kDuplicate);
    }
    // A batch repeating a row is refused as a whole.
    auto more = RowsFor(1, 11, 2, 2);
    EXPECT_THROW(db.Load({more[0], more[1], more[0]}), Error);
    EXPECT_TRUE(db.Rows(11).empty());
    EXPECT_THROW(db.Load(RowsFor(2, 12, 1, 3)), Error);  // another party's shares
  }
  ServerDb back(F(), 1, path);
  EXPECT_EQ(back.Rows(9), rows);
  EXPECT_EQ(back.size(), 3u);
  EXPECT_THROW(ServerDb(F(), 0, path), Error);
}

TEST(TapeAllocatorTest, SlicesAreDisjointAndSurviveRestart) {
  ScopedTempDir dir("alloc");
  TapeCounts total{100, 1000, 50, 30};
  TapeCounts need{10, 0, 5, 3};
  TapeAllocation a, b;
  {
    TapeAllocator coord(total, dir / "p0.json");
    TapeAllocator peer(total, dir / "p1.json");
    a = coord.Allocate(need);
    b = coord.Allocate(need);
    EXPECT_EQ(a.end, b.begin);
    // Peers may see sessions out of order.
    peer.Claim(b, need);
    peer.Claim(a, need);
    try {
      peer.Claim(a, need);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kParameterMismatch);
    }
    EXPECT_THROW(peer.Claim({a.begin, a.end + TapeCounts{1, 0, 0, 0}}, need), Error);
    EXPECT_EQ(coord.remaining(), (TapeCounts{80, 1000, 40, 24}));
  }
  TapeAllocator coord(total, dir / "p0.json");
  TapeAllocator peer(total, dir / "p1.json");
  EXPECT_EQ(coord.Allocate(need).begin, b.end);
  EXPECT_THROW(peer.Claim(a, need), Error);
  try {
    for (int i = 0; i < 20; ++i) coord.Allocate(need);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kPreprocessingExhausted);
    EXPECT_NE(std::string(e.what()).find("left"), std::string::npos);
  }
}

class DeploymentTest : public ::testing::Test {
 protected:
  DeploymentTest() : dir_("deploy"), deployment_(SmallDeployment(dir_)) {}

  E2eReport Run(E2eOptions o) {
    E2eFlow flow(deployment_.endpoints(), o);
    return flow.Run();
  }

  ScopedTempDir dir_;
  LocalDeployment deployment_;
};

TEST_F(DeploymentTest, HonestRunsLeaveOneEntryEach) {
  for (Backend b : {Backend::kMimc, Backend::kAes}) {
    size_t before = deployment_.ledger().size();
    E2eOptions o;
    o.backend = b;
    o.vehicles = 2;
    o.target = 1;
    o.seed = 100 + static_cast<uint64_t>(b);
    E2eReport r = Run(o);
    ASSERT_TRUE(r.ok()) << r.ToJson();
    EXPECT_EQ(r.outcome, AccessOutcome::kGranted);
    EXPECT_EQ(deployment_.ledger().size(), before + 1);
    EXPECT_EQ(r.ts_pub, deployment_.ledger().last_ts());
    for (int p = 0; p < 3; ++p) {
      EXPECT_TRUE(std::filesystem::exists(deployment_.server_state(p) / "audit" / AuditFileName(r.session, p)));
    }
  }
}

TEST_F(DeploymentTest, TamperedArtifactsAreRejected) {
  E2eOptions o;
  o.seed = 200;
  o.tamper = Tamper::kLedgerCipher;
  E2eReport c = Run(o);
  EXPECT_FALSE(c.ok());
  EXPECT_EQ(c.failed_step, "4") << c.ToJson();

  o.seed = 201;
  o.tamper = Tamper::kLedgerTag;
  E2eReport t = Run(o);
  EXPECT_EQ(t.failed_step, "3") << t.ToJson();

  for (Tamper x : {Tamper::kToken, Tamper::kCertificate}) {
    o.seed += 1;
    o.tamper = x;
    E2eReport r = Run(o);
    EXPECT_EQ(r.failed_step, "4") << r.ToJson();
    EXPECT_FALSE(r.granted);
  }
}

TEST_F(DeploymentTest, RevocationSupersedesOriginal) {
  E2eOptions o;
  o.seed = 300;
  o.revoke_after_publish = true;
  size_t before = deployment_.ledger().size();
  E2eReport r = Run(o);
  EXPECT_EQ(r.revocation_outcome, AccessOutcome::kRevocationRecorded) << r.ToJson();
  EXPECT_EQ(r.outcome, AccessOutcome::kSuperseded) << r.ToJson();
  EXPECT_EQ(r.failed_step, "4");
  EXPECT_EQ(deployment_.ledger().size(), before + 2);
  // Generation and revocation entries look alike.
  auto entries = deployment_.ledger().Since(before);
  ASSERT_EQ(entries.size(), 2u);
  EXPECT_EQ(entries[0].cipher.size(), entries[1].cipher.size());
  EXPECT_EQ(entries[0].tag.size(), entries[1].tag.size());
}

TEST_F(DeploymentTest, MissingServerTimesOutWithoutEntry) {
  E2eOptions o;
  o.seed = 400;
  E2eFlow flow(deployment_.endpoints(), o);
  ASSERT_TRUE(flow.Run().ok());
  // Replay Steps 1-2 by hand but leave party 2 out.
  auto eps = deployment_.endpoints();
  std::array<KemPublicKey, 3> kem;
  for (int p = 0; p < 3; ++p) kem[p] = ServerClient(eps.servers[p]).KemKey(p);
  Consumer consumer(F(), FieldElement(F(), 77), SigningKey::Ed25519FromSeed({1}), "c");
  Prg prg = Prg::FromSeed(401);
  BookingDetails bd = flow.booking();
  bd.booking_id += 1;
  SesKGenAck ack = consumer.Step1(SesKGenReq{bd.booking_id, Backend::kMimc}, kem, prg);
  // The owner id of the flow is not exposed; use a fresh owner with rows.
  const uint64_t owner = 4242;
  for (int p = 0; p < 3; ++p) ServerClient(eps.servers[p]).Register(RowsFor(p, owner, 1, 5));
  Owner o2(owner, SigningKey::Ed25519FromSeed({2}));
  auto reqs = o2.Step1(F(), bd, Backend::kMimc, ack, kem, RandomSessionId(), prg);

  size_t before = deployment_.ledger().size();
  std::array<std::optional<Error>, 2> errors;
  std::array<std::thread, 2> threads;
  auto start = std::chrono::steady_clock::now();
  for (int p = 0; p < 2; ++p) {
    threads[p] = std::thread([&, p] {
      try {
        ServerClient(eps.servers[p]).GenerateToken(reqs[p]);
      } catch (const Error& e) {
        errors[p] = e;
      }
    });
  }
  for (auto& t : threads) t.join();
  for (int p = 0; p < 2; ++p) {
    ASSERT_TRUE(errors[p].has_value());
    EXPECT_EQ(errors[p]->code(), ErrorCode::kSessionAbort) << errors[p]->what();
  }
  EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::seconds(10));
  EXPECT_EQ(deployment_.ledger().size(), before);

  // Replaying the same session id is refused.
  try {
    ServerClient(eps.servers[0]).GenerateToken(reqs[0]);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDuplicate);
  }
}

TEST_F(DeploymentTest, BadInputAtOneServerFailsAllFast) {
  auto eps = deployment_.endpoints();
  const uint64_t owner = 5151;
  for (int p = 0; p < 3; ++p) ServerClient(eps.servers[p]).Register(RowsFor(p, owner, 1, 6));
  std::array<KemPublicKey, 3> kem;
  for (int p = 0; p < 3; ++p) kem[p] = ServerClient(eps.servers[p]).KemKey(p);
  Consumer consumer(F(), FieldElement(F(), 78), SigningKey::Ed25519FromSeed({3}), "c");
  Prg prg = Prg::FromSeed(402);
  BookingDetails bd;
  bd.cert_hash = consumer.certificate().Hash();
  bd.vehicle_id = 500;
  bd.conditions = Conditions{10, 20, 0};
  bd.booking_id = 1;
  SesKGenAck ack = consumer.Step1(SesKGenReq{1, Backend::kMimc}, kem, prg);
  Owner o(owner, SigningKey::Ed25519FromSeed({4}));
  auto reqs = o.Step1(F(), bd, Backend::kMimc, ack, kem, RandomSessionId(), prg);
  reqs[1].booking_bundle[40] ^= 1;

  std::array<std::optional<Error>, 3> errors;
  std::array<std::thread, 3> threads;
  auto start = std::chrono::steady_clock::now();
  for (int p = 0; p < 3; ++p) {
    threads[p] = std::thread([&, p] {
      try {
        ServerClient(eps.servers[p]).GenerateToken(reqs[p]);
      } catch (const Error& e) {
        errors[p] = e;
      }
    });
  }
  for (auto& t : threads) t.join();
  ASSERT_TRUE(errors[1].has_value());
  EXPECT_EQ(errors[1]->code(), ErrorCode::kCrypto);
  for (int p : {0, 2}) {
    ASSERT_TRUE(errors[p].has_value());
    EXPECT_EQ(errors[p]->code(), ErrorCode::kSessionAbort);
  }
  EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::milliseconds(2500));
}

TEST_F(DeploymentTest, RegistrationOverHttp) {
  auto eps = deployment_.endpoints();
  ServerClient s0(eps.servers[0]);
  EXPECT_EQ(s0.Register(RowsFor(0, 77, 3, 7)), 3u);
  EXPECT_EQ(s0.Indices(77).size(), 3u);
  EXPECT_TRUE(s0.Indices(78).empty());
  try {
    s0.Register(RowsFor(0, 77, 1, 7));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDuplicate);
  }
  // Shares for party 1 are refused by party 0.
  EXPECT_THROW(s0.Register(RowsFor(1, 79, 1, 8)), Error);
  try {
    s0.GenerateToken(AtGenReq{RandomSessionId(), 78, Backend::kMimc, Bytes(80), Bytes(80)});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCrypto);
  }
  EXPECT_THROW(ServerClient(eps.servers[0]).KemKey(1), Error);
}

TEST_F(DeploymentTest, ParallelSessions) {
  size_t before = deployment_.ledger().size();
  std::vector<std::thread> threads;
  std::array<bool, 4> ok{};
  for (int i = 0; i < 4; ++i) {
    threads.emplace_back([&, i] {
      E2eOptions o;
      o.seed = 500 + static_cast<uint64_t>(i);
      o.vehicles = 1 + static_cast<size_t>(i);
      E2eFlow flow(deployment_.endpoints(), o);
      ok[i] = flow.Run().ok();
    });
  }
  for (auto& t : threads) t.join();
  for (bool b : ok) EXPECT_TRUE(b);
  EXPECT_EQ(deployment_.ledger().size(), before + 4);
}

TEST_F(DeploymentTest, CrashBeforePublishThenRestartAndRetry) {
  size_t before = deployment_.ledger().size();
  deployment_.server(1).set_failpoint(VsspServer::Failpoint::kCrashAfterHello);
  E2eOptions o;
  o.seed = 600;
  E2eReport crashed = Run(o);
  EXPECT_EQ(crashed.failed_step, "2") << crashed.ToJson();
  EXPECT_EQ(deployment_.ledger().size(), before);

  deployment_.StopServer(1);
  deployment_.StartServer(1);
  E2eReport retry = Run(o);
  ASSERT_TRUE(retry.ok()) << retry.ToJson();
  EXPECT_EQ(deployment_.ledger().size(), before + 1);
}

TEST_F(DeploymentTest, ServerFilesHoldNoCleartext) {
  std::vector<Bytes> sentinels;
  for (uint64_t i = 0; i < 4; ++i) {
    E2eOptions o;
    o.seed = 700 + i;
    o.backend = i % 2 ? Backend::kAes : Backend::kMimc;
    o.vehicles = 2;
    E2eFlow flow(deployment_.endpoints(), o);
    ASSERT_TRUE(flow.Run().ok());
    auto s = flow.Sentinels();
    sentinels.insert(sentinels.end(), s.begin(), s.end());
  }
  std::vector<std::filesystem::path> roots;
  for (int p = 0; p < 3; ++p) roots.push_back(deployment_.server_state(p));
  auto hits = testing::ScanForSentinels(roots, sentinels);
  for (const auto& h : hits) ADD_FAILURE() << h.file << " holds sentinel " << h.sentinel;
  // The scanner does see what it is looking for.
  std::ofstream(deployment_.server_state(0) / "probe.txt") << ToBase64(sentinels[0]);
  // The packed booking embeds the certificate hash, so that one shows too.
  auto probe = testing::ScanForSentinels(roots, sentinels);
  ASSERT_FALSE(probe.empty());
  EXPECT_EQ(probe[0].sentinel, 0u);
  for (const auto& h : probe) EXPECT_EQ(h.file.filename(), "probe.txt");
  std::filesystem::remove(deployment_.server_state(0) / "probe.txt");
}

TEST_F(DeploymentTest, MutatedArtifactsNeverGrant) {
  E2eOptions o;
  o.seed = 800;
  E2eFlow flow(deployment_.endpoints(), o);
  ASSERT_TRUE(flow.Run().ok());
  MutationTally t = flow.Mutate(400, 801);
  EXPECT_EQ(t.trials, 400u);
  EXPECT_EQ(t.grants, 0u);
  EXPECT_EQ(t.trials_by_target.size(), 4u);
  EXPECT_GE(t.controls, 4u);
  EXPECT_EQ(t.control_grants, t.controls);
}

TEST(VsspServerTest, TapeOfAnotherPartyIsRefused) {
  ScopedTempDir dir("wrongtape");
  auto files = RunDealer(dir.path(), F(), TapeCounts{1, 1, 1, 1}, 1);
  ServerConfig c;
  c.party = 1;
  c.tape_path = files.tapes[0];
  c.db_path = dir / "db.jsonl";
  c.state_dir = dir.path();
  c.kem_key_path = files.kem_keys[1];
  c.log_to_stderr = false;
  try {
    VsspServer s(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParameterMismatch);
  }
}

}  // namespace
}  // namespace vsa
