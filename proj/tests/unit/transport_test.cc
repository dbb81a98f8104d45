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

#include "vsa/transport.hpp"

#include <gtest/gtest.h>

#include <thread>

#include "../support/mpc_harness.hpp"
#include "../support/tcp_mesh.hpp"
#include "vsa/engine.hpp"
#include "vsa/error.hpp"

namespace vsa {
namespace {

using testing::PartyContext;
using testing::RunThreeParties;

TEST(Frame, EncodeDecode) {
  Frame f{MsgType::kLayer, SessionIdFromSeed(1), 7, Bytes{1, 2, 3}};
  Bytes wire = f.Encode();
  ASSERT_EQ(wire.size(), Frame::kHeaderSize + 3);
  EXPECT_EQ(std::string(wire.begin(), wire.begin() + 4), "HMF1");
  EXPECT_EQ(wire[4], 3);  // payload length, little-endian
  EXPECT_EQ(wire[8], 2);  // msg type
  EXPECT_EQ(wire[25], 7);  // layer index
  EXPECT_EQ(Frame::Decode(wire), f);
  wire[0] = 'X';
  try {
    Frame::Decode(wire);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDecode);
  }
  Bytes shorter = f.Encode();
  shorter.pop_back();
  EXPECT_THROW(Frame::Decode(shorter), Error);
}

// A small circuit with both directions, parallel branches and opens.
Task<std::vector<FieldElement>> Workload(Engine& e, std::vector<RepShare> xs) {
  auto sq = co_await e.Mul(xs, xs);
  auto [a, b] = co_await WhenAll(e, Mul1(e, sq[0], xs[1]), Mul1(e, sq[1], xs[0]));
  auto cubes = co_await e.CubeWithTuple({a, b});
  auto opened = co_await e.Open(cubes);
  auto checked = co_await e.CheckedOpen({xs[2]});
  opened.push_back(checked[0]);
  co_return opened;
}

enum class Fabric { kLocal, kTcp, kTcpSealed };

class Conformance : public ::testing::TestWithParam<Fabric> {};

TEST_P(Conformance, SameResultsAndRounds) {
  const auto& f = FieldParams::Production();
  Prg prg = Prg::FromSeed(30);
  std::vector<FieldElement> clear;
  std::array<std::vector<RepShare>, 3> xs;
  for (int i = 0; i < 3; ++i) {
    clear.push_back(prg.NextField(f));
    auto s = Share(clear.back(), prg);
    for (int p = 0; p < 3; ++p) xs[p].push_back(s[p]);
  }
  TapeCounts counts{5, 0, 0, 2};
  auto body = [&](PartyContext c) { return Workload(c.engine, xs[c.party]); };

  auto local = RunThreeParties<std::vector<FieldElement>>(f, counts, 31, body);
  std::unique_ptr<testing::TcpMesh> mesh;
  testing::LinkFactory links;
  if (GetParam() != Fabric::kLocal) {
    std::optional<std::array<uint8_t, 32>> key;
    if (GetParam() == Fabric::kTcpSealed) key = std::array<uint8_t, 32>{1, 2, 3};
    mesh = std::make_unique<testing::TcpMesh>(key);
    links = mesh->Factory();
  }
  auto run = RunThreeParties<std::vector<FieldElement>>(f, counts, 31, body, false, links);

  FieldElement a = clear[0] * clear[0] * clear[1];
  FieldElement b = clear[1] * clear[1] * clear[0];
  for (int p = 0; p < 3; ++p) {
    ASSERT_EQ(run.values[p].size(), 3u);
    EXPECT_EQ(run.values[p][0], a.Cube());
    EXPECT_EQ(run.values[p][1], b.Cube());
    EXPECT_EQ(run.values[p][2], clear[2]);
    EXPECT_EQ(run.stats[p].online_rounds, local.stats[p].online_rounds);
    EXPECT_EQ(run.stats[p].online_rounds, 5u);
    EXPECT_EQ(run.stats[p].mults, local.stats[p].mults);
    EXPECT_EQ(run.stats[p].frames, local.stats[p].frames);
    EXPECT_EQ(run.stats[p].payload_bytes, local.stats[p].payload_bytes);
    size_t header = GetParam() == Fabric::kLocal ? 0 : GetParam() == Fabric::kTcp ? 29 : 29 + 28;
    EXPECT_EQ(run.stats[p].bytes_sent - local.stats[p].bytes_sent, run.stats[p].frames * header);
  }
}

INSTANTIATE_TEST_SUITE_P(Fabrics, Conformance, ::testing::Values(Fabric::kLocal, Fabric::kTcp, Fabric::kTcpSealed));

TEST(SessionChannelTest, EmptyLayerCostsNoRound) {
  LocalHub hub;
  SessionChannel ch(hub.Connect(SessionIdFromSeed(2), 0));
  auto in = ch.SendLayer({});
  EXPECT_TRUE(in.from_prev.empty());
  EXPECT_EQ(ch.stats().online_rounds, 0u);
  EXPECT_EQ(ch.layer_index(), 0u);
}

TEST(SessionChannelTest, LayerMismatchIsDesync) {
  LocalHub hub;
  SessionId sid = SessionIdFromSeed(3);
  auto rogue = hub.Connect(sid, 2);
  SessionChannel ch(hub.Connect(sid, 0));
  rogue->Send(0, Frame{MsgType::kLayer, sid, 5, Bytes{1}});
  try {
    ch.SendLayer({Bytes{9}, std::nullopt});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kProtocolDesync);
  }
}

TEST(SessionChannelTest, TimeoutAndAbortAreSessionAborts) {
  LocalHub hub(std::chrono::milliseconds(100));
  SessionId sid = SessionIdFromSeed(4);
  SessionChannel ch(hub.Connect(sid, 0));
  try {
    ch.SendLayer({Bytes{1}, std::nullopt});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSessionAbort);
  }
  SessionId sid2 = SessionIdFromSeed(5);
  SessionChannel a(hub.Connect(sid2, 1));
  SessionChannel b(hub.Connect(sid2, 2));
  b.Abort();
  try {
    a.SendLayer({std::nullopt, Bytes{1}});  // waits on party 2
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSessionAbort);
    EXPECT_NE(std::string(e.what()).find("aborted"), std::string::npos);
  }
}

TEST(SessionChannelTest, SessionsDoNotInterfere) {
  LocalHub hub;
  SessionId s1 = SessionIdFromSeed(6), s2 = SessionIdFromSeed(7);
  auto other = hub.Connect(s2, 2);
  other->Send(0, Frame{MsgType::kLayer, s2, 0, Bytes{0xEE}});
  std::thread peer([&] {
    SessionChannel c(hub.Connect(s1, 2));
    c.SendLayer({Bytes{0x22}, std::nullopt});
  });
  std::thread peer1([&] {
    SessionChannel c(hub.Connect(s1, 1));
    c.SendLayer({Bytes{0x11}, std::nullopt});
  });
  SessionChannel c0(hub.Connect(s1, 0));
  auto in = c0.SendLayer({Bytes{0x00}, std::nullopt});
  peer.join();
  peer1.join();
  EXPECT_EQ(in.from_prev, Bytes{0x22});
}

TEST(Determinism, LocalTranscriptIsByteIdentical) {
  const auto& f = FieldParams::Production();
  Prg prg = Prg::FromSeed(40);
  std::array<std::vector<RepShare>, 3> xs;
  for (int i = 0; i < 3; ++i) {
    auto s = Share(prg.NextField(f), prg);
    for (int p = 0; p < 3; ++p) xs[p].push_back(s[p]);
  }
  auto body = [&](PartyContext c) { return Workload(c.engine, xs[c.party]); };
  auto r1 = RunThreeParties<std::vector<FieldElement>>(f, TapeCounts{5, 0, 0, 2}, 41, body, true);
  auto r2 = RunThreeParties<std::vector<FieldElement>>(f, TapeCounts{5, 0, 0, 2}, 41, body, true);
  for (int p = 0; p < 3; ++p) {
    ASSERT_FALSE(r1.frames[p].empty());
    EXPECT_EQ(r1.frames[p], r2.frames[p]);
  }
}

TEST(Tcp, ConnectTimeoutNamesParty) {
  std::array<Endpoint, 3> eps{Endpoint{"127.0.0.1", 1}, Endpoint{"127.0.0.1", 0}, Endpoint{"127.0.0.1", 0}};
  TcpFabric::Options opt;
  opt.connect_timeout = std::chrono::milliseconds(300);
  TcpFabric fabric(1, eps, opt);
  try {
    fabric.Start();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConnect);
    EXPECT_NE(std::string(e.what()).find("party 0"), std::string::npos) << e.what();
  }
}

TEST(Tcp, PeerDisconnectAbortsSession) {
  testing::TcpMesh mesh(std::nullopt);
  SessionId sid = SessionIdFromSeed(50);
  SessionChannel c0(mesh.fabric(0).Open(sid));
  mesh.fabric(2).Stop();
  try {
    c0.SendLayer({Bytes{1}, std::nullopt});  // waits for party 2
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSessionAbort);
  }
}

class Restart : public ::testing::TestWithParam<int> {};

TEST_P(Restart, RestartedPartyRejoins) {
  testing::TcpMesh mesh(std::array<uint8_t, 32>{9});
  const int victim = GetParam();
  // A session opened before the drop fails rather than waiting out the
  // receive timeout.
  SessionChannel stranded(mesh.fabric(NextParty(victim)).Open(SessionIdFromSeed(60)));
  mesh.Restart(victim);
  auto start = std::chrono::steady_clock::now();
  EXPECT_THROW(stranded.SendLayer({Bytes{1}, std::nullopt}), Error);  // waits on the victim
  EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::seconds(5));

  for (int p = 0; p < 3; ++p) {
    for (int t = 0; t < 200 && !(mesh.fabric(p).connected(NextParty(p)) && mesh.fabric(p).connected(PrevParty(p)));
         ++t) {
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
  }
  SessionId sid = SessionIdFromSeed(61);
  std::array<Bytes, 3> got;
  std::array<std::thread, 3> t;
  for (int p = 0; p < 3; ++p) {
    t[p] = std::thread([&, p] {
      SessionChannel c(mesh.fabric(p).Open(sid));
      auto in = c.SendLayer({Bytes{static_cast<uint8_t>(p)}, Bytes{static_cast<uint8_t>(10 + p)}});
      got[p] = in.from_prev;
      got[p].insert(got[p].end(), in.from_next.begin(), in.from_next.end());
    });
  }
  for (auto& th : t) th.join();
  for (int p = 0; p < 3; ++p) {
    EXPECT_EQ(got[p], (Bytes{static_cast<uint8_t>(PrevParty(p)), static_cast<uint8_t>(10 + NextParty(p))}));
  }
}

INSTANTIATE_TEST_SUITE_P(Parties, Restart, ::testing::Values(0, 1, 2));

}  // namespace
}  // namespace vsa
