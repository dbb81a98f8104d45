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

#include "vsa/boolcirc.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <set>
#include <sstream>

#include "../support/fips197.hpp"
#include "../support/mpc_harness.hpp"

namespace vsa {
namespace {

using testing::OracleAes128;
using testing::OracleSbox;
using testing::PartyContext;
using testing::RunThreeParties;

const FieldParams& Prod() { return FieldParams::Production(); }

Block128 HexBlock(std::string_view hex) {
  Bytes b = FromHex(hex);
  Block128 out{};
  std::copy(b.begin(), b.end(), out.begin());
  return out;
}

TEST(Bristol, MinimalCircuit) {
  auto c = BristolCircuit::Parse("1 3\n1 2\n1 1\n2 1 0 1 2 AND\n");
  EXPECT_EQ(c.and_count(), 1u);
  EXPECT_EQ(c.and_depth(), 1u);
  EXPECT_EQ(c.num_wires(), 3u);
  EXPECT_EQ(c.Eval({BitVector::FromBytes(Bytes{3}, 2)})[0].Get(0), true);
  EXPECT_EQ(c.Eval({BitVector::FromBytes(Bytes{1}, 2)})[0].Get(0), false);
}

BristolError::Kind ParseKind(std::string_view text, size_t* line) {
  try {
    BristolCircuit::Parse(text);
  } catch (const BristolError& e) {
    *line = e.line();
    EXPECT_EQ(e.code(), ErrorCode::kParse);
    return e.kind();
  }
  ADD_FAILURE() << "parsed: " << text;
  return BristolError::Kind::kHeader;
}

TEST(Bristol, DistinctErrorsWithLineNumbers) {
  using K = BristolError::Kind;
  struct Case {
    std::string text;
    K kind;
    size_t line;
  };
  std::vector<Case> cases = {
      {"x 3\n1 2\n1 1\n2 1 0 1 2 AND\n", K::kHeader, 1},
      {"1 3\n2 2\n1 1\n2 1 0 1 2 AND\n", K::kHeader, 2},
      {"1 3\n1 2\n1 1\n2 1 0 1 AND\n", K::kGateSyntax, 4},
      {"1 3\n1 2\n1 1\n\n2 1 0 1 2 NAND\n", K::kUnknownGate, 5},
      {"1 3\n1 2\n1 1\n2 1 0 5 2 AND\n", K::kWireRange, 4},
      {"1 4\n1 2\n1 1\n2 1 0 2 3 AND\n", K::kDanglingWire, 4},
      {"2 4\n1 2\n1 1\n2 1 0 1 3 AND\n2 1 0 1 3 XOR\n", K::kReassignedWire, 5},
      {"2 5\n1 2\n1 1\n2 1 0 4 3 AND\n2 1 0 3 4 XOR\n", K::kCycle, 4},
      {"2 3\n1 2\n1 1\n2 1 0 1 2 AND\n", K::kCount, 4},
      {"1 3\n1 2\n1 1\n2 1 0 1 1 AND\n", K::kReassignedWire, 4},
  };
  for (const auto& c : cases) {
    size_t line = 0;
    EXPECT_EQ(ParseKind(c.text, &line), c.kind) << c.text;
    EXPECT_EQ(line, c.line) << c.text;
  }
}

TEST(Bristol, OutOfOrderGatesAreSorted) {
  auto c = BristolCircuit::Parse("2 4\n1 2\n1 1\n2 1 2 1 3 AND\n2 1 0 1 2 XOR\n");
  EXPECT_EQ(c.gates()[0].kind, GateKind::kXor);
  // (a ^ b) & b
  EXPECT_TRUE(c.Eval({BitVector::FromBytes(Bytes{2}, 2)})[0].Get(0));
  EXPECT_FALSE(c.Eval({BitVector::FromBytes(Bytes{3}, 2)})[0].Get(0));
}

TEST(Bristol, SboxCircuitIsExhaustivelyCorrect) {
  BristolCircuit sbox = GenerateSboxCircuit();
  EXPECT_EQ(sbox.and_count(), 32u);
  for (int x = 0; x < 256; ++x) {
    auto out = sbox.Eval({BitVector::FromBytes(Bytes{static_cast<uint8_t>(x)}, 8)});
    EXPECT_EQ(out[0].ToBytes()[0], OracleSbox(static_cast<uint8_t>(x))) << x;
  }
}

TEST(Bristol, VendoredAesCircuit) {
  auto path = DefaultAes128CircuitPath();
  std::ifstream in(path, std::ios::binary);
  ASSERT_TRUE(in) << path;
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(), GenerateAes128Circuit().Unparse());
  EXPECT_EQ(ToHex(Sha3_256(AsBytes(ss.str()))), kAes128CircuitSha3);

  const BristolCircuit& aes = Aes128Circuit();
  EXPECT_EQ(aes.and_count(), 6400u);
  EXPECT_EQ(aes.inputs(), (std::vector<size_t>{128, 128}));
  EXPECT_EQ(aes.outputs(), (std::vector<size_t>{128}));

  // Layers are a topological order.
  std::vector<int> layer_of(aes.num_wires(), -1);
  auto layers = aes.Layers();
  for (size_t l = 0; l < layers.size(); ++l) {
    for (uint32_t gi : layers[l]) layer_of[aes.gates()[gi].out] = static_cast<int>(l);
  }
  for (size_t l = 0; l < layers.size(); ++l) {
    for (uint32_t gi : layers[l]) {
      const auto& g = aes.gates()[gi];
      EXPECT_LT(layer_of[g.in0], static_cast<int>(l));
      if (g.kind == GateKind::kAnd || g.kind == GateKind::kXor) EXPECT_LT(layer_of[g.in1], static_cast<int>(l));
    }
  }

  // Unparse/parse round trip keeps gates and layers.
  auto again = BristolCircuit::Parse(aes.Unparse());
  EXPECT_EQ(again.gates(), aes.gates());
  EXPECT_EQ(again.Layers(), layers);

  // A tampered copy is refused.
  auto tmp = std::filesystem::temp_directory_path() / "vsa_aes_tampered.txt";
  {
    std::ofstream out(tmp, std::ios::binary);
    std::string text = ss.str();
    text[text.size() - 2] = text[text.size() - 2] == 'R' ? 'D' : 'R';
    out << text;
  }
  try {
    LoadAes128Circuit(tmp);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIntegrity);
  }
  std::filesystem::remove(tmp);
}

TEST(Bristol, AesCleartextMatchesFips197) {
  const BristolCircuit& aes = Aes128Circuit();
  auto run = [&](const Block128& key, const Block128& pt) {
    return BitsBlock(aes.Eval({BlockBits(key), BlockBits(pt)})[0]);
  };
  EXPECT_EQ(ToHex(run(Block128{}, Block128{})), "66e94bd4ef8a2c3b884cfa59ca342b2e");
  EXPECT_EQ(ToHex(run(HexBlock("000102030405060708090a0b0c0d0e0f"), HexBlock("00112233445566778899aabbccddeeff"))),
            "69c4e0d86a7b0430d8cdb78070b4c55a");
  Prg prg = Prg::FromSeed(100);
  for (int i = 0; i < 20; ++i) {
    Block128 k, p;
    prg.Fill(k);
    prg.Fill(p);
    EXPECT_EQ(run(k, p), OracleAes128(k, p));
  }
}

Task<std::vector<BitVector>> EvalOpen(Engine& e, const BristolCircuit& c, std::vector<BitShares> in, size_t w) {
  auto out = co_await c.EvalShared(e, std::move(in), w);
  std::vector<BitVector> opened;
  for (auto& o : out) opened.push_back(co_await e.OpenBits(std::move(o)));
  co_return opened;
}

BristolCircuit RandomCircuit(Prg& prg, size_t gates) {
  std::vector<BristolGate> list;
  uint32_t next = 8;
  for (size_t i = 0; i < gates; ++i) {
    BristolGate g{};
    switch (prg.NextU64() % 5) {
      case 0: g.kind = GateKind::kXor; break;
      case 1:
      case 2: g.kind = GateKind::kAnd; break;
      case 3: g.kind = GateKind::kInv; break;
      default: g.kind = prg.NextBit() ? GateKind::kEqw : GateKind::kEq; break;
    }
    g.in0 = g.kind == GateKind::kEq ? static_cast<uint32_t>(prg.NextBit()) : static_cast<uint32_t>(prg.NextU64() % next);
    g.in1 = static_cast<uint32_t>(prg.NextU64() % next);
    if (g.kind != GateKind::kAnd && g.kind != GateKind::kXor) g.in1 = 0;
    g.out = next++;
    list.push_back(g);
  }
  return BristolCircuit::FromGates(next, {4, 4}, {4}, std::move(list));
}

TEST(BristolShared, RandomCircuitsMatchCleartext) {
  Prg prg = Prg::FromSeed(101);
  for (int trial = 0; trial < 100; ++trial) {
    BristolCircuit c = RandomCircuit(prg, 50);
    const size_t W = trial % 3 == 0 ? 70 : 1 + trial % 5;
    BitVector a(4 * W), b(4 * W);
    for (size_t i = 0; i < 4 * W; ++i) {
      a.Set(i, prg.NextBit());
      b.Set(i, prg.NextBit());
    }
    auto sa = ShareBits(a, prg), sb = ShareBits(b, prg);
    auto res = RunThreeParties<std::vector<BitVector>>(
        Prod(), TapeCounts{0, c.and_count() * W, 0, 0}, 102 + trial,
        [&](PartyContext ctx) { return EvalOpen(ctx.engine, c, {sa[ctx.party], sb[ctx.party]}, W); });
    for (size_t i = 0; i < W; ++i) {
      auto want = c.Eval({a.Slice(4 * i, 4), b.Slice(4 * i, 4)})[0];
      EXPECT_EQ(res.values[0][0].Slice(4 * i, 4), want) << "trial " << trial << " instance " << i;
    }
    EXPECT_EQ(res.stats[1].and_gates, c.and_count() * W);
    EXPECT_EQ(res.stats[1].online_rounds, c.and_depth() + 1);
  }
}

TEST(BristolShared, XorOnlyCircuitIsFree) {
  auto c = BristolCircuit::Parse("2 4\n1 2\n1 1\n2 1 0 1 2 XOR\n1 1 2 3 INV\n");
  Prg prg = Prg::FromSeed(103);
  auto s = ShareBits(BitVector::FromBytes(Bytes{1}, 2), prg);
  auto res = RunThreeParties<std::vector<BitShares>>(Prod(), TapeCounts{}, 104, [&](PartyContext ctx) {
    return c.EvalShared(ctx.engine, {s[ctx.party]}, 1);
  });
  EXPECT_EQ(res.stats[0].online_rounds, 0u);
  std::array<BitShares, 3> out{res.values[0][0], res.values[1][0], res.values[2][0]};
  EXPECT_FALSE(ReconstructBits(out).Get(0));  // not(1 ^ 0)
}

Task<BitVector> AesOpen(Engine& e, BitShares k, BitShares p) {
  auto ct = co_await AesShared(e, std::move(k), std::move(p), 1);
  co_return co_await e.OpenBits(std::move(ct));
}

TEST(BristolShared, AesZeroKeyZeroBlock) {
  Prg prg = Prg::FromSeed(105);
  auto k = ShareBits(BitVector(128), prg), p = ShareBits(BitVector(128), prg);
  auto res = RunThreeParties<BitVector>(Prod(), TapeCounts{0, 6400, 0, 0}, 106,
                                        [&](PartyContext c) { return AesOpen(c.engine, k[c.party], p[c.party]); });
  EXPECT_EQ(ToHex(BitsBlock(res.values[0])), "66e94bd4ef8a2c3b884cfa59ca342b2e");
  EXPECT_EQ(res.stats[0].and_gates, 6400u);
  EXPECT_EQ(res.stats[0].online_rounds, Aes128Circuit().and_depth() + 1);
}

Task<BitVector> SelectOpen(Engine& e, BitShares t, BitShares ids, BitShares keys, size_t rows) {
  auto k = co_await EqualitySelectBinary(e, std::move(t), std::move(ids), std::move(keys), rows);
  co_return co_await e.OpenBits(std::move(k));
}

TEST(BristolShared, EqualitySelectCostsExactly159PerRow) {
  Prg prg = Prg::FromSeed(107);
  for (size_t rows : {1u, 4u}) {
    std::set<uint32_t> used;
    BitVector ids(0), keys(0);
    std::vector<uint32_t> id_list;
    std::vector<Block128> key_list;
    while (id_list.size() < rows) {
      uint32_t id = static_cast<uint32_t>(prg.NextU64());
      if (!used.insert(id).second) continue;
      id_list.push_back(id);
      Block128 k;
      prg.Fill(k);
      key_list.push_back(k);
      Bytes idb{static_cast<uint8_t>(id), static_cast<uint8_t>(id >> 8), static_cast<uint8_t>(id >> 16),
                static_cast<uint8_t>(id >> 24)};
      ids.Append(BitVector::FromBytes(idb, 32));
      keys.Append(BlockBits(k));
    }
    for (bool match : {true, false}) {
      size_t pick = rows == 4 ? 2 : 0;
      uint32_t target = match ? id_list[pick] : id_list[pick] ^ 0x80000000u;
      if (!match && used.count(target)) continue;
      Bytes tb{static_cast<uint8_t>(target), static_cast<uint8_t>(target >> 8), static_cast<uint8_t>(target >> 16),
               static_cast<uint8_t>(target >> 24)};
      auto st = ShareBits(BitVector::FromBytes(tb, 32), prg);
      auto si = ShareBits(ids, prg), sk = ShareBits(keys, prg);
      auto res = RunThreeParties<BitVector>(Prod(), TapeCounts{0, 159 * rows, 0, 0}, 108 + rows, [&](PartyContext c) {
        return SelectOpen(c.engine, st[c.party], si[c.party], sk[c.party], rows);
      });
      EXPECT_EQ(res.stats[0].and_gates, 159 * rows);
      EXPECT_EQ(res.stats[0].online_rounds, 6u + 1);
      EXPECT_EQ(BitsBlock(res.values[0]), match ? key_list[pick] : Block128{});
    }
  }
}

Task<BitVector> CbcOpen(Engine& e, BitShares k, BitShares m) {
  auto t = co_await CbcMacAesShared(e, std::move(k), std::move(m));
  co_return co_await e.OpenBits(std::move(t));
}

Task<BitVector> CtrOpen(Engine& e, BitShares k, std::vector<Block128> ctr, BitShares m) {
  auto t = co_await AesCtrShared(e, std::move(k), std::move(ctr), std::move(m));
  co_return co_await e.OpenBits(std::move(t));
}

TEST(BristolShared, CbcMacAndCtrCosts) {
  Prg prg = Prg::FromSeed(109);
  Block128 key;
  prg.Fill(key);
  std::vector<Block128> blocks(10);
  BitVector msg(0);
  for (auto& b : blocks) {
    prg.Fill(b);
    msg.Append(BlockBits(b));
  }
  auto sk = ShareBits(BlockBits(key), prg);
  auto s6 = ShareBits(msg.Slice(0, 6 * 128), prg);
  auto cbc = RunThreeParties<BitVector>(Prod(), TapeCounts{0, 6 * 6400, 0, 0}, 110,
                                        [&](PartyContext c) { return CbcOpen(c.engine, sk[c.party], s6[c.party]); });
  Block128 chain{};
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 16; ++j) chain[j] ^= blocks[i][j];
    chain = OracleAes128(key, chain);
  }
  EXPECT_EQ(BitsBlock(cbc.values[0]), chain);
  EXPECT_EQ(cbc.stats[0].and_gates, 38400u);
  EXPECT_EQ(cbc.stats[0].online_rounds, 6 * Aes128Circuit().and_depth() + 1);

  auto zero = ShareBits(BitVector(128), prg);
  auto cbc0 = RunThreeParties<BitVector>(Prod(), TapeCounts{0, 6400, 0, 0}, 111,
                                         [&](PartyContext c) { return CbcOpen(c.engine, zero[c.party], zero[c.party]); });
  EXPECT_EQ(ToHex(BitsBlock(cbc0.values[0])), "66e94bd4ef8a2c3b884cfa59ca342b2e");

  std::vector<Block128> ctr;
  for (uint64_t j = 1; j <= 10; ++j) ctr.push_back(CtrCounterBlock(77, j));
  auto s10 = ShareBits(msg, prg);
  auto res = RunThreeParties<BitVector>(Prod(), TapeCounts{0, 64000, 0, 0}, 112,
                                        [&](PartyContext c) { return CtrOpen(c.engine, sk[c.party], ctr, s10[c.party]); });
  for (int j = 0; j < 10; ++j) {
    Block128 ks = OracleAes128(key, ctr[j]);
    Block128 want;
    for (int b = 0; b < 16; ++b) want[b] = blocks[j][b] ^ ks[b];
    EXPECT_EQ(BitsBlock(res.values[0], 128 * j), want);
  }
  EXPECT_EQ(res.stats[0].and_gates, 64000u);
  EXPECT_EQ(res.stats[0].online_rounds, Aes128Circuit().and_depth() + 1);
}

}  // namespace
}  // namespace vsa
