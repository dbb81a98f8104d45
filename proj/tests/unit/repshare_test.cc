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

#include "vsa/repshare.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "../support/mpc_harness.hpp"
#include "vsa/engine.hpp"
#include "vsa/error.hpp"
#include "vsa/tape.hpp"

namespace vsa {
namespace {

using testing::PartyContext;
using testing::RunThreeParties;

const FieldParams& F11() { return FieldParams::Test11(); }
const FieldParams& F101() { return FieldParams::Test101(); }
const FieldParams& Prod() { return FieldParams::Production(); }

// Upper-tail chi-square p-value via the Wilson-Hilferty normal approximation.
double ChiSquarePValue(double stat, double dof) {
  double z = (std::cbrt(stat / dof) - (1 - 2 / (9 * dof))) / std::sqrt(2 / (9 * dof));
  return 0.5 * std::erfc(z / std::sqrt(2.0));
}

TEST(Share, ForcedRandomnessExample) {
  auto sh = ShareWith(FieldElement(F11(), 7), FieldElement(F11(), 3), FieldElement(F11(), 5));
  EXPECT_EQ(sh[0].lo.low64(), 3u);
  EXPECT_EQ(sh[0].hi.low64(), 5u);
  EXPECT_EQ(sh[1].lo.low64(), 5u);
  EXPECT_EQ(sh[1].hi.low64(), 10u);
  EXPECT_EQ(sh[2].lo.low64(), 10u);
  EXPECT_EQ(sh[2].hi.low64(), 3u);
  EXPECT_EQ(Reconstruct(sh), FieldElement(F11(), 7));
}

TEST(Share, RoundTripAndAnyTwoReconstruct) {
  Prg prg = Prg::FromSeed(10);
  for (int i = 0; i < 10000; ++i) {
    FieldElement x = prg.NextField(Prod());
    auto sh = Share(x, prg);
    ASSERT_EQ(Reconstruct(sh), x);
    ASSERT_EQ(Reconstruct(sh[0], sh[1]), x);
    ASSERT_EQ(Reconstruct(sh[1], sh[2]), x);
    ASSERT_EQ(Reconstruct(sh[2], sh[0]), x);
  }
  auto z = Share(FieldElement::Zero(Prod()), prg);
  EXPECT_TRUE(Reconstruct(z).IsZero());
}

TEST(Share, SinglePartyIsRefusedAndInconsistencyDetected) {
  Prg prg = Prg::FromSeed(11);
  auto sh = Share(FieldElement(F101(), 9), prg);
  std::array<RepShare, 1> one{sh[0]};
  try {
    Reconstruct(one);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kRefused);
  }
  RepShare bad = sh[1];
  bad.hi += FieldElement::One(F101());
  std::array<RepShare, 3> all{sh[0], bad, sh[2]};
  try {
    Reconstruct(all);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIntegrity);
  }
}

TEST(Share, LinearOperationsOpenToCleartext) {
  Prg prg = Prg::FromSeed(12);
  for (int i = 0; i < 1000; ++i) {
    FieldElement x = prg.NextField(Prod()), y = prg.NextField(Prod());
    FieldElement two(Prod(), 2), five(Prod(), 5);
    auto sx = Share(x, prg), sy = Share(y, prg);
    std::array<RepShare, 3> combo;
    for (int p = 0; p < 3; ++p) combo[p] = (sx[p] * two + sy[p]).AddPublic(five);
    ASSERT_EQ(Reconstruct(combo), two * x + y + five);
  }
}

TEST(Share, SinglePartyViewIsUniform) {
  // Party 0's pair over 10^5 sharings of 9 in F_101 must be uniform over
  // F_101 x F_101 (10201 cells).
  Prg prg = Prg::FromSeed(13);
  const int n = 100000;
  const int cells = 101 * 101;
  std::vector<int> counts(cells, 0);
  FieldElement secret(F101(), 9);
  for (int i = 0; i < n; ++i) {
    auto sh = Share(secret, prg);
    counts[sh[0].lo.low64() * 101 + sh[0].hi.low64()]++;
  }
  double expected = static_cast<double>(n) / cells;
  double stat = 0;
  for (int c : counts) stat += (c - expected) * (c - expected) / expected;
  EXPECT_GT(ChiSquarePValue(stat, cells - 1), 0.001) << "chi2=" << stat;
  // Same for party 1's pair.
  std::fill(counts.begin(), counts.end(), 0);
  for (int i = 0; i < n; ++i) {
    auto sh = Share(secret, prg);
    counts[sh[1].lo.low64() * 101 + sh[1].hi.low64()]++;
  }
  stat = 0;
  for (int c : counts) stat += (c - expected) * (c - expected) / expected;
  EXPECT_GT(ChiSquarePValue(stat, cells - 1), 0.001) << "chi2=" << stat;
}

TEST(Share, OnePartyGuessesSecretAtChance) {
  // A lone party's best guess from its own pair is no better than chance:
  // reading lo + hi as a guess hits the secret with frequency ~1/101.
  Prg prg = Prg::FromSeed(14);
  int hits = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    FieldElement x = prg.NextField(F101());
    auto sh = Share(x, prg);
    if (sh[0].lo + sh[0].hi == x) ++hits;
  }
  double rate = static_cast<double>(hits) / n;
  EXPECT_NEAR(rate, 1.0 / 101, 0.0015);
}

TEST(BitSharesTest, RoundTripXorNot) {
  Prg prg = Prg::FromSeed(15);
  BitVector a(100), b(100);
  for (size_t i = 0; i < 100; ++i) {
    a.Set(i, prg.NextBit());
    b.Set(i, prg.NextBit());
  }
  auto sa = ShareBits(a, prg), sb = ShareBits(b, prg);
  EXPECT_EQ(ReconstructBits(sa), a);
  std::array<BitShares, 3> x, n;
  for (int p = 0; p < 3; ++p) {
    x[p] = sa[p] ^ sb[p];
    n[p] = sa[p].Not();
  }
  EXPECT_EQ(ReconstructBits(x), a ^ b);
  EXPECT_EQ(ReconstructBits(n), ~a);
}

// --- Tapes -----------------------------------------------------------------

TEST(Tape, DeterministicAndSerializable) {
  TapeCounts c{10, 20, 30, 4};
  auto a = DealerGenerate(Prod(), c, 99);
  auto b = DealerGenerate(Prod(), c, 99);
  for (int p = 0; p < 3; ++p) {
    Bytes s = a[p].Serialize();
    EXPECT_EQ(s, b[p].Serialize());
    EXPECT_EQ(std::string(s.begin(), s.begin() + 8), "VSATAPE1");
    auto back = PreprocessingTape::Deserialize(s);
    EXPECT_EQ(back.Serialize(), s);
    EXPECT_EQ(back.party(), p);
  }
  auto other = DealerGenerate(Prod(), c, 100);
  EXPECT_NE(other[0].Serialize(), a[0].Serialize());
  Bytes truncated = a[0].Serialize();
  truncated.pop_back();
  EXPECT_THROW(PreprocessingTape::Deserialize(truncated), Error);
}

TEST(Tape, ZeroSharesSumToZeroAndBitsAreBits) {
  TapeCounts c{50, 200, 100, 10};
  auto tapes = DealerGenerate(F101(), c, 7);
  std::array<TapeReader, 3> readers{TapeReader(tapes[0]), TapeReader(tapes[1]), TapeReader(tapes[2])};
  std::array<std::vector<FieldElement>, 3> z;
  std::array<BitVector, 3> zb;
  for (int p = 0; p < 3; ++p) {
    z[p] = readers[p].ZeroShares(50);
    zb[p] = readers[p].ZeroBits(200);
  }
  for (size_t t = 0; t < 50; ++t) EXPECT_TRUE((z[0][t] + z[1][t] + z[2][t]).IsZero());
  EXPECT_EQ((zb[0] ^ zb[1] ^ zb[2]).PopCount(), 0u);
  EXPECT_GT(zb[0].PopCount(), 50u);
  for (uint64_t i = 0; i < c.random_bits; ++i) {
    std::array<RepShare, 3> s{tapes[0].random_bits()[i], tapes[1].random_bits()[i], tapes[2].random_bits()[i]};
    uint64_t v = Reconstruct(s).low64();
    EXPECT_TRUE(v == 0 || v == 1);
  }
  for (uint64_t i = 0; i < c.cube_tuples; ++i) {
    std::array<RepShare, 3> s, s2, s3;
    for (int p = 0; p < 3; ++p) {
      s[p] = tapes[p].cube_tuples()[i].s;
      s2[p] = tapes[p].cube_tuples()[i].s2;
      s3[p] = tapes[p].cube_tuples()[i].s3;
    }
    FieldElement v = Reconstruct(s);
    EXPECT_EQ(Reconstruct(s2), v * v);
    EXPECT_EQ(Reconstruct(s3), v * v * v);
  }
}

TEST(Tape, ExhaustionAndAllocations) {
  TapeCounts c{10, 0, 5, 0};
  auto tapes = DealerGenerate(F11(), c, 1);
  TapeReader r(tapes[0], TapeAllocation{{4, 0, 0, 0}, {8, 0, 5, 0}});
  r.ZeroShares(3);
  try {
    r.ZeroShares(2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kPreprocessingExhausted);
  }
  EXPECT_THROW(TapeReader(tapes[0], TapeAllocation{{}, {11, 0, 0, 0}}), Error);
  // Disjoint allocations see disjoint zero shares.
  TapeReader a(tapes[1], TapeAllocation{{0, 0, 0, 0}, {5, 0, 0, 0}});
  TapeReader b(tapes[1], TapeAllocation{{5, 0, 0, 0}, {10, 0, 0, 0}});
  TapeReader whole(tapes[1]);
  auto wa = whole.ZeroShares(10);
  auto xa = a.ZeroShares(5);
  auto xb = b.ZeroShares(5);
  for (size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(xa[i], wa[i]);
    EXPECT_EQ(xb[i], wa[5 + i]);
  }
}

// --- Interactive operations ------------------------------------------------

Task<std::vector<FieldElement>> MulThenOpen(Engine& e, std::vector<RepShare> x, std::vector<RepShare> y) {
  auto z = co_await e.Mul(std::move(x), std::move(y));
  co_return co_await e.Open(std::move(z));
}

TEST(Mul, ExhaustiveF11) {
  Prg prg = Prg::FromSeed(20);
  std::array<std::vector<RepShare>, 3> xs, ys;
  std::vector<uint64_t> expect;
  for (uint64_t a = 0; a < 11; ++a) {
    for (uint64_t b = 0; b < 11; ++b) {
      auto sa = Share(FieldElement(F11(), a), prg);
      auto sb = Share(FieldElement(F11(), b), prg);
      for (int p = 0; p < 3; ++p) {
        xs[p].push_back(sa[p]);
        ys[p].push_back(sb[p]);
      }
      expect.push_back(a * b % 11);
    }
  }
  auto res = RunThreeParties<std::vector<FieldElement>>(
      F11(), TapeCounts{121, 0, 0, 0}, 5,
      [&](PartyContext c) { return MulThenOpen(c.engine, xs[c.party], ys[c.party]); });
  for (int p = 0; p < 3; ++p) {
    ASSERT_EQ(res.values[p].size(), expect.size());
    for (size_t i = 0; i < expect.size(); ++i) ASSERT_EQ(res.values[p][i].low64(), expect[i]);
    // One layer of products plus one layer of opens.
    EXPECT_EQ(res.stats[p].online_rounds, 2u);
    EXPECT_EQ(res.stats[p].mults, 121u);
    EXPECT_EQ(res.stats[p].preprocessing.zero_shares, 121u);
    EXPECT_EQ(res.stats[p].payload_bytes, 2u * 121 * 2);
  }
}

TEST(Mul, WorkedExampleAndAnnihilator) {
  Prg prg = Prg::FromSeed(21);
  auto s3 = Share(FieldElement(F11(), 3), prg);
  auto s4 = Share(FieldElement(F11(), 4), prg);
  auto res = RunThreeParties<std::vector<FieldElement>>(
      F11(), TapeCounts{1, 0, 0, 0}, 6,
      [&](PartyContext c) { return MulThenOpen(c.engine, {s3[c.party]}, {s4[c.party]}); });
  EXPECT_EQ(res.values[0][0].low64(), 1u);

  FieldElement x = prg.NextField(Prod());
  auto sx = Share(x, prg);
  auto s0 = Share(FieldElement::Zero(Prod()), prg);
  auto res2 = RunThreeParties<std::vector<FieldElement>>(
      Prod(), TapeCounts{1, 0, 0, 0}, 7,
      [&](PartyContext c) { return MulThenOpen(c.engine, {sx[c.party]}, {s0[c.party]}); });
  EXPECT_TRUE(res2.values[1][0].IsZero());
}

Task<BitVector> AndThenOpen(Engine& e, BitShares x, BitShares y) {
  auto z = co_await e.And(std::move(x), std::move(y));
  co_return co_await e.OpenBits(std::move(z));
}

TEST(And, TruthTable) {
  BitVector a(4), b(4);
  a.Set(2, true);
  a.Set(3, true);
  b.Set(1, true);
  b.Set(3, true);
  Prg prg = Prg::FromSeed(22);
  auto sa = ShareBits(a, prg), sb = ShareBits(b, prg);
  auto res = RunThreeParties<BitVector>(Prod(), TapeCounts{0, 4, 0, 0}, 8,
                                        [&](PartyContext c) { return AndThenOpen(c.engine, sa[c.party], sb[c.party]); });
  for (int p = 0; p < 3; ++p) {
    EXPECT_FALSE(res.values[p].Get(0));
    EXPECT_FALSE(res.values[p].Get(1));
    EXPECT_FALSE(res.values[p].Get(2));
    EXPECT_TRUE(res.values[p].Get(3));
    EXPECT_EQ(res.stats[p].and_gates, 4u);
  }
}

Task<FieldElement> TwoSequential(Engine& e, RepShare x, RepShare y) {
  RepShare xy = co_await Mul1(e, x, y);
  RepShare xyy = co_await Mul1(e, xy, y);
  co_return co_await Open1(e, xyy);
}

Task<std::tuple<FieldElement, FieldElement>> ParallelPair(Engine& e, RepShare x, RepShare y) {
  co_return co_await WhenAll(e, TwoSequential(e, x, y), TwoSequential(e, y, x));
}

TEST(Layers, BatchingAndDependencies) {
  Prg prg = Prg::FromSeed(23);
  FieldElement x = prg.NextField(Prod()), y = prg.NextField(Prod());
  auto sx = Share(x, prg), sy = Share(y, prg);
  auto seq = RunThreeParties<FieldElement>(Prod(), TapeCounts{2, 0, 0, 0}, 9, [&](PartyContext c) {
    return TwoSequential(c.engine, sx[c.party], sy[c.party]);
  });
  EXPECT_EQ(seq.values[0], x * y * y);
  EXPECT_EQ(seq.stats[0].online_rounds, 3u);

  // Two independent chains run side by side: same three layers.
  auto par = RunThreeParties<std::tuple<FieldElement, FieldElement>>(
      Prod(), TapeCounts{4, 0, 0, 0}, 10, [&](PartyContext c) { return ParallelPair(c.engine, sx[c.party], sy[c.party]); });
  EXPECT_EQ(std::get<0>(par.values[2]), x * y * y);
  EXPECT_EQ(std::get<1>(par.values[2]), y * x * x);
  EXPECT_EQ(par.stats[2].online_rounds, 3u);
  EXPECT_EQ(par.stats[2].mults, 4u);
}

Task<std::vector<FieldElement>> OpenMany(Engine& e, std::vector<RepShare> xs) {
  co_return co_await e.Open(std::move(xs));
}

TEST(Layers, BatchOpenIsOneRoundAndThousandMultsCountBytes) {
  Prg prg = Prg::FromSeed(24);
  std::array<std::vector<RepShare>, 3> xs, ys;
  for (int i = 0; i < 1000; ++i) {
    auto a = Share(prg.NextField(Prod()), prg);
    auto b = Share(prg.NextField(Prod()), prg);
    for (int p = 0; p < 3; ++p) {
      xs[p].push_back(a[p]);
      ys[p].push_back(b[p]);
    }
  }
  std::vector<RepShare> ten0(xs[0].begin(), xs[0].begin() + 10);
  auto opened = RunThreeParties<std::vector<FieldElement>>(Prod(), TapeCounts{}, 11, [&](PartyContext c) {
    return OpenMany(c.engine, std::vector<RepShare>(xs[c.party].begin(), xs[c.party].begin() + 10));
  });
  EXPECT_EQ(opened.stats[0].online_rounds, 1u);
  EXPECT_EQ(opened.stats[0].opens, 10u);

  auto muls = RunThreeParties<std::vector<FieldElement>>(Prod(), TapeCounts{1000, 0, 0, 0}, 12, [&](PartyContext c) {
    return MulThenOpen(c.engine, xs[c.party], ys[c.party]);
  });
  // Product layer: 1000 elements to prev; open layer: 1000 elements to next.
  EXPECT_EQ(muls.stats[0].online_rounds, 2u);
  EXPECT_EQ(muls.stats[0].bytes_sent, 2u * 1000 * 17);
  EXPECT_EQ(muls.stats[0].frames, 2u);
}

Task<std::vector<RepShare>> CubeOnly(Engine& e, std::vector<RepShare> x) { co_return co_await e.CubeWithTuple(std::move(x)); }

Task<std::vector<FieldElement>> CubeAndOpen(Engine& e, std::vector<RepShare> x) {
  auto c = co_await CubeOnly(e, std::move(x));
  co_return co_await e.Open(std::move(c));
}

TEST(Cube, OneRoundCubeMatchesCleartext) {
  Prg prg = Prg::FromSeed(25);
  std::array<std::vector<RepShare>, 3> xs;
  std::vector<FieldElement> clear;
  for (int i = 0; i < 50; ++i) {
    FieldElement x = prg.NextField(Prod());
    clear.push_back(x.Cube());
    auto s = Share(x, prg);
    for (int p = 0; p < 3; ++p) xs[p].push_back(s[p]);
  }
  auto res = RunThreeParties<std::vector<FieldElement>>(Prod(), TapeCounts{0, 0, 0, 50}, 13,
                                                        [&](PartyContext c) { return CubeAndOpen(c.engine, xs[c.party]); });
  EXPECT_EQ(res.values[0], clear);
  EXPECT_EQ(res.stats[0].online_rounds, 2u);
  EXPECT_EQ(res.stats[0].cubes, 50u);
}

TEST(Errors, ExhaustedTapeAbortsAllParties) {
  Prg prg = Prg::FromSeed(26);
  auto a = Share(FieldElement(F11(), 2), prg);
  try {
    RunThreeParties<std::vector<FieldElement>>(F11(), TapeCounts{0, 0, 0, 0}, 14, [&](PartyContext c) {
      return MulThenOpen(c.engine, {a[c.party]}, {a[c.party]});
    });
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kPreprocessingExhausted);
  }
}

Task<std::vector<FieldElement>> CheckedOpenTask(Engine& e, std::vector<RepShare> xs) {
  co_return co_await e.CheckedOpen(std::move(xs));
}

TEST(Errors, CheckedOpenDetectsCorruptedComponent) {
  Prg prg = Prg::FromSeed(27);
  auto s = Share(FieldElement(F101(), 42), prg);
  auto ok = RunThreeParties<std::vector<FieldElement>>(F101(), TapeCounts{}, 15, [&](PartyContext c) {
    return CheckedOpenTask(c.engine, {s[c.party]});
  });
  EXPECT_EQ(ok.values[1][0].low64(), 42u);
  auto bad = s;
  bad[1].hi += FieldElement::One(F101());
  try {
    RunThreeParties<std::vector<FieldElement>>(F101(), TapeCounts{}, 16, [&](PartyContext c) {
      return CheckedOpenTask(c.engine, {bad[c.party]});
    });
    FAIL();
  } catch (const Error& e) {
    EXPECT_TRUE(e.code() == ErrorCode::kIntegrity || e.code() == ErrorCode::kSessionAbort) << e.what();
  }
}

}  // namespace
}  // namespace vsa
