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

#include "vsa/equality.hpp"

#include <gtest/gtest.h>

#include "../support/mpc_harness.hpp"
#include "vsa/error.hpp"

namespace vsa {
namespace {

using testing::PartyContext;
using testing::RunThreeParties;
using testing::ShareAll;

const FieldParams& Prod() { return FieldParams::Production(); }

Task<std::vector<FieldElement>> EqAndOpen(Engine& e, std::vector<RepShare> x, std::vector<RepShare> y, EqzConfig cfg) {
  auto eq = co_await EqzBatch(e, std::move(x), std::move(y), cfg);
  co_return co_await e.Open(std::move(eq));
}

TEST(Eqz, ExhaustiveFourBitPairs) {
  EqzConfig cfg;
  cfg.k = 4;
  std::vector<FieldElement> xs, ys;
  for (uint64_t a = 0; a < 16; ++a) {
    for (uint64_t b = 0; b < 16; ++b) {
      xs.emplace_back(Prod(), a);
      ys.emplace_back(Prod(), b);
    }
  }
  Prg prg = Prg::FromSeed(60);
  auto sx = ShareAll(xs, prg), sy = ShareAll(ys, prg);
  auto res = RunThreeParties<std::vector<FieldElement>>(Prod(), cfg.Need(256), 61, [&](PartyContext c) {
    return EqAndOpen(c.engine, sx[c.party], sy[c.party], cfg);
  });
  for (size_t i = 0; i < 256; ++i) {
    EXPECT_EQ(res.values[0][i], FieldElement(Prod(), xs[i] == ys[i] ? 1 : 0)) << i;
  }
  // 1 square + 1 open + ceil(log2 48) tree levels + final open.
  EXPECT_EQ(res.stats[0].online_rounds, cfg.Rounds() + 1);
  EXPECT_EQ(cfg.Rounds(), 8u);
}

TEST(Eqz, RoundsDoNotDependOnBatchSize) {
  EqzConfig cfg;
  EXPECT_EQ(cfg.mask_bits(), 104u);
  EXPECT_EQ(cfg.Rounds(), 9u);
  Prg prg = Prg::FromSeed(62);
  for (size_t n : {1u, 256u}) {
    std::vector<FieldElement> xs, ys;
    for (size_t i = 0; i < n; ++i) {
      uint64_t a = prg.NextU64() & 0xFFFFFFFF;
      xs.emplace_back(Prod(), a);
      ys.emplace_back(Prod(), i % 3 == 0 ? a : (a ^ (1ull << (i % 32))));
    }
    auto sx = ShareAll(xs, prg), sy = ShareAll(ys, prg);
    auto res = RunThreeParties<std::vector<FieldElement>>(Prod(), cfg.Need(n), 63 + n, [&](PartyContext c) {
      return EqAndOpen(c.engine, sx[c.party], sy[c.party], cfg);
    });
    EXPECT_EQ(res.stats[0].online_rounds, 10u) << n;
    EXPECT_EQ(res.stats[0].preprocessing.zero_shares, cfg.Need(n).zero_shares);
    EXPECT_EQ(res.stats[0].preprocessing.random_bits, cfg.Need(n).random_bits);
    for (size_t i = 0; i < n; ++i) EXPECT_EQ(res.values[1][i], FieldElement(Prod(), i % 3 == 0 ? 1 : 0));
  }
}

TEST(Eqz, ExtremeValues) {
  EqzConfig cfg;
  const uint64_t max = 0xFFFFFFFF;
  std::vector<FieldElement> xs{FieldElement(Prod(), 0), FieldElement(Prod(), max), FieldElement(Prod(), 0),
                               FieldElement(Prod(), max)};
  std::vector<FieldElement> ys{FieldElement(Prod(), max), FieldElement(Prod(), 0), FieldElement(Prod(), 0),
                               FieldElement(Prod(), max)};
  Prg prg = Prg::FromSeed(64);
  auto sx = ShareAll(xs, prg), sy = ShareAll(ys, prg);
  auto res = RunThreeParties<std::vector<FieldElement>>(Prod(), cfg.Need(4), 65, [&](PartyContext c) {
    return EqAndOpen(c.engine, sx[c.party], sy[c.party], cfg);
  });
  std::vector<FieldElement> want{FieldElement::Zero(Prod()), FieldElement::Zero(Prod()), FieldElement::One(Prod()),
                                 FieldElement::One(Prod())};
  EXPECT_EQ(res.values[2], want);
}

TEST(Eqz, SmallFieldIsRejected) {
  EqzConfig cfg;
  try {
    cfg.Validate(FieldParams::Test101());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParameterMismatch);
  }
  EXPECT_NO_THROW(cfg.Validate(Prod()));
  EqzConfig wide;
  wide.k = 44;  // 2*44 + 40 + 2 = 130 > 129-bit p
  EXPECT_THROW(wide.Validate(Prod()), Error);
}

Task<std::vector<FieldElement>> SelectAndOpen(Engine& e, std::vector<RepShare> eq,
                                              std::vector<std::vector<RepShare>> rows) {
  auto picked = co_await SelectRow(e, std::move(eq), std::move(rows));
  co_return co_await e.Open(std::move(picked));
}

TEST(Select, OneHotZeroAndMixedVectors) {
  const auto& f = FieldParams::Test101();
  Prg prg = Prg::FromSeed(66);
  std::vector<std::vector<FieldElement>> table = {
      {FieldElement(f, 10), FieldElement(f, 20), FieldElement(f, 30)},
      {FieldElement(f, 40), FieldElement(f, 50), FieldElement(f, 60)},
      {FieldElement(f, 70), FieldElement(f, 80), FieldElement(f, 90)},
      {FieldElement(f, 1), FieldElement(f, 2), FieldElement(f, 3)},
  };
  std::array<std::vector<std::vector<RepShare>>, 3> rows;
  for (const auto& r : table) {
    auto s = ShareAll(r, prg);
    for (int p = 0; p < 3; ++p) rows[p].push_back(s[p]);
  }
  auto run = [&](std::vector<uint64_t> sel) {
    std::vector<FieldElement> eqv;
    for (uint64_t v : sel) eqv.emplace_back(f, v);
    auto se = ShareAll(eqv, prg);
    auto res = RunThreeParties<std::vector<FieldElement>>(f, TapeCounts{12, 0, 0, 0}, 67, [&](PartyContext c) {
      return SelectAndOpen(c.engine, se[c.party], rows[c.party]);
    });
    EXPECT_EQ(res.stats[0].online_rounds, 2u);
    EXPECT_EQ(res.stats[0].mults, 12u);
    // Independent oracle: plain dot products.
    std::vector<FieldElement> want(3, FieldElement::Zero(f));
    for (size_t y = 0; y < table.size(); ++y) {
      for (size_t c = 0; c < 3; ++c) want[c] += eqv[y] * table[y][c];
    }
    EXPECT_EQ(res.values[0], want);
    return res.values[0];
  };
  EXPECT_EQ(run({0, 1, 0, 0}), table[1]);
  EXPECT_EQ(run({0, 0, 0, 0}), std::vector<FieldElement>(3, FieldElement::Zero(f)));
  run({1, 0, 2, 1});
}

TEST(Select, MismatchedRowsAreRejected) {
  const auto& f = FieldParams::Test101();
  Prg prg = Prg::FromSeed(68);
  auto se = ShareAll({FieldElement(f, 1), FieldElement(f, 0)}, prg);
  auto r = ShareAll({FieldElement(f, 1)}, prg);
  EXPECT_THROW((RunThreeParties<std::vector<FieldElement>>(f, TapeCounts{4, 0, 0, 0}, 69,
                                                           [&](PartyContext c) {
                                                             return SelectAndOpen(c.engine, se[c.party],
                                                                                  {r[c.party]});
                                                           })),
               Error);
}

}  // namespace
}  // namespace vsa
