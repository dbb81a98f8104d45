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

#include "vsa/arith_circuit.hpp"

#include <gtest/gtest.h>

#include "../support/mpc_harness.hpp"

namespace vsa {
namespace {

using testing::PartyContext;
using testing::RunThreeParties;
using testing::ShareAll;

Task<std::vector<FieldElement>> EvalAndOpen(Engine& e, const ArithCircuit& c, std::vector<RepShare> in) {
  auto out = co_await c.EvalShared(e, std::move(in));
  co_return co_await e.Open(std::move(out));
}

TEST(ArithCircuitTest, HandBuiltDepths) {
  const auto& f = FieldParams::Test101();
  ArithCircuit c(f);
  uint32_t x = c.Input();
  uint32_t sq = c.Mul(x, x);
  uint32_t cube_by_mul = c.Mul(sq, x);
  uint32_t cube_by_tuple = c.Cube(x);
  uint32_t k = c.AddConst(cube_by_tuple, FieldElement(f, 7));
  c.MarkOutput(cube_by_mul);
  EXPECT_EQ(c.Depth(), 2u);
  c.MarkOutput(k);
  auto d = c.WireDepths();
  EXPECT_EQ(d[k], 1u);
  EXPECT_THROW(c.Add(x, 99), Error);

  std::vector<FieldElement> in{FieldElement(f, 5)};
  auto clear = c.EvalClear(in);
  EXPECT_EQ(clear[0], FieldElement(f, 125 % 101));
  EXPECT_EQ(clear[1], FieldElement(f, (125 + 7) % 101));
}

// Random circuits: shared evaluation agrees with the cleartext evaluator,
// and the engine's round counter equals the static depth plus the final open.
TEST(ArithCircuitTest, RandomCircuitsMatchClearAndDepth) {
  const auto& f = FieldParams::Test101();
  Prg prg = Prg::FromSeed(70);
  for (int trial = 0; trial < 40; ++trial) {
    size_t inputs = 1 + prg.NextU64() % 4;
    size_t gates = 1 + prg.NextU64() % (100 - inputs);
    ArithCircuit c = ArithCircuit::Random(f, inputs, gates, prg);
    std::vector<FieldElement> in;
    for (size_t i = 0; i < inputs; ++i) in.push_back(prg.NextField(f));
    auto shares = ShareAll(in, prg);
    TapeCounts need{c.CountOp(ArithCircuit::Op::kMul), 0, 0, c.CountOp(ArithCircuit::Op::kCube)};
    auto res = RunThreeParties<std::vector<FieldElement>>(f, need, 71 + trial, [&](PartyContext ctx) {
      return EvalAndOpen(ctx.engine, c, shares[ctx.party]);
    });
    auto want = c.EvalClear(in);
    unsigned max_depth = 0;
    for (unsigned d : c.WireDepths()) max_depth = std::max(max_depth, d);
    for (int p = 0; p < 3; ++p) {
      EXPECT_EQ(res.values[p], want) << "trial " << trial;
      EXPECT_EQ(res.stats[p].online_rounds, max_depth + 1) << "trial " << trial;
      EXPECT_EQ(res.stats[p].mults, need.zero_shares);
      EXPECT_EQ(res.stats[p].cubes, need.cube_tuples);
    }
    EXPECT_LE(c.Depth(), max_depth);
  }
}

}  // namespace
}  // namespace vsa
