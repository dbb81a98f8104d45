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

// Microbenchmarks of the building blocks and of one Step-2 session run by
// three in-process parties.

#include <benchmark/benchmark.h>

#include <filesystem>

#include "vsa/bench.hpp"
#include "vsa/crypto.hpp"
#include "vsa/field.hpp"
#include "vsa/ledger.hpp"
#include "vsa/mimc.hpp"
#include "vsa/repshare.hpp"
#include "vsa/tape.hpp"

namespace vsa {
namespace {

const FieldParams& F() { return FieldParams::Production(); }

void BM_FieldMul(benchmark::State& state) {
  Prg prg = Prg::FromSeed(1);
  FieldElement a = prg.NextField(F()), b = prg.NextField(F());
  for (auto _ : state) {
    a = a * b;
    benchmark::DoNotOptimize(a);
  }
}
BENCHMARK(BM_FieldMul);

void BM_FieldInverse(benchmark::State& state) {
  Prg prg = Prg::FromSeed(2);
  FieldElement a = prg.NextField(F());
  for (auto _ : state) benchmark::DoNotOptimize(a.Inverse());
}
BENCHMARK(BM_FieldInverse);

void BM_MimcEncrypt(benchmark::State& state) {
  Prg prg = Prg::FromSeed(3);
  const Mimc& mimc = Mimc::For(F());
  FieldElement k = prg.NextField(F()), x = prg.NextField(F());
  for (auto _ : state) {
    x = mimc.Encrypt(k, x);
    benchmark::DoNotOptimize(x);
  }
}
BENCHMARK(BM_MimcEncrypt);

void BM_Aes128Block(benchmark::State& state) {
  Prg prg = Prg::FromSeed(4);
  Aes128 aes(prg.NextKey());
  Block128 b = prg.NextKey();
  for (auto _ : state) {
    b = aes.Encrypt(b);
    benchmark::DoNotOptimize(b);
  }
}
BENCHMARK(BM_Aes128Block);

void BM_ShareReconstruct(benchmark::State& state) {
  Prg prg = Prg::FromSeed(5);
  FieldElement x = prg.NextField(F());
  for (auto _ : state) {
    auto s = Share(x, prg);
    benchmark::DoNotOptimize(Reconstruct(s[0], s[2]));
  }
}
BENCHMARK(BM_ShareReconstruct);

void BM_DealerRandomBits(benchmark::State& state) {
  TapeCounts counts{0, 0, static_cast<uint64_t>(state.range(0)), 0};
  uint64_t seed = 6;
  for (auto _ : state) benchmark::DoNotOptimize(DealerGenerate(F(), counts, seed++));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DealerRandomBits)->Arg(1 << 12)->Arg(1 << 16)->Unit(benchmark::kMillisecond);

void BM_LedgerPublish(benchmark::State& state) {
  auto path = std::filesystem::temp_directory_path() / "vsa_bench_ledger.jsonl";
  std::filesystem::remove(path);
  Ledger ledger(path);
  Prg prg = Prg::FromSeed(7);
  Bytes cipher(200), tag(17);
  for (auto _ : state) {
    prg.Fill(cipher);
    prg.Fill(tag);
    benchmark::DoNotOptimize(ledger.Publish(cipher, tag));
  }
  std::filesystem::remove(path);
}
BENCHMARK(BM_LedgerPublish)->Unit(benchmark::kMicrosecond);

// One session per iteration; args are backend (0 mimc, 1 aes) and rows.
void BM_Step2Session(benchmark::State& state) {
  BenchConfig config{state.range(0) == 0 ? Backend::kMimc : Backend::kAes, static_cast<size_t>(state.range(1))};
  Step2Runner runner(F(), config, 11);
  for (auto _ : state) {
    Step2Result out = runner.RunOnce();
    if (out != runner.expected()) {
      state.SkipWithError("output differs from the oracle");
      break;
    }
  }
  state.SetLabel(std::string(ProtocolName(config.backend)));
}
BENCHMARK(BM_Step2Session)
    ->ArgsProduct({{0, 1}, {1, 4, 256}})
    ->ArgNames({"aes", "rows"})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

}  // namespace
}  // namespace vsa

BENCHMARK_MAIN();
