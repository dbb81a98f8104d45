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

// Benchmark drivers. Step 2 runs in isolation at three in-process parties
// for counts and throughput; the end-to-end mode times every step of a
// booking against a LocalDeployment.

#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vsa/backend.hpp"
#include "vsa/deployment.hpp"
#include "vsa/field.hpp"
#include "vsa/step2.hpp"
#include "vsa/tape.hpp"

namespace vsa {

inline constexpr std::string_view kBenchSchema = "vsa-bench/1";

struct BenchConfig {
  Backend backend = Backend::kMimc;
  size_t vehicles = 1;
};

// Deterministic for a given configuration and seed.
struct Step2Counts {
  uint64_t online_rounds = 0;
  std::array<uint64_t, 3> bytes_sent{};     // per server
  std::array<uint64_t, 3> payload_bytes{};  // per server
  uint64_t mults = 0;
  uint64_t and_gates = 0;
  uint64_t cubes = 0;
  uint64_t opens = 0;
  size_t prf_calls = 0;
  TapeCounts preprocessing;
  bool oracle_match = false;  // distributed output equals the cleartext oracle

  uint64_t max_bytes_sent() const;
};

struct Step2Sample {
  BenchConfig config;
  Step2Counts counts;
  double step2_ms = 0;  // hardware-dependent
};

// Prepared inputs and one dealer tape for a configuration; RunOnce plays
// the three servers of one session in-process (replaying the same tape).
class Step2Runner {
 public:
  Step2Runner(const FieldParams& field, const BenchConfig& config, uint64_t seed);
  ~Step2Runner();
  Step2Runner(const Step2Runner&) = delete;
  Step2Runner& operator=(const Step2Runner&) = delete;

  // Party 0's output; throws if any party fails.
  Step2Result RunOnce();
  const Step2Result& expected() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// One Step-2 session from freshly shared inputs, checked against the oracle.
Step2Sample MeasureStep2(const FieldParams& field, const BenchConfig& config, uint64_t seed);

struct ThroughputSample {
  size_t parallelism = 1;
  double window_s = 0;
  uint64_t sessions = 0;
  double ops_per_s = 0;
};

// Completed Step-2 sessions per second with `parallelism` sessions in
// flight. All sessions of one call replay a single dealer tape (fine for
// timing, never for security).
ThroughputSample MeasureThroughput(const FieldParams& field, const BenchConfig& config, size_t parallelism,
                                   std::chrono::milliseconds window, uint64_t seed);

struct E2eSample {
  BenchConfig config;
  size_t runs = 0;
  size_t ok = 0;
  std::map<std::string, double> mean_step_ms;  // "A", "B", "1".."4"
};

E2eSample MeasureE2e(const Endpoints& endpoints, const BenchConfig& config, size_t runs, uint64_t seed);

struct BenchRow {
  Step2Sample step2;
  std::optional<ThroughputSample> throughput;
  std::optional<E2eSample> e2e;
};

struct BenchReport {
  uint64_t seed = 0;
  std::vector<BenchRow> rows;

  // "deterministic" holds only fields fixed by configuration and seed.
  std::string ToJson() const;
  std::string DeterministicJson() const;
  // owner_type,protocol,vehicles,rounds,data_kb,throughput_ops
  std::string ToCsv() const;
};

struct BenchCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Shape checks on the deterministic counts of a sweep: exact Boolean AND
// counts, arithmetic rounds equal across n and within [140, 210], Boolean
// rounds above arithmetic ones, and an affine fit (R^2 >= 0.99) of the
// arithmetic per-server bytes against n. Checks without enough rows are
// left out.
std::vector<BenchCheck> StructuralChecks(const BenchReport& report);

// Coefficient of determination of the least-squares line through (x, y).
double LinearFitR2(const std::vector<double>& x, const std::vector<double>& y);

// Display names of the two constructions.
std::string_view ProtocolName(Backend backend);

}  // namespace vsa
