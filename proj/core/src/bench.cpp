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

#include "vsa/bench.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <iomanip>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "vsa/e2e.hpp"
#include "vsa/engine.hpp"
#include "vsa/roles.hpp"
#include "vsa/session_inputs.hpp"
#include "vsa/step2.hpp"
#include "vsa/transport.hpp"

namespace vsa {
namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

std::array<uint8_t, 32> Seed32(Prg& prg) {
  std::array<uint8_t, 32> out{};
  prg.Fill(out);
  return out;
}

// Shared inputs and requests for one session, as the owner and consumer
// would produce them, plus what the oracle says the servers must publish.
struct Fixture {
  Step2Params params;
  std::array<std::vector<VehicleRow>, 3> rows;
  std::array<KemPrivateKey, 3> kem;
  std::array<AtGenReq, 3> reqs;
  Step2Result expected;
};

Fixture MakeFixture(const FieldParams& field, const BenchConfig& config, uint64_t seed) {
  if (config.vehicles == 0) throw Error(ErrorCode::kInvalidArgument, "bench needs at least one vehicle");
  Prg prg = Prg::FromSeed(seed, "vsa-bench");
  Fixture f;
  const uint64_t owner_id = 1 + prg.NextU64() % (uint64_t{1} << 40);
  VehicleManufacturer vm;
  std::vector<std::pair<uint32_t, Block128>> vehicles;
  for (size_t i = 0; i < config.vehicles; ++i) {
    VehicleRecord rec{owner_id, static_cast<uint32_t>(1000 + 17 * i), prg.NextKey()};
    vm.AddVehicle(rec);
    vehicles.emplace_back(rec.vehicle_id, rec.key);
    auto r = vm.Register(field, owner_id, rec.vehicle_id, prg);
    for (int p = 0; p < 3; ++p) f.rows[p].push_back(std::move(r[p]));
  }
  SigningKey owner_key = SigningKey::Ed25519FromSeed(Seed32(prg));
  SigningKey consumer_key = SigningKey::Ed25519FromSeed(Seed32(prg));
  std::array<KemPublicKey, 3> kem_pub;
  for (int p = 0; p < 3; ++p) {
    f.kem[p] = KemPrivateKey::FromBytes(Seed32(prg));
    kem_pub[p] = f.kem[p].Public();
  }
  Consumer consumer(field, prg.NextField(field), consumer_key, "bench-consumer");

  BookingDetails bd;
  bd.cert_hash = consumer.certificate().Hash();
  bd.vehicle_id = vehicles[prg.NextU64() % vehicles.size()].first;
  bd.location = prg.NextU64();
  bd.conditions = Conditions{1'700'000'000, 1'700'086'400, 0};
  bd.access_rights = kRightUnlock | kRightLock;
  bd.booking_id = static_cast<uint32_t>(prg.NextU64());

  SesKGenAck ack = consumer.Step1(SesKGenReq{bd.booking_id, config.backend}, kem_pub, prg);
  Owner owner(owner_id, owner_key);
  f.reqs = owner.Step1(field, bd, config.backend, ack, kem_pub, SessionIdFromSeed(seed), prg);

  f.params.backend = config.backend;
  f.params.rows = config.vehicles;
  f.params.m_blocks = SignedBookingBlocks(owner_key.scheme());

  OracleInput in;
  in.backend = config.backend;
  in.keys = consumer.session(bd.booking_id).keys;
  in.booking = owner.Sign(bd);
  in.vehicles = vehicles;
  in.vehicle_id = bd.vehicle_id;
  in.nonce = bd.token_nonce();
  f.expected = ClearOracle(field, in).published;
  return f;
}

struct SessionRun {
  std::array<Step2Result, 3> out;
  std::array<TranscriptStats, 3> stats;
};

// Servers' side of one session: open the requests, run Step 2.
SessionRun RunSession(const FieldParams& field, const Fixture& f, const std::array<PreprocessingTape, 3>& tapes,
                      const SessionId& sid) {
  LocalHub hub(std::chrono::seconds(60));
  SessionRun run;
  std::array<std::exception_ptr, 3> errors;
  std::array<std::thread, 3> threads;
  for (int p = 0; p < 3; ++p) {
    threads[p] = std::thread([&, p] {
      try {
        SessionChannel channel(hub.Connect(sid, p));
        TapeReader reader(tapes[p]);
        Engine engine(channel, reader);
        SessionInputs in = OpenSessionInputs(field, p, f.kem[p], f.reqs[p]);
        run.out[p] = engine.Run(Step2Generate(engine, f.rows[p], std::move(in.keys), std::move(in.booking)));
        run.stats[p] = channel.stats();
      } catch (...) {
        errors[p] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return run;
}

json ConfigJson(const BenchConfig& c) { return {{"backend", BackendName(c.backend)}, {"vehicles", c.vehicles}}; }

json CountsJson(const Step2Counts& c) {
  return {{"online_rounds", c.online_rounds},
          {"bytes_sent", c.bytes_sent},
          {"payload_bytes", c.payload_bytes},
          {"mults", c.mults},
          {"and_gates", c.and_gates},
          {"cubes", c.cubes},
          {"opens", c.opens},
          {"prf_calls", c.prf_calls},
          {"preprocessing",
           {{"zero_shares", c.preprocessing.zero_shares},
            {"zero_bits", c.preprocessing.zero_bits},
            {"random_bits", c.preprocessing.random_bits},
            {"cube_tuples", c.preprocessing.cube_tuples}}},
          {"oracle_match", c.oracle_match}};
}

json DeterministicRows(const BenchReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    json j = ConfigJson(row.step2.config);
    j["step2"] = CountsJson(row.step2.counts);
    rows.push_back(std::move(j));
  }
  return rows;
}

}  // namespace

struct Step2Runner::Impl {
  const FieldParams* field;
  Fixture fixture;
  std::array<PreprocessingTape, 3> tapes;
  std::atomic<uint64_t> sessions{0};
  uint64_t seed;
};

Step2Runner::Step2Runner(const FieldParams& field, const BenchConfig& config, uint64_t seed)
    : impl_(std::make_unique<Impl>()) {
  impl_->field = &field;
  impl_->fixture = MakeFixture(field, config, seed);
  impl_->tapes = DealerGenerate(field, Step2Need(field, impl_->fixture.params), seed);
  impl_->seed = seed;
}

Step2Runner::~Step2Runner() = default;

Step2Result Step2Runner::RunOnce() {
  SessionId sid = SessionIdFromSeed(impl_->seed + 1 + impl_->sessions.fetch_add(1));
  return RunSession(*impl_->field, impl_->fixture, impl_->tapes, sid).out[0];
}

const Step2Result& Step2Runner::expected() const { return impl_->fixture.expected; }

uint64_t Step2Counts::max_bytes_sent() const { return *std::max_element(bytes_sent.begin(), bytes_sent.end()); }

std::string_view ProtocolName(Backend backend) {
  return backend == Backend::kMimc ? "HtMAC-MiMC" : "CBC-MAC-AES";
}

Step2Sample MeasureStep2(const FieldParams& field, const BenchConfig& config, uint64_t seed) {
  Fixture f = MakeFixture(field, config, seed);
  auto tapes = DealerGenerate(field, Step2Need(field, f.params), seed);
  auto start = Clock::now();
  SessionRun run = RunSession(field, f, tapes, SessionIdFromSeed(seed));
  Step2Sample s;
  s.step2_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  s.config = config;
  const TranscriptStats& st = run.stats[0];
  for (int p = 0; p < 3; ++p) {
    if (run.stats[p].online_rounds != st.online_rounds) {
      throw Error(ErrorCode::kProtocolDesync, "parties disagree on the round count");
    }
    s.counts.bytes_sent[p] = run.stats[p].bytes_sent;
    s.counts.payload_bytes[p] = run.stats[p].payload_bytes;
  }
  s.counts.online_rounds = st.online_rounds;
  s.counts.mults = st.mults;
  s.counts.and_gates = st.and_gates;
  s.counts.cubes = st.cubes;
  s.counts.opens = st.opens;
  s.counts.prf_calls = Step2PrfCalls(f.params);
  s.counts.preprocessing = st.preprocessing;
  s.counts.oracle_match = run.out[0] == f.expected && run.out[1] == f.expected && run.out[2] == f.expected;
  return s;
}

ThroughputSample MeasureThroughput(const FieldParams& field, const BenchConfig& config, size_t parallelism,
                                   std::chrono::milliseconds window, uint64_t seed) {
  if (parallelism == 0) throw Error(ErrorCode::kInvalidArgument, "parallelism must be positive");
  Step2Runner runner(field, config, seed);
  std::atomic<uint64_t> done{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  const auto start = Clock::now();
  const auto deadline = start + window;
  std::vector<std::thread> workers;
  for (size_t w = 0; w < parallelism; ++w) {
    workers.emplace_back([&] {
      try {
        while (Clock::now() < deadline) {
          runner.RunOnce();
          done.fetch_add(1);
        }
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : workers) t.join();
  if (failure) std::rethrow_exception(failure);
  ThroughputSample s;
  s.parallelism = parallelism;
  s.window_s = std::chrono::duration<double>(Clock::now() - start).count();
  s.sessions = done.load();
  s.ops_per_s = static_cast<double>(s.sessions) / s.window_s;
  return s;
}

E2eSample MeasureE2e(const Endpoints& endpoints, const BenchConfig& config, size_t runs, uint64_t seed) {
  E2eSample s;
  s.config = config;
  s.runs = runs;
  std::map<std::string, double> total;
  for (size_t i = 0; i < runs; ++i) {
    E2eOptions o;
    o.backend = config.backend;
    o.vehicles = config.vehicles;
    o.target = i % config.vehicles;
    o.seed = seed + i;
    E2eReport r = E2eFlow(endpoints, o).Run();
    if (!r.ok()) continue;
    ++s.ok;
    for (const auto& [step, ms] : r.step_ms) total[step] += ms;
  }
  for (const auto& [step, ms] : total) s.mean_step_ms[step] = ms / static_cast<double>(s.ok);
  return s;
}

double LinearFitR2(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(ErrorCode::kInvalidArgument, "fit needs two or more points");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0) throw Error(ErrorCode::kInvalidArgument, "fit needs two distinct x values");
  if (syy == 0) return 1.0;
  const double slope = sxy / sxx;
  double ss_res = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    double r = y[i] - (my + slope * (x[i] - mx));
    ss_res += r * r;
  }
  return 1.0 - ss_res / syy;
}

std::vector<BenchCheck> StructuralChecks(const BenchReport& report) {
  std::vector<BenchCheck> out;
  std::vector<const Step2Sample*> mimc, aes;
  for (const auto& row : report.rows) {
    (row.step2.config.backend == Backend::kMimc ? mimc : aes).push_back(&row.step2);
  }
  for (const Step2Sample* s : aes) {
    const uint64_t n = s->config.vehicles;
    const uint64_t want = 159 * n + 6400 * 27;
    out.push_back({"aes_and_gates_n" + std::to_string(n), s->counts.and_gates == want,
                   std::to_string(s->counts.and_gates) + " measured, 159n + 6400*27 = " + std::to_string(want) +
                       " (159n + 6400*28 = " + std::to_string(want + 6400) + ")"});
  }
  for (const auto* group : {&mimc, &aes}) {
    for (const Step2Sample* s : *group) {
      if (!s->counts.oracle_match) {
        out.push_back({"oracle_" + std::string(BackendName(s->config.backend)) + "_n" +
                           std::to_string(s->config.vehicles),
                       false, "distributed output differs from the cleartext oracle"});
      }
    }
  }
  if (!mimc.empty()) {
    bool equal = true;
    std::string rounds;
    for (const Step2Sample* s : mimc) {
      equal = equal && s->counts.online_rounds == mimc[0]->counts.online_rounds;
      rounds += (rounds.empty() ? "" : ",") + std::to_string(s->counts.online_rounds);
    }
    out.push_back({"mimc_rounds_equal", equal, "rounds " + rounds});
    const uint64_t r = mimc[0]->counts.online_rounds;
    out.push_back({"mimc_rounds_range", r >= 140 && r <= 210, std::to_string(r) + " in [140, 210]"});
  }
  if (!mimc.empty() && !aes.empty()) {
    uint64_t max_mimc = 0, min_aes = std::numeric_limits<uint64_t>::max();
    for (const Step2Sample* s : mimc) max_mimc = std::max(max_mimc, s->counts.online_rounds);
    for (const Step2Sample* s : aes) min_aes = std::min(min_aes, s->counts.online_rounds);
    out.push_back({"aes_rounds_exceed_mimc", min_aes > max_mimc,
                   std::to_string(min_aes) + " > " + std::to_string(max_mimc)});
  }
  if (mimc.size() >= 3) {
    std::vector<double> x, y;
    for (const Step2Sample* s : mimc) {
      x.push_back(static_cast<double>(s->config.vehicles));
      y.push_back(static_cast<double>(s->counts.max_bytes_sent()));
    }
    double r2 = LinearFitR2(x, y);
    std::ostringstream d;
    d << "R^2 = " << std::setprecision(6) << r2;
    out.push_back({"mimc_bytes_affine", r2 >= 0.99, d.str()});
  }
  return out;
}

std::string BenchReport::DeterministicJson() const {
  return json{{"schema", kBenchSchema}, {"seed", seed}, {"rows", DeterministicRows(*this)}}.dump(2);
}

std::string BenchReport::ToJson() const {
  json measured = json::array();
  for (const auto& row : rows) {
    json j = ConfigJson(row.step2.config);
    j["step2_ms"] = row.step2.step2_ms;
    if (row.throughput) {
      j["throughput"] = {{"parallelism", row.throughput->parallelism},
                         {"window_s", row.throughput->window_s},
                         {"sessions", row.throughput->sessions},
                         {"ops_per_s", row.throughput->ops_per_s}};
    }
    if (row.e2e) {
      j["e2e"] = {{"runs", row.e2e->runs}, {"ok", row.e2e->ok}, {"mean_step_ms", row.e2e->mean_step_ms}};
    }
    measured.push_back(std::move(j));
  }
  json out{{"schema", kBenchSchema},
           {"seed", seed},
           {"deterministic", DeterministicRows(*this)},
           {"hardware_dependent", std::move(measured)}};
  return out.dump(2);
}

std::string BenchReport::ToCsv() const {
  std::ostringstream out;
  out << "owner_type,protocol,vehicles,rounds,data_kb,throughput_ops\n";
  for (const auto& row : rows) {
    const auto& c = row.step2.config;
    out << (c.vehicles <= 4 ? "individual" : "rental_branch") << ',' << ProtocolName(c.backend) << ',' << c.vehicles
        << ',' << row.step2.counts.online_rounds << ',' << std::fixed << std::setprecision(1)
        << static_cast<double>(row.step2.counts.max_bytes_sent()) / 1000.0 << ',';
    if (row.throughput) out << std::setprecision(1) << row.throughput->ops_per_s;
    out << '\n';
  }
  return out.str();
}

}  // namespace vsa
