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

// Orchestration subcommands: run-e2e, bench, audit.

#include <iostream>
#include <memory>
#include <thread>

#include "commands.hpp"
#include "common.hpp"
#include "vsa/audit.hpp"
#include "vsa/bench.hpp"
#include "vsa/e2e.hpp"

namespace vsa::cli {
namespace {

namespace fs = std::filesystem;

const FieldParams& Field() { return FieldParams::Production(); }

fs::path FreshDir(const std::string& given, const std::string& prefix) {
  if (!given.empty()) {
    fs::create_directories(given);
    return given;
  }
  Bytes suffix(4);
  RandomBytes(suffix);
  fs::path dir = fs::temp_directory_path() / (prefix + "-" + ToHex(suffix));
  fs::create_directories(dir);
  return dir;
}

void AddRunE2e(CLI::App& app) {
  auto* cmd = app.add_subcommand("run-e2e", "Run a whole booking against an in-process deployment");
  struct Opts {
    std::string dir, backend = "mimc", tamper = "none", report, owner_scheme = "ed25519";
    size_t vehicles = 1, target = 0, mutations = 0;
    uint64_t seed = 1;
    bool revoke = false;
    int timeout_s = 120;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("--dir", o->dir, "Artifacts directory (default: a fresh temporary one)");
  cmd->add_option("--backend", o->backend, "mimc or aes")->capture_default_str();
  cmd->add_option("--vehicles", o->vehicles, "Vehicles registered for the owner")->capture_default_str();
  cmd->add_option("--target", o->target, "Index of the booked vehicle")->capture_default_str();
  cmd->add_option("--seed", o->seed, "Seed for the clients' choices")->capture_default_str();
  cmd->add_option("--owner-scheme", o->owner_scheme, "ed25519 or rsa2048")->capture_default_str();
  cmd->add_option("--tamper", o->tamper, "none, ledger-c, ledger-tag, token or cert")->capture_default_str();
  cmd->add_flag("--revoke-after-publish", o->revoke, "Revoke the booking before the consumer presents it");
  cmd->add_option("--mutations", o->mutations, "Single-bit mutation trials after an honest run");
  cmd->add_option("--timeout", o->timeout_s, "Per-request timeout in seconds")->capture_default_str();
  cmd->add_option("--report", o->report, "Also write the JSON report here");
  cmd->callback([o] {
    E2eOptions e;
    e.backend = ParseBackend(o->backend);
    e.vehicles = o->vehicles;
    e.target = o->target;
    e.seed = o->seed;
    e.owner_scheme = ParseSignatureScheme(o->owner_scheme);
    e.tamper = ParseTamper(o->tamper);
    e.revoke_after_publish = o->revoke;
    e.timeout = std::chrono::seconds(o->timeout_s);
    if (e.target >= e.vehicles) throw Error(ErrorCode::kInvalidArgument, "--target must be below --vehicles");

    fs::path dir = FreshDir(o->dir, "vsa-e2e");
    LocalDeployment::Options d;
    d.dir = dir;
    Step2Params params{e.backend, e.vehicles, SignedBookingBlocks(e.owner_scheme), {}};
    d.tape = TapeBudget(Field(), {params}, 4);
    d.seed = o->seed;
    LocalDeployment deployment(d);
    E2eFlow flow(deployment.endpoints(), e);
    E2eReport rep = flow.Run();

    json j = json::parse(rep.ToJson());
    j["artifacts"] = dir.string();
    j["backend"] = BackendName(e.backend);
    j["vehicles"] = e.vehicles;
    j["tamper"] = TamperName(e.tamper);
    j["revoke_after_publish"] = e.revoke_after_publish;
    bool mutation_ok = true;
    if (o->mutations > 0 && rep.ok()) {
      MutationTally t = flow.Mutate(o->mutations, o->seed);
      j["mutations"] = {{"trials", t.trials},
                        {"grants", t.grants},
                        {"trials_by_target", t.trials_by_target},
                        {"grants_by_target", t.grants_by_target},
                        {"controls", t.controls},
                        {"control_grants", t.control_grants}};
      mutation_ok = t.grants == 0 && t.control_grants == t.controls;
    }
    if (rep.ts_pub != 0) {
      WriteFile(dir / "owner.pub", ToHex(flow.owner_public_key().Encode()) + "\n");
      json records = json::array();
      for (int p = 0; p < 3; ++p) {
        fs::path r = deployment.server_state(p) / "audit" / AuditFileName(rep.session, p);
        if (fs::exists(r)) records.push_back(r.string());
      }
      j["audit_records"] = records;
      j["booking"] = BookingToJson(flow.booking());
      j["owner_public_key"] = (dir / "owner.pub").string();
    }
    std::string text = j.dump(2);
    WriteFile(dir / "report.json", text + "\n");
    if (!o->report.empty()) WriteFile(o->report, text + "\n");
    WriteOutput("", text);
    if (!rep.ok()) {
      std::cerr << "failed at step " << rep.failed_step << ": " << rep.error << std::endl;
      throw ExitStatus{kExitDenied};
    }
    if (!mutation_ok) {
      std::cerr << "mutation trials produced a grant" << std::endl;
      throw ExitStatus{kExitDenied};
    }
  });
}

void AddBench(CLI::App& app) {
  auto* cmd = app.add_subcommand("bench", "Step-2 counts, throughput and end-to-end timings per configuration");
  struct Opts {
    std::string out = "bench-out", mode = "both";
    std::vector<size_t> vehicles{1, 2, 4, 256, 512, 1024};
    std::vector<std::string> backends{"mimc", "aes"};
    double window_s = 30;
    size_t parallelism = 0;
    size_t e2e_runs = 3;
    uint64_t seed = 1;
    bool no_throughput = false;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("--out", o->out, "Report directory")->capture_default_str();
  cmd->add_option("--vehicles", o->vehicles, "Vehicle counts")->delimiter(',')->capture_default_str();
  cmd->add_option("--backends", o->backends, "Backends")->delimiter(',')->capture_default_str();
  cmd->add_option("--mode", o->mode, "step2, e2e or both")->capture_default_str();
  cmd->add_option("--window", o->window_s, "Throughput window in seconds")->capture_default_str();
  cmd->add_option("--parallelism", o->parallelism, "Sessions in flight (default: hardware threads)");
  cmd->add_option("--e2e-runs", o->e2e_runs, "End-to-end runs per configuration")->capture_default_str();
  cmd->add_option("--seed", o->seed, "Seed of all inputs")->capture_default_str();
  cmd->add_flag("--no-throughput", o->no_throughput, "Skip the throughput windows");
  cmd->callback([o] {
    if (o->mode != "step2" && o->mode != "e2e" && o->mode != "both") {
      throw Error(ErrorCode::kInvalidArgument, "--mode must be step2, e2e or both");
    }
    size_t parallelism = o->parallelism;
    if (parallelism == 0) parallelism = std::max(1u, std::thread::hardware_concurrency());
    std::vector<BenchConfig> configs;
    for (const auto& b : o->backends) {
      for (size_t n : o->vehicles) configs.push_back({ParseBackend(b), n});
    }

    BenchReport report;
    report.seed = o->seed;
    for (const auto& c : configs) {
      std::cerr << "step 2: " << BackendName(c.backend) << " n=" << c.vehicles << std::endl;
      BenchRow row;
      row.step2 = MeasureStep2(Field(), c, o->seed);
      if (o->mode != "e2e" && !o->no_throughput) {
        row.throughput = MeasureThroughput(Field(), c, parallelism,
                                           std::chrono::milliseconds(static_cast<int64_t>(o->window_s * 1000)),
                                           o->seed);
      }
      report.rows.push_back(std::move(row));
    }
    if (o->mode != "step2") {
      fs::path dir = fs::path(o->out) / "deployment";
      fs::remove_all(dir);
      std::vector<Step2Params> params;
      for (const auto& c : configs) params.push_back({c.backend, c.vehicles, 10, {}});
      LocalDeployment::Options d;
      d.dir = dir;
      d.tape = TapeBudget(Field(), params, o->e2e_runs);
      d.seed = o->seed;
      d.workers = std::max<size_t>(parallelism, 4);
      LocalDeployment deployment(d);
      for (size_t i = 0; i < configs.size(); ++i) {
        std::cerr << "end to end: " << BackendName(configs[i].backend) << " n=" << configs[i].vehicles << std::endl;
        // Distinct seeds keep owners apart across configurations.
        report.rows[i].e2e = MeasureE2e(deployment.endpoints(), configs[i], o->e2e_runs, o->seed * 1'000'003 + i * 101);
      }
    }

    fs::create_directories(o->out);
    json j = json::parse(report.ToJson());
    j["parallelism"] = parallelism;
    j["hardware_threads"] = std::thread::hardware_concurrency();
    json checks = json::array();
    bool all = true;
    for (const auto& c : StructuralChecks(report)) {
      checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
      std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
      all = all && c.passed;
    }
    j["checks"] = checks;
    WriteFile(fs::path(o->out) / "bench.json", j.dump(2) + "\n");
    WriteFile(fs::path(o->out) / "bench.deterministic.json", report.DeterministicJson() + "\n");
    WriteFile(fs::path(o->out) / "bench.csv", report.ToCsv());
    std::cout << report.ToCsv();
    std::cout.flush();
    if (!all) throw ExitStatus{kExitDenied};
  });
}

void AddAudit(CLI::App& app) {
  auto* cmd = app.add_subcommand("audit", "Reconstruct a booking from two or more server audit records");
  struct Opts {
    std::string session, owner_pub;
    std::vector<std::string> records;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("--session", o->session, "Session id (hex)")->required();
  cmd->add_option("--owner-pub", o->owner_pub, "Owner public key file")->required();
  cmd->add_option("records", o->records, "Audit record files")->required();
  cmd->callback([o] {
    std::vector<AuditRecord> records;
    for (const auto& r : o->records) records.push_back(AuditRecord::Load(Field(), r));
    Bytes sid = FromHex(o->session);
    SessionId session{};
    if (sid.size() != session.size()) throw Error(ErrorCode::kInvalidArgument, "session id must be 32 hex digits");
    std::copy(sid.begin(), sid.end(), session.begin());
    AuditResult res = AuditReconstruct(records, session, VerifyKey::Decode(FromHex(ReadTrimmed(o->owner_pub))));
    json j{{"session_id", o->session}, {"booking", BookingToJson(res.booking.bd)},
           {"signature_valid", res.signature_valid}};
    WriteOutput("", j.dump(2));
    if (!res.signature_valid) throw ExitStatus{kExitDenied};
  });
}

}  // namespace

void AddRunCommands(CLI::App& app) {
  AddRunE2e(app);
  AddBench(app);
  AddAudit(app);
}

}  // namespace vsa::cli
