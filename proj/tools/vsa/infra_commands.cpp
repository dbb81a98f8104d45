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

// Infrastructure subcommands: dealer, vm-init, server, ledger.

#include <signal.h>

#include <iostream>
#include <memory>

#include "commands.hpp"
#include "common.hpp"
#include "vsa/deployment.hpp"
#include "vsa/ledger_service.hpp"
#include "vsa/roles.hpp"
#include "vsa/server.hpp"

namespace vsa::cli {
namespace {

// Blocks SIGINT and SIGTERM in every thread started afterwards; the caller
// then waits for one in WaitForSignal.
sigset_t BlockStopSignals() {
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);
  return set;
}

int WaitForSignal(const sigset_t& set) {
  int sig = 0;
  sigwait(&set, &sig);
  return sig;
}

std::vector<Step2Params> ParseConfigs(const std::vector<std::string>& specs) {
  std::vector<Step2Params> out;
  for (const auto& s : specs) {
    auto parts = SplitList(s, ':');
    if (parts.size() != 2) throw Error(ErrorCode::kInvalidArgument, "config must look like mimc:4, got " + s);
    Step2Params p;
    p.backend = ParseBackend(parts[0]);
    p.rows = std::stoul(parts[1]);
    out.push_back(p);
  }
  return out;
}

void AddDealer(CLI::App& app) {
  auto* cmd = app.add_subcommand("dealer", "Generate preprocessing tapes and server keys");
  struct Opts {
    std::string out;
    std::vector<std::string> configs{"mimc:1", "aes:1"};
    size_t sessions = 100;
    uint64_t seed = 0;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("--out", o->out, "Output directory")->required();
  cmd->add_option("--config", o->configs, "backend:vehicles, repeatable")->capture_default_str();
  cmd->add_option("--sessions", o->sessions, "Sessions of each configuration")->capture_default_str();
  cmd->add_option("--seed", o->seed, "Tape seed (0 draws one)");
  cmd->callback([o] {
    const FieldParams& field = FieldParams::Production();
    TapeCounts counts = TapeBudget(field, ParseConfigs(o->configs), o->sessions);
    uint64_t seed = o->seed;
    if (seed == 0) seed = Prg::Secure().NextU64();
    DealerFiles files = RunDealer(o->out, field, counts, seed);
    json j{{"zero_shares", counts.zero_shares},
           {"zero_bits", counts.zero_bits},
           {"random_bits", counts.random_bits},
           {"cube_tuples", counts.cube_tuples},
           {"channel_key", files.channel_key.string()}};
    for (int p = 0; p < 3; ++p) {
      j["tapes"].push_back(files.tapes[p].string());
      j["kem_keys"].push_back(files.kem_keys[p].string());
    }
    WriteOutput("", j.dump(2));
  });
}

void AddVmInit(CLI::App& app) {
  auto* cmd = app.add_subcommand("vm-init", "Create vehicles for an owner and share them to the servers");
  struct Opts {
    std::string db;
    uint64_t owner = 0;
    size_t vehicles = 1;
    uint32_t first_id = 1000;
    std::string rows_out;
    std::string servers;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("--db", o->db, "Manufacturer database (JSON), created if missing")->required();
  cmd->add_option("--owner", o->owner, "Owner id")->required();
  cmd->add_option("--vehicles", o->vehicles, "Number of vehicles")->capture_default_str();
  cmd->add_option("--first-id", o->first_id, "First vehicle id")->capture_default_str();
  cmd->add_option("--rows-out", o->rows_out, "Write rows.p<i>.jsonl share files here");
  cmd->add_option("--servers", o->servers, "Comma-separated server URLs to load the rows into");
  cmd->callback([o] {
    if (o->rows_out.empty() && o->servers.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "give --rows-out or --servers (or both)");
    }
    const FieldParams& field = FieldParams::Production();
    VehicleManufacturer vm = std::filesystem::exists(o->db) ? VehicleManufacturer::Load(o->db) : VehicleManufacturer();
    Prg prg = Prg::Secure();
    std::array<std::vector<VehicleRow>, 3> rows;
    json ids = json::array();
    for (size_t i = 0; i < o->vehicles; ++i) {
      uint32_t id = o->first_id + static_cast<uint32_t>(i);
      vm.AddVehicle({o->owner, id, prg.NextKey()});
      auto r = vm.Register(field, o->owner, id, prg);
      for (int p = 0; p < 3; ++p) rows[p].push_back(std::move(r[p]));
      ids.push_back(id);
    }
    if (!o->rows_out.empty()) {
      for (int p = 0; p < 3; ++p) {
        std::string text;
        for (const auto& row : rows[p]) text += json{{"row", ToBase64(row.Encode())}}.dump() + "\n";
        WriteFile(std::filesystem::path(o->rows_out) / ("rows.p" + std::to_string(p) + ".jsonl"), text);
      }
    }
    if (!o->servers.empty()) {
      auto urls = ThreeUrls(o->servers);
      for (int p = 0; p < 3; ++p) ServerClient(urls[p]).Register(rows[p]);
    }
    // Save last: a failed load leaves the manufacturer unchanged.
    vm.Save(o->db);
    WriteOutput("", json{{"owner_id", o->owner}, {"vehicle_ids", ids}}.dump());
  });
}

void AddServer(CLI::App& app) {
  auto* cmd = app.add_subcommand("server", "Run one computing server until SIGINT or SIGTERM");
  struct Opts {
    int party = 0;
    std::string listen = "127.0.0.1:0";
    std::string peers;
    std::string ledger;
    std::string db;
    std::string tape;
    std::string backend;
    std::string kem_key;
    std::string channel_key;
    std::string state_dir;
    std::string log;
    size_t workers = 8;
    int session_timeout_ms = 30000;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("--party", o->party, "Party index")->required()->check(CLI::Range(0, 2));
  cmd->add_option("--listen", o->listen, "Control-plane host:port")->capture_default_str();
  cmd->add_option("--peers", o->peers, "Data-plane host:port of parties 0,1,2")->required();
  cmd->add_option("--ledger", o->ledger, "Ledger URL")->required();
  cmd->add_option("--db", o->db, "Share database file")->required();
  cmd->add_option("--tape", o->tape, "Preprocessing tape of this party")->required();
  cmd->add_option("--backend", o->backend, "Accept only this backend (mimc or aes)");
  cmd->add_option("--kem-key", o->kem_key, "Decryption key file")->required();
  cmd->add_option("--channel-key", o->channel_key, "Shared data-plane key file (optional)");
  cmd->add_option("--state-dir", o->state_dir, "Tape watermark and audit records")->required();
  cmd->add_option("--log", o->log, "Log file (stderr always)");
  cmd->add_option("--workers", o->workers, "Concurrent sessions")->capture_default_str();
  cmd->add_option("--session-timeout-ms", o->session_timeout_ms, "Per-session timeout")->capture_default_str();
  cmd->callback([o] {
    ServerConfig c;
    c.party = o->party;
    Endpoint control = ParseEndpoint(o->listen);
    c.control_host = control.host;
    c.control_port = control.port;
    auto peers = SplitList(o->peers);
    if (peers.size() != 3) throw Error(ErrorCode::kInvalidArgument, "--peers needs three host:port entries");
    for (int p = 0; p < 3; ++p) c.peers[p] = ParseEndpoint(peers[p]);
    c.ledger_url = o->ledger;
    c.db_path = o->db;
    c.tape_path = o->tape;
    if (!o->backend.empty()) c.backend = ParseBackend(o->backend);
    c.kem_key_path = o->kem_key;
    if (!o->channel_key.empty()) c.channel_key = LoadSecret32(o->channel_key);
    c.state_dir = o->state_dir;
    c.log_path = o->log;
    c.workers = o->workers;
    c.session_timeout = std::chrono::milliseconds(o->session_timeout_ms);

    sigset_t stop = BlockStopSignals();
    VsspServer server(c);
    server.BindDataPlane();
    server.Start();
    std::cerr << "server " << c.party << " listening on " << server.url() << std::endl;
    WaitForSignal(stop);
    server.Stop();
  });
}

void AddLedger(CLI::App& app) {
  auto* cmd = app.add_subcommand("ledger", "Run the public ledger until SIGINT or SIGTERM");
  struct Opts {
    std::string listen = "127.0.0.1:0";
    std::string file;
    size_t threads = 4;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("--listen", o->listen, "host:port")->capture_default_str();
  cmd->add_option("--file", o->file, "Append-only entry file")->required();
  cmd->add_option("--threads", o->threads, "HTTP worker threads")->capture_default_str();
  cmd->callback([o] {
    Endpoint e = ParseEndpoint(o->listen);
    sigset_t stop = BlockStopSignals();
    Ledger ledger(o->file);
    LedgerService service(ledger, e.host, e.port, o->threads);
    service.Start();
    std::cerr << "ledger listening on " << service.url() << " with " << ledger.size() << " entries" << std::endl;
    WaitForSignal(stop);
    service.Stop();
  });
}

}  // namespace

void AddInfraCommands(CLI::App& app) {
  AddDealer(app);
  AddVmInit(app);
  AddServer(app);
  AddLedger(app);
}

}  // namespace vsa::cli
