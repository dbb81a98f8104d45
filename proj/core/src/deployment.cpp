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

#include "vsa/deployment.hpp"

#include <thread>

#include "json.hpp"
#include "vsa/error.hpp"
#include "vsa/pubkey.hpp"

namespace vsa {

TapeCounts TapeBudget(const FieldParams& field, const std::vector<Step2Params>& configs, size_t sessions) {
  TapeCounts total;
  for (const auto& p : configs) {
    TapeCounts one = Step2Need(field, p);
    for (size_t i = 0; i < sessions; ++i) total += one;
  }
  return total;
}

DealerFiles DealerFiles::In(const std::filesystem::path& dir) {
  DealerFiles f;
  for (int p = 0; p < 3; ++p) {
    f.tapes[p] = dir / ("tape.p" + std::to_string(p) + ".bin");
    f.kem_keys[p] = dir / ("kem.p" + std::to_string(p) + ".key");
  }
  f.channel_key = dir / "channel.key";
  return f;
}

DealerFiles RunDealer(const std::filesystem::path& dir, const FieldParams& field, const TapeCounts& counts,
                      uint64_t seed) {
  std::filesystem::create_directories(dir);
  DealerFiles f = DealerFiles::In(dir);
  auto tapes = DealerGenerate(field, counts, seed);
  for (int p = 0; p < 3; ++p) {
    tapes[p].Save(f.tapes[p]);
    SaveSecret32(f.kem_keys[p], KemPrivateKey::Generate().secret());
  }
  std::array<uint8_t, 32> channel{};
  RandomBytes(channel);
  SaveSecret32(f.channel_key, channel);
  return f;
}

LocalDeployment::LocalDeployment(Options options) : options_(std::move(options)) {
  const auto dealer_dir = options_.dir / "dealer";
  dealer_ = DealerFiles::In(dealer_dir);
  if (!std::filesystem::exists(dealer_.tapes[0])) {
    dealer_ = RunDealer(dealer_dir, FieldParams::Production(), options_.tape, options_.seed);
  }
  ledger_ = std::make_unique<Ledger>(options_.dir / "ledger" / "ledger.jsonl");
  ledger_service_ = std::make_unique<LedgerService>(*ledger_, "127.0.0.1", 0);
  ledger_service_->Start();

  for (int p = 0; p < 3; ++p) {
    servers_[p] = std::make_unique<VsspServer>(ConfigFor(p));
    data_[p] = Endpoint{"127.0.0.1", servers_[p]->BindDataPlane()};
  }
  for (int p = 0; p < 3; ++p) {
    for (int q = 0; q < 3; ++q) servers_[p]->set_peer(q, data_[q]);
    control_ports_[p] = servers_[p]->Start();
  }
  WaitForMesh(std::chrono::seconds(30));
}

LocalDeployment::~LocalDeployment() {
  for (auto& s : servers_) s.reset();
  ledger_service_.reset();
}

std::filesystem::path LocalDeployment::server_state(int party) const {
  return options_.dir / ("server" + std::to_string(party));
}

std::filesystem::path LocalDeployment::server_log(int party) const { return server_state(party) / "server.log"; }

ServerConfig LocalDeployment::ConfigFor(int party) const {
  ServerConfig c;
  c.party = party;
  c.control_port = control_ports_[party];
  c.peers = data_;
  c.ledger_url = ledger_service_->url();
  c.db_path = server_state(party) / "db.jsonl";
  c.tape_path = dealer_.tapes[party];
  c.state_dir = server_state(party);
  c.kem_key_path = dealer_.kem_keys[party];
  if (options_.sealed_channels) c.channel_key = LoadSecret32(dealer_.channel_key);
  c.log_path = server_log(party);
  c.log_to_stderr = options_.log_to_stderr;
  c.workers = options_.workers;
  c.session_timeout = options_.session_timeout;
  return c;
}

void LocalDeployment::WaitForMesh(std::chrono::milliseconds timeout) {
  auto deadline = std::chrono::steady_clock::now() + timeout;
  for (;;) {
    bool up = true;
    for (int p = 0; p < 3 && up; ++p) {
      if (!servers_[p]) continue;
      auto health = nlohmann::json::parse(ServerClient(servers_[p]->url()).Health());
      for (const auto& [peer, connected] : health["peers_connected"].items()) {
        int q = std::stoi(peer);
        if (servers_[q] && !connected.get<bool>()) up = false;
      }
    }
    if (up) return;
    if (std::chrono::steady_clock::now() > deadline) throw Error(ErrorCode::kConnect, "server mesh did not form");
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
}

Endpoints LocalDeployment::endpoints() const {
  Endpoints e;
  e.ledger_url = ledger_service_->url();
  for (int p = 0; p < 3; ++p) e.servers[p] = "http://127.0.0.1:" + std::to_string(control_ports_[p]);
  return e;
}

void LocalDeployment::StopServer(int party) { servers_[party].reset(); }

void LocalDeployment::StartServer(int party) {
  servers_[party] = std::make_unique<VsspServer>(ConfigFor(party));
  servers_[party]->Start();
  WaitForMesh(std::chrono::seconds(30));
}

}  // namespace vsa
