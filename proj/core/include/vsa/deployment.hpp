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

// Dealer output on disk and a whole deployment (ledger plus three servers)
// inside one process, for tests, benchmarks and the run-e2e command.

#pragma once

#include <array>
#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vsa/ledger.hpp"
#include "vsa/ledger_service.hpp"
#include "vsa/server.hpp"
#include "vsa/step2.hpp"
#include "vsa/tape.hpp"

namespace vsa {

// Preprocessing for `sessions` sessions of each configuration.
TapeCounts TapeBudget(const FieldParams& field, const std::vector<Step2Params>& configs, size_t sessions);

struct DealerFiles {
  std::array<std::filesystem::path, 3> tapes;
  std::array<std::filesystem::path, 3> kem_keys;
  std::filesystem::path channel_key;

  // tape.p<i>.bin, kem.p<i>.key and channel.key under `dir`.
  static DealerFiles In(const std::filesystem::path& dir);
};

// Writes tapes from DealerGenerate(field, counts, seed) and fresh server
// key pairs; `seed` only drives the tapes.
DealerFiles RunDealer(const std::filesystem::path& dir, const FieldParams& field, const TapeCounts& counts,
                      uint64_t seed);

struct Endpoints {
  std::string ledger_url;
  std::array<std::string, 3> servers;
};

class LocalDeployment {
 public:
  struct Options {
    std::filesystem::path dir;
    TapeCounts tape;
    uint64_t seed = 1;
    bool sealed_channels = true;
    size_t workers = 8;
    std::chrono::milliseconds session_timeout{30000};
    bool log_to_stderr = false;
  };

  // Runs the dealer (unless files already exist in dir/dealer) and starts
  // the ledger and the three servers, waiting until the mesh is up.
  explicit LocalDeployment(Options options);
  ~LocalDeployment();

  Endpoints endpoints() const;
  Ledger& ledger() { return *ledger_; }
  VsspServer& server(int party) { return *servers_[party]; }
  const Options& options() const { return options_; }
  std::filesystem::path server_state(int party) const;
  std::filesystem::path server_log(int party) const;

  // Tears a server down and brings it back with the same ports and files.
  void StopServer(int party);
  void StartServer(int party);

 private:
  ServerConfig ConfigFor(int party) const;
  void WaitForMesh(std::chrono::milliseconds timeout);

  Options options_;
  DealerFiles dealer_;
  std::unique_ptr<Ledger> ledger_;
  std::unique_ptr<LedgerService> ledger_service_;
  std::array<std::unique_ptr<VsspServer>, 3> servers_;
  std::array<Endpoint, 3> data_;
  std::array<uint16_t, 3> control_ports_{};
};

}  // namespace vsa
