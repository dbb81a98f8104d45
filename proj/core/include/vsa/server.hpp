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

// The computing server: holds one share of every registered vehicle, joins
// token-generation sessions with its two peers, publishes the result to the
// ledger and keeps an audit record per session.
//
// Control plane (JSON over HTTP):
//   POST /register     {"rows": [b64 VehicleRow...]}  -> {"stored": n}
//   GET  /owners/<id>  -> {"owner_id": id, "indices": [...]}
//   POST /at-gen-req   AT_GEN_REQ -> AT_PUB_ACK (blocks for the session)
//   GET  /kem-key      -> {"party": i, "kem_public": b64}
//   GET  /health       -> party, rows, remaining preprocessing, peers
//
// The data plane is a TcpFabric among the three servers. Party 0 decides
// which tape slice a session uses and announces it in the session hello;
// all three compare backend, owner, sizes and tape identity there and
// abort on any difference.
//
// Nothing here sees cleartext: requests carry sealed bundles that open to
// shares, the database and audit records hold shares, and logs carry
// session ids, owner ids, sizes and timings only.

#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vsa/backend.hpp"
#include "vsa/http.hpp"
#include "vsa/messages.hpp"
#include "vsa/pubkey.hpp"
#include "vsa/step2.hpp"
#include "vsa/transport.hpp"

namespace vsa {

struct ServerConfig {
  int party = 0;
  std::string control_host = "127.0.0.1";
  uint16_t control_port = 0;  // 0 picks a free port
  // Data-plane endpoints of all three servers; peers[party] is where this
  // one listens.
  std::array<Endpoint, 3> peers;
  std::string ledger_url;
  std::filesystem::path db_path;
  std::filesystem::path tape_path;
  std::filesystem::path state_dir;  // tape watermark and audit records
  std::optional<Backend> backend;   // unset accepts both
  std::filesystem::path kem_key_path;
  std::optional<std::array<uint8_t, 32>> channel_key;
  std::filesystem::path log_path;   // empty logs to stderr only
  bool log_to_stderr = true;
  size_t workers = 8;               // concurrent sessions
  std::chrono::milliseconds session_timeout{30000};
  std::chrono::milliseconds connect_timeout{30000};
  int publish_attempts = 5;
};

// 32-byte secrets as hex text files (created with mode 0600).
void SaveSecret32(const std::filesystem::path& path, const std::array<uint8_t, 32>& secret);
std::array<uint8_t, 32> LoadSecret32(const std::filesystem::path& path);

class VsspServer {
 public:
  // Test hook standing in for a process crash partway through a session.
  enum class Failpoint { kNone, kCrashAfterHello };

  // Loads the tape (its party must match), the database and the key.
  explicit VsspServer(ServerConfig config);
  ~VsspServer();
  VsspServer(const VsspServer&) = delete;
  VsspServer& operator=(const VsspServer&) = delete;

  // Binds the data-plane listener; returns its port.
  uint16_t BindDataPlane();
  void set_peer(int party, const Endpoint& e);
  // Binds the control plane and starts serving; peers are dialed in the
  // background. Returns the control port.
  uint16_t Start();
  void Stop();
  std::string url() const;
  int party() const;

  // The session body behind POST /at-gen-req.
  AtPubAck HandleAtGenReq(const AtGenReq& req);
  void set_failpoint(Failpoint f);
  bool crashed() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

class ServerClient {
 public:
  explicit ServerClient(std::string url, std::chrono::milliseconds timeout = std::chrono::seconds(60));

  size_t Register(const std::vector<VehicleRow>& rows) const;
  std::vector<uint32_t> Indices(uint64_t owner_id) const;
  AtPubAck GenerateToken(const AtGenReq& req) const;
  KemPublicKey KemKey(int expected_party) const;
  std::string Health() const;
  const std::string& url() const { return http_.base_url(); }

 private:
  HttpClient http_;
};

}  // namespace vsa
