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

// Three connected TcpFabrics on loopback with kernel-assigned ports.

#pragma once

#include <array>
#include <memory>
#include <optional>
#include <thread>

#include "mpc_harness.hpp"
#include "vsa/transport.hpp"

namespace vsa::testing {

class TcpMesh {
 public:
  explicit TcpMesh(std::optional<std::array<uint8_t, 32>> key) {
    opt_.channel_key = key;
    opt_.receive_timeout = std::chrono::seconds(20);
    for (int p = 0; p < 3; ++p) fabrics_[p] = std::make_unique<TcpFabric>(p, eps_, opt_);
    for (int p = 0; p < 3; ++p) eps_[p].port = fabrics_[p]->Listen();
    for (int p = 0; p < 3; ++p) {
      for (int q = 0; q < 3; ++q) fabrics_[p]->set_endpoint(q, eps_[q]);
    }
    std::array<std::thread, 3> t;
    for (int p = 0; p < 3; ++p) t[p] = std::thread([this, p] { fabrics_[p]->Start(); });
    for (auto& th : t) th.join();
  }

  TcpFabric& fabric(int p) { return *fabrics_[p]; }

  // Replaces party p with a fresh process-like instance on the same port.
  void Restart(int p) {
    fabrics_[p].reset();
    fabrics_[p] = std::make_unique<TcpFabric>(p, eps_, opt_);
    fabrics_[p]->Start();
  }
  LinkFactory Factory() {
    return [this](const SessionId& sid, int p) { return fabrics_[p]->Open(sid); };
  }

 private:
  TcpFabric::Options opt_;
  std::array<Endpoint, 3> eps_{};
  std::array<std::unique_ptr<TcpFabric>, 3> fabrics_;
};

}  // namespace vsa::testing
