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

// HTTP front end of the ledger and its client.
//
//   POST /publish            {"c": b64, "tag": b64}   -> {"ts": N, "duplicate": b}
//                            or an AT_PUB_REQ message -> M_PUB_ACK
//   GET  /entries?since=N    -> {"entries": [entry...]} with ts > N, ascending
//   GET  /entry/by-tag/<hex> -> entry, or 404
//   GET  /health             -> {"entries": N}
//
// Query endpoints take no credentials and the service records nothing
// about who asked.

#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vsa/http.hpp"
#include "vsa/ledger.hpp"
#include "vsa/messages.hpp"

namespace vsa {

class LedgerService {
 public:
  LedgerService(Ledger& ledger, std::string host, uint16_t port, size_t threads = 4);
  ~LedgerService();
  LedgerService(const LedgerService&) = delete;
  LedgerService& operator=(const LedgerService&) = delete;

  // Binds (port 0 picks a free one) and serves on a background thread.
  uint16_t Start();
  void Stop();
  std::string url() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

class LedgerClient {
 public:
  explicit LedgerClient(std::string url, std::chrono::milliseconds timeout = std::chrono::seconds(10));

  MPubAck Publish(const AtPubReq& req) const;
  std::vector<LedgerEntry> Since(uint64_t since) const;
  std::optional<LedgerEntry> ByTag(ByteSpan tag) const;
  const std::string& url() const { return http_.base_url(); }

 private:
  HttpClient http_;
};

}  // namespace vsa
