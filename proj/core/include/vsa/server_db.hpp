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

// A server's registration store: one VehicleRow per (owner id, row index),
// holding only this server's shares.
//
// Persistence is one JSON object per line,
//   {"owner_id": N, "index": I, "row": "<base64 VehicleRow>"}
// appended and synced before a load is acknowledged. An unterminated last
// line is dropped on open.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <shared_mutex>
#include <utility>
#include <vector>

#include "vsa/step2.hpp"

namespace vsa {

class ServerDb {
 public:
  // Error(kStorage) when the file is damaged or rows belong to another party.
  ServerDb(const FieldParams& field, int party, std::filesystem::path path);
  ~ServerDb();
  ServerDb(const ServerDb&) = delete;
  ServerDb& operator=(const ServerDb&) = delete;

  // All or nothing. Error(kDuplicate) if any (owner, index) is already
  // stored or repeated in `rows`; Error(kInvalidArgument) for rows holding
  // another party's shares.
  void Load(const std::vector<VehicleRow>& rows);
  // Rows of one owner ordered by index.
  std::vector<VehicleRow> Rows(uint64_t owner_id) const;
  std::vector<uint32_t> Indices(uint64_t owner_id) const;
  size_t size() const;

 private:
  const FieldParams* field_;
  int party_;
  std::filesystem::path path_;
  int fd_ = -1;
  mutable std::shared_mutex mu_;
  std::map<std::pair<uint64_t, uint32_t>, VehicleRow> rows_;
};

}  // namespace vsa
