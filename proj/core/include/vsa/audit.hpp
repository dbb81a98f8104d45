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

// Per-session audit records kept by each server: metadata plus that
// server's shares of the signed booking. Any two records of one session
// determine the booking; one record alone reveals nothing about it.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "vsa/backend.hpp"
#include "vsa/repshare.hpp"
#include "vsa/transport.hpp"

namespace vsa {

struct AuditRecord {
  SessionId session{};
  int party = 0;
  uint64_t owner_id = 0;
  Backend backend = Backend::kMimc;
  uint64_t received_ms = 0;   // unix milliseconds
  uint64_t completed_ms = 0;
  uint64_t ts_pub = 0;        // ledger sequence number
  std::vector<RepShare> m;    // arithmetic backend
  BitShares m_bits;           // Boolean backend

  std::string ToJson() const;
  // Error(kParse) on schema violations.
  static AuditRecord FromJson(const FieldParams& field, std::string_view text);
  // Written via a temporary file and rename.
  void Save(const std::filesystem::path& path) const;
  static AuditRecord Load(const FieldParams& field, const std::filesystem::path& path);
};

// File name used by servers: <session hex>.p<party>.json
std::string AuditFileName(const SessionId& session, int party);

}  // namespace vsa
