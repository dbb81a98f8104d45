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

// Append-only public ledger.
//
// Entries are (ts, wall clock, ciphertext, tag). ts is a sequence number
// starting at 1; wall time is advisory. Publishing the same (ciphertext,
// tag) again returns the first entry's ts, so the three servers publishing
// one session leave one entry.
//
// Persistence is one JSON object per line:
//   {"ts":N,"wall_ms":W,"c":"<base64>","tag":"<base64>","hash":"<hex>"}
// with hash = SHA3-256(u64 ts | u64 wall | u32 |c| | c | u32 |tag| | tag).
// A line is acknowledged only after it reached the disk. On open, an
// unterminated last line (a write cut short by a crash) is truncated; any
// other damage is an error.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "vsa/bytes.hpp"
#include "vsa/crypto.hpp"

namespace vsa {

struct LedgerEntry {
  uint64_t ts = 0;
  uint64_t wall_ms = 0;
  Bytes cipher;
  Bytes tag;

  Digest256 LineHash() const;
  // {"ts","wall_ms","c","tag"} (the API form) and the stored line.
  std::string ToJson() const;
  std::string ToLine() const;
  // Error(kParse) on schema violations.
  static LedgerEntry FromJson(std::string_view text);
  friend bool operator==(const LedgerEntry&, const LedgerEntry&) = default;
};

// Content key used for deduplication.
Digest256 LedgerContentHash(ByteSpan cipher, ByteSpan tag);

class Ledger {
 public:
  // Test hook simulating a crash around the append.
  enum class Failpoint {
    kNone,
    kTornWrite,         // half a line reaches the file, then the writer dies
    kAfterWriteNoAck,   // the line is durable but the ack is never sent
  };

  struct PublishResult {
    uint64_t ts = 0;
    bool duplicate = false;
  };

  // Opens or creates the file and replays it. Error(kStorage) on damage.
  explicit Ledger(std::filesystem::path path);
  ~Ledger();
  Ledger(const Ledger&) = delete;
  Ledger& operator=(const Ledger&) = delete;

  // Error(kStorage) when the append cannot be made durable; the ledger then
  // refuses further appends until it is reopened.
  PublishResult Publish(ByteSpan cipher, ByteSpan tag);
  // Entries with ts > since, ascending.
  std::vector<LedgerEntry> Since(uint64_t since) const;
  // Earliest entry carrying this tag.
  std::optional<LedgerEntry> ByTag(ByteSpan tag) const;

  size_t size() const;
  uint64_t last_ts() const;
  const std::filesystem::path& path() const { return path_; }

  // One-shot: the next Publish fails at the given point with Error(kStorage).
  void set_failpoint(Failpoint f);

 private:
  void Replay();
  void Append(const std::string& line, bool torn);

  std::filesystem::path path_;
  int fd_ = -1;
  mutable std::shared_mutex mu_;
  std::vector<LedgerEntry> entries_;
  std::map<Digest256, uint64_t> by_content_;
  std::map<Bytes, uint64_t> by_tag_;
  Failpoint failpoint_ = Failpoint::kNone;
  bool broken_ = false;
};

}  // namespace vsa
