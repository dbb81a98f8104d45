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

// Consumer session-key derivation from a long-term master key. Kept apart
// from the cipher so server code never sees the cleartext key type.

#pragma once

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>

#include "vsa/mimc.hpp"

namespace vsa {

struct SessionKeys {
  FieldElement enc;
  FieldElement tag_enc;
  FieldElement tag_mac;
  uint64_t counter = 0;
  friend bool operator==(const SessionKeys&, const SessionKeys&) = default;
};

// E_master(3c), E_master(3c + 1), E_master(3c + 2).
SessionKeys Kdf(const Mimc& mimc, const FieldElement& master, uint64_t counter);

// Highest counter used so far, optionally persisted to a file so counters
// are never reused across restarts.
class KdfWatermark {
 public:
  KdfWatermark() = default;
  explicit KdfWatermark(std::filesystem::path path);

  uint64_t last() const;
  // Throws Error(kCounterReuse) unless counter > last(); records it first.
  SessionKeys Derive(const Mimc& mimc, const FieldElement& master, uint64_t counter);
  SessionKeys DeriveNext(const Mimc& mimc, const FieldElement& master);

 private:
  void Claim(uint64_t counter);

  mutable std::mutex mu_;
  std::optional<std::filesystem::path> path_;
  uint64_t last_ = 0;
};

}  // namespace vsa
