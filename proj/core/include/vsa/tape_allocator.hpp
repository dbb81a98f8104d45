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

// Hands out disjoint slices of a preprocessing tape to sessions.
//
// Party 0 coordinates: it carves the next slice off its cursor. The other
// two parties claim the slice party 0 announced and refuse any that
// overlaps one they have used. Every party persists the high-water mark of
// what it has handed out or claimed before the slice is used, so that a
// restart never reuses correlated randomness.

#pragma once

#include <filesystem>
#include <mutex>
#include <vector>

#include "vsa/tape.hpp"

namespace vsa {

class TapeAllocator {
 public:
  // `state` holds the persisted mark; it is created when missing.
  TapeAllocator(const TapeCounts& total, std::filesystem::path state);

  // Coordinator side. Error(kPreprocessingExhausted) naming the needed and
  // remaining amounts when the tape cannot cover `need`.
  TapeAllocation Allocate(const TapeCounts& need);
  // Peer side. Error(kParameterMismatch) when the slice does not have the
  // expected size, lies beyond the tape or overlaps an earlier one.
  void Claim(const TapeAllocation& slice, const TapeCounts& need);

  TapeCounts remaining() const;
  const TapeCounts& total() const { return total_; }

 private:
  void Persist(const TapeCounts& mark);

  TapeCounts total_;
  std::filesystem::path state_;
  mutable std::mutex mu_;
  TapeCounts floor_;  // everything below was possibly used before a restart
  TapeCounts mark_;   // highest end handed out or claimed
  std::vector<TapeAllocation> claimed_;
};

}  // namespace vsa
