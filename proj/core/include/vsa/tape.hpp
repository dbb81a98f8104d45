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

// Dealer-generated preprocessing material.
//
// Each party's tape holds:
//  * two PRG keys (its own k_i and its successor's k_{i+1}); the correlated
//    zero share at index t is F(k_i, t) - F(k_{i+1}, t), which sums to zero
//    over the three parties. Field and GF(2) zero shares use disjoint
//    regions of the key stream.
//  * shares of uniformly random bits b in {0, 1} (masks for equality tests).
//  * shares of cube tuples (s, s^2, s^3) for one-round cubing.
//
// File format (all integers little-endian):
//   "VSATAPE1" | u16 version | u8 party | u8 label length | label |
//   16-byte k_self | 16-byte k_next |
//   u64 zero_shares | u64 zero_bits | u64 random_bits | u64 cube_tuples |
//   random bits as (lo, hi) canonical elements |
//   cube tuples as (s.lo, s.hi, s2.lo, s2.hi, s3.lo, s3.hi)

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "vsa/crypto.hpp"
#include "vsa/repshare.hpp"

namespace vsa {

struct TapeCounts {
  uint64_t zero_shares = 0;  // field multiplications
  uint64_t zero_bits = 0;    // AND gates
  uint64_t random_bits = 0;  // shared random bits in F_p
  uint64_t cube_tuples = 0;  // (s, s^2, s^3) triples

  TapeCounts& operator+=(const TapeCounts& o);
  friend TapeCounts operator+(TapeCounts a, const TapeCounts& b) { return a += b; }
  friend bool operator==(const TapeCounts&, const TapeCounts&) = default;
  bool Covers(const TapeCounts& need) const;
};

struct CubeTuple {
  RepShare s, s2, s3;
};

class PreprocessingTape {
 public:
  static constexpr uint16_t kVersion = 1;

  PreprocessingTape() = default;

  int party() const { return party_; }
  const FieldParams& field() const { return *field_; }
  const TapeCounts& counts() const { return counts_; }
  const Prg::Key& key_self() const { return key_self_; }
  const Prg::Key& key_next() const { return key_next_; }
  const std::vector<RepShare>& random_bits() const { return random_bits_; }
  const std::vector<CubeTuple>& cube_tuples() const { return cubes_; }

  Bytes Serialize() const;
  static PreprocessingTape Deserialize(ByteSpan bytes);
  void Save(const std::filesystem::path& path) const;
  static PreprocessingTape Load(const std::filesystem::path& path);

 private:
  friend std::array<PreprocessingTape, 3> DealerGenerate(const FieldParams&, const TapeCounts&, uint64_t);

  int party_ = 0;
  const FieldParams* field_ = &FieldParams::Production();
  Prg::Key key_self_{};
  Prg::Key key_next_{};
  TapeCounts counts_;
  std::vector<RepShare> random_bits_;
  std::vector<CubeTuple> cubes_;
};

// Trusted-dealer generation; deterministic in `seed`.
std::array<PreprocessingTape, 3> DealerGenerate(const FieldParams& field, const TapeCounts& counts,
                                                uint64_t seed);

// Half-open ranges of a tape reserved for one session.
struct TapeAllocation {
  TapeCounts begin;
  TapeCounts end;

  static TapeAllocation Whole(const TapeCounts& counts) { return {{}, counts}; }
};

// Per-session consumer of a tape. Each stream is consumed strictly in order;
// asking for more than the allocation holds raises kPreprocessingExhausted.
class TapeReader {
 public:
  TapeReader(const PreprocessingTape& tape, const TapeAllocation& alloc);
  explicit TapeReader(const PreprocessingTape& tape)
      : TapeReader(tape, TapeAllocation::Whole(tape.counts())) {}

  int party() const { return tape_->party(); }
  const FieldParams& field() const { return tape_->field(); }

  // This party's additive zero-share values alpha_i(t) for the next m indices.
  std::vector<FieldElement> ZeroShares(size_t m);
  BitVector ZeroBits(size_t m);
  std::vector<RepShare> RandomBits(size_t m);
  std::vector<CubeTuple> Cubes(size_t m);

  const TapeCounts& consumed() const { return consumed_; }

 private:
  void Reserve(uint64_t& cursor, uint64_t begin, uint64_t end, size_t m, const char* what);

  const PreprocessingTape* tape_;
  TapeAllocation alloc_;
  TapeCounts cursor_;
  TapeCounts consumed_;
  Prg prg_self_;
  Prg prg_next_;
};

}  // namespace vsa
