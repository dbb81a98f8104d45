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

#pragma once

#include <cstdint>
#include <vector>

#include "vsa/bytes.hpp"

namespace vsa {

// Fixed-length GF(2) vector packed into 64-bit words; bit i lives in word
// i / 64 at position i % 64. Unused high bits of the last word stay zero.
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(size_t size) : size_(size), words_((size + 63) / 64, 0) {}
  // Low `size` bits of `bytes`, byte 0 bit 0 first.
  static BitVector FromBytes(ByteSpan bytes, size_t size);
  static BitVector FromBytes(ByteSpan bytes) { return FromBytes(bytes, bytes.size() * 8); }

  size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }
  bool Get(size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1; }
  void Set(size_t i, bool v) {
    uint64_t m = uint64_t{1} << (i & 63);
    if (v) words_[i >> 6] |= m; else words_[i >> 6] &= ~m;
  }
  void Flip(size_t i) { words_[i >> 6] ^= uint64_t{1} << (i & 63); }

  const std::vector<uint64_t>& words() const { return words_; }
  std::vector<uint64_t>& mutable_words() { return words_; }

  BitVector& operator^=(const BitVector& o);
  BitVector& operator&=(const BitVector& o);
  friend BitVector operator^(BitVector a, const BitVector& b) { return a ^= b; }
  friend BitVector operator&(BitVector a, const BitVector& b) { return a &= b; }
  BitVector operator~() const;
  friend bool operator==(const BitVector&, const BitVector&) = default;

  // Copies [offset, offset + count).
  BitVector Slice(size_t offset, size_t count) const;
  void Append(const BitVector& o);
  size_t PopCount() const;

  // Packed bytes, ceil(size / 8) of them, byte 0 bit 0 = index 0.
  Bytes ToBytes() const;
  // Wire form: u64 length followed by the packed words, little-endian.
  void EncodeTo(ByteWriter& w) const;
  static BitVector Read(ByteReader& r);

  // Keeps the padding bits of the last word at zero.
  void ClearPadding();

 private:
  size_t size_ = 0;
  std::vector<uint64_t> words_;
};

}  // namespace vsa
