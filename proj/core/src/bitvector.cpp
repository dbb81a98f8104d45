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

#include "vsa/bitvector.hpp"

#include <bit>

#include "vsa/error.hpp"

namespace vsa {

BitVector BitVector::FromBytes(ByteSpan bytes, size_t size) {
  if (size > bytes.size() * 8) throw Error(ErrorCode::kInvalidArgument, "bit count exceeds input");
  BitVector out(size);
  for (size_t i = 0; i < (size + 7) / 8; ++i) {
    out.words_[i / 8] |= static_cast<uint64_t>(bytes[i]) << (8 * (i % 8));
  }
  out.ClearPadding();
  return out;
}

void BitVector::ClearPadding() {
  if (size_ % 64 != 0 && !words_.empty()) words_.back() &= (uint64_t{1} << (size_ % 64)) - 1;
}

BitVector& BitVector::operator^=(const BitVector& o) {
  if (o.size_ != size_) throw Error(ErrorCode::kParameterMismatch, "bit vector length mismatch");
  for (size_t i = 0; i < words_.size(); ++i) words_[i] ^= o.words_[i];
  return *this;
}

BitVector& BitVector::operator&=(const BitVector& o) {
  if (o.size_ != size_) throw Error(ErrorCode::kParameterMismatch, "bit vector length mismatch");
  for (size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
  return *this;
}

BitVector BitVector::operator~() const {
  BitVector out = *this;
  for (auto& w : out.words_) w = ~w;
  out.ClearPadding();
  return out;
}

BitVector BitVector::Slice(size_t offset, size_t count) const {
  if (offset + count > size_) throw Error(ErrorCode::kInvalidArgument, "slice out of range");
  BitVector out(count);
  if (offset % 64 == 0) {
    for (size_t i = 0; i < out.words_.size(); ++i) out.words_[i] = words_[offset / 64 + i];
    out.ClearPadding();
    return out;
  }
  for (size_t i = 0; i < count; ++i) {
    if (Get(offset + i)) out.Set(i, true);
  }
  return out;
}

void BitVector::Append(const BitVector& o) {
  size_t base = size_;
  size_ += o.size_;
  words_.resize((size_ + 63) / 64, 0);
  if (base % 64 == 0) {
    for (size_t i = 0; i < o.words_.size(); ++i) words_[base / 64 + i] = o.words_[i];
    return;
  }
  for (size_t i = 0; i < o.size_; ++i) {
    if (o.Get(i)) Set(base + i, true);
  }
}

size_t BitVector::PopCount() const {
  size_t n = 0;
  for (uint64_t w : words_) n += static_cast<size_t>(std::popcount(w));
  return n;
}

Bytes BitVector::ToBytes() const {
  Bytes out((size_ + 7) / 8);
  for (size_t i = 0; i < out.size(); ++i) out[i] = static_cast<uint8_t>(words_[i / 8] >> (8 * (i % 8)));
  return out;
}

void BitVector::EncodeTo(ByteWriter& w) const {
  w.U64(size_);
  for (uint64_t word : words_) w.U64(word);
}

BitVector BitVector::Read(ByteReader& r) {
  uint64_t size = r.U64();
  if (size > r.remaining() * 8) throw Error(ErrorCode::kDecode, "bit vector length exceeds input");
  BitVector out(static_cast<size_t>(size));
  for (auto& word : out.words_) word = r.U64();
  uint64_t before = out.words_.empty() ? 0 : out.words_.back();
  out.ClearPadding();
  if (!out.words_.empty() && before != out.words_.back()) {
    throw Error(ErrorCode::kDecode, "nonzero padding bits in bit vector");
  }
  return out;
}

}  // namespace vsa
