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

#include "vsa/tape.hpp"

#include <fstream>
#include <iterator>
#include <span>

#include "vsa/error.hpp"

namespace vsa {
namespace {

constexpr char kMagic[] = "VSATAPE1";
// GF(2) zero shares are read from this block offset of the key stream, far
// away from the field region (which uses blocks 2t and 2t + 1).
constexpr uint64_t kBitRegion = uint64_t{1} << 62;

std::vector<FieldElement> StreamElements(const Prg& prg, const FieldParams& f, uint64_t first, size_t m) {
  std::vector<uint8_t> buf(32 * m);
  prg.BlocksAt(2 * first, 2 * m, buf.data());
  std::vector<FieldElement> out;
  out.reserve(m);
  for (size_t i = 0; i < m; ++i) {
    out.push_back(FieldElement::FromWide(f, std::span<const uint8_t, 32>(buf.data() + 32 * i, 32)));
  }
  return out;
}

BitVector StreamBits(const Prg& prg, uint64_t first, size_t m) {
  uint64_t first_block = first / 128;
  uint64_t last_block = (first + m - 1) / 128;
  size_t blocks = static_cast<size_t>(last_block - first_block + 1);
  std::vector<uint8_t> buf(16 * blocks);
  prg.BlocksAt(kBitRegion + first_block, blocks, buf.data());
  return BitVector::FromBytes(buf).Slice(static_cast<size_t>(first % 128), m);
}

}  // namespace

TapeCounts& TapeCounts::operator+=(const TapeCounts& o) {
  zero_shares += o.zero_shares;
  zero_bits += o.zero_bits;
  random_bits += o.random_bits;
  cube_tuples += o.cube_tuples;
  return *this;
}

bool TapeCounts::Covers(const TapeCounts& need) const {
  return zero_shares >= need.zero_shares && zero_bits >= need.zero_bits &&
         random_bits >= need.random_bits && cube_tuples >= need.cube_tuples;
}

std::array<PreprocessingTape, 3> DealerGenerate(const FieldParams& field, const TapeCounts& counts,
                                                uint64_t seed) {
  Prg prg = Prg::FromSeed(seed, "vsa-dealer");
  std::array<Prg::Key, 3> keys{prg.NextKey(), prg.NextKey(), prg.NextKey()};
  std::array<PreprocessingTape, 3> tapes;
  for (int i = 0; i < kParties; ++i) {
    tapes[i].party_ = i;
    tapes[i].field_ = &field;
    tapes[i].key_self_ = keys[i];
    tapes[i].key_next_ = keys[NextParty(i)];
    tapes[i].counts_ = counts;
    tapes[i].random_bits_.reserve(counts.random_bits);
    tapes[i].cubes_.reserve(counts.cube_tuples);
  }
  FieldElement zero = FieldElement::Zero(field);
  FieldElement one = FieldElement::One(field);
  for (uint64_t j = 0; j < counts.random_bits; ++j) {
    auto sh = Share(prg.NextBit() ? one : zero, prg);
    for (int i = 0; i < kParties; ++i) tapes[i].random_bits_.push_back(sh[i]);
  }
  for (uint64_t j = 0; j < counts.cube_tuples; ++j) {
    FieldElement s = prg.NextField(field);
    FieldElement s2 = s * s;
    auto a = Share(s, prg);
    auto b = Share(s2, prg);
    auto c = Share(s2 * s, prg);
    for (int i = 0; i < kParties; ++i) tapes[i].cubes_.push_back(CubeTuple{a[i], b[i], c[i]});
  }
  return tapes;
}

Bytes PreprocessingTape::Serialize() const {
  ByteWriter w;
  w.Raw(AsBytes(std::string_view(kMagic, 8)));
  w.U16(kVersion);
  w.U8(static_cast<uint8_t>(party_));
  w.U8(static_cast<uint8_t>(field_->label().size()));
  w.Str(field_->label());
  w.Raw(key_self_);
  w.Raw(key_next_);
  w.U64(counts_.zero_shares);
  w.U64(counts_.zero_bits);
  w.U64(counts_.random_bits);
  w.U64(counts_.cube_tuples);
  for (const auto& b : random_bits_) {
    b.lo.EncodeTo(w);
    b.hi.EncodeTo(w);
  }
  for (const auto& c : cubes_) {
    for (const RepShare* s : {&c.s, &c.s2, &c.s3}) {
      s->lo.EncodeTo(w);
      s->hi.EncodeTo(w);
    }
  }
  return std::move(w).bytes();
}

PreprocessingTape PreprocessingTape::Deserialize(ByteSpan bytes) {
  ByteReader r(bytes);
  if (r.Str(8) != std::string_view(kMagic, 8)) throw Error(ErrorCode::kDecode, "bad tape magic");
  uint16_t version = r.U16();
  if (version != kVersion) throw Error(ErrorCode::kDecode, "unsupported tape version " + std::to_string(version));
  PreprocessingTape t;
  t.party_ = r.U8();
  if (t.party_ >= kParties) throw Error(ErrorCode::kDecode, "tape party id out of range");
  std::string label = r.Str(r.U8());
  t.field_ = &FieldParams::ByLabel(label);
  auto ks = r.Raw(16);
  std::copy(ks.begin(), ks.end(), t.key_self_.begin());
  auto kn = r.Raw(16);
  std::copy(kn.begin(), kn.end(), t.key_next_.begin());
  t.counts_.zero_shares = r.U64();
  t.counts_.zero_bits = r.U64();
  t.counts_.random_bits = r.U64();
  t.counts_.cube_tuples = r.U64();
  size_t elem = t.field_->encoded_size();
  uint64_t need = (t.counts_.random_bits * 2 + t.counts_.cube_tuples * 6) * elem;
  if (need != r.remaining()) throw Error(ErrorCode::kDecode, "tape body size does not match counts");
  auto pair = [&](RepShare& s) {
    s.party = static_cast<uint8_t>(t.party_);
    s.lo = FieldElement::Read(*t.field_, r);
    s.hi = FieldElement::Read(*t.field_, r);
  };
  t.random_bits_.resize(t.counts_.random_bits);
  for (auto& b : t.random_bits_) pair(b);
  t.cubes_.resize(t.counts_.cube_tuples);
  for (auto& c : t.cubes_) {
    pair(c.s);
    pair(c.s2);
    pair(c.s3);
  }
  r.ExpectDone();
  return t;
}

void PreprocessingTape::Save(const std::filesystem::path& path) const {
  Bytes data = Serialize();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out) throw Error(ErrorCode::kStorage, "cannot write tape " + path.string());
}

PreprocessingTape PreprocessingTape::Load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kStorage, "cannot open tape " + path.string());
  Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return Deserialize(data);
}

TapeReader::TapeReader(const PreprocessingTape& tape, const TapeAllocation& alloc)
    : tape_(&tape),
      alloc_(alloc),
      cursor_(alloc.begin),
      prg_self_(tape.key_self()),
      prg_next_(tape.key_next()) {
  if (!tape.counts().Covers(alloc.end)) {
    throw Error(ErrorCode::kPreprocessingExhausted, "allocation exceeds tape contents");
  }
}

void TapeReader::Reserve(uint64_t& cursor, uint64_t begin, uint64_t end, size_t m, const char* what) {
  if (cursor + m > end) {
    throw Error(ErrorCode::kPreprocessingExhausted,
                std::string(what) + ": requested " + std::to_string(m) + ", " +
                    std::to_string(end - cursor) + " of " + std::to_string(end - begin) + " left");
  }
  cursor += m;
}

std::vector<FieldElement> TapeReader::ZeroShares(size_t m) {
  uint64_t first = cursor_.zero_shares;
  Reserve(cursor_.zero_shares, alloc_.begin.zero_shares, alloc_.end.zero_shares, m, "zero shares");
  consumed_.zero_shares += m;
  auto a = StreamElements(prg_self_, field(), first, m);
  auto b = StreamElements(prg_next_, field(), first, m);
  for (size_t i = 0; i < m; ++i) a[i] -= b[i];
  return a;
}

BitVector TapeReader::ZeroBits(size_t m) {
  if (m == 0) return BitVector(0);
  uint64_t first = cursor_.zero_bits;
  Reserve(cursor_.zero_bits, alloc_.begin.zero_bits, alloc_.end.zero_bits, m, "zero bits");
  consumed_.zero_bits += m;
  return StreamBits(prg_self_, first, m) ^ StreamBits(prg_next_, first, m);
}

std::vector<RepShare> TapeReader::RandomBits(size_t m) {
  uint64_t first = cursor_.random_bits;
  Reserve(cursor_.random_bits, alloc_.begin.random_bits, alloc_.end.random_bits, m, "random bits");
  consumed_.random_bits += m;
  const auto& src = tape_->random_bits();
  return {src.begin() + static_cast<ptrdiff_t>(first), src.begin() + static_cast<ptrdiff_t>(first + m)};
}

std::vector<CubeTuple> TapeReader::Cubes(size_t m) {
  uint64_t first = cursor_.cube_tuples;
  Reserve(cursor_.cube_tuples, alloc_.begin.cube_tuples, alloc_.end.cube_tuples, m, "cube tuples");
  consumed_.cube_tuples += m;
  const auto& src = tape_->cube_tuples();
  return {src.begin() + static_cast<ptrdiff_t>(first), src.begin() + static_cast<ptrdiff_t>(first + m)};
}

}  // namespace vsa
