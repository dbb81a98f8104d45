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

#include "vsa/step2.hpp"

#include "vsa/boolcirc.hpp"
#include "vsa/error.hpp"

namespace vsa {
namespace {

constexpr auto kStrategy = MimcStrategy::kCubeTuple;

void Require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kParameterMismatch, what);
}

void CheckBits(const BitShares& s, int party, size_t size, const char* what) {
  Require(s.party == party && s.size() == size, std::string("bad share of ") + what);
}

void CheckRep(const RepShare& s, int party, const char* what) {
  Require(s.party == party && s.lo.bound() && s.hi.bound(), std::string("bad share of ") + what);
}

BitVector U64Bits(uint64_t v, size_t bits) {
  BitVector out(bits);
  for (size_t i = 0; i < bits && i < 64; ++i) out.Set(i, (v >> i) & 1);
  return out;
}

// ---- arithmetic backend ----

Task<std::vector<RepShare>> MimcTokenBranch(Engine& e, const Mimc& mimc, std::vector<RepShare> ids,
                                            std::vector<std::vector<RepShare>> keys, RepShare target,
                                            RepShare nonce, std::vector<RepShare> m, EqzConfig cfg) {
  std::vector<RepShare> targets(ids.size(), target);
  std::vector<RepShare> eq = co_await EqzBatch(e, std::move(targets), std::move(ids), cfg);
  std::vector<RepShare> picked = co_await SelectRow(e, std::move(eq), std::move(keys));
  RepShare vehicle_key = picked[0];
  std::vector<RepShare> key_in(1, vehicle_key);
  std::vector<RepShare> nonce_in(1, nonce);
  std::vector<RepShare> tweak = co_await MimcEncryptShared(e, mimc, std::move(key_in), std::move(nonce_in), kStrategy);
  std::vector<RepShare> ks = co_await CtrKeystreamShared(e, mimc, vehicle_key, tweak[0], m.size(), kStrategy);
  for (size_t j = 0; j < m.size(); ++j) m[j] += ks[j];
  co_return m;
}

Task<std::vector<FieldElement>> MimcCipherBranch(Engine& e, const Mimc& mimc, const std::vector<VehicleRow>& rows,
                                                 const SessionKeyShares& keys, const BookingShares& b,
                                                 EqzConfig cfg) {
  std::vector<RepShare> ids;
  std::vector<std::vector<RepShare>> table;
  for (const auto& r : rows) {
    ids.push_back(r.vehicle_id);
    table.push_back(std::vector<RepShare>(1, r.key));
  }
  auto token = MimcTokenBranch(e, mimc, std::move(ids), std::move(table), b.vehicle_id, b.nonce, b.m, cfg);
  auto keystream = CtrKeystreamShared(e, mimc, keys.field[0], keys.field[3], b.m.size() + 1, kStrategy);
  auto joined = co_await WhenAll(e, std::move(token), std::move(keystream));
  std::vector<RepShare> x = std::move(std::get<0>(joined));
  const std::vector<RepShare>& ks = std::get<1>(joined);
  FieldElement shift = FieldElement::FromInteger(e.field(), Uint192{u128{1} << 32, 0});
  x.push_back(b.vehicle_id + b.nonce * shift);
  for (size_t j = 0; j < x.size(); ++j) x[j] += ks[j];
  std::vector<FieldElement> opened = co_await e.Open(std::move(x));
  co_return opened;
}

Task<Step2Result> MimcSession(Engine& e, const std::vector<VehicleRow>& rows, SessionKeyShares keys,
                              BookingShares b, EqzConfig cfg) {
  const Mimc& mimc = Mimc::For(e.field());
  std::vector<RepShare> bd(b.m.begin(), b.m.begin() + kBookingBlocks);
  std::optional<RepShare> tag_tweak = keys.field[4];
  auto cipher = MimcCipherBranch(e, mimc, rows, keys, b, cfg);
  auto tag = HtmacTagShared(e, mimc, keys.field[1], tag_tweak, keys.field[2], std::move(bd), kStrategy);
  auto joined = co_await WhenAll(e, std::move(cipher), std::move(tag));
  ConsumerCipher c;
  c.backend = Backend::kMimc;
  c.mimc.nonce = FieldElement::One(e.field());
  c.mimc.blocks = std::move(std::get<0>(joined));
  Step2Result out;
  out.cipher = c.Encode();
  out.tag = std::get<1>(joined).tag.Encode();
  co_return out;
}

// ---- Boolean backend ----

Task<BitShares> AesTokenBranch(Engine& e, BitShares ids, BitShares keys, size_t rows, BitShares target,
                               BitShares nonce, BitShares m) {
  BitShares vehicle_key = co_await EqualitySelectBinary(e, std::move(target), std::move(ids), std::move(keys), rows);
  BitShares counters = EmptyBitShares(e.party(), 0);
  for (size_t j = 1; j <= m.size() / 128; ++j) {
    counters.Append(nonce);
    counters.Append(e.ConstantBits(U64Bits(j, 64)));
  }
  BitShares at = co_await AesCtrShared(e, std::move(vehicle_key), std::move(counters), std::move(m));
  co_return at;
}

Task<std::vector<Block128>> AesCipherBranch(Engine& e, const std::vector<VehicleRow>& rows,
                                            const SessionKeyShares& keys, const BookingShares& b) {
  BitShares ids = EmptyBitShares(e.party(), 0);
  BitShares table = EmptyBitShares(e.party(), 0);
  for (const auto& r : rows) {
    ids.Append(r.vehicle_id_bits);
    table.Append(r.key_bits);
  }
  size_t blocks = b.blocks() + 1;
  std::vector<Block128> counters;
  for (size_t j = 1; j <= blocks; ++j) counters.push_back(CtrCounterBlock(1, j));
  BitShares zeros = e.ConstantBits(BitVector(128 * blocks));
  auto token = AesTokenBranch(e, std::move(ids), std::move(table), rows.size(), b.vehicle_id_bits, b.nonce_bits,
                              b.m_bits);
  auto keystream = AesCtrShared(e, keys.bits.Slice(0, 128), std::move(counters), std::move(zeros));
  auto joined = co_await WhenAll(e, std::move(token), std::move(keystream));
  BitShares x = std::move(std::get<0>(joined));
  x.Append(b.vehicle_id_bits);
  x.Append(b.nonce_bits);
  x.Append(e.ConstantBits(BitVector(32)));
  x ^= std::get<1>(joined);
  BitVector opened = co_await e.OpenBits(std::move(x));
  std::vector<Block128> out;
  for (size_t j = 0; j < blocks; ++j) out.push_back(BitsBlock(opened, 128 * j));
  co_return out;
}

Task<Block128> AesTagBranch(Engine& e, BitShares key, BitShares bd) {
  BitShares mac = co_await CbcMacAesShared(e, std::move(key), std::move(bd));
  BitVector opened = co_await e.OpenBits(std::move(mac));
  co_return BitsBlock(opened, 0);
}

Task<Step2Result> AesSession(Engine& e, const std::vector<VehicleRow>& rows, SessionKeyShares keys,
                             BookingShares b) {
  auto cipher = AesCipherBranch(e, rows, keys, b);
  auto tag = AesTagBranch(e, keys.bits.Slice(128, 128), b.m_bits.Slice(0, 128 * kBookingBlocks));
  auto joined = co_await WhenAll(e, std::move(cipher), std::move(tag));
  ConsumerCipher c;
  c.backend = Backend::kAes;
  c.aes_blocks = std::move(std::get<0>(joined));
  Step2Result out;
  out.cipher = c.Encode();
  const Block128& t = std::get<1>(joined);
  out.tag.assign(t.begin(), t.end());
  co_return out;
}

}  // namespace

Bytes VehicleRow::Encode() const {
  ByteWriter w;
  w.U64(owner_id);
  w.U32(index);
  vehicle_id.EncodeTo(w);
  key.EncodeTo(w);
  vehicle_id_bits.EncodeTo(w);
  key_bits.EncodeTo(w);
  return std::move(w).bytes();
}

VehicleRow VehicleRow::Decode(const FieldParams& field, ByteSpan bytes) {
  ByteReader r(bytes);
  VehicleRow row;
  row.owner_id = r.U64();
  row.index = r.U32();
  row.vehicle_id = RepShare::Read(field, r);
  row.key = RepShare::Read(field, r);
  row.vehicle_id_bits = BitShares::Read(r);
  row.key_bits = BitShares::Read(r);
  r.ExpectDone();
  int party = row.vehicle_id.party;
  CheckRep(row.key, party, "vehicle key");
  CheckBits(row.vehicle_id_bits, party, 32, "vehicle id bits");
  CheckBits(row.key_bits, party, 128, "vehicle key bits");
  return row;
}

Bytes SessionKeyShares::Encode() const {
  ByteWriter w;
  w.U8(static_cast<uint8_t>(backend));
  if (backend == Backend::kMimc) {
    w.U8(static_cast<uint8_t>(field.size()));
    for (const auto& s : field) s.EncodeTo(w);
  } else {
    bits.EncodeTo(w);
  }
  return std::move(w).bytes();
}

SessionKeyShares SessionKeyShares::Decode(const FieldParams& f, ByteSpan bytes) {
  ByteReader r(bytes);
  SessionKeyShares k;
  k.backend = BackendFromByte(r.U8());
  if (k.backend == Backend::kMimc) {
    size_t n = r.U8();
    for (size_t i = 0; i < n; ++i) k.field.push_back(RepShare::Read(f, r));
  } else {
    k.bits = BitShares::Read(r);
  }
  r.ExpectDone();
  return k;
}

void SessionKeyShares::Check(int party) const {
  if (backend == Backend::kMimc) {
    Require(field.size() == kFieldValues, "session key bundle needs 5 field shares");
    for (const auto& s : field) CheckRep(s, party, "session key");
  } else {
    CheckBits(bits, party, kBits, "session key bits");
  }
}

Bytes BookingShares::Encode() const {
  ByteWriter w;
  w.U8(static_cast<uint8_t>(backend));
  if (backend == Backend::kMimc) {
    w.U16(static_cast<uint16_t>(m.size()));
    for (const auto& s : m) s.EncodeTo(w);
    vehicle_id.EncodeTo(w);
    nonce.EncodeTo(w);
  } else {
    m_bits.EncodeTo(w);
    vehicle_id_bits.EncodeTo(w);
    nonce_bits.EncodeTo(w);
  }
  return std::move(w).bytes();
}

BookingShares BookingShares::Decode(const FieldParams& field, ByteSpan bytes) {
  ByteReader r(bytes);
  BookingShares b;
  b.backend = BackendFromByte(r.U8());
  if (b.backend == Backend::kMimc) {
    size_t n = r.U16();
    for (size_t i = 0; i < n; ++i) b.m.push_back(RepShare::Read(field, r));
    b.vehicle_id = RepShare::Read(field, r);
    b.nonce = RepShare::Read(field, r);
  } else {
    b.m_bits = BitShares::Read(r);
    b.vehicle_id_bits = BitShares::Read(r);
    b.nonce_bits = BitShares::Read(r);
  }
  r.ExpectDone();
  return b;
}

void BookingShares::Check(int party) const {
  if (backend == Backend::kMimc) {
    Require(m.size() > kBookingBlocks, "signed booking shares too short");
    for (const auto& s : m) CheckRep(s, party, "signed booking");
    CheckRep(vehicle_id, party, "vehicle id");
    CheckRep(nonce, party, "token nonce");
  } else {
    Require(m_bits.size() % 128 == 0 && m_bits.size() > 128 * kBookingBlocks, "signed booking bits malformed");
    CheckBits(m_bits, party, m_bits.size(), "signed booking");
    CheckBits(vehicle_id_bits, party, 32, "vehicle id bits");
    CheckBits(nonce_bits, party, 64, "token nonce bits");
  }
}

Bytes ConsumerCipher::Encode() const {
  ByteWriter w;
  w.U8(static_cast<uint8_t>(backend));
  if (backend == Backend::kMimc) {
    w.Raw(mimc.Encode());
  } else {
    w.U16(static_cast<uint16_t>(aes_blocks.size()));
    for (const auto& b : aes_blocks) w.Raw(b);
  }
  return std::move(w).bytes();
}

ConsumerCipher ConsumerCipher::Decode(const FieldParams& field, ByteSpan bytes) {
  ByteReader r(bytes);
  ConsumerCipher c;
  c.backend = BackendFromByte(r.U8());
  if (c.backend == Backend::kMimc) {
    c.mimc = TaggedCiphertext::Read(field, r);
  } else {
    size_t n = r.U16();
    for (size_t i = 0; i < n; ++i) {
      Block128 b{};
      ByteSpan raw = r.Raw(16);
      std::copy(raw.begin(), raw.end(), b.begin());
      c.aes_blocks.push_back(b);
    }
  }
  r.ExpectDone();
  return c;
}

size_t Step2PrfCalls(const Step2Params& p) {
  // token tweak (mimc only) + token blocks + cipher blocks + tag
  if (p.backend == Backend::kMimc) return 1 + p.m_blocks + (p.m_blocks + 1) + kBookingBlocks + 1;
  return p.m_blocks + (p.m_blocks + 1) + kBookingBlocks;
}

size_t Step2AndGates(const Step2Params& p) {
  if (p.backend == Backend::kMimc) return 0;
  return 159 * p.rows + 6400 * Step2PrfCalls(p);
}

TapeCounts Step2Need(const FieldParams& field, const Step2Params& p) {
  if (p.backend == Backend::kAes) {
    TapeCounts t;
    t.zero_bits = Step2AndGates(p);
    return t;
  }
  TapeCounts t = p.eqz.Need(p.rows);
  t.zero_shares += p.rows;  // key selection
  t += MimcNeed(Mimc::For(field), Step2PrfCalls(p), kStrategy);
  return t;
}

Task<Step2Result> Step2Generate(Engine& e, const std::vector<VehicleRow>& rows, SessionKeyShares keys,
                                BookingShares booking, EqzConfig eqz) {
  if (rows.empty()) throw Error(ErrorCode::kNotFound, "owner has no registered vehicles");
  Require(keys.backend == booking.backend, "session keys and booking use different backends");
  keys.Check(e.party());
  booking.Check(e.party());
  for (const auto& r : rows) {
    Require(r.owner_id == rows[0].owner_id, "rows of different owners");
    CheckRep(r.vehicle_id, e.party(), "vehicle id");
    CheckRep(r.key, e.party(), "vehicle key");
    CheckBits(r.vehicle_id_bits, e.party(), 32, "vehicle id bits");
    CheckBits(r.key_bits, e.party(), 128, "vehicle key bits");
  }
  if (booking.backend == Backend::kMimc) {
    Step2Result out = co_await MimcSession(e, rows, std::move(keys), std::move(booking), eqz);
    co_return out;
  }
  Step2Result out = co_await AesSession(e, rows, std::move(keys), std::move(booking));
  co_return out;
}

}  // namespace vsa
