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

#include "vsa/roles.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "vsa/boolcirc.hpp"
#include "vsa/error.hpp"

namespace vsa {
namespace {

BitVector LeBits(uint64_t v, size_t bits) {
  BitVector out(bits);
  for (size_t i = 0; i < bits && i < 64; ++i) out.Set(i, (v >> i) & 1);
  return out;
}

Block128 XorBlocks(Block128 a, const Block128& b) {
  for (size_t i = 0; i < 16; ++i) a[i] ^= b[i];
  return a;
}

FieldElement TrailerValue(const FieldParams& field, uint32_t vehicle_id, uint64_t nonce) {
  u128 v = (static_cast<u128>(nonce) << 32) | vehicle_id;
  return FieldElement::FromInteger(field, Uint192{v, 0});
}

Block128 TrailerBlock(uint32_t vehicle_id, uint64_t nonce) {
  Block128 b{};
  for (int i = 0; i < 4; ++i) b[i] = static_cast<uint8_t>(vehicle_id >> (8 * i));
  for (int i = 0; i < 8; ++i) b[4 + i] = static_cast<uint8_t>(nonce >> (8 * i));
  return b;
}

Block128 CbcMac(const Block128& key, const std::vector<Block128>& blocks) {
  Aes128 aes(key);
  Block128 chain{};
  for (const auto& b : blocks) chain = aes.Encrypt(XorBlocks(chain, b));
  return chain;
}

std::vector<Block128> PackedBlocks(const BookingDetails& bd) {
  auto packed = bd.Pack();
  std::vector<Block128> out(BookingDetails::kBlocks);
  for (size_t i = 0; i < out.size(); ++i) std::copy_n(packed.begin() + 16 * i, 16, out[i].begin());
  return out;
}

std::vector<Block128> AesCtr(const Block128& key, uint64_t nonce, const std::vector<Block128>& in) {
  Aes128 aes(key);
  std::vector<Block128> out;
  for (size_t j = 0; j < in.size(); ++j) out.push_back(XorBlocks(in[j], aes.Encrypt(CtrCounterBlock(nonce, j + 1))));
  return out;
}

}  // namespace

Block128 LowBlock(const FieldElement& x) {
  Block128 out{};
  u128 lo = x.value().lo;
  for (int i = 0; i < 16; ++i) out[i] = static_cast<uint8_t>(lo >> (8 * i));
  return out;
}

// ---- vehicle manufacturer ----

void VehicleManufacturer::AddVehicle(const VehicleRecord& record) {
  auto key = std::make_pair(record.owner_id, record.vehicle_id);
  if (vehicles_.contains(key)) {
    throw Error(ErrorCode::kDuplicate, "vehicle " + std::to_string(record.vehicle_id) + " of owner " +
                                           std::to_string(record.owner_id) + " already exists");
  }
  vehicles_[key] = record;
}

const VehicleRecord& VehicleManufacturer::Find(uint64_t owner_id, uint32_t vehicle_id) const {
  auto it = vehicles_.find({owner_id, vehicle_id});
  if (it == vehicles_.end()) {
    throw Error(ErrorCode::kNotFound, "no vehicle " + std::to_string(vehicle_id) + " for owner " +
                                          std::to_string(owner_id));
  }
  return it->second;
}

std::vector<VehicleRecord> VehicleManufacturer::records() const {
  std::vector<VehicleRecord> out;
  for (const auto& [k, v] : vehicles_) out.push_back(v);
  return out;
}

std::array<VehicleRow, 3> VehicleManufacturer::Register(const FieldParams& field, uint64_t owner_id,
                                                         uint32_t vehicle_id, Prg& prg) {
  const VehicleRecord& rec = Find(owner_id, vehicle_id);
  auto key = std::make_pair(owner_id, vehicle_id);
  if (registered_.contains(key)) {
    throw Error(ErrorCode::kDuplicate, "vehicle " + std::to_string(vehicle_id) + " already registered");
  }
  auto ids = Share(FieldElement(field, vehicle_id), prg);
  auto keys = Share(BlockToField(field, rec.key), prg);
  auto id_bits = ShareBits(LeBits(vehicle_id, 32), prg);
  auto key_bits = ShareBits(BlockBits(rec.key), prg);
  uint32_t index = next_index_[owner_id]++;
  registered_[key] = index;
  std::array<VehicleRow, 3> rows;
  for (int p = 0; p < 3; ++p) rows[p] = VehicleRow{owner_id, index, ids[p], keys[p], id_bits[p], key_bits[p]};
  return rows;
}

size_t VehicleManufacturer::registered(uint64_t owner_id) const {
  auto it = next_index_.find(owner_id);
  return it == next_index_.end() ? 0 : it->second;
}

void VehicleManufacturer::Save(const std::filesystem::path& path) const {
  nlohmann::json vehicles = nlohmann::json::array();
  for (const auto& [k, v] : vehicles_) {
    nlohmann::json row = {{"owner_id", v.owner_id}, {"vehicle_id", v.vehicle_id}, {"key", ToHex(v.key)}};
    auto reg = registered_.find(k);
    if (reg != registered_.end()) row["row_index"] = reg->second;
    vehicles.push_back(row);
  }
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << nlohmann::json{{"vehicles", vehicles}}.dump(2) << "\n";
    if (!out.flush()) throw Error(ErrorCode::kStorage, "cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

VehicleManufacturer VehicleManufacturer::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kNotFound, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  auto j = nlohmann::json::parse(ss.str(), nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::kParse, "malformed vehicle database " + path.string());
  VehicleManufacturer vm;
  try {
    for (const auto& row : j.at("vehicles")) {
      VehicleRecord rec;
      rec.owner_id = row.at("owner_id").get<uint64_t>();
      rec.vehicle_id = row.at("vehicle_id").get<uint32_t>();
      Bytes key = FromHex(row.at("key").get<std::string>());
      if (key.size() != 16) throw Error(ErrorCode::kParse, "vehicle key must be 16 bytes");
      std::copy(key.begin(), key.end(), rec.key.begin());
      vm.AddVehicle(rec);
      if (row.contains("row_index")) {
        uint32_t index = row.at("row_index").get<uint32_t>();
        vm.registered_[{rec.owner_id, rec.vehicle_id}] = index;
        vm.next_index_[rec.owner_id] = std::max(vm.next_index_[rec.owner_id], index + 1);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("vehicle database: ") + e.what());
  }
  return vm;
}

// ---- consumer ----

Bytes ExpectedTag(const FieldParams& field, Backend backend, const SessionKeys& keys, const BookingDetails& bd) {
  std::vector<Block128> blocks = PackedBlocks(bd);
  if (backend == Backend::kMimc) {
    std::vector<FieldElement> m;
    for (const auto& b : blocks) m.push_back(BlockToField(field, b));
    return HtmacTag(Mimc::For(field), keys.tag_enc, keys.tag_mac, m).tag.Encode();
  }
  Block128 tag = CbcMac(LowBlock(keys.tag_mac), blocks);
  return Bytes(tag.begin(), tag.end());
}

TokenDelivery OpenConsumerCipher(const FieldParams& field, const SessionKeys& keys, const ConsumerCipher& c) {
  if (c.blocks() < 2) throw Error(ErrorCode::kDecode, "consumer ciphertext too short");
  TokenDelivery out;
  out.token.backend = c.backend;
  if (c.backend == Backend::kMimc) {
    std::vector<FieldElement> x = CtrDecrypt(Mimc::For(field), keys.enc, c.mimc);
    Uint192 trailer = x.back().value();
    x.pop_back();
    // Bits above the nonce are padding; accepting them would let a flipped
    // ciphertext bit through unnoticed.
    if (trailer.hi != 0 || (trailer.lo >> 96) != 0) throw Error(ErrorCode::kDecode, "ciphertext trailer is malformed");
    out.vehicle_id = static_cast<uint32_t>(trailer.lo);
    out.token.nonce = static_cast<uint64_t>(trailer.lo >> 32);
    out.token.field_blocks = std::move(x);
  } else {
    std::vector<Block128> x = AesCtr(LowBlock(keys.enc), 1, c.aes_blocks);
    const Block128 trailer = x.back();
    x.pop_back();
    if (trailer[12] | trailer[13] | trailer[14] | trailer[15]) {
      throw Error(ErrorCode::kDecode, "ciphertext trailer is malformed");
    }
    for (int i = 3; i >= 0; --i) out.vehicle_id = (out.vehicle_id << 8) | trailer[i];
    for (int i = 7; i >= 0; --i) out.token.nonce = (out.token.nonce << 8) | trailer[4 + i];
    out.token.aes_blocks = std::move(x);
  }
  return out;
}

std::array<SessionKeyShares, 3> ShareSessionKeys(const FieldParams& field, Backend backend, const SessionKeys& keys,
                                                 Prg& prg) {
  std::array<SessionKeyShares, 3> out;
  if (backend == Backend::kMimc) {
    const Mimc& mimc = Mimc::For(field);
    const FieldElement one = FieldElement::One(field);
    std::vector<FieldElement> values = {keys.enc, keys.tag_enc, keys.tag_mac, mimc.Encrypt(keys.enc, one),
                                        mimc.Encrypt(keys.tag_enc, one)};
    auto shares = ShareVector(values, prg);
    for (int p = 0; p < 3; ++p) out[p] = SessionKeyShares{backend, std::move(shares[p]), {}};
    return out;
  }
  BitVector bits = BlockBits(LowBlock(keys.enc));
  bits.Append(BlockBits(LowBlock(keys.tag_mac)));
  auto shares = ShareBits(bits, prg);
  for (int p = 0; p < 3; ++p) out[p] = SessionKeyShares{backend, {}, std::move(shares[p])};
  return out;
}

Consumer::Consumer(const FieldParams& field, FieldElement master, SigningKey certificate_key, std::string subject,
                   KdfWatermark* watermark)
    : field_(&field),
      master_(std::move(master)),
      certificate_key_(std::move(certificate_key)),
      certificate_{std::move(subject), certificate_key_.Public()},
      watermark_(watermark != nullptr ? watermark : &own_watermark_) {}

SesKGenAck Consumer::Step1(const SesKGenReq& req, const std::array<KemPublicKey, 3>& servers, Prg& prg,
                           uint64_t counter) {
  const Mimc& mimc = Mimc::For(*field_);
  SessionKeys keys = counter == 0 ? watermark_->DeriveNext(mimc, master_) : watermark_->Derive(mimc, master_, counter);
  sessions_[req.booking_id] = ConsumerSession{req.booking_id, req.backend, keys};
  auto shares = ShareSessionKeys(*field_, req.backend, keys, prg);
  SesKGenAck ack;
  ack.booking_id = req.booking_id;
  for (int p = 0; p < 3; ++p) ack.bundles[p] = servers[p].Seal(shares[p].Encode(), KeyBundleAad(p));
  return ack;
}

const ConsumerSession& Consumer::session(uint32_t booking_id) const {
  auto it = sessions_.find(booking_id);
  if (it == sessions_.end()) throw Error(ErrorCode::kNotFound, "no session for booking " + std::to_string(booking_id));
  return it->second;
}

const ConsumerSession& Consumer::Resume(uint32_t booking_id, Backend backend, uint64_t counter) {
  if (counter == 0 || counter > watermark_->last()) {
    throw Error(ErrorCode::kCounterReuse, "counter " + std::to_string(counter) + " was never issued");
  }
  return sessions_[booking_id] = ConsumerSession{booking_id, backend, Kdf(Mimc::For(*field_), master_, counter)};
}

Bytes Consumer::ExpectedTagFor(const BookingDetails& bd) const {
  const ConsumerSession& s = session(bd.booking_id);
  return ExpectedTag(*field_, s.backend, s.keys, bd);
}

TokenDelivery Consumer::Step3(const BookingDetails& bd, ByteSpan cipher, ByteSpan tag) const {
  const ConsumerSession& s = session(bd.booking_id);
  Bytes expected = ExpectedTag(*field_, s.backend, s.keys, bd);
  if (!std::equal(expected.begin(), expected.end(), tag.begin(), tag.end())) {
    throw Error(ErrorCode::kTagInvalid, "ledger tag does not match the booking");
  }
  ConsumerCipher c = ConsumerCipher::Decode(*field_, cipher);
  if (c.backend != s.backend) throw Error(ErrorCode::kDecode, "ciphertext backend differs from the session");
  return OpenConsumerCipher(*field_, s.keys, c);
}

Bytes ChallengeMessage(const Block128& challenge, uint32_t vehicle_id) {
  ByteWriter w;
  w.Str("vsa-access-challenge-v1");
  w.Raw(challenge);
  w.U32(vehicle_id);
  return std::move(w).bytes();
}

AccessReq Consumer::RequestAccess(const TokenDelivery& delivery, uint32_t booking_id, uint8_t action,
                                  const AccessChallenge& challenge) const {
  AccessReq req;
  req.booking_id = booking_id;
  req.vehicle_id = delivery.vehicle_id;
  req.action = action;
  req.challenge = challenge.nonce;
  req.token = delivery.token.Encode();
  req.certificate = certificate_.Encode();
  req.challenge_signature = certificate_key_.Sign(ChallengeMessage(challenge.nonce, delivery.vehicle_id));
  return req;
}

// ---- owner ----

Owner::Owner(uint64_t owner_id, SigningKey signing_key) : id_(owner_id), key_(std::move(signing_key)) {}

std::array<BookingShares, 3> Owner::ShareBooking(const FieldParams& field, Backend backend,
                                                 const SignedBooking& signed_booking, Prg& prg) {
  const BookingDetails& bd = signed_booking.bd;
  std::array<BookingShares, 3> out;
  for (auto& s : out) s.backend = backend;
  if (backend == Backend::kMimc) {
    auto m = ShareVector(signed_booking.ToField(field), prg);
    auto id = Share(FieldElement(field, bd.vehicle_id), prg);
    auto nonce = Share(FieldElement(field, bd.token_nonce()), prg);
    for (int p = 0; p < 3; ++p) {
      out[p].m = std::move(m[p]);
      out[p].vehicle_id = id[p];
      out[p].nonce = nonce[p];
    }
    return out;
  }
  BitVector bits(0);
  for (const auto& b : signed_booking.Blocks()) bits.Append(BlockBits(b));
  auto m = ShareBits(bits, prg);
  auto id = ShareBits(LeBits(bd.vehicle_id, 32), prg);
  auto nonce = ShareBits(LeBits(bd.token_nonce(), 64), prg);
  for (int p = 0; p < 3; ++p) {
    out[p].m_bits = std::move(m[p]);
    out[p].vehicle_id_bits = std::move(id[p]);
    out[p].nonce_bits = std::move(nonce[p]);
  }
  return out;
}

std::array<AtGenReq, 3> Owner::Step1(const FieldParams& field, const BookingDetails& bd, Backend backend,
                                     const SesKGenAck& ack, const std::array<KemPublicKey, 3>& servers,
                                     const SessionId& session, Prg& prg) const {
  if (ack.booking_id != bd.booking_id) {
    throw Error(ErrorCode::kInvalidArgument, "session keys were made for another booking");
  }
  SignedBooking signed_booking = Sign(bd);
  auto shares = ShareBooking(field, backend, signed_booking, prg);
  std::array<AtGenReq, 3> out;
  for (int p = 0; p < 3; ++p) {
    out[p].session = session;
    out[p].owner_id = id_;
    out[p].backend = backend;
    out[p].key_bundle = ack.bundles[p];
    out[p].booking_bundle = servers[p].Seal(shares[p].Encode(), BookingBundleAad(p, session));
  }
  return out;
}

BookingDetails Owner::NextRevision(const BookingDetails& bd, std::optional<std::pair<uint32_t, uint32_t>> window,
                                   const Digest512& cert_hash) {
  BookingDetails next = bd;
  next.cert_hash = cert_hash;
  uint32_t revision = bd.conditions.revision() + 1;
  if (window) {
    next.conditions.start = window->first;
    next.conditions.end = window->second;
    next.conditions.flags = Conditions::MakeFlags(revision, false);
  } else {
    next.conditions = Conditions{0, 0, Conditions::MakeFlags(revision, true)};
    next.access_rights = 0;
  }
  next.Validate();
  return next;
}

// ---- vehicle ----

std::string_view AccessOutcomeName(AccessOutcome outcome) {
  switch (outcome) {
    case AccessOutcome::kGranted: return "granted";
    case AccessOutcome::kRevocationRecorded: return "revocation-recorded";
    case AccessOutcome::kWrongVehicle: return "wrong-vehicle";
    case AccessOutcome::kBadToken: return "bad-token";
    case AccessOutcome::kBadSignature: return "bad-signature";
    case AccessOutcome::kSuperseded: return "superseded";
    case AccessOutcome::kCertMismatch: return "certificate-mismatch";
    case AccessOutcome::kChallengeFailed: return "challenge-failed";
    case AccessOutcome::kNotYetValid: return "not-yet-valid";
    case AccessOutcome::kExpired: return "expired";
    case AccessOutcome::kActionDenied: return "action-denied";
  }
  return "unknown";
}

SignedBooking DecryptToken(const FieldParams& field, const Block128& vehicle_key, const AccessToken& token) {
  if (token.backend == Backend::kMimc) {
    TaggedCiphertext ct{FieldElement(field, token.nonce), token.field_blocks};
    std::vector<FieldElement> m = CtrDecrypt(Mimc::For(field), BlockToField(field, vehicle_key), ct);
    return SignedBooking::FromField(m);
  }
  return SignedBooking::FromBlocks(AesCtr(vehicle_key, token.nonce, token.aes_blocks));
}

VehicleObu::VehicleObu(const FieldParams& field, uint32_t vehicle_id, Block128 key, VerifyKey owner_key,
                       SigningKey vehicle_key, Clock clock)
    : field_(&field),
      vehicle_id_(vehicle_id),
      key_(key),
      owner_key_(std::move(owner_key)),
      vehicle_key_(std::move(vehicle_key)),
      clock_(std::move(clock)) {}

AccessChallenge VehicleObu::Challenge(uint32_t booking_id) {
  AccessChallenge c;
  c.booking_id = booking_id;
  RandomBytes(c.nonce);
  challenges_.insert(c.nonce);
  return c;
}

std::optional<uint32_t> VehicleObu::revision(uint32_t booking_id) const {
  auto it = revisions_.find(booking_id);
  if (it == revisions_.end()) return std::nullopt;
  return it->second;
}

void VehicleObu::Restore(Memory m) {
  challenges_ = std::move(m.challenges);
  revisions_ = std::move(m.revisions);
}

AccessDecision VehicleObu::Decide(const AccessReq& req) {
  AccessDecision d;
  // Challenges are single-use whatever the outcome.
  const bool fresh_challenge = challenges_.erase(req.challenge) > 0;
  auto reject = [&](AccessOutcome o) {
    d.outcome = o;
    return d;
  };
  if (req.vehicle_id != vehicle_id_) return reject(AccessOutcome::kWrongVehicle);
  SignedBooking sb;
  uint64_t token_nonce = 0;
  try {
    AccessToken token = AccessToken::Decode(*field_, req.token);
    token_nonce = token.nonce;
    sb = DecryptToken(*field_, key_, token);
  } catch (const Error&) {
    return reject(AccessOutcome::kBadToken);
  }
  if (!sb.Verify(owner_key_)) return reject(AccessOutcome::kBadSignature);
  const BookingDetails& bd = sb.bd;
  d.bd = bd;
  if (bd.vehicle_id != vehicle_id_) return reject(AccessOutcome::kWrongVehicle);
  if (token_nonce != bd.token_nonce() || req.booking_id != bd.booking_id) return reject(AccessOutcome::kBadToken);
  auto seen = revision(bd.booking_id);
  if (seen && bd.conditions.revision() < *seen) return reject(AccessOutcome::kSuperseded);
  Certificate cert;
  try {
    cert = Certificate::Decode(req.certificate);
  } catch (const Error&) {
    return reject(AccessOutcome::kCertMismatch);
  }
  if (cert.Hash() != bd.cert_hash) return reject(AccessOutcome::kCertMismatch);
  if (!fresh_challenge || !cert.key.Verify(ChallengeMessage(req.challenge, vehicle_id_), req.challenge_signature)) {
    return reject(AccessOutcome::kChallengeFailed);
  }
  revisions_[bd.booking_id] = std::max(seen.value_or(0), bd.conditions.revision());
  if (bd.conditions.revoked()) return reject(AccessOutcome::kRevocationRecorded);
  uint64_t now = clock_();
  if (now < bd.conditions.start) return reject(AccessOutcome::kNotYetValid);
  if (now >= bd.conditions.end) return reject(AccessOutcome::kExpired);
  const uint8_t action = req.action;
  if (action == 0 || (action & (action - 1)) != 0 || (action & ~bd.access_rights) != 0) {
    return reject(AccessOutcome::kActionDenied);
  }
  d.outcome = AccessOutcome::kGranted;
  d.confirmation = AccessConfirm{bd.booking_id, now, vehicle_key_.Sign(AccessConfirmation::SignedBytes(bd, now))};
  return d;
}

// ---- reference ----

OracleOutput ClearOracle(const FieldParams& field, const OracleInput& in) {
  OracleOutput out;
  out.token.backend = in.backend;
  out.token.nonce = in.nonce;
  ConsumerCipher c;
  c.backend = in.backend;
  if (in.backend == Backend::kMimc) {
    const Mimc& mimc = Mimc::For(field);
    FieldElement key = FieldElement::Zero(field);
    for (const auto& [id, k] : in.vehicles) {
      if (id == in.vehicle_id) key += BlockToField(field, k);
    }
    TaggedCiphertext at = CtrEncrypt(mimc, key, FieldElement(field, in.nonce), in.booking.ToField(field));
    out.token.field_blocks = at.blocks;
    std::vector<FieldElement> x = at.blocks;
    x.push_back(TrailerValue(field, in.vehicle_id, in.nonce));
    c.mimc = CtrEncrypt(mimc, in.keys.enc, FieldElement::One(field), x);
  } else {
    Block128 key{};
    for (const auto& [id, k] : in.vehicles) {
      if (id == in.vehicle_id) key = XorBlocks(key, k);
    }
    out.token.aes_blocks = AesCtr(key, in.nonce, in.booking.Blocks());
    std::vector<Block128> x = out.token.aes_blocks;
    x.push_back(TrailerBlock(in.vehicle_id, in.nonce));
    c.aes_blocks = AesCtr(LowBlock(in.keys.enc), 1, x);
  }
  out.published.cipher = c.Encode();
  out.published.tag = ExpectedTag(field, in.backend, in.keys, in.booking.bd);
  return out;
}

// ---- audit ----

AuditResult AuditReconstruct(const std::vector<AuditRecord>& records, const SessionId& session,
                             const VerifyKey& owner_key) {
  std::set<int> parties;
  for (const auto& r : records) {
    if (r.session != session) {
      throw Error(ErrorCode::kRefused, "record of session " + SessionIdHex(r.session) + " does not belong to " +
                                           SessionIdHex(session));
    }
    if (r.backend != records[0].backend) throw Error(ErrorCode::kRefused, "records disagree on the backend");
    parties.insert(r.party);
  }
  if (parties.size() < 2) {
    throw Error(ErrorCode::kRefused, "audit needs records from at least two servers, got " +
                                         std::to_string(parties.size()));
  }
  AuditResult out;
  if (records[0].backend == Backend::kMimc) {
    std::vector<std::vector<RepShare>> per_party;
    for (const auto& r : records) per_party.push_back(r.m);
    out.booking = SignedBooking::FromField(ReconstructVector(per_party));
  } else {
    std::vector<BitShares> bits;
    for (const auto& r : records) bits.push_back(r.m_bits);
    BitVector m = ReconstructBits(bits);
    std::vector<Block128> blocks;
    for (size_t j = 0; j < m.size() / 128; ++j) blocks.push_back(BitsBlock(m, 128 * j));
    out.booking = SignedBooking::FromBlocks(blocks);
  }
  out.signature_valid = out.booking.Verify(owner_key);
  return out;
}

}  // namespace vsa
