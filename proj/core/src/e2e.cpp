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

#include "vsa/e2e.hpp"

#include <exception>
#include <thread>

#include "json.hpp"
#include "vsa/error.hpp"
#include "vsa/ledger_service.hpp"
#include "vsa/server.hpp"

namespace vsa {
namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

uint64_t UnixSeconds() {
  return static_cast<uint64_t>(
      std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch()).count());
}

std::array<uint8_t, 32> Seed32(Prg& prg) {
  std::array<uint8_t, 32> out{};
  prg.Fill(out);
  return out;
}

void FlipBit(Bytes& b, uint64_t r) {
  if (b.empty()) return;
  b[(r >> 3) % b.size()] ^= static_cast<uint8_t>(1u << (r & 7));
}

// A step failure carrying the step name.
struct StepError {
  std::string step;
  std::string what;
};

}  // namespace

std::string_view TamperName(Tamper t) {
  switch (t) {
    case Tamper::kNone:
      return "none";
    case Tamper::kLedgerCipher:
      return "ledger-c";
    case Tamper::kLedgerTag:
      return "ledger-tag";
    case Tamper::kToken:
      return "token";
    case Tamper::kCertificate:
      return "cert";
  }
  return "?";
}

Tamper ParseTamper(std::string_view name) {
  for (Tamper t : {Tamper::kNone, Tamper::kLedgerCipher, Tamper::kLedgerTag, Tamper::kToken, Tamper::kCertificate}) {
    if (TamperName(t) == name) return t;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown tamper target '" + std::string(name) + "'");
}

std::string E2eReport::ToJson() const {
  json j;
  j["ok"] = ok();
  j["granted"] = granted;
  j["confirmation_verified"] = confirmation_verified;
  j["failed_step"] = failed_step;
  j["error"] = error;
  j["outcome"] = outcome ? std::string(AccessOutcomeName(*outcome)) : "";
  if (revocation_outcome) j["revocation_outcome"] = std::string(AccessOutcomeName(*revocation_outcome));
  j["owner_id"] = owner_id;
  j["vehicle_id"] = vehicle_id;
  j["booking_id"] = booking_id;
  j["session_id"] = SessionIdHex(session);
  j["ts_pub"] = ts_pub;
  j["step2_attempts"] = step2_attempts;
  json steps = json::object();
  for (const auto& [name, ms] : step_ms) steps[name] = ms;
  j["step_ms"] = steps;
  return j.dump(2);
}

struct E2eFlow::State {
  Endpoints endpoints;
  E2eOptions options;
  const FieldParams* field = &FieldParams::Production();
  Prg prg = Prg::FromSeed(1);

  uint64_t owner_id = 0;
  std::vector<std::pair<uint32_t, Block128>> vehicles;
  SigningKey owner_key;
  SigningKey consumer_key;
  SigningKey vehicle_key;
  std::string subject;
  std::optional<Consumer> consumer;
  std::optional<VehicleObu> obu;
  std::array<KemPublicKey, 3> kem;
  BookingDetails bd;
  SesKGenAck ack;
  LedgerEntry entry;
  TokenDelivery delivery;
  bool delivered = false;

  std::array<ServerClient, 3> Servers() const {
    return {ServerClient(endpoints.servers[0], options.timeout), ServerClient(endpoints.servers[1], options.timeout),
            ServerClient(endpoints.servers[2], options.timeout)};
  }

  void Register();
  void Agree();
  SesKGenAck SessionKeys(Consumer& c, const BookingDetails& b);
  std::pair<SessionId, uint64_t> Generate(const BookingDetails& b, const SesKGenAck& a, int attempts,
                                          int* used);
  LedgerEntry Fetch(const Consumer& c, const BookingDetails& b);
  AccessDecision Present(const Consumer& c, const TokenDelivery& d, uint32_t booking_id, Tamper tamper, uint64_t r);
};

E2eFlow::E2eFlow(Endpoints endpoints, E2eOptions options) : s_(std::make_unique<State>()) {
  s_->endpoints = std::move(endpoints);
  s_->options = options;
  if (options.vehicles == 0 || options.target >= options.vehicles) {
    throw Error(ErrorCode::kInvalidArgument, "the booked vehicle must be one of the registered ones");
  }
  s_->prg = Prg::FromSeed(options.seed, "vsa-e2e");
  s_->owner_id = 1 + s_->prg.NextU64() % (uint64_t{1} << 40);
}

E2eFlow::~E2eFlow() = default;

const BookingDetails& E2eFlow::booking() const { return s_->bd; }

VerifyKey E2eFlow::owner_public_key() const { return s_->owner_key.Public(); }

std::vector<Bytes> E2eFlow::Sentinels() const {
  const State& s = *s_;
  std::vector<Bytes> out;
  auto packed = s.bd.Pack();
  out.emplace_back(packed.begin(), packed.end());
  out.emplace_back(s.bd.cert_hash.begin(), s.bd.cert_hash.end());
  out.push_back(SignedBooking::Sign(s.bd, s.owner_key).signature);
  const SessionKeys& keys = s.consumer->session(s.bd.booking_id).keys;
  for (const FieldElement* k : {&keys.enc, &keys.tag_enc, &keys.tag_mac}) {
    Block128 low = LowBlock(*k);
    out.emplace_back(low.begin(), low.end());
    out.push_back(k->Encode());
  }
  for (const auto& [id, key] : s.vehicles) out.emplace_back(key.begin(), key.end());
  return out;
}

void E2eFlow::State::Register() {
  VehicleManufacturer vm;
  const uint32_t base = static_cast<uint32_t>(prg.NextU64() % 1'000'000'000u) + 1;
  std::array<std::vector<VehicleRow>, 3> rows;
  for (size_t i = 0; i < options.vehicles; ++i) {
    VehicleRecord rec{owner_id, base + static_cast<uint32_t>(17 * i), prg.NextKey()};
    vm.AddVehicle(rec);
    vehicles.emplace_back(rec.vehicle_id, rec.key);
    auto r = vm.Register(*field, owner_id, rec.vehicle_id, prg);
    for (int p = 0; p < 3; ++p) rows[p].push_back(std::move(r[p]));
  }
  auto servers = Servers();
  for (int p = 0; p < 3; ++p) {
    try {
      servers[p].Register(rows[p]);
    } catch (const Error& e) {
      // The same seed registers the same vehicles again; that is fine.
      if (e.code() != ErrorCode::kDuplicate || servers[p].Indices(owner_id).size() != options.vehicles) throw;
    }
  }
}

void E2eFlow::State::Agree() {
  owner_key = options.owner_scheme == SignatureScheme::kEd25519 ? SigningKey::Ed25519FromSeed(Seed32(prg))
                                                                 : SigningKey::Generate(options.owner_scheme);
  consumer_key = SigningKey::Ed25519FromSeed(Seed32(prg));
  vehicle_key = SigningKey::Ed25519FromSeed(Seed32(prg));
  subject = "consumer-" + std::to_string(options.seed);
  consumer.emplace(*field, prg.NextField(*field), consumer_key, subject);
  const auto& [vid, vkey] = vehicles[options.target];
  obu.emplace(*field, vid, vkey, owner_key.Public(), vehicle_key, [] { return UnixSeconds(); });

  const uint64_t now = UnixSeconds();
  bd = BookingDetails{};
  bd.cert_hash = consumer->certificate().Hash();
  bd.vehicle_id = vid;
  bd.location = prg.NextU64();
  bd.conditions = Conditions{static_cast<uint32_t>(now - 60), static_cast<uint32_t>(now + 86400), 0};
  bd.access_rights = kRightUnlock | kRightLock;
  bd.booking_id = static_cast<uint32_t>(prg.NextU64() % 0x7FFFFFFFu) + 1;
  bd.Validate();
}

SesKGenAck E2eFlow::State::SessionKeys(Consumer& c, const BookingDetails& b) {
  auto servers = Servers();
  for (int p = 0; p < 3; ++p) kem[p] = servers[p].KemKey(p);
  Prg secure = Prg::Secure();
  // Owner -> consumer and back, as JSON on the wire.
  auto req = ParseMessageAs<SesKGenReq>(ToJson(SesKGenReq{b.booking_id, options.backend}));
  return ParseMessageAs<SesKGenAck>(ToJson(c.Step1(req, kem, secure)));
}

std::pair<SessionId, uint64_t> E2eFlow::State::Generate(const BookingDetails& b, const SesKGenAck& a,
                                                        int attempts, int* used) {
  Owner owner(owner_id, owner_key);
  auto servers = Servers();
  std::string last;
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    *used = attempt;
    SessionId session = RandomSessionId();
    Prg secure = Prg::Secure();
    auto reqs = owner.Step1(*field, b, options.backend, a, kem, session, secure);
    std::array<std::optional<AtPubAck>, 3> acks;
    std::array<std::string, 3> errors;
    std::array<std::thread, 3> threads;
    for (int p = 0; p < 3; ++p) {
      threads[p] = std::thread([&, p] {
        try {
          acks[p] = servers[p].GenerateToken(reqs[p]);
        } catch (const std::exception& e) {
          errors[p] = e.what();
        }
      });
    }
    for (auto& t : threads) t.join();
    if (acks[0] && acks[1] && acks[2]) {
      if (acks[0]->ts != acks[1]->ts || acks[1]->ts != acks[2]->ts) {
        throw Error(ErrorCode::kProtocolDesync, "servers report different ledger timestamps");
      }
      return {session, acks[0]->ts};
    }
    last.clear();
    for (int p = 0; p < 3; ++p) {
      if (!errors[p].empty()) last += (last.empty() ? "" : "; ") + ("server " + std::to_string(p) + ": " + errors[p]);
    }
  }
  throw Error(ErrorCode::kSessionAbort, last);
}

LedgerEntry E2eFlow::State::Fetch(const Consumer& c, const BookingDetails& b) {
  LedgerClient ledger(endpoints.ledger_url, options.timeout);
  auto e = ledger.ByTag(c.ExpectedTagFor(b));
  if (!e) throw Error(ErrorCode::kNotFound, "no ledger entry carries the expected tag");
  return *e;
}

AccessDecision E2eFlow::State::Present(const Consumer& c, const TokenDelivery& d, uint32_t booking_id, Tamper tamper,
                                       uint64_t r) {
  auto challenge = ParseMessageAs<AccessChallenge>(ToJson(obu->Challenge(booking_id)));
  AccessReq req = c.RequestAccess(d, booking_id, kRightUnlock, challenge);
  if (tamper == Tamper::kToken) FlipBit(req.token, r);
  if (tamper == Tamper::kCertificate) FlipBit(req.certificate, r);
  return obu->Decide(ParseMessageAs<AccessReq>(ToJson(req)));
}

E2eReport E2eFlow::Run() {
  State& s = *s_;
  E2eReport rep;
  rep.owner_id = s.owner_id;
  auto t = Clock::now();
  auto lap = [&](const char* name) {
    auto now = Clock::now();
    rep.step_ms.emplace_back(name, std::chrono::duration<double, std::milli>(now - t).count());
    t = now;
  };
  const char* step = "A";
  try {
    s.Register();
    lap("A");
    step = "B";
    s.Agree();
    rep.vehicle_id = s.bd.vehicle_id;
    rep.booking_id = s.bd.booking_id;
    lap("B");
    step = "1";
    s.ack = s.SessionKeys(*s.consumer, s.bd);
    lap("1");
    step = "2";
    auto [session, ts] = s.Generate(s.bd, s.ack, s.options.step2_attempts, &rep.step2_attempts);
    rep.session = session;
    rep.ts_pub = ts;
    lap("2");
    step = "3";
    s.entry = s.Fetch(*s.consumer, s.bd);
    LedgerEntry seen = s.entry;
    Prg tprg = Prg::FromSeed(s.options.seed, "vsa-e2e-tamper");
    if (s.options.tamper == Tamper::kLedgerCipher) FlipBit(seen.cipher, tprg.NextU64());
    if (s.options.tamper == Tamper::kLedgerTag) FlipBit(seen.tag, tprg.NextU64());
    s.delivery = s.consumer->Step3(s.bd, seen.cipher, seen.tag);
    s.delivered = s.options.tamper == Tamper::kNone;
    lap("3");

    if (s.options.revoke_after_publish) {
      step = "revoke";
      // The owner revokes without the consumer: it derives the session
      // keys itself and names its own certificate.
      SigningKey owner_cert_key = SigningKey::Ed25519FromSeed(Seed32(s.prg));
      Consumer owner_side(*s.field, s.prg.NextField(*s.field), owner_cert_key, "owner-" + std::to_string(s.owner_id));
      BookingDetails revoked = Owner::NextRevision(s.bd, std::nullopt, owner_side.certificate().Hash());
      SesKGenAck rack = s.SessionKeys(owner_side, revoked);
      int used = 0;
      s.Generate(revoked, rack, s.options.step2_attempts, &used);
      LedgerEntry re = s.Fetch(owner_side, revoked);
      TokenDelivery rd = owner_side.Step3(revoked, re.cipher, re.tag);
      rep.revocation_outcome = s.Present(owner_side, rd, revoked.booking_id, Tamper::kNone, 0).outcome;
      lap("revoke");
    }

    step = "4";
    AccessDecision dec = s.Present(*s.consumer, s.delivery, s.bd.booking_id, s.options.tamper, tprg.NextU64());
    rep.outcome = dec.outcome;
    rep.granted = dec.granted();
    if (dec.confirmation) {
      // Vehicle -> owner; the owner checks the vehicle's signature.
      auto m = ParseMessageAs<AccessConfirm>(ToJson(*dec.confirmation));
      AccessConfirmation conf{m.booking_id, m.ts_access, m.signature};
      rep.confirmation_verified = conf.Verify(s.vehicle_key.Public(), s.bd);
    }
    lap("4");
    if (!rep.ok()) {
      rep.failed_step = "4";
      rep.error = std::string("vehicle decision: ") + std::string(AccessOutcomeName(dec.outcome));
      if (rep.granted && !rep.confirmation_verified) rep.error = "access confirmation did not verify";
    }
  } catch (const std::exception& e) {
    rep.failed_step = step;
    rep.error = e.what();
  }
  return rep;
}

MutationTally E2eFlow::Mutate(size_t trials, uint64_t seed) {
  State& s = *s_;
  if (!s.delivered) throw Error(ErrorCode::kInvalidArgument, "mutation needs a completed honest run");
  static constexpr Tamper kTargets[] = {Tamper::kLedgerCipher, Tamper::kLedgerTag, Tamper::kToken,
                                        Tamper::kCertificate};
  Prg prg = Prg::FromSeed(seed, "vsa-e2e-mutation");
  MutationTally tally;
  for (size_t i = 0; i < trials; ++i) {
    if (i % 100 == 0) {
      ++tally.controls;
      if (s.Present(*s.consumer, s.delivery, s.bd.booking_id, Tamper::kNone, 0).granted()) ++tally.control_grants;
    }
    Tamper target = kTargets[i % 4];
    const std::string name(TamperName(target));
    ++tally.trials;
    ++tally.trials_by_target[name];
    uint64_t r = prg.NextU64();
    bool granted = false;
    if (target == Tamper::kLedgerCipher || target == Tamper::kLedgerTag) {
      LedgerEntry e = s.entry;
      FlipBit(target == Tamper::kLedgerCipher ? e.cipher : e.tag, r);
      try {
        TokenDelivery d = s.consumer->Step3(s.bd, e.cipher, e.tag);
        granted = s.Present(*s.consumer, d, s.bd.booking_id, Tamper::kNone, 0).granted();
      } catch (const Error&) {
        // Rejected before reaching the vehicle.
      }
    } else {
      granted = s.Present(*s.consumer, s.delivery, s.bd.booking_id, target, r).granted();
    }
    if (granted) {
      ++tally.grants;
      ++tally.grants_by_target[name];
    }
  }
  return tally;
}

}  // namespace vsa
