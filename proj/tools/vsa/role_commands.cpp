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

// Role runners. Each role keeps its state in a directory; messages travel
// as JSON files (or stdin/stdout) so the roles can run as separate
// processes, on separate machines.

#include <iostream>
#include <memory>
#include <thread>

#include "commands.hpp"
#include "common.hpp"
#include "vsa/ledger_service.hpp"
#include "vsa/messages.hpp"
#include "vsa/roles.hpp"
#include "vsa/server.hpp"

namespace vsa::cli {
namespace {

namespace fs = std::filesystem;

const FieldParams& Field() { return FieldParams::Production(); }

std::string KeyHex(const VerifyKey& k) { return ToHex(k.Encode()); }
VerifyKey KeyFromFile(const fs::path& path) { return VerifyKey::Decode(FromHex(ReadTrimmed(path))); }

std::array<KemPublicKey, 3> FetchKemKeys(const std::array<std::string, 3>& urls) {
  std::array<KemPublicKey, 3> out;
  for (int p = 0; p < 3; ++p) out[p] = ServerClient(urls[p]).KemKey(p);
  return out;
}

// ---- owner ----

struct OwnerState {
  uint64_t id = 0;
  SigningKey key;

  static OwnerState Load(const fs::path& dir) {
    json j = ReadJson(dir / "owner.json");
    return {j.at("owner_id").get<uint64_t>(), SigningKey::Decode(FromBase64(j.at("signing_key").get<std::string>()))};
  }
};

void AddOwner(CLI::App& app) {
  auto* owner = app.add_subcommand("owner", "Vehicle owner: bookings, token generation, confirmations");
  owner->require_subcommand(1);
  auto dir = std::make_shared<std::string>();
  owner->add_option("--dir", *dir, "Owner state directory")->required();

  {
    auto* cmd = owner->add_subcommand("init", "Create the owner's signing key");
    auto id = std::make_shared<uint64_t>(0);
    auto scheme = std::make_shared<std::string>("ed25519");
    cmd->add_option("--owner-id", *id, "Owner id")->required();
    cmd->add_option("--scheme", *scheme, "ed25519 or rsa2048")->capture_default_str();
    cmd->callback([=] {
      if (fs::exists(fs::path(*dir) / "owner.json")) throw Error(ErrorCode::kDuplicate, "owner already initialized");
      SigningKey key = SigningKey::Generate(ParseSignatureScheme(*scheme));
      WriteFile(fs::path(*dir) / "owner.json",
                json{{"owner_id", *id}, {"signing_key", ToBase64(key.Encode())}}.dump(2), true);
      WriteFile(fs::path(*dir) / "owner.pub", KeyHex(key.Public()) + "\n");
      WriteOutput("", json{{"owner_id", *id}, {"public_key", KeyHex(key.Public())}}.dump());
    });
  }
  {
    auto* cmd = owner->add_subcommand("book", "Agree a booking; prints SES_K_GEN_REQ for the consumer");
    struct Opts {
      std::string cert, out, req_out, backend = "mimc";
      uint32_t vehicle_id = 0, booking_id = 0, start = 0, end = 0;
      uint64_t location = 0;
      unsigned rights = kRightUnlock | kRightLock;
    };
    auto o = std::make_shared<Opts>();
    cmd->add_option("--cert", o->cert, "Consumer certificate file (base64)")->required();
    cmd->add_option("--vehicle-id", o->vehicle_id, "Vehicle id")->required();
    cmd->add_option("--booking-id", o->booking_id, "Booking id")->required();
    cmd->add_option("--start", o->start, "Window start, epoch seconds (default now)");
    cmd->add_option("--end", o->end, "Window end, epoch seconds (default start + 1 day)");
    cmd->add_option("--location", o->location, "Pick-up location code");
    cmd->add_option("--rights", o->rights, "Access rights bitmask")->capture_default_str();
    cmd->add_option("--backend", o->backend, "mimc or aes")->capture_default_str();
    cmd->add_option("--out", o->out, "Booking file to write")->required();
    cmd->add_option("--req-out", o->req_out, "Where to write SES_K_GEN_REQ (default stdout)");
    cmd->callback([=] {
      Certificate cert = Certificate::Decode(FromBase64(ReadTrimmed(o->cert)));
      BookingDetails bd;
      bd.cert_hash = cert.Hash();
      bd.vehicle_id = o->vehicle_id;
      bd.location = o->location;
      uint32_t start = o->start != 0 ? o->start : static_cast<uint32_t>(UnixSeconds());
      bd.conditions = Conditions{start, o->end != 0 ? o->end : start + 86400, 0};
      bd.access_rights = static_cast<uint8_t>(o->rights);
      bd.booking_id = o->booking_id;
      bd.Validate();
      json j = BookingToJson(bd);
      j["backend"] = BackendName(ParseBackend(o->backend));
      WriteFile(o->out, j.dump(2) + "\n");
      WriteOutput(o->req_out, ToJson(SesKGenReq{bd.booking_id, ParseBackend(o->backend)}));
    });
  }
  {
    auto* cmd = owner->add_subcommand("generate", "Send AT_GEN_REQ to the three servers (Step 2)");
    struct Opts {
      std::string booking, ack, servers, out;
      int attempts = 1;
    };
    auto o = std::make_shared<Opts>();
    cmd->add_option("--booking", o->booking, "Booking file")->required();
    cmd->add_option("--ack", o->ack, "SES_K_GEN_ACK from the consumer ('-' for stdin)")->required();
    cmd->add_option("--servers", o->servers, "Comma-separated server URLs")->required();
    cmd->add_option("--attempts", o->attempts, "Tries, each under a fresh session id")->capture_default_str();
    cmd->add_option("--out", o->out, "Where to write AT_PUB_ACK (default stdout)");
    cmd->callback([=] {
      OwnerState st = OwnerState::Load(*dir);
      json bj = ReadJson(o->booking);
      BookingDetails bd = BookingFromJson(bj);
      Backend backend = ParseBackend(bj.value("backend", "mimc"));
      auto ack = ParseMessageAs<SesKGenAck>(ReadInput(o->ack));
      auto urls = ThreeUrls(o->servers);
      auto kem = FetchKemKeys(urls);
      Owner owner(st.id, st.key);
      std::string last;
      for (int attempt = 1; attempt <= o->attempts; ++attempt) {
        Prg prg = Prg::Secure();
        auto reqs = owner.Step1(Field(), bd, backend, ack, kem, RandomSessionId(), prg);
        std::array<std::optional<AtPubAck>, 3> acks;
        std::array<std::string, 3> errors;
        std::array<std::thread, 3> threads;
        for (int p = 0; p < 3; ++p) {
          threads[p] = std::thread([&, p] {
            try {
              acks[p] = ServerClient(urls[p]).GenerateToken(reqs[p]);
            } catch (const std::exception& e) {
              errors[p] = e.what();
            }
          });
        }
        for (auto& t : threads) t.join();
        if (acks[0] && acks[1] && acks[2]) {
          WriteOutput(o->out, ToJson(*acks[0]));
          return;
        }
        last.clear();
        for (int p = 0; p < 3; ++p) {
          if (!errors[p].empty()) last += "server " + std::to_string(p) + ": " + errors[p] + "\n";
        }
        std::cerr << "attempt " << attempt << " failed:\n" << last;
      }
      throw Error(ErrorCode::kSessionAbort, "token generation failed");
    });
  }
  {
    auto* cmd = owner->add_subcommand("revise", "Next revision of a booking: a new window, or a revocation");
    struct Opts {
      std::string booking, cert, out;
      uint32_t start = 0, end = 0;
    };
    auto o = std::make_shared<Opts>();
    cmd->add_option("--booking", o->booking, "Current booking file")->required();
    cmd->add_option("--cert", o->cert, "Certificate of whoever will present the new token")->required();
    cmd->add_option("--start", o->start, "New window start (omit both to revoke)");
    cmd->add_option("--end", o->end, "New window end");
    cmd->add_option("--out", o->out, "Booking file to write")->required();
    cmd->callback([=] {
      json bj = ReadJson(o->booking);
      BookingDetails bd = BookingFromJson(bj);
      Certificate cert = Certificate::Decode(FromBase64(ReadTrimmed(o->cert)));
      std::optional<std::pair<uint32_t, uint32_t>> window;
      if (o->start != 0 || o->end != 0) window = std::make_pair(o->start, o->end);
      BookingDetails next = Owner::NextRevision(bd, window, cert.Hash());
      json j = BookingToJson(next);
      j["backend"] = bj.value("backend", "mimc");
      WriteFile(o->out, j.dump(2) + "\n");
      WriteOutput("", ToJson(SesKGenReq{next.booking_id, ParseBackend(j["backend"].get<std::string>())}));
    });
  }
  {
    auto* cmd = owner->add_subcommand("verify", "Check the vehicle's ACCESS_CONFIRM");
    struct Opts {
      std::string booking, confirm, vehicle_pub;
    };
    auto o = std::make_shared<Opts>();
    cmd->add_option("--booking", o->booking, "Booking file")->required();
    cmd->add_option("--confirm", o->confirm, "ACCESS_CONFIRM ('-' for stdin)")->required();
    cmd->add_option("--vehicle-pub", o->vehicle_pub, "Vehicle public key file")->required();
    cmd->callback([=] {
      BookingDetails bd = BookingFromJson(ReadJson(o->booking));
      auto m = ParseMessageAs<AccessConfirm>(ReadInput(o->confirm));
      AccessConfirmation conf{m.booking_id, m.ts_access, m.signature};
      bool ok = conf.Verify(KeyFromFile(o->vehicle_pub), bd);
      WriteOutput("", json{{"confirmation_verified", ok}, {"ts_access", m.ts_access}}.dump());
      if (!ok) throw ExitStatus{kExitDenied};
    });
  }
}

// ---- consumer ----

class ConsumerState {
 public:
  explicit ConsumerState(const fs::path& dir)
      : dir_(dir), watermark_(dir / "kdf.watermark"), sessions_(json::object()) {
    json j = ReadJson(dir / "consumer.json");
    consumer_.emplace(Field(), FieldElement::Decode(Field(), FromHex(j.at("master").get<std::string>())),
                      SigningKey::Decode(FromBase64(j.at("signing_key").get<std::string>())),
                      j.at("subject").get<std::string>(), &watermark_);
    if (fs::exists(dir / "sessions.json")) sessions_ = ReadJson(dir / "sessions.json");
  }

  Consumer& consumer() { return *consumer_; }

  void Remember(const ConsumerSession& s) {
    sessions_[std::to_string(s.booking_id)] = {{"backend", BackendName(s.backend)}, {"counter", s.keys.counter}};
    WriteFile(dir_ / "sessions.json", sessions_.dump(2));
  }

  void Resume(uint32_t booking_id) {
    auto it = sessions_.find(std::to_string(booking_id));
    if (it == sessions_.end()) throw Error(ErrorCode::kNotFound, "no session keys for booking " + std::to_string(booking_id));
    consumer_->Resume(booking_id, ParseBackend((*it)["backend"].get<std::string>()), (*it)["counter"].get<uint64_t>());
  }

 private:
  fs::path dir_;
  KdfWatermark watermark_;
  json sessions_;
  std::optional<Consumer> consumer_;
};

void AddConsumer(CLI::App& app) {
  auto* consumer = app.add_subcommand("consumer", "Consumer: session keys, ledger retrieval, access requests");
  consumer->require_subcommand(1);
  auto dir = std::make_shared<std::string>();
  consumer->add_option("--dir", *dir, "Consumer state directory")->required();

  {
    auto* cmd = consumer->add_subcommand("init", "Create master key and certificate");
    auto subject = std::make_shared<std::string>();
    cmd->add_option("--subject", *subject, "Certificate subject")->required();
    cmd->callback([=] {
      if (fs::exists(fs::path(*dir) / "consumer.json")) {
        throw Error(ErrorCode::kDuplicate, "consumer already initialized");
      }
      Prg prg = Prg::Secure();
      SigningKey key = SigningKey::Generate(SignatureScheme::kEd25519);
      WriteFile(fs::path(*dir) / "consumer.json",
                json{{"subject", *subject},
                     {"master", ToHex(prg.NextField(Field()).Encode())},
                     {"signing_key", ToBase64(key.Encode())}}
                    .dump(2),
                true);
      Certificate cert{*subject, key.Public()};
      WriteFile(fs::path(*dir) / "cert.b64", ToBase64(cert.Encode()) + "\n");
      WriteOutput("", json{{"certificate", (fs::path(*dir) / "cert.b64").string()}}.dump());
    });
  }
  {
    auto* cmd = consumer->add_subcommand("keys", "Answer SES_K_GEN_REQ with sealed session-key shares (Step 1)");
    struct Opts {
      std::string req, servers, out;
    };
    auto o = std::make_shared<Opts>();
    cmd->add_option("--req", o->req, "SES_K_GEN_REQ ('-' for stdin)")->required();
    cmd->add_option("--servers", o->servers, "Comma-separated server URLs (for their public keys)")->required();
    cmd->add_option("--out", o->out, "Where to write SES_K_GEN_ACK (default stdout)");
    cmd->callback([=] {
      ConsumerState st(*dir);
      auto req = ParseMessageAs<SesKGenReq>(ReadInput(o->req));
      Prg prg = Prg::Secure();
      SesKGenAck ack = st.consumer().Step1(req, FetchKemKeys(ThreeUrls(o->servers)), prg);
      st.Remember(st.consumer().session(req.booking_id));
      WriteOutput(o->out, ToJson(ack));
    });
  }
  {
    auto* cmd = consumer->add_subcommand("fetch", "Find and open the token on the ledger (Step 3)");
    struct Opts {
      std::string booking, ledger, out;
    };
    auto o = std::make_shared<Opts>();
    cmd->add_option("--booking", o->booking, "Booking file")->required();
    cmd->add_option("--ledger", o->ledger, "Ledger URL")->required();
    cmd->add_option("--out", o->out, "Token file to write")->required();
    cmd->callback([=] {
      ConsumerState st(*dir);
      BookingDetails bd = BookingFromJson(ReadJson(o->booking));
      st.Resume(bd.booking_id);
      auto entry = LedgerClient(o->ledger).ByTag(st.consumer().ExpectedTagFor(bd));
      if (!entry) throw Error(ErrorCode::kNotFound, "no ledger entry carries the expected tag");
      TokenDelivery d = st.consumer().Step3(bd, entry->cipher, entry->tag);
      WriteFile(o->out,
                json{{"booking_id", bd.booking_id},
                     {"vehicle_id", d.vehicle_id},
                     {"ts", entry->ts},
                     {"token", ToBase64(d.token.Encode())}}
                    .dump(2),
                true);
      WriteOutput("", json{{"ts", entry->ts}, {"vehicle_id", d.vehicle_id}}.dump());
    });
  }
  {
    auto* cmd = consumer->add_subcommand("access", "Answer the vehicle's challenge (Step 4)");
    struct Opts {
      std::string token, challenge, out;
      unsigned action = kRightUnlock;
    };
    auto o = std::make_shared<Opts>();
    cmd->add_option("--token", o->token, "Token file from fetch")->required();
    cmd->add_option("--challenge", o->challenge, "ACCESS_CHALLENGE ('-' for stdin)")->required();
    cmd->add_option("--action", o->action, "Requested right")->capture_default_str();
    cmd->add_option("--out", o->out, "Where to write ACCESS_REQ (default stdout)");
    cmd->callback([=] {
      ConsumerState st(*dir);
      json t = ReadJson(o->token);
      TokenDelivery d{AccessToken::Decode(Field(), FromBase64(t.at("token").get<std::string>())),
                      t.at("vehicle_id").get<uint32_t>()};
      auto challenge = ParseMessageAs<AccessChallenge>(ReadInput(o->challenge));
      AccessReq req = st.consumer().RequestAccess(d, t.at("booking_id").get<uint32_t>(),
                                                  static_cast<uint8_t>(o->action), challenge);
      WriteOutput(o->out, ToJson(req));
    });
  }
}

// ---- vehicle ----

class VehicleState {
 public:
  explicit VehicleState(const fs::path& dir) : path_(dir / "vehicle.json"), state_(ReadJson(path_)) {
    Block128 key{};
    Bytes raw = FromHex(state_.at("key").get<std::string>());
    if (raw.size() != key.size()) throw Error(ErrorCode::kParse, "vehicle key must be 16 bytes");
    std::copy(raw.begin(), raw.end(), key.begin());
    obu_.emplace(Field(), state_.at("vehicle_id").get<uint32_t>(), key,
                 VerifyKey::Decode(FromHex(state_.at("owner_pub").get<std::string>())),
                 SigningKey::Decode(FromBase64(state_.at("signing_key").get<std::string>())),
                 [] { return UnixSeconds(); });
    VehicleObu::Memory m;
    for (const auto& c : state_.value("challenges", json::array())) {
      Bytes b = FromHex(c.get<std::string>());
      Block128 block{};
      std::copy(b.begin(), b.end(), block.begin());
      m.challenges.insert(block);
    }
    for (const auto& [k, v] : state_.value("revisions", json::object()).items()) {
      m.revisions[static_cast<uint32_t>(std::stoul(k))] = v.get<uint32_t>();
    }
    obu_->Restore(std::move(m));
  }

  VehicleObu& obu() { return *obu_; }

  void Save() {
    VehicleObu::Memory m = obu_->memory();
    json challenges = json::array();
    for (const auto& c : m.challenges) challenges.push_back(ToHex(c));
    json revisions = json::object();
    for (const auto& [k, v] : m.revisions) revisions[std::to_string(k)] = v;
    state_["challenges"] = challenges;
    state_["revisions"] = revisions;
    WriteFile(path_, state_.dump(2), true);
  }

 private:
  fs::path path_;
  json state_;
  std::optional<VehicleObu> obu_;
};

void AddVehicle(CLI::App& app) {
  auto* vehicle = app.add_subcommand("vehicle", "On-board unit: challenges and access decisions");
  vehicle->require_subcommand(1);
  auto dir = std::make_shared<std::string>();
  vehicle->add_option("--dir", *dir, "Vehicle state directory")->required();

  {
    auto* cmd = vehicle->add_subcommand("init", "Provision the unit from the manufacturer database");
    struct Opts {
      std::string vm, owner_pub;
      uint64_t owner_id = 0;
      uint32_t vehicle_id = 0;
    };
    auto o = std::make_shared<Opts>();
    cmd->add_option("--vm", o->vm, "Manufacturer database")->required();
    cmd->add_option("--owner-id", o->owner_id, "Owner id")->required();
    cmd->add_option("--vehicle-id", o->vehicle_id, "Vehicle id")->required();
    cmd->add_option("--owner-pub", o->owner_pub, "Owner public key file")->required();
    cmd->callback([=] {
      VehicleManufacturer vm = VehicleManufacturer::Load(o->vm);
      const VehicleRecord& rec = vm.Find(o->owner_id, o->vehicle_id);
      SigningKey key = SigningKey::Generate(SignatureScheme::kEd25519);
      WriteFile(fs::path(*dir) / "vehicle.json",
                json{{"vehicle_id", rec.vehicle_id},
                     {"key", ToHex(rec.key)},
                     {"owner_pub", KeyHex(KeyFromFile(o->owner_pub))},
                     {"signing_key", ToBase64(key.Encode())},
                     {"challenges", json::array()},
                     {"revisions", json::object()}}
                    .dump(2),
                true);
      WriteFile(fs::path(*dir) / "vehicle.pub", KeyHex(key.Public()) + "\n");
      WriteOutput("", json{{"vehicle_id", rec.vehicle_id}, {"public_key", KeyHex(key.Public())}}.dump());
    });
  }
  {
    auto* cmd = vehicle->add_subcommand("challenge", "Issue a fresh single-use challenge");
    auto booking_id = std::make_shared<uint32_t>(0);
    auto out = std::make_shared<std::string>();
    cmd->add_option("--booking-id", *booking_id, "Booking id")->required();
    cmd->add_option("--out", *out, "Where to write ACCESS_CHALLENGE (default stdout)");
    cmd->callback([=] {
      VehicleState st(*dir);
      AccessChallenge c = st.obu().Challenge(*booking_id);
      st.Save();
      WriteOutput(*out, ToJson(c));
    });
  }
  {
    auto* cmd = vehicle->add_subcommand("decide", "Check an ACCESS_REQ; prints ACCESS_CONFIRM on success");
    auto req = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    cmd->add_option("--req", *req, "ACCESS_REQ ('-' for stdin)")->required();
    cmd->add_option("--out", *out, "Where to write ACCESS_CONFIRM (default stdout)");
    cmd->callback([=] {
      VehicleState st(*dir);
      AccessDecision d = st.obu().Decide(ParseMessageAs<AccessReq>(ReadInput(*req)));
      st.Save();
      std::cerr << "decision: " << AccessOutcomeName(d.outcome) << std::endl;
      if (!d.granted()) throw ExitStatus{kExitDenied};
      WriteOutput(*out, ToJson(*d.confirmation));
    });
  }
}

}  // namespace

void AddRoleCommands(CLI::App& app) {
  AddOwner(app);
  AddConsumer(app);
  AddVehicle(app);
}

}  // namespace vsa::cli
