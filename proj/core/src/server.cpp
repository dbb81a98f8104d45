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

#include "vsa/server.hpp"

#include <fcntl.h>
#include <spdlog/sinks/basic_file_sink.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>
#include <sys/stat.h>
#include <unistd.h>

#include <atomic>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "vsa/audit.hpp"
#include "vsa/engine.hpp"
#include "vsa/error.hpp"
#include "vsa/ledger_service.hpp"
#include "vsa/server_db.hpp"
#include "vsa/session_inputs.hpp"
#include "vsa/tape.hpp"
#include "vsa/tape_allocator.hpp"

namespace vsa {
namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr uint32_t kHelloMagic = 0x31484356;  // "VCH1"
constexpr uint16_t kHelloVersion = 1;

uint64_t NowMs() {
  return static_cast<uint64_t>(
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::system_clock::now().time_since_epoch())
          .count());
}

std::array<uint8_t, 8> KeyFingerprint(const Prg::Key& key) {
  ByteWriter w;
  w.Str("vsa-tape-key");
  w.Raw(key);
  Digest256 d = Sha3_256(w.bytes());
  std::array<uint8_t, 8> out{};
  std::copy_n(d.begin(), out.size(), out.begin());
  return out;
}

void PutCounts(ByteWriter& w, const TapeCounts& c) {
  w.U64(c.zero_shares);
  w.U64(c.zero_bits);
  w.U64(c.random_bits);
  w.U64(c.cube_tuples);
}

TapeCounts GetCounts(ByteReader& r) {
  TapeCounts c;
  c.zero_shares = r.U64();
  c.zero_bits = r.U64();
  c.random_bits = r.U64();
  c.cube_tuples = r.U64();
  return c;
}

// What each server announces when a session starts.
struct Hello {
  Backend backend = Backend::kMimc;
  uint64_t owner_id = 0;
  uint32_t rows = 0;
  uint32_t m_blocks = 0;
  std::array<uint8_t, 8> key_self{};
  std::array<uint8_t, 8> key_next{};
  TapeCounts tape_total;
  std::optional<TapeAllocation> slice;  // party 0 only

  Bytes Encode() const {
    ByteWriter w;
    w.U32(kHelloMagic);
    w.U16(kHelloVersion);
    w.U8(static_cast<uint8_t>(backend));
    w.U64(owner_id);
    w.U32(rows);
    w.U32(m_blocks);
    w.Raw(key_self);
    w.Raw(key_next);
    PutCounts(w, tape_total);
    w.U8(slice ? 1 : 0);
    if (slice) {
      PutCounts(w, slice->begin);
      PutCounts(w, slice->end);
    }
    return std::move(w).bytes();
  }

  static Hello Decode(ByteSpan bytes) {
    ByteReader r(bytes);
    if (r.U32() != kHelloMagic || r.U16() != kHelloVersion) {
      throw Error(ErrorCode::kParameterMismatch, "peer speaks another session protocol version");
    }
    Hello h;
    h.backend = static_cast<Backend>(r.U8());
    h.owner_id = r.U64();
    h.rows = r.U32();
    h.m_blocks = r.U32();
    auto a = r.Raw(8);
    std::copy(a.begin(), a.end(), h.key_self.begin());
    auto b = r.Raw(8);
    std::copy(b.begin(), b.end(), h.key_next.begin());
    h.tape_total = GetCounts(r);
    if (r.U8()) {
      TapeAllocation s;
      s.begin = GetCounts(r);
      s.end = GetCounts(r);
      h.slice = s;
    }
    r.ExpectDone();
    return h;
  }
};

// Mismatches are named without values; they may be compared by anyone.
void CompareHello(const Hello& mine, const Hello& theirs, int peer) {
  auto fail = [&](const std::string& what) {
    throw Error(ErrorCode::kParameterMismatch, what + " differs from party " + std::to_string(peer));
  };
  if (mine.backend != theirs.backend) fail("backend");
  if (mine.owner_id != theirs.owner_id) fail("owner id");
  if (mine.rows != theirs.rows) fail("registered row count");
  if (mine.m_blocks != theirs.m_blocks) fail("booking size");
  if (!(mine.tape_total == theirs.tape_total)) fail("tape size");
}

std::shared_ptr<spdlog::logger> MakeLogger(const ServerConfig& c) {
  std::vector<spdlog::sink_ptr> sinks;
  if (c.log_to_stderr) sinks.push_back(std::make_shared<spdlog::sinks::stderr_color_sink_mt>());
  if (!c.log_path.empty()) {
    if (c.log_path.has_parent_path()) std::filesystem::create_directories(c.log_path.parent_path());
    sinks.push_back(std::make_shared<spdlog::sinks::basic_file_sink_mt>(c.log_path.string()));
  }
  auto logger = std::make_shared<spdlog::logger>("server" + std::to_string(c.party), sinks.begin(), sinks.end());
  logger->set_pattern("%Y-%m-%dT%H:%M:%S.%e %n %l %v");
  logger->flush_on(spdlog::level::info);
  return logger;
}

void Reply(httplib::Response& res, int status, const std::string& body) {
  res.status = status;
  res.set_content(body, "application/json");
}

}  // namespace

void SaveSecret32(const std::filesystem::path& path, const std::array<uint8_t, 32>& secret) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0600);
  if (fd < 0) throw Error(ErrorCode::kStorage, "cannot write " + path.string());
  std::string text = ToHex(secret) + "\n";
  bool ok = ::write(fd, text.data(), text.size()) == static_cast<ssize_t>(text.size());
  ok = (::fsync(fd) == 0) && ok;
  ::close(fd);
  if (!ok) throw Error(ErrorCode::kStorage, "cannot write " + path.string());
}

std::array<uint8_t, 32> LoadSecret32(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::string text;
  if (!(in >> text)) throw Error(ErrorCode::kStorage, "cannot read " + path.string());
  Bytes raw;
  try {
    raw = FromHex(text);
  } catch (const Error&) {
    throw Error(ErrorCode::kParse, path.string() + " is not hex");
  }
  if (raw.size() != 32) throw Error(ErrorCode::kParse, path.string() + " must hold 32 bytes");
  std::array<uint8_t, 32> out{};
  std::copy(raw.begin(), raw.end(), out.begin());
  return out;
}

struct VsspServer::Impl {
  ServerConfig config;
  std::shared_ptr<spdlog::logger> log;
  PreprocessingTape tape;
  std::unique_ptr<ServerDb> db;
  std::unique_ptr<TapeAllocator> allocator;
  KemPrivateKey kem;
  std::unique_ptr<TcpFabric> fabric;
  std::unique_ptr<LedgerClient> ledger;
  httplib::Server http;
  std::thread http_thread;
  std::thread dial_thread;
  uint16_t control_port = 0;

  std::mutex sessions_mu;
  std::set<SessionId> sessions;  // every session id seen by this process
  std::atomic<Failpoint> failpoint{Failpoint::kNone};
  std::atomic<bool> crashed{false};
  std::atomic<uint64_t> completed{0};

  const FieldParams& field() const { return tape.field(); }
  void Routes();
  void WaitForPeers();
  uint64_t Publish(const AtPubReq& req);
  AtPubAck RunSession(const AtGenReq& req);
};

VsspServer::VsspServer(ServerConfig config) : impl_(std::make_unique<Impl>()) {
  Impl& s = *impl_;
  s.config = std::move(config);
  const ServerConfig& c = s.config;
  if (c.party < 0 || c.party > 2) throw Error(ErrorCode::kInvalidArgument, "party must be 0, 1 or 2");
  s.log = MakeLogger(c);
  s.tape = PreprocessingTape::Load(c.tape_path);
  if (s.tape.party() != c.party) {
    throw Error(ErrorCode::kParameterMismatch, "tape " + c.tape_path.string() + " belongs to party " +
                                                   std::to_string(s.tape.party()) + ", not " +
                                                   std::to_string(c.party));
  }
  s.db = std::make_unique<ServerDb>(s.field(), c.party, c.db_path);
  std::filesystem::create_directories(c.state_dir / "audit");
  s.allocator = std::make_unique<TapeAllocator>(s.tape.counts(), c.state_dir / "tape.used.json");
  s.kem = KemPrivateKey::FromBytes(LoadSecret32(c.kem_key_path));
  TcpFabric::Options opt;
  opt.channel_key = c.channel_key;
  opt.receive_timeout = c.session_timeout;
  opt.connect_timeout = c.connect_timeout;
  s.fabric = std::make_unique<TcpFabric>(c.party, c.peers, opt);
  s.ledger = std::make_unique<LedgerClient>(c.ledger_url);
  s.http.new_task_queue = [n = c.workers + 2] { return new httplib::ThreadPool(n); };
  s.http.set_read_timeout(std::chrono::duration_cast<std::chrono::seconds>(c.session_timeout).count() + 5, 0);
  s.http.set_write_timeout(std::chrono::duration_cast<std::chrono::seconds>(c.session_timeout).count() + 5, 0);
  s.Routes();
}

VsspServer::~VsspServer() { Stop(); }

uint16_t VsspServer::BindDataPlane() {
  uint16_t port = impl_->fabric->Listen();
  impl_->config.peers[impl_->config.party].port = port;
  return port;
}

void VsspServer::set_peer(int party, const Endpoint& e) {
  impl_->config.peers[party] = e;
  impl_->fabric->set_endpoint(party, e);
}

int VsspServer::party() const { return impl_->config.party; }

uint16_t VsspServer::Start() {
  Impl& s = *impl_;
  BindDataPlane();
  if (s.config.control_port == 0) {
    int p = s.http.bind_to_any_port(s.config.control_host);
    if (p <= 0) throw Error(ErrorCode::kConnect, "server cannot bind " + s.config.control_host);
    s.control_port = static_cast<uint16_t>(p);
  } else {
    if (!s.http.bind_to_port(s.config.control_host, s.config.control_port)) {
      throw Error(ErrorCode::kConnect, "server cannot bind " + s.config.control_host + ":" +
                                           std::to_string(s.config.control_port));
    }
    s.control_port = s.config.control_port;
  }
  s.http_thread = std::thread([&s] { s.http.listen_after_bind(); });
  s.http.wait_until_ready();
  s.dial_thread = std::thread([&s] {
    try {
      s.fabric->Start();
      s.log->info("peers connected");
    } catch (const Error& e) {
      // The fabric keeps dialing; sessions wait for it.
      s.log->warn("peers not reachable yet: {}", e.what());
    }
  });
  s.log->info("party {} serving control plane on port {}, data plane on port {}, {} rows", s.config.party,
              s.control_port, s.config.peers[s.config.party].port, s.db->size());
  return s.control_port;
}

void VsspServer::Stop() {
  if (!impl_) return;
  Impl& s = *impl_;
  if (s.http_thread.joinable()) {
    s.http.stop();
    s.http_thread.join();
  }
  s.fabric->Stop();
  if (s.dial_thread.joinable()) s.dial_thread.join();
}

std::string VsspServer::url() const {
  return "http://" + impl_->config.control_host + ":" + std::to_string(impl_->control_port);
}

void VsspServer::set_failpoint(Failpoint f) { impl_->failpoint = f; }
bool VsspServer::crashed() const { return impl_->crashed; }

AtPubAck VsspServer::HandleAtGenReq(const AtGenReq& req) { return impl_->RunSession(req); }

void VsspServer::Impl::WaitForPeers() {
  auto deadline = Clock::now() + config.session_timeout;
  for (;;) {
    std::string missing;
    for (int p = 0; p < 3; ++p) {
      if (p != config.party && !fabric->connected(p)) missing += (missing.empty() ? "" : ", ") + std::to_string(p);
    }
    if (missing.empty()) return;
    if (Clock::now() >= deadline) {
      throw Error(ErrorCode::kSessionAbort, "party " + missing + " unreachable from party " +
                                                std::to_string(config.party));
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
}

uint64_t VsspServer::Impl::Publish(const AtPubReq& req) {
  std::chrono::milliseconds backoff(100);
  for (int attempt = 1;; ++attempt) {
    try {
      return ledger->Publish(req).ts;
    } catch (const Error& e) {
      // Publishing is idempotent, so retrying after a lost ack is safe.
      if (attempt >= config.publish_attempts) throw;
      log->warn("session {}: publish attempt {} failed: {}", SessionIdHex(req.session), attempt, e.what());
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
  }
}

AtPubAck VsspServer::Impl::RunSession(const AtGenReq& req) {
  const std::string sid = SessionIdHex(req.session);
  const uint64_t received_ms = NowMs();
  const auto t0 = Clock::now();
  {
    std::lock_guard lock(sessions_mu);
    if (!sessions.insert(req.session).second) {
      throw Error(ErrorCode::kDuplicate, "session " + sid + " was already requested; retry with a new session id");
    }
  }
  log->info("session {}: request from owner {} ({})", sid, req.owner_id, BackendName(req.backend));

  // Problems with this server's inputs are still announced to the peers,
  // so that they fail fast instead of waiting for a timeout.
  std::optional<Error> early;
  SessionInputs in;
  std::vector<VehicleRow> rows;
  try {
    if (config.backend && req.backend != *config.backend) {
      throw Error(ErrorCode::kParameterMismatch, std::string("this server runs the ") +
                                                     std::string(BackendName(*config.backend)) + " backend only");
    }
    in = OpenSessionInputs(field(), config.party, kem, req);
    rows = db->Rows(req.owner_id);
    if (rows.empty()) throw Error(ErrorCode::kNotFound, "owner " + std::to_string(req.owner_id) + " has no vehicles");
  } catch (const Error& e) {
    early = e;
  }

  WaitForPeers();
  SessionChannel channel(fabric->Open(req.session));
  try {
    if (early) throw *early;
    Step2Params params;
    params.backend = req.backend;
    params.rows = rows.size();
    params.m_blocks = in.booking.blocks();
    const TapeCounts need = Step2Need(field(), params);

    Hello mine;
    mine.backend = req.backend;
    mine.owner_id = req.owner_id;
    mine.rows = static_cast<uint32_t>(rows.size());
    mine.m_blocks = static_cast<uint32_t>(params.m_blocks);
    mine.key_self = KeyFingerprint(tape.key_self());
    mine.key_next = KeyFingerprint(tape.key_next());
    mine.tape_total = tape.counts();
    if (config.party == 0) mine.slice = allocator->Allocate(need);

    auto got = channel.Hello(mine.Encode());
    Hello prev = Hello::Decode(got[0]);
    Hello next = Hello::Decode(got[1]);
    const int prev_party = PrevParty(config.party), next_party = NextParty(config.party);
    CompareHello(mine, prev, prev_party);
    CompareHello(mine, next, next_party);
    // Adjacent tapes share a key: mine "next" is my successor's "self".
    if (mine.key_next != next.key_self || prev.key_next != mine.key_self) {
      throw Error(ErrorCode::kParameterMismatch, "tapes come from different dealer runs");
    }
    TapeAllocation slice;
    if (config.party == 0) {
      slice = *mine.slice;
    } else {
      const Hello& coordinator = config.party == 1 ? prev : next;
      if (!coordinator.slice) throw Error(ErrorCode::kParameterMismatch, "party 0 announced no tape slice");
      slice = *coordinator.slice;
      allocator->Claim(slice, need);
    }

    if (failpoint.exchange(Failpoint::kNone) == Failpoint::kCrashAfterHello) {
      crashed = true;
      log->warn("session {}: simulated crash", sid);
      fabric->Stop();
      throw Error(ErrorCode::kSessionAbort, "server crashed");
    }

    TapeReader reader(tape, slice);
    Engine engine(channel, reader);
    Step2Result result = engine.Run(Step2Generate(engine, rows, std::move(in.keys), in.booking));
    const auto t_mpc = Clock::now();
    const TranscriptStats& st = channel.stats();
    log->info("session {}: step 2 done in {} ms, {} rounds, {} bytes sent", sid,
              std::chrono::duration_cast<std::chrono::milliseconds>(t_mpc - t0).count(), st.online_rounds,
              st.bytes_sent);

    const uint64_t ts = Publish(AtPubReq{req.session, result.cipher, result.tag});

    AuditRecord record;
    record.session = req.session;
    record.party = config.party;
    record.owner_id = req.owner_id;
    record.backend = req.backend;
    record.received_ms = received_ms;
    record.completed_ms = NowMs();
    record.ts_pub = ts;
    record.m = in.booking.m;
    record.m_bits = in.booking.m_bits;
    record.Save(config.state_dir / "audit" / AuditFileName(req.session, config.party));
    ++completed;
    log->info("session {}: published at ts {}, {} ms total", sid, ts,
              std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - t0).count());
    return AtPubAck{req.session, ts};
  } catch (const Error& e) {
    if (!crashed) channel.Abort();
    log->warn("session {}: failed: {}", sid, e.what());
    throw;
  }
}

void VsspServer::Impl::Routes() {
  http.Post("/register", [this](const httplib::Request& req, httplib::Response& res) {
    try {
      json j = json::parse(req.body, nullptr, false);
      if (!j.is_object() || !j.contains("rows") || !j["rows"].is_array()) {
        throw Error(ErrorCode::kParse, "register body must be {\"rows\": [base64...]}");
      }
      std::vector<VehicleRow> rows;
      for (const auto& r : j["rows"]) {
        if (!r.is_string()) throw Error(ErrorCode::kParse, "rows must be base64 strings");
        try {
          rows.push_back(VehicleRow::Decode(field(), FromBase64(r.get<std::string>())));
        } catch (const Error& e) {
          throw Error(ErrorCode::kParse, std::string("bad row: ") + e.what());
        }
      }
      db->Load(rows);
      log->info("registered {} rows", rows.size());
      Reply(res, 200, json{{"stored", rows.size()}}.dump());
    } catch (const Error& e) {
      Reply(res, HttpStatusFor(e.code()), ErrorBody(e));
    }
  });

  http.Get(R"(/owners/(\d+))", [this](const httplib::Request& req, httplib::Response& res) {
    uint64_t owner = 0;
    try {
      owner = std::stoull(req.matches[1].str());
    } catch (const std::exception&) {
      Reply(res, 400, ErrorBody(ErrorCode::kParse, "owner id out of range"));
      return;
    }
    Reply(res, 200, json{{"owner_id", owner}, {"indices", db->Indices(owner)}}.dump());
  });

  http.Post("/at-gen-req", [this](const httplib::Request& req, httplib::Response& res) {
    try {
      AtGenReq m = ParseMessageAs<AtGenReq>(req.body);
      Reply(res, 200, ToJson(RunSession(m)));
    } catch (const Error& e) {
      Reply(res, HttpStatusFor(e.code()), ErrorBody(e));
    }
  });

  http.Get("/kem-key", [this](const httplib::Request&, httplib::Response& res) {
    Reply(res, 200, json{{"party", config.party}, {"kem_public", ToBase64(kem.Public().bytes())}}.dump());
  });

  http.Get("/health", [this](const httplib::Request&, httplib::Response& res) {
    TapeCounts left = allocator->remaining();
    json peers = json::object();
    for (int p = 0; p < 3; ++p) {
      if (p != config.party) peers[std::to_string(p)] = fabric->connected(p);
    }
    Reply(res, 200,
          json{{"party", config.party},
               {"rows", db->size()},
               {"sessions_completed", completed.load()},
               {"peers_connected", peers},
               {"tape_remaining",
                {{"zero_shares", left.zero_shares},
                 {"zero_bits", left.zero_bits},
                 {"random_bits", left.random_bits},
                 {"cube_tuples", left.cube_tuples}}}}
              .dump());
  });
}

ServerClient::ServerClient(std::string url, std::chrono::milliseconds timeout) : http_(std::move(url), timeout) {}

size_t ServerClient::Register(const std::vector<VehicleRow>& rows) const {
  json j;
  j["rows"] = json::array();
  for (const auto& r : rows) j["rows"].push_back(ToBase64(r.Encode()));
  json out = json::parse(http_.PostOk("/register", j.dump()), nullptr, false);
  if (!out.is_object() || !out.contains("stored")) throw Error(ErrorCode::kParse, "malformed register reply");
  return out["stored"].get<size_t>();
}

std::vector<uint32_t> ServerClient::Indices(uint64_t owner_id) const {
  json out = json::parse(http_.GetOk("/owners/" + std::to_string(owner_id)), nullptr, false);
  if (!out.is_object() || !out.contains("indices")) throw Error(ErrorCode::kParse, "malformed owner listing");
  return out["indices"].get<std::vector<uint32_t>>();
}

AtPubAck ServerClient::GenerateToken(const AtGenReq& req) const {
  AtPubAck ack = ParseMessageAs<AtPubAck>(http_.PostOk("/at-gen-req", ToJson(req)));
  if (ack.session != req.session) throw Error(ErrorCode::kProtocolDesync, "server acknowledged another session");
  return ack;
}

KemPublicKey ServerClient::KemKey(int expected_party) const {
  json out = json::parse(http_.GetOk("/kem-key"), nullptr, false);
  if (!out.is_object() || !out.contains("party") || !out.contains("kem_public")) {
    throw Error(ErrorCode::kParse, "malformed key reply");
  }
  if (out["party"].get<int>() != expected_party) {
    throw Error(ErrorCode::kParameterMismatch, url() + " is party " + std::to_string(out["party"].get<int>()));
  }
  Bytes raw = FromBase64(out["kem_public"].get<std::string>());
  if (raw.size() != 32) throw Error(ErrorCode::kParse, "KEM key must be 32 bytes");
  X25519Bytes k{};
  std::copy(raw.begin(), raw.end(), k.begin());
  return KemPublicKey(k);
}

std::string ServerClient::Health() const { return http_.GetOk("/health"); }

}  // namespace vsa
