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

#include "vsa/transport.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "vsa/crypto.hpp"
#include "vsa/error.hpp"

namespace vsa {

SessionId RandomSessionId() {
  SessionId id{};
  RandomBytes(id);
  return id;
}

SessionId SessionIdFromSeed(uint64_t seed) {
  ByteWriter w;
  w.Str("vsa-session");
  w.U64(seed);
  Digest256 d = Sha3_256(w.bytes());
  SessionId id{};
  std::copy_n(d.begin(), id.size(), id.begin());
  return id;
}

std::string SessionIdHex(const SessionId& id) { return ToHex(id); }

SessionId SessionIdFromHex(std::string_view hex) {
  Bytes b = FromHex(hex);
  if (b.size() != 16) throw Error(ErrorCode::kDecode, "session id must be 16 bytes");
  SessionId id{};
  std::copy(b.begin(), b.end(), id.begin());
  return id;
}

Bytes Frame::Encode() const {
  ByteWriter w;
  w.Raw(kMagic);
  w.U32(static_cast<uint32_t>(payload.size()));
  w.U8(static_cast<uint8_t>(type));
  w.Raw(session);
  w.U32(layer);
  w.Raw(payload);
  return std::move(w).bytes();
}

namespace {

struct Header {
  uint32_t length;
  MsgType type;
  SessionId session;
  uint32_t layer;
};

Header ParseHeader(ByteSpan bytes) {
  ByteReader r(bytes);
  auto magic = r.Raw(4);
  if (!std::equal(magic.begin(), magic.end(), Frame::kMagic.begin())) {
    throw Error(ErrorCode::kDecode, "bad frame magic");
  }
  Header h{};
  h.length = r.U32();
  uint8_t t = r.U8();
  if (t < 1 || t > 3) throw Error(ErrorCode::kDecode, "unknown frame type " + std::to_string(t));
  h.type = static_cast<MsgType>(t);
  auto sid = r.Raw(16);
  std::copy(sid.begin(), sid.end(), h.session.begin());
  h.layer = r.U32();
  return h;
}

}  // namespace

Frame Frame::Decode(ByteSpan bytes) {
  if (bytes.size() < kHeaderSize) throw Error(ErrorCode::kDecode, "truncated frame header");
  Header h = ParseHeader(bytes.first(kHeaderSize));
  if (bytes.size() - kHeaderSize != h.length) throw Error(ErrorCode::kDecode, "frame length mismatch");
  Frame f;
  f.type = h.type;
  f.session = h.session;
  f.layer = h.layer;
  f.payload.assign(bytes.begin() + kHeaderSize, bytes.end());
  return f;
}

TranscriptStats& TranscriptStats::operator+=(const TranscriptStats& o) {
  online_rounds += o.online_rounds;
  bytes_sent += o.bytes_sent;
  payload_bytes += o.payload_bytes;
  header_bytes += o.header_bytes;
  frames += o.frames;
  control_bytes += o.control_bytes;
  mults += o.mults;
  and_gates += o.and_gates;
  cubes += o.cubes;
  opens += o.opens;
  preprocessing += o.preprocessing;
  wall_time += o.wall_time;
  return *this;
}

// ---------------------------------------------------------------------------
// SessionChannel

SessionChannel::SessionChannel(std::unique_ptr<Link> link) : link_(std::move(link)) {}
SessionChannel::~SessionChannel() = default;

Frame SessionChannel::Expect(int from, MsgType type, uint32_t layer) {
  Frame f = link_->Receive(from);
  if (f.type == MsgType::kAbort) {
    throw Error(ErrorCode::kSessionAbort, "party " + std::to_string(from) + " aborted the session");
  }
  if (f.session != session()) throw Error(ErrorCode::kProtocolDesync, "frame for a different session");
  if (f.type != type || f.layer != layer) {
    throw Error(ErrorCode::kProtocolDesync, "party " + std::to_string(from) + " is at layer " +
                                                std::to_string(f.layer) + ", expected " + std::to_string(layer));
  }
  return f;
}

SessionChannel::LayerIn SessionChannel::SendLayer(LayerOut out) {
  LayerIn in;
  if (!out.to_next && !out.to_prev) return in;
  int me = party();
  auto send = [&](int to, Bytes payload) {
    Frame f{MsgType::kLayer, session(), layer_, std::move(payload)};
    stats_.frames += 1;
    stats_.payload_bytes += f.payload.size();
    stats_.header_bytes += link_->header_size();
    stats_.bytes_sent += f.payload.size() + link_->header_size();
    link_->Send(to, f);
    if (record_) sent_.push_back(std::move(f));
  };
  if (out.to_next) send(NextParty(me), std::move(*out.to_next));
  if (out.to_prev) send(PrevParty(me), std::move(*out.to_prev));
  if (out.to_next) in.from_prev = Expect(PrevParty(me), MsgType::kLayer, layer_).payload;
  if (out.to_prev) in.from_next = Expect(NextParty(me), MsgType::kLayer, layer_).payload;
  ++layer_;
  ++stats_.online_rounds;
  return in;
}

std::array<Bytes, 2> SessionChannel::Hello(const Bytes& payload) {
  int me = party();
  Frame f{MsgType::kHello, session(), 0, payload};
  for (int to : {PrevParty(me), NextParty(me)}) {
    link_->Send(to, f);
    stats_.control_bytes += payload.size() + link_->header_size();
  }
  Bytes a = Expect(PrevParty(me), MsgType::kHello, 0).payload;
  Bytes b = Expect(NextParty(me), MsgType::kHello, 0).payload;
  return {std::move(a), std::move(b)};
}

void SessionChannel::Abort() {
  try {
    link_->Abort();
  } catch (const std::exception&) {
    // Peers will time out instead.
  }
}

// ---------------------------------------------------------------------------
// Mailboxes

void Mailboxes::Push(const SessionId& session, int from, Frame frame) {
  {
    std::lock_guard lock(mu_);
    queues_[{session, from}].push_back(std::move(frame));
  }
  cv_.notify_all();
}

uint64_t Mailboxes::Epoch(int peer) {
  std::lock_guard lock(mu_);
  return peer_epoch_[peer];
}

Frame Mailboxes::Pop(const SessionId& session, int from, std::chrono::milliseconds timeout,
                     std::optional<uint64_t> epoch_at_open) {
  std::unique_lock lock(mu_);
  auto key = std::make_pair(session, from);
  auto& q = queues_[key];
  auto aborted = [&]() -> const Frame* {
    // An abort frame from either peer ends the session for every receive.
    for (int p = 0; p < 3; ++p) {
      auto it = queues_.find({session, p});
      if (it == queues_.end()) continue;
      for (const auto& f : it->second) {
        if (f.type == MsgType::kAbort) return &f;
      }
    }
    return nullptr;
  };
  const uint64_t epoch = epoch_at_open.value_or(peer_epoch_[from]);
  auto peer_lost = [&] { return peer_down_[from] || peer_epoch_[from] != epoch; };
  cv_.wait_for(lock, timeout, [&] { return !q.empty() || failed_ || peer_lost() || aborted() != nullptr; });
  if (!q.empty() && q.front().type != MsgType::kAbort) {
    Frame f = std::move(q.front());
    q.pop_front();
    return f;
  }
  if (const Frame* a = aborted()) return *a;
  if (failed_) throw Error(ErrorCode::kSessionAbort, *failed_);
  if (peer_lost()) throw Error(ErrorCode::kSessionAbort, peer_reason_[from]);
  throw Error(ErrorCode::kSessionAbort,
              "timed out after " + std::to_string(timeout.count()) + " ms waiting for party " + std::to_string(from));
}

void Mailboxes::Fail(const std::string& reason) {
  {
    std::lock_guard lock(mu_);
    if (!failed_) failed_ = reason;
  }
  cv_.notify_all();
}

void Mailboxes::FailPeer(int peer, const std::string& reason) {
  {
    std::lock_guard lock(mu_);
    ++peer_epoch_[peer];
    peer_down_[peer] = true;
    peer_reason_[peer] = reason;
  }
  cv_.notify_all();
}

void Mailboxes::PeerUp(int peer) {
  std::lock_guard lock(mu_);
  peer_down_[peer] = false;
}

void Mailboxes::Forget(const SessionId& session) {
  std::lock_guard lock(mu_);
  for (int p = 0; p < 3; ++p) queues_.erase({session, p});
}

// ---------------------------------------------------------------------------
// Local fabric

class LocalLink final : public Link {
 public:
  LocalLink(LocalHub& hub, const SessionId& session, int party) : hub_(hub), session_(session), party_(party) {}
  ~LocalLink() override { hub_.inbox_[party_].Forget(session_); }

  int party() const override { return party_; }
  const SessionId& session() const override { return session_; }
  void Send(int to, const Frame& frame) override { hub_.inbox_[to].Push(session_, party_, frame); }
  Frame Receive(int from) override { return hub_.inbox_[party_].Pop(session_, from, hub_.timeout_); }
  void Abort() override {
    Frame f{MsgType::kAbort, session_, 0, {}};
    for (int to : {PrevParty(party_), NextParty(party_)}) hub_.inbox_[to].Push(session_, party_, f);
  }
  size_t header_size() const override { return 0; }

 private:
  LocalHub& hub_;
  SessionId session_;
  int party_;
};

std::unique_ptr<Link> LocalHub::Connect(const SessionId& session, int party) {
  if (party < 0 || party >= kParties) throw Error(ErrorCode::kInvalidArgument, "party id out of range");
  return std::make_unique<LocalLink>(*this, session, party);
}

// ---------------------------------------------------------------------------
// TCP fabric

Endpoint Endpoint::Parse(std::string_view s) {
  auto colon = s.rfind(':');
  if (colon == std::string_view::npos) throw Error(ErrorCode::kInvalidArgument, "endpoint needs host:port");
  Endpoint e;
  e.host = std::string(s.substr(0, colon));
  int port = std::stoi(std::string(s.substr(colon + 1)));
  if (port < 0 || port > 65535) throw Error(ErrorCode::kInvalidArgument, "port out of range");
  e.port = static_cast<uint16_t>(port);
  return e;
}

struct TcpFabric::Peer {
  std::mutex write_mu;     // serializes frames on the connection
  int fd = -1;             // guarded by conn_mu_ and write_mu
  uint64_t generation = 0;
  uint64_t send_counter = 0;
};

namespace {

constexpr size_t kSealOverhead = 12 + 16;

bool WriteAll(int fd, const uint8_t* data, size_t n) {
  while (n > 0) {
    ssize_t k = ::send(fd, data, n, MSG_NOSIGNAL);
    if (k < 0 && errno == EINTR) continue;
    if (k <= 0) return false;
    data += k;
    n -= static_cast<size_t>(k);
  }
  return true;
}

bool ReadAll(int fd, uint8_t* data, size_t n) {
  while (n > 0) {
    ssize_t k = ::recv(fd, data, n, 0);
    if (k < 0 && errno == EINTR) continue;
    if (k <= 0) return false;
    data += k;
    n -= static_cast<size_t>(k);
  }
  return true;
}

sockaddr_in Resolve(const Endpoint& e) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (getaddrinfo(e.host.c_str(), nullptr, &hints, &res) != 0 || res == nullptr) {
    throw Error(ErrorCode::kConnect, "cannot resolve " + e.host);
  }
  sockaddr_in addr = *reinterpret_cast<sockaddr_in*>(res->ai_addr);
  freeaddrinfo(res);
  addr.sin_port = htons(e.port);
  return addr;
}

void SetNoDelay(int fd) {
  int one = 1;
  setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
}

Bytes SealAad(const Frame& f) {
  ByteWriter w;
  w.U8(static_cast<uint8_t>(f.type));
  w.Raw(f.session);
  w.U32(f.layer);
  return std::move(w).bytes();
}

}  // namespace

TcpFabric::TcpFabric(int party, std::array<Endpoint, 3> endpoints, Options options)
    : party_(party), endpoints_(std::move(endpoints)), options_(options) {
  if (party < 0 || party >= kParties) throw Error(ErrorCode::kInvalidArgument, "party id out of range");
  for (auto& p : peers_) p = std::make_unique<Peer>();
  RandomBytes(nonce_salt_);
}

TcpFabric::~TcpFabric() { Stop(); }

size_t TcpFabric::header_size() const {
  return Frame::kHeaderSize + (options_.channel_key ? kSealOverhead : 0);
}

uint16_t TcpFabric::Listen() {
  if (listen_fd_ >= 0) return endpoints_[party_].port;
  int fd = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
  if (fd < 0) throw Error(ErrorCode::kConnect, "socket() failed");
  int one = 1;
  setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr = Resolve(endpoints_[party_]);
  if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0 || ::listen(fd, 8) != 0) {
    ::close(fd);
    throw Error(ErrorCode::kConnect, "party " + std::to_string(party_) + " cannot listen on " +
                                         endpoints_[party_].ToString() + ": " + std::strerror(errno));
  }
  socklen_t len = sizeof(addr);
  getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  endpoints_[party_].port = ntohs(addr.sin_port);
  listen_fd_ = fd;
  return endpoints_[party_].port;
}

void TcpFabric::Spawn(std::function<void()> fn) {
  // Caller holds conn_mu_.
  threads_.emplace_back(std::move(fn));
}

void TcpFabric::Start() {
  Listen();
  {
    std::lock_guard lock(conn_mu_);
    if (started_) return;
    started_ = true;
    Spawn([this] { AcceptLoop(); });
    for (int j = 0; j < party_; ++j) Spawn([this, j] { DialLoop(j); });
  }
  std::unique_lock lock(conn_mu_);
  bool up = conn_cv_.wait_for(lock, options_.connect_timeout, [&] {
    for (int j = 0; j < kParties; ++j) {
      if (j != party_ && peers_[j]->fd < 0) return false;
    }
    return true;
  });
  if (!up) {
    std::string missing;
    for (int j = 0; j < kParties; ++j) {
      if (j != party_ && peers_[j]->fd < 0) missing += (missing.empty() ? "" : ", ") + std::to_string(j);
    }
    throw Error(ErrorCode::kConnect, "party " + missing + " unreachable from party " + std::to_string(party_));
  }
}

bool TcpFabric::connected(int peer) const {
  std::lock_guard lock(conn_mu_);
  return peers_[peer]->fd >= 0;
}

void TcpFabric::DialLoop(int peer) {
  while (!stopping_) {
    sockaddr_in addr{};
    try {
      addr = Resolve(endpoints_[peer]);
    } catch (const Error&) {
      std::this_thread::sleep_for(std::chrono::milliseconds(100));
      continue;
    }
    int fd = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
    if (fd >= 0 && ::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) == 0) {
      SetNoDelay(fd);
      uint8_t hello[5] = {'H', 'M', 'F', '1', static_cast<uint8_t>(party_)};
      if (WriteAll(fd, hello, sizeof(hello))) {
        Install(peer, fd);
        return;
      }
    }
    if (fd >= 0) ::close(fd);
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
}

void TcpFabric::AcceptLoop() {
  while (!stopping_) {
    pollfd pfd{listen_fd_, POLLIN, 0};
    if (::poll(&pfd, 1, 100) <= 0) continue;
    int fd = ::accept4(listen_fd_, nullptr, nullptr, SOCK_CLOEXEC);
    if (fd < 0) continue;
    SetNoDelay(fd);
    timeval tv{2, 0};
    setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv));
    uint8_t hello[5];
    if (!ReadAll(fd, hello, sizeof(hello)) || std::memcmp(hello, "HMF1", 4) != 0 || hello[4] <= party_ ||
        hello[4] >= kParties) {
      ::close(fd);
      continue;
    }
    timeval none{0, 0};
    setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &none, sizeof(none));
    Install(hello[4], fd);
  }
}

void TcpFabric::Install(int peer, int fd) {
  Peer& p = *peers_[peer];
  std::lock_guard wlock(p.write_mu);
  std::lock_guard lock(conn_mu_);
  if (stopping_) {
    ::close(fd);
    return;
  }
  // A newer connection from a restarted peer replaces a stale one; the old
  // reader notices the shutdown and leaves quietly.
  if (p.fd >= 0) ::shutdown(p.fd, SHUT_RDWR);
  p.fd = fd;
  uint64_t gen = ++p.generation;
  inbox_.PeerUp(peer);
  Spawn([this, peer, fd, gen] { ReaderLoop(peer, fd, gen); });
  conn_cv_.notify_all();
}

void TcpFabric::Disconnected(int peer, int fd, uint64_t generation, const std::string& reason) {
  Peer& p = *peers_[peer];
  bool current = false;
  {
    std::lock_guard wlock(p.write_mu);
    std::lock_guard lock(conn_mu_);
    current = p.generation == generation;
    if (current) p.fd = -1;
    ::close(fd);
    if (current && !stopping_ && peer < party_) Spawn([this, peer] { DialLoop(peer); });
  }
  if (current && !stopping_) inbox_.FailPeer(peer, reason);
}

void TcpFabric::ReaderLoop(int peer, int fd, uint64_t generation) {
  std::array<uint8_t, Frame::kHeaderSize> hdr{};
  std::string reason = "party " + std::to_string(peer) + " disconnected";
  for (;;) {
    if (!ReadAll(fd, hdr.data(), hdr.size())) break;
    Header h{};
    try {
      h = ParseHeader(hdr);
    } catch (const Error& e) {
      reason = std::string("malformed frame from party ") + std::to_string(peer) + ": " + e.what();
      break;
    }
    Bytes payload(h.length);
    if (!ReadAll(fd, payload.data(), payload.size())) break;
    Frame f{h.type, h.session, h.layer, std::move(payload)};
    if (options_.channel_key) {
      if (f.payload.size() < kSealOverhead) {
        reason = "short sealed frame from party " + std::to_string(peer);
        break;
      }
      GcmNonce nonce{};
      std::copy_n(f.payload.begin(), nonce.size(), nonce.begin());
      auto opened = Aes256GcmOpen(*options_.channel_key, nonce, SealAad(f),
                                  ByteSpan(f.payload).subspan(nonce.size()));
      if (!opened) {
        reason = "frame authentication failed from party " + std::to_string(peer);
        break;
      }
      f.payload = std::move(*opened);
    }
    inbox_.Push(f.session, peer, std::move(f));
  }
  Disconnected(peer, fd, generation, reason);
}

void TcpFabric::SendFrame(int to, const Frame& frame) {
  Peer& p = *peers_[to];
  std::lock_guard lock(p.write_mu);
  int fd;
  {
    std::lock_guard clock(conn_mu_);
    fd = p.fd;
  }
  if (fd < 0) throw Error(ErrorCode::kSessionAbort, "no connection to party " + std::to_string(to));
  Bytes wire;
  if (options_.channel_key) {
    // Per-instance random salt and a per-peer counter: nonces never repeat
    // within one process and collide across restarts with probability 2^-32.
    GcmNonce nonce{};
    std::copy(nonce_salt_.begin(), nonce_salt_.end(), nonce.begin());
    uint64_t c = p.send_counter++;
    for (int i = 0; i < 8; ++i) nonce[4 + i] = static_cast<uint8_t>(c >> (8 * i));
    Frame sealed = frame;
    Bytes body = Aes256GcmSeal(*options_.channel_key, nonce, SealAad(frame), frame.payload);
    sealed.payload.assign(nonce.begin(), nonce.end());
    sealed.payload.insert(sealed.payload.end(), body.begin(), body.end());
    wire = sealed.Encode();
  } else {
    wire = frame.Encode();
  }
  if (!WriteAll(fd, wire.data(), wire.size())) {
    throw Error(ErrorCode::kSessionAbort, "send to party " + std::to_string(to) + " failed");
  }
}

class TcpLink final : public Link {
 public:
  TcpLink(TcpFabric& fabric, const SessionId& session) : fabric_(fabric), session_(session) {
    for (int p = 0; p < kParties; ++p) epochs_[p] = fabric_.inbox_.Epoch(p);
  }
  ~TcpLink() override { fabric_.inbox_.Forget(session_); }

  int party() const override { return fabric_.party_; }
  const SessionId& session() const override { return session_; }
  void Send(int to, const Frame& frame) override { fabric_.SendFrame(to, frame); }
  Frame Receive(int from) override {
    return fabric_.inbox_.Pop(session_, from, fabric_.options_.receive_timeout, epochs_[from]);
  }
  void Abort() override {
    Frame f{MsgType::kAbort, session_, 0, {}};
    for (int to : {PrevParty(party()), NextParty(party())}) {
      try {
        fabric_.SendFrame(to, f);
      } catch (const Error&) {
        // That peer is gone anyway.
      }
    }
  }
  size_t header_size() const override { return fabric_.header_size(); }

 private:
  TcpFabric& fabric_;
  SessionId session_;
  std::array<uint64_t, kParties> epochs_{};
};

std::unique_ptr<Link> TcpFabric::Open(const SessionId& session) {
  return std::make_unique<TcpLink>(*this, session);
}

void TcpFabric::Stop() {
  stopping_ = true;
  {
    std::lock_guard lock(conn_mu_);
    for (auto& p : peers_) {
      if (p && p->fd >= 0) ::shutdown(p->fd, SHUT_RDWR);
    }
  }
  for (;;) {
    std::vector<std::thread> threads;
    {
      std::lock_guard lock(conn_mu_);
      threads.swap(threads_);
    }
    if (threads.empty()) break;
    for (auto& t : threads) t.join();
  }
  if (listen_fd_ >= 0) {
    ::close(listen_fd_);
    listen_fd_ = -1;
  }
}

}  // namespace vsa
