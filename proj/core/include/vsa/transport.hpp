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

// Instrumented party-to-party messaging.
//
// Two fabrics share one contract: an in-process hub (LocalHub) and a TCP
// mesh (TcpFabric). Both hand out per-session Links; a SessionChannel wraps a
// Link and implements the layer barrier: all payloads a party sends in one
// dependency layer are coalesced into one frame per peer, and the round
// counter advances once per layer that communicates.
//
// Wire frame (TCP), little-endian:
//   "HMF1" | u32 payload length | u8 msg type | 16-byte session id |
//   u32 layer index | payload
// The local fabric hands frames over as objects and charges no header bytes.

#pragma once

#include <array>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "vsa/bytes.hpp"
#include "vsa/tape.hpp"

namespace vsa {

using SessionId = std::array<uint8_t, 16>;
SessionId RandomSessionId();
SessionId SessionIdFromSeed(uint64_t seed);
std::string SessionIdHex(const SessionId& id);
SessionId SessionIdFromHex(std::string_view hex);

enum class MsgType : uint8_t {
  kHello = 1,   // session bring-up; not an online round
  kLayer = 2,   // one dependency layer of the online phase
  kAbort = 3,   // sender gave up on the session
};

struct Frame {
  static constexpr size_t kHeaderSize = 29;
  static constexpr std::array<uint8_t, 4> kMagic = {'H', 'M', 'F', '1'};

  MsgType type = MsgType::kLayer;
  SessionId session{};
  uint32_t layer = 0;
  Bytes payload;

  Bytes Encode() const;
  // Parses a complete frame; Error(kDecode) on malformed input.
  static Frame Decode(ByteSpan bytes);
  friend bool operator==(const Frame&, const Frame&) = default;
};

struct TranscriptStats {
  uint64_t online_rounds = 0;
  uint64_t bytes_sent = 0;     // payload + header bytes of layer frames
  uint64_t payload_bytes = 0;
  uint64_t header_bytes = 0;
  uint64_t frames = 0;
  uint64_t control_bytes = 0;  // hello/abort traffic, outside the online phase
  uint64_t mults = 0;          // field multiplications (one triple-equivalent each)
  uint64_t and_gates = 0;
  uint64_t cubes = 0;          // one-round cubes via preprocessed tuples
  uint64_t opens = 0;          // opened elements (field or bit)
  TapeCounts preprocessing;
  std::chrono::nanoseconds wall_time{0};

  TranscriptStats& operator+=(const TranscriptStats& o);
};

// One party's endpoint for one session.
class Link {
 public:
  virtual ~Link() = default;
  virtual int party() const = 0;
  virtual const SessionId& session() const = 0;
  virtual void Send(int to, const Frame& frame) = 0;
  // Blocks until the next frame from `from` arrives. Throws
  // Error(kSessionAbort) on timeout, disconnect or a peer's abort.
  virtual Frame Receive(int from) = 0;
  // Tells the peers this party is abandoning the session.
  virtual void Abort() = 0;
  // Framing overhead charged per frame by this fabric.
  virtual size_t header_size() const = 0;
};

class SessionChannel {
 public:
  explicit SessionChannel(std::unique_ptr<Link> link);
  ~SessionChannel();

  struct LayerOut {
    std::optional<Bytes> to_next;
    std::optional<Bytes> to_prev;
  };
  struct LayerIn {
    Bytes from_prev;  // present iff to_next was sent
    Bytes from_next;  // present iff to_prev was sent
  };

  // One barrier-synchronized layer. The contract is symmetric: every party
  // sends to its successor iff every party does, so a party that sends to
  // next expects a frame from prev and vice versa. A layer with nothing to
  // send costs no round.
  LayerIn SendLayer(LayerOut out);

  // Session bring-up exchange with both peers; returns {from_prev, from_next}.
  std::array<Bytes, 2> Hello(const Bytes& payload);

  int party() const { return link_->party(); }
  const SessionId& session() const { return link_->session(); }
  TranscriptStats& stats() { return stats_; }
  const TranscriptStats& stats() const { return stats_; }
  uint32_t layer_index() const { return layer_; }

  // Every frame this party sent, in order (only when recording is enabled).
  void set_record(bool on) { record_ = on; }
  const std::vector<Frame>& sent_frames() const { return sent_; }

  void Abort();

 private:
  Frame Expect(int from, MsgType type, uint32_t layer);

  std::unique_ptr<Link> link_;
  TranscriptStats stats_;
  uint32_t layer_ = 0;
  bool record_ = false;
  std::vector<Frame> sent_;
};

// Blocking multi-producer mailbox keyed by (session, sender).
class Mailboxes {
 public:
  void Push(const SessionId& session, int from, Frame frame);
  // `epoch` (from Epoch(from) when the session opened) makes the receive
  // fail once that peer has dropped since, even if it is back by now.
  Frame Pop(const SessionId& session, int from, std::chrono::milliseconds timeout,
            std::optional<uint64_t> epoch = std::nullopt);
  uint64_t Epoch(int peer);
  void Fail(const std::string& reason);  // wakes every waiter with kSessionAbort
  // Fails receives from `peer` while it is down, and any receive that was
  // already waiting when it dropped. Queued frames are still delivered.
  void FailPeer(int peer, const std::string& reason);
  void PeerUp(int peer);
  void Forget(const SessionId& session);

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::map<std::pair<SessionId, int>, std::deque<Frame>> queues_;
  std::optional<std::string> failed_;
  std::array<uint64_t, 3> peer_epoch_{};
  std::array<bool, 3> peer_down_{};
  std::array<std::string, 3> peer_reason_;
};

// In-process fabric: three parties in one address space.
class LocalHub {
 public:
  explicit LocalHub(std::chrono::milliseconds timeout = std::chrono::seconds(30)) : timeout_(timeout) {}
  std::unique_ptr<Link> Connect(const SessionId& session, int party);

 private:
  friend class LocalLink;
  std::chrono::milliseconds timeout_;
  std::array<Mailboxes, 3> inbox_;  // indexed by receiving party
};

struct Endpoint {
  std::string host = "127.0.0.1";
  uint16_t port = 0;
  std::string ToString() const { return host + ":" + std::to_string(port); }
  static Endpoint Parse(std::string_view s);
};

// TCP mesh among the three parties; sessions are multiplexed over one
// connection per pair. Party i dials every j < i and accepts every j > i.
// A lost connection fails the sessions waiting on that peer; the dialing
// side keeps redialing, so a restarted party rejoins the mesh.
class TcpFabric {
 public:
  struct Options {
    std::chrono::milliseconds connect_timeout{10000};
    std::chrono::milliseconds receive_timeout{30000};
    // When set, frame payloads are sealed with AES-256-GCM under this key.
    std::optional<std::array<uint8_t, 32>> channel_key;
  };

  TcpFabric(int party, std::array<Endpoint, 3> endpoints, Options options);
  ~TcpFabric();
  TcpFabric(const TcpFabric&) = delete;
  TcpFabric& operator=(const TcpFabric&) = delete;

  // Listens, dials and waits until both peers are connected. Throws
  // Error(kConnect) naming the unreachable party on timeout.
  void Start();
  bool connected(int peer) const;
  // Binds the listening socket only; returns the bound port (useful with
  // port 0). Start() calls this if needed.
  uint16_t Listen();
  std::unique_ptr<Link> Open(const SessionId& session);
  void Stop();

  // Overrides a peer's address before Start(), e.g. after peers bound port 0.
  void set_endpoint(int party, Endpoint endpoint) { endpoints_[party] = std::move(endpoint); }
  const Endpoint& endpoint(int party) const { return endpoints_[party]; }
  int party() const { return party_; }
  size_t header_size() const;

 private:
  friend class TcpLink;
  struct Peer;
  void SendFrame(int to, const Frame& frame);
  void Spawn(std::function<void()> fn);
  void AcceptLoop();
  void DialLoop(int peer);
  void Install(int peer, int fd);
  void ReaderLoop(int peer, int fd, uint64_t generation);
  void Disconnected(int peer, int fd, uint64_t generation, const std::string& reason);

  int party_;
  std::array<Endpoint, 3> endpoints_;
  Options options_;
  int listen_fd_ = -1;
  std::array<std::unique_ptr<Peer>, 3> peers_;
  std::array<uint8_t, 4> nonce_salt_{};
  Mailboxes inbox_;
  mutable std::mutex conn_mu_;
  std::condition_variable conn_cv_;
  std::vector<std::thread> threads_;
  bool started_ = false;
  std::atomic<bool> stopping_{false};
};

}  // namespace vsa
