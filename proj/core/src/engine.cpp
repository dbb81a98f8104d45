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

#include "vsa/engine.hpp"

namespace vsa {

Engine::Engine(SessionChannel& channel, TapeReader& tape) : channel_(&channel), tape_(&tape) {
  if (channel.party() != tape.party()) {
    throw Error(ErrorCode::kParameterMismatch, "tape belongs to party " + std::to_string(tape.party()) +
                                                   ", channel to party " + std::to_string(channel.party()));
  }
}

namespace {

void CheckLengths(size_t a, size_t b) {
  if (a != b) throw Error(ErrorCode::kParameterMismatch, "operand vectors differ in length");
}

}  // namespace

OpAwaiter<Engine::Kind::kMul> Engine::Mul(std::vector<RepShare> x, std::vector<RepShare> y) {
  CheckLengths(x.size(), y.size());
  EngineRequest r;
  r.kind = Kind::kMul;
  r.x = std::move(x);
  r.y = std::move(y);
  return {*this, std::move(r)};
}

OpAwaiter<Engine::Kind::kAnd> Engine::And(BitShares x, BitShares y) {
  CheckLengths(x.size(), y.size());
  EngineRequest r;
  r.kind = Kind::kAnd;
  r.bx = std::move(x);
  r.by = std::move(y);
  return {*this, std::move(r)};
}

OpAwaiter<Engine::Kind::kOpen> Engine::Open(std::vector<RepShare> x) {
  EngineRequest r;
  r.kind = Kind::kOpen;
  r.x = std::move(x);
  return {*this, std::move(r)};
}

OpAwaiter<Engine::Kind::kCheckedOpen> Engine::CheckedOpen(std::vector<RepShare> x) {
  EngineRequest r;
  r.kind = Kind::kCheckedOpen;
  r.x = std::move(x);
  return {*this, std::move(r)};
}

OpAwaiter<Engine::Kind::kOpenBits> Engine::OpenBits(BitShares x) {
  EngineRequest r;
  r.kind = Kind::kOpenBits;
  r.bx = std::move(x);
  return {*this, std::move(r)};
}

OpAwaiter<Engine::Kind::kCube> Engine::CubeWithTuple(std::vector<RepShare> x) {
  EngineRequest r;
  r.kind = Kind::kCube;
  r.x = std::move(x);
  return {*this, std::move(r)};
}

void Engine::Drive(std::coroutine_handle<> root) {
  ready_.push_back(root);
  for (;;) {
    while (!ready_.empty()) {
      auto h = ready_.front();
      ready_.pop_front();
      h.resume();
    }
    if (root.done()) return;
    if (pending_.empty()) {
      throw Error(ErrorCode::kProtocolDesync, "circuit stalled with no pending interactive operation");
    }
    Flush();
  }
}

void Engine::Flush() {
  std::vector<EngineRequest*> batch;
  batch.swap(pending_);
  const FieldParams& f = field();
  const uint8_t me = static_cast<uint8_t>(party());

  size_t n_mul = 0;
  size_t n_and = 0;
  for (const auto* r : batch) {
    if (r->kind == Kind::kMul) n_mul += r->size();
    if (r->kind == Kind::kAnd) n_and += r->size();
  }
  // Correlated randomness is drawn in request order, which is identical at
  // all three parties because they run the same program.
  std::vector<FieldElement> zero = tape_->ZeroShares(n_mul);
  BitVector zero_bits = tape_->ZeroBits(n_and);
  size_t zi = 0;
  size_t zb = 0;

  ByteWriter to_next;
  ByteWriter to_prev;
  bool send_next = false;
  bool send_prev = false;
  std::vector<std::vector<FieldElement>> local_t(batch.size());
  std::vector<BitVector> local_bits(batch.size());
  std::vector<std::vector<CubeTuple>> tuples(batch.size());

  for (size_t k = 0; k < batch.size(); ++k) {
    EngineRequest& r = *batch[k];
    switch (r.kind) {
      case Kind::kMul: {
        auto& t = local_t[k];
        t.reserve(r.x.size());
        for (size_t i = 0; i < r.x.size(); ++i) {
          const RepShare& a = r.x[i];
          const RepShare& b = r.y[i];
          FieldElement v = a.lo * b.lo + a.lo * b.hi + a.hi * b.lo + zero[zi++];
          v.EncodeTo(to_prev);
          t.push_back(v);
        }
        send_prev = true;
        stats().mults += r.x.size();
        break;
      }
      case Kind::kAnd: {
        size_t m = r.bx.size();
        BitVector t = (r.bx.lo & r.by.lo) ^ (r.bx.lo & r.by.hi) ^ (r.bx.hi & r.by.lo) ^ zero_bits.Slice(zb, m);
        zb += m;
        to_prev.Raw(t.ToBytes());
        local_bits[k] = std::move(t);
        send_prev = true;
        stats().and_gates += m;
        break;
      }
      case Kind::kOpen:
        for (const auto& s : r.x) s.lo.EncodeTo(to_next);
        send_next = true;
        stats().opens += r.x.size();
        break;
      case Kind::kCheckedOpen:
        for (const auto& s : r.x) s.lo.EncodeTo(to_next);
        for (const auto& s : r.x) s.hi.EncodeTo(to_prev);
        send_next = send_prev = true;
        stats().opens += r.x.size();
        break;
      case Kind::kOpenBits:
        to_next.Raw(r.bx.lo.ToBytes());
        send_next = true;
        stats().opens += r.bx.size();
        break;
      case Kind::kCube: {
        tuples[k] = tape_->Cubes(r.x.size());
        for (size_t i = 0; i < r.x.size(); ++i) (r.x[i] - tuples[k][i].s).lo.EncodeTo(to_next);
        send_next = true;
        stats().cubes += r.x.size();
        break;
      }
    }
  }

  SessionChannel::LayerOut out;
  if (send_next) out.to_next = std::move(to_next).bytes();
  if (send_prev) out.to_prev = std::move(to_prev).bytes();
  SessionChannel::LayerIn in = channel_->SendLayer(std::move(out));
  ByteReader from_prev(in.from_prev);
  ByteReader from_next(in.from_next);

  auto read_bits = [](ByteReader& rd, size_t m) {
    return BitVector::FromBytes(rd.Raw((m + 7) / 8), m);
  };

  for (size_t k = 0; k < batch.size(); ++k) {
    EngineRequest& r = *batch[k];
    switch (r.kind) {
      case Kind::kMul: {
        r.out_shares.reserve(r.x.size());
        for (size_t i = 0; i < r.x.size(); ++i) {
          FieldElement next_t = FieldElement::Read(f, from_next);
          r.out_shares.push_back(RepShare{me, local_t[k][i], next_t});
        }
        break;
      }
      case Kind::kAnd: {
        BitVector next_t = read_bits(from_next, r.bx.size());
        r.out_bits = BitShares{me, std::move(local_bits[k]), std::move(next_t)};
        break;
      }
      case Kind::kOpen:
        r.out_values.reserve(r.x.size());
        for (const auto& s : r.x) r.out_values.push_back(s.lo + s.hi + FieldElement::Read(f, from_prev));
        break;
      case Kind::kCheckedOpen: {
        std::vector<FieldElement> via_prev;
        via_prev.reserve(r.x.size());
        for (size_t i = 0; i < r.x.size(); ++i) via_prev.push_back(FieldElement::Read(f, from_prev));
        r.out_values.reserve(r.x.size());
        for (size_t i = 0; i < r.x.size(); ++i) {
          FieldElement via_next = FieldElement::Read(f, from_next);
          if (!(via_next == via_prev[i])) {
            throw Error(ErrorCode::kIntegrity, "peers disagree on a replicated component during open");
          }
          r.out_values.push_back(r.x[i].lo + r.x[i].hi + via_prev[i]);
        }
        break;
      }
      case Kind::kOpenBits:
        r.out_bit_values = r.bx.lo ^ r.bx.hi ^ read_bits(from_prev, r.bx.size());
        break;
      case Kind::kCube: {
        FieldElement three(f, 3);
        r.out_shares.reserve(r.x.size());
        for (size_t i = 0; i < r.x.size(); ++i) {
          RepShare masked = r.x[i] - tuples[k][i].s;
          FieldElement e = masked.lo + masked.hi + FieldElement::Read(f, from_prev);
          const CubeTuple& c = tuples[k][i];
          // (s + e)^3 = s^3 + 3e s^2 + 3e^2 s + e^3
          RepShare y = c.s3 + c.s2 * (three * e) + c.s * (three * e * e);
          r.out_shares.push_back(y.AddPublic(e * e * e));
        }
        break;
      }
    }
  }
  from_prev.ExpectDone();
  from_next.ExpectDone();
  for (auto* r : batch) ready_.push_back(r->waiter);
}

Task<RepShare> Mul1(Engine& e, RepShare x, RepShare y) {
  auto out = co_await e.Mul({std::move(x)}, {std::move(y)});
  co_return out[0];
}

Task<FieldElement> Open1(Engine& e, RepShare x) {
  auto out = co_await e.Open({std::move(x)});
  co_return out[0];
}

}  // namespace vsa
