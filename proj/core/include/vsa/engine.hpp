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

// Per-party execution engine for share circuits.
//
// Circuits are written as coroutines (Task<T>). Every interactive primitive
// (multiplication, AND, open, one-round cube) suspends the calling coroutine
// and queues a request. When no coroutine can make progress, the engine
// flushes all queued requests as one communication layer, so independent
// branches composed with WhenAll share rounds automatically. The round count
// of a circuit is therefore its multiplicative depth.
//
// One engine drives one session and is single-threaded.

#pragma once

#include <chrono>
#include <coroutine>
#include <cstddef>
#include <deque>
#include <exception>
#include <optional>
#include <tuple>
#include <utility>
#include <vector>

#include "vsa/error.hpp"
#include "vsa/repshare.hpp"
#include "vsa/tape.hpp"
#include "vsa/transport.hpp"

namespace vsa {

namespace detail {

struct PromiseBase {
  std::coroutine_handle<> continuation;
  std::exception_ptr error;

  std::suspend_always initial_suspend() noexcept { return {}; }
  struct FinalAwaiter {
    bool await_ready() noexcept { return false; }
    template <class P>
    std::coroutine_handle<> await_suspend(std::coroutine_handle<P> h) noexcept {
      auto c = h.promise().continuation;
      return c ? c : std::noop_coroutine();
    }
    void await_resume() noexcept {}
  };
  FinalAwaiter final_suspend() noexcept { return {}; }
  void unhandled_exception() { error = std::current_exception(); }
};

template <class T>
struct ValuePromise : PromiseBase {
  std::optional<T> value;
  template <class U>
  void return_value(U&& v) {
    value.emplace(std::forward<U>(v));
  }
  T Take() {
    if (error) std::rethrow_exception(error);
    return std::move(*value);
  }
};

template <>
struct ValuePromise<void> : PromiseBase {
  void return_void() {}
  void Take() {
    if (error) std::rethrow_exception(error);
  }
};

}  // namespace detail

// Lazily started coroutine producing a T. Awaiting a Task runs it to
// completion (possibly across several layers) and yields its result.
template <class T = void>
class [[nodiscard]] Task {
 public:
  struct promise_type : detail::ValuePromise<T> {
    Task get_return_object() { return Task(std::coroutine_handle<promise_type>::from_promise(*this)); }
  };
  using handle_type = std::coroutine_handle<promise_type>;

  Task(Task&& o) noexcept : h_(std::exchange(o.h_, {})) {}
  Task& operator=(Task&& o) noexcept {
    if (this != &o) {
      if (h_) h_.destroy();
      h_ = std::exchange(o.h_, {});
    }
    return *this;
  }
  ~Task() {
    if (h_) h_.destroy();
  }

  bool await_ready() const noexcept { return false; }
  std::coroutine_handle<> await_suspend(std::coroutine_handle<> c) noexcept {
    h_.promise().continuation = c;
    return h_;
  }
  T await_resume() { return h_.promise().Take(); }

  handle_type handle() const { return h_; }
  bool done() const { return h_ && h_.done(); }
  bool failed() const { return h_ && h_.promise().error != nullptr; }
  // Result of a finished task (rethrows its exception).
  T Take() { return h_.promise().Take(); }

 private:
  explicit Task(handle_type h) : h_(h) {}
  handle_type h_;
};

class Engine;

// One queued interactive operation; lives inside the awaiting coroutine's
// frame while it is suspended.
struct EngineRequest {
  enum class Kind { kMul, kAnd, kOpen, kCheckedOpen, kOpenBits, kCube };

  Kind kind = Kind::kMul;
  std::vector<RepShare> x, y;
  BitShares bx, by;
  std::coroutine_handle<> waiter;

  std::vector<RepShare> out_shares;
  std::vector<FieldElement> out_values;
  BitShares out_bits;
  BitVector out_bit_values;

  size_t size() const {
    return kind == Kind::kAnd || kind == Kind::kOpenBits ? bx.size() : x.size();
  }
};

template <EngineRequest::Kind K>
class OpAwaiter {
 public:
  OpAwaiter(Engine& engine, EngineRequest req) : engine_(&engine), req_(std::move(req)) {}

  bool await_ready() const noexcept { return req_.size() == 0; }
  void await_suspend(std::coroutine_handle<> h);
  auto await_resume() {
    using Kind = EngineRequest::Kind;
    if constexpr (K == Kind::kMul || K == Kind::kCube) {
      return std::move(req_.out_shares);
    } else if constexpr (K == Kind::kOpen || K == Kind::kCheckedOpen) {
      return std::move(req_.out_values);
    } else if constexpr (K == Kind::kAnd) {
      if (req_.size() == 0) return EmptyBitShares(req_.bx.party, 0);
      return std::move(req_.out_bits);
    } else {
      return std::move(req_.out_bit_values);
    }
  }

 private:
  Engine* engine_;
  EngineRequest req_;
};

class Engine {
 public:
  using Kind = EngineRequest::Kind;

  Engine(SessionChannel& channel, TapeReader& tape);

  int party() const { return channel_->party(); }
  const FieldParams& field() const { return tape_->field(); }
  SessionChannel& channel() { return *channel_; }
  TapeReader& tape() { return *tape_; }
  TranscriptStats& stats() { return channel_->stats(); }

  // Elementwise x[i] * y[i]; one round, one element sent per product.
  OpAwaiter<Kind::kMul> Mul(std::vector<RepShare> x, std::vector<RepShare> y);
  // Elementwise AND over packed GF(2) shares.
  OpAwaiter<Kind::kAnd> And(BitShares x, BitShares y);
  // Reveals values to all three parties.
  OpAwaiter<Kind::kOpen> Open(std::vector<RepShare> x);
  // Open that also cross-checks the replicated component received from the
  // other peer; a mismatch raises Error(kIntegrity).
  OpAwaiter<Kind::kCheckedOpen> CheckedOpen(std::vector<RepShare> x);
  OpAwaiter<Kind::kOpenBits> OpenBits(BitShares x);
  // x^3 in one round using a preprocessed tuple (s, s^2, s^3): open x - s,
  // then expand (s + e)^3 locally.
  OpAwaiter<Kind::kCube> CubeWithTuple(std::vector<RepShare> x);

  // Share of a public constant / public bit vector held by this party.
  RepShare Constant(const FieldElement& c) const { return ConstantShare(party(), c); }
  RepShare Constant(uint64_t c) const { return ConstantShare(party(), FieldElement(field(), c)); }
  BitShares ConstantBits(const BitVector& c) const { return ConstantBitShares(party(), c); }

  // Drives `task` to completion. Any failure aborts the session towards the
  // peers before it propagates.
  template <class T>
  T Run(Task<T> task) {
    auto start = std::chrono::steady_clock::now();
    try {
      Drive(task.handle());
      if (task.failed()) channel_->Abort();
    } catch (...) {
      channel_->Abort();
      throw;
    }
    stats().wall_time += std::chrono::steady_clock::now() - start;
    stats().preprocessing = tape_->consumed();
    return task.Take();
  }

  void Schedule(std::coroutine_handle<> h) { ready_.push_back(h); }
  void Enqueue(EngineRequest* req) { pending_.push_back(req); }

 private:
  void Drive(std::coroutine_handle<> root);
  void Flush();

  SessionChannel* channel_;
  TapeReader* tape_;
  std::deque<std::coroutine_handle<>> ready_;
  std::vector<EngineRequest*> pending_;
};

template <EngineRequest::Kind K>
void OpAwaiter<K>::await_suspend(std::coroutine_handle<> h) {
  req_.waiter = h;
  engine_->Enqueue(&req_);
}

namespace detail {

// Fire-and-forget frame used to await one child of a join; it stays
// suspended at its end until the join state destroys it.
struct JoinHelper {
  struct promise_type {
    JoinHelper get_return_object() { return {std::coroutine_handle<promise_type>::from_promise(*this)}; }
    std::suspend_always initial_suspend() noexcept { return {}; }
    std::suspend_always final_suspend() noexcept { return {}; }
    void return_void() {}
    void unhandled_exception() { std::terminate(); }
  };
  std::coroutine_handle<promise_type> h;
};

struct JoinState {
  Engine* engine = nullptr;
  size_t remaining = 0;
  std::coroutine_handle<> parent;
  std::exception_ptr error;
  std::vector<std::coroutine_handle<>> helpers;

  JoinState() = default;
  JoinState(const JoinState&) = delete;
  JoinState& operator=(const JoinState&) = delete;
  ~JoinState() {
    for (auto h : helpers) h.destroy();
  }
};

template <class T>
JoinHelper JoinChild(Task<T>& task, std::optional<T>& slot, JoinState& st) {
  try {
    slot.emplace(co_await task);
  } catch (...) {
    if (!st.error) st.error = std::current_exception();
  }
  if (--st.remaining == 0) st.engine->Schedule(st.parent);
}

inline JoinHelper JoinChildVoid(Task<void>& task, JoinState& st) {
  try {
    co_await task;
  } catch (...) {
    if (!st.error) st.error = std::current_exception();
  }
  if (--st.remaining == 0) st.engine->Schedule(st.parent);
}

struct JoinAwaiter {
  JoinState& st;
  bool await_ready() const noexcept { return st.remaining == 0; }
  void await_suspend(std::coroutine_handle<> h) {
    st.parent = h;
    for (auto c : st.helpers) st.engine->Schedule(c);
  }
  void await_resume() const {
    if (st.error) std::rethrow_exception(st.error);
  }
};

template <class... Ts, size_t... I>
void StartChildren(JoinState& st, std::tuple<Task<Ts>...>& tasks, std::tuple<std::optional<Ts>...>& slots,
                   std::index_sequence<I...>) {
  (st.helpers.push_back(JoinChild(std::get<I>(tasks), std::get<I>(slots), st).h), ...);
}

template <class... Ts, size_t... I>
std::tuple<Ts...> CollectSlots(std::tuple<std::optional<Ts>...>& slots, std::index_sequence<I...>) {
  return std::tuple<Ts...>(std::move(*std::get<I>(slots))...);
}

}  // namespace detail

// Runs the tasks concurrently; their interactive operations share layers.
template <class... Ts>
Task<std::tuple<Ts...>> WhenAll(Engine& engine, Task<Ts>... tasks) {
  std::tuple<Task<Ts>...> owned(std::move(tasks)...);
  std::tuple<std::optional<Ts>...> slots;
  detail::JoinState st;
  st.engine = &engine;
  st.remaining = sizeof...(Ts);
  detail::StartChildren(st, owned, slots, std::index_sequence_for<Ts...>{});
  co_await detail::JoinAwaiter{st};
  co_return detail::CollectSlots(slots, std::index_sequence_for<Ts...>{});
}

template <class T>
Task<std::vector<T>> WhenAllVec(Engine& engine, std::vector<Task<T>> tasks) {
  std::vector<std::optional<T>> slots(tasks.size());
  detail::JoinState st;
  st.engine = &engine;
  st.remaining = tasks.size();
  for (size_t i = 0; i < tasks.size(); ++i) st.helpers.push_back(detail::JoinChild(tasks[i], slots[i], st).h);
  co_await detail::JoinAwaiter{st};
  std::vector<T> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  co_return out;
}

inline Task<void> WhenAllVoid(Engine& engine, std::vector<Task<void>> tasks) {
  detail::JoinState st;
  st.engine = &engine;
  st.remaining = tasks.size();
  for (auto& t : tasks) st.helpers.push_back(detail::JoinChildVoid(t, st).h);
  co_await detail::JoinAwaiter{st};
}

// Single-element conveniences.
Task<RepShare> Mul1(Engine& e, RepShare x, RepShare y);
Task<FieldElement> Open1(Engine& e, RepShare x);

}  // namespace vsa
