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

#include "vsa/tape_allocator.hpp"

#include <unistd.h>

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "vsa/error.hpp"

namespace vsa {
namespace {

using nlohmann::json;

std::array<uint64_t, 4> Dims(const TapeCounts& c) {
  return {c.zero_shares, c.zero_bits, c.random_bits, c.cube_tuples};
}

TapeCounts FromDims(const std::array<uint64_t, 4>& d) { return {d[0], d[1], d[2], d[3]}; }

std::string Describe(const TapeCounts& c) {
  return "zero_shares=" + std::to_string(c.zero_shares) + " zero_bits=" + std::to_string(c.zero_bits) +
         " random_bits=" + std::to_string(c.random_bits) + " cube_tuples=" + std::to_string(c.cube_tuples);
}

}  // namespace

TapeAllocator::TapeAllocator(const TapeCounts& total, std::filesystem::path state)
    : total_(total), state_(std::move(state)) {
  if (std::filesystem::exists(state_)) {
    std::ifstream in(state_);
    std::stringstream ss;
    ss << in.rdbuf();
    json j = json::parse(ss.str(), nullptr, false);
    try {
      if (j.is_discarded()) throw Error(ErrorCode::kParse, "not JSON");
      floor_ = {j.at("zero_shares").get<uint64_t>(), j.at("zero_bits").get<uint64_t>(),
                j.at("random_bits").get<uint64_t>(), j.at("cube_tuples").get<uint64_t>()};
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kStorage, "tape state " + state_.string() + ": " + e.what());
    }
  }
  mark_ = floor_;
}

void TapeAllocator::Persist(const TapeCounts& mark) {
  if (state_.has_parent_path()) std::filesystem::create_directories(state_.parent_path());
  auto tmp = state_;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << json{{"zero_shares", mark.zero_shares},
                {"zero_bits", mark.zero_bits},
                {"random_bits", mark.random_bits},
                {"cube_tuples", mark.cube_tuples}}
               .dump()
        << "\n";
    out.flush();
    if (!out) throw Error(ErrorCode::kStorage, "cannot write tape state " + tmp.string());
  }
  // fsync the file before the rename makes it visible.
  if (FILE* f = std::fopen(tmp.c_str(), "r")) {
    ::fsync(fileno(f));
    std::fclose(f);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, state_, ec);
  if (ec) throw Error(ErrorCode::kStorage, "cannot replace tape state " + state_.string() + ": " + ec.message());
}

TapeAllocation TapeAllocator::Allocate(const TapeCounts& need) {
  std::lock_guard lock(mu_);
  TapeAllocation slice{mark_, mark_ + need};
  if (!total_.Covers(slice.end)) {
    auto t = Dims(total_), m = Dims(mark_);
    std::array<uint64_t, 4> left{};
    for (size_t i = 0; i < 4; ++i) left[i] = t[i] - std::min(t[i], m[i]);
    throw Error(ErrorCode::kPreprocessingExhausted,
                "session needs " + Describe(need) + "; tape has " + Describe(FromDims(left)) + " left");
  }
  Persist(slice.end);
  mark_ = slice.end;
  return slice;
}

void TapeAllocator::Claim(const TapeAllocation& slice, const TapeCounts& need) {
  std::lock_guard lock(mu_);
  auto b = Dims(slice.begin), e = Dims(slice.end), n = Dims(need), f = Dims(floor_);
  for (size_t i = 0; i < 4; ++i) {
    if (e[i] < b[i] || e[i] - b[i] != n[i]) {
      throw Error(ErrorCode::kParameterMismatch, "announced tape slice does not match the session size");
    }
    if (n[i] > 0 && b[i] < f[i]) {
      throw Error(ErrorCode::kParameterMismatch, "announced tape slice was used before a restart");
    }
  }
  if (!total_.Covers(slice.end)) {
    throw Error(ErrorCode::kPreprocessingExhausted, "announced tape slice ends beyond this tape (" +
                                                        Describe(slice.end) + " > " + Describe(total_) + ")");
  }
  for (const auto& other : claimed_) {
    auto ob = Dims(other.begin), oe = Dims(other.end);
    for (size_t i = 0; i < 4; ++i) {
      if (b[i] < e[i] && ob[i] < oe[i] && b[i] < oe[i] && ob[i] < e[i]) {
        throw Error(ErrorCode::kParameterMismatch, "announced tape slice overlaps one already used");
      }
    }
  }
  auto m = Dims(mark_);
  for (size_t i = 0; i < 4; ++i) m[i] = std::max(m[i], e[i]);
  Persist(FromDims(m));
  mark_ = FromDims(m);
  claimed_.push_back(slice);
}

TapeCounts TapeAllocator::remaining() const {
  std::lock_guard lock(mu_);
  auto t = Dims(total_), m = Dims(mark_);
  for (size_t i = 0; i < 4; ++i) t[i] -= std::min(t[i], m[i]);
  return FromDims(t);
}

}  // namespace vsa
