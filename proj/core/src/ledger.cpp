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

#include "vsa/ledger.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <fstream>
#include <mutex>
#include <sstream>

#include "json.hpp"
#include "vsa/error.hpp"

namespace vsa {
namespace {

using nlohmann::json;

uint64_t NowMs() {
  return static_cast<uint64_t>(
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::system_clock::now().time_since_epoch())
          .count());
}

[[noreturn]] void StorageError(const std::string& what) {
  throw Error(ErrorCode::kStorage, what + ": " + std::strerror(errno));
}

}  // namespace

Digest256 LedgerEntry::LineHash() const {
  ByteWriter w;
  w.U64(ts);
  w.U64(wall_ms);
  w.U32(static_cast<uint32_t>(cipher.size()));
  w.Raw(cipher);
  w.U32(static_cast<uint32_t>(tag.size()));
  w.Raw(tag);
  return Sha3_256(w.bytes());
}

std::string LedgerEntry::ToJson() const {
  return json{{"ts", ts}, {"wall_ms", wall_ms}, {"c", ToBase64(cipher)}, {"tag", ToBase64(tag)}}.dump();
}

std::string LedgerEntry::ToLine() const {
  return json{{"ts", ts},
              {"wall_ms", wall_ms},
              {"c", ToBase64(cipher)},
              {"tag", ToBase64(tag)},
              {"hash", ToHex(LineHash())}}
      .dump();
}

LedgerEntry LedgerEntry::FromJson(std::string_view text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error(ErrorCode::kParse, "ledger entry is not a JSON object");
  LedgerEntry e;
  try {
    if (!j.at("ts").is_number_unsigned() || !j.at("wall_ms").is_number_unsigned()) {
      throw Error(ErrorCode::kParse, "ledger entry numbers must be unsigned");
    }
    e.ts = j.at("ts").get<uint64_t>();
    e.wall_ms = j.at("wall_ms").get<uint64_t>();
    e.cipher = FromBase64(j.at("c").get<std::string>());
    e.tag = FromBase64(j.at("tag").get<std::string>());
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::kParse, std::string("ledger entry: ") + ex.what());
  } catch (const Error& ex) {
    throw Error(ErrorCode::kParse, std::string("ledger entry: ") + ex.what());
  }
  if (j.contains("hash")) {
    if (!j["hash"].is_string() || j["hash"].get<std::string>() != ToHex(e.LineHash())) {
      throw Error(ErrorCode::kParse, "ledger line hash mismatch");
    }
  }
  return e;
}

Digest256 LedgerContentHash(ByteSpan cipher, ByteSpan tag) {
  ByteWriter w;
  w.Str("vsa-ledger-content");
  w.U32(static_cast<uint32_t>(cipher.size()));
  w.Raw(cipher);
  w.Raw(tag);
  return Sha3_256(w.bytes());
}

Ledger::Ledger(std::filesystem::path path) : path_(std::move(path)) {
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
  fd_ = ::open(path_.c_str(), O_RDWR | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd_ < 0) StorageError("cannot open ledger " + path_.string());
  Replay();
}

Ledger::~Ledger() {
  if (fd_ >= 0) ::close(fd_);
}

void Ledger::Replay() {
  std::ifstream in(path_, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string data = ss.str();
  size_t pos = 0, line_no = 0;
  while (pos < data.size()) {
    size_t nl = data.find('\n', pos);
    if (nl == std::string::npos) {
      // Torn tail from an interrupted append: drop it.
      if (::ftruncate(fd_, static_cast<off_t>(pos)) != 0) StorageError("cannot truncate torn ledger tail");
      break;
    }
    ++line_no;
    LedgerEntry e;
    try {
      json j = json::parse(std::string_view(data).substr(pos, nl - pos), nullptr, false);
      if (j.is_discarded() || !j.contains("hash")) throw Error(ErrorCode::kParse, "not a ledger line");
      e = LedgerEntry::FromJson(data.substr(pos, nl - pos));
    } catch (const Error& ex) {
      throw Error(ErrorCode::kStorage, path_.string() + " line " + std::to_string(line_no) + ": " + ex.what());
    }
    if (e.ts != entries_.size() + 1) {
      throw Error(ErrorCode::kStorage, path_.string() + " line " + std::to_string(line_no) + ": ts out of sequence");
    }
    auto content = LedgerContentHash(e.cipher, e.tag);
    if (by_content_.contains(content)) {
      throw Error(ErrorCode::kStorage, path_.string() + " line " + std::to_string(line_no) + ": duplicate entry");
    }
    by_content_[content] = e.ts;
    by_tag_.emplace(e.tag, e.ts);
    entries_.push_back(std::move(e));
    pos = nl + 1;
  }
}

void Ledger::Append(const std::string& line, bool torn) {
  std::string_view rest = line;
  if (torn) rest = rest.substr(0, rest.size() / 2);
  while (!rest.empty()) {
    ssize_t n = ::write(fd_, rest.data(), rest.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      StorageError("ledger write failed");
    }
    rest.remove_prefix(static_cast<size_t>(n));
  }
  if (::fdatasync(fd_) != 0) StorageError("ledger sync failed");
}

Ledger::PublishResult Ledger::Publish(ByteSpan cipher, ByteSpan tag) {
  std::unique_lock lock(mu_);
  auto content = LedgerContentHash(cipher, tag);
  if (auto it = by_content_.find(content); it != by_content_.end()) return {it->second, true};
  LedgerEntry e;
  e.ts = entries_.size() + 1;
  e.wall_ms = NowMs();
  e.cipher.assign(cipher.begin(), cipher.end());
  e.tag.assign(tag.begin(), tag.end());
  if (broken_) throw Error(ErrorCode::kStorage, "ledger file state unknown after a failed append; reopen it");
  const Failpoint fp = std::exchange(failpoint_, Failpoint::kNone);
  // Whatever happens from here on, memory may no longer match the file
  // until a replay.
  broken_ = true;
  Append(e.ToLine() + "\n", fp == Failpoint::kTornWrite);
  if (fp == Failpoint::kTornWrite) throw Error(ErrorCode::kStorage, "failpoint: torn write");
  if (fp == Failpoint::kAfterWriteNoAck) throw Error(ErrorCode::kStorage, "failpoint: crashed before ack");
  broken_ = false;
  by_content_[content] = e.ts;
  by_tag_.emplace(e.tag, e.ts);
  entries_.push_back(std::move(e));
  return {entries_.back().ts, false};
}

std::vector<LedgerEntry> Ledger::Since(uint64_t since) const {
  std::shared_lock lock(mu_);
  if (since >= entries_.size()) return {};
  return std::vector<LedgerEntry>(entries_.begin() + static_cast<ptrdiff_t>(since), entries_.end());
}

std::optional<LedgerEntry> Ledger::ByTag(ByteSpan tag) const {
  std::shared_lock lock(mu_);
  auto it = by_tag_.find(Bytes(tag.begin(), tag.end()));
  if (it == by_tag_.end()) return std::nullopt;
  return entries_[it->second - 1];
}

size_t Ledger::size() const {
  std::shared_lock lock(mu_);
  return entries_.size();
}

uint64_t Ledger::last_ts() const { return size(); }

void Ledger::set_failpoint(Failpoint f) {
  std::unique_lock lock(mu_);
  failpoint_ = f;
}

}  // namespace vsa
