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

#include "vsa/server_db.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>

#include "json.hpp"
#include "vsa/error.hpp"

namespace vsa {
namespace {

using nlohmann::json;

[[noreturn]] void StorageError(const std::string& what) {
  throw Error(ErrorCode::kStorage, what + ": " + std::strerror(errno));
}

bool HeldBy(const VehicleRow& row, int party) {
  return row.vehicle_id.party == party && row.key.party == party && row.vehicle_id_bits.party == party &&
         row.key_bits.party == party;
}

}  // namespace

ServerDb::ServerDb(const FieldParams& field, int party, std::filesystem::path path)
    : field_(&field), party_(party), path_(std::move(path)) {
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
  fd_ = ::open(path_.c_str(), O_RDWR | O_CREAT | O_APPEND | O_CLOEXEC, 0600);
  if (fd_ < 0) StorageError("cannot open server db " + path_.string());

  std::ifstream in(path_, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string data = ss.str();
  size_t pos = 0, line_no = 0;
  while (pos < data.size()) {
    size_t nl = data.find('\n', pos);
    if (nl == std::string::npos) {
      if (::ftruncate(fd_, static_cast<off_t>(pos)) != 0) StorageError("cannot truncate torn db tail");
      break;
    }
    ++line_no;
    auto where = [&] { return path_.string() + " line " + std::to_string(line_no); };
    json j = json::parse(std::string_view(data).substr(pos, nl - pos), nullptr, false);
    VehicleRow row;
    try {
      if (j.is_discarded()) throw Error(ErrorCode::kParse, "not JSON");
      row = VehicleRow::Decode(field, FromBase64(j.at("row").get<std::string>()));
      if (row.owner_id != j.at("owner_id").get<uint64_t>() || row.index != j.at("index").get<uint32_t>()) {
        throw Error(ErrorCode::kParse, "key does not match the row");
      }
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kStorage, where() + ": " + e.what());
    } catch (const Error& e) {
      throw Error(ErrorCode::kStorage, where() + ": " + e.what());
    }
    if (!HeldBy(row, party_)) throw Error(ErrorCode::kStorage, where() + ": shares of another party");
    auto key = std::make_pair(row.owner_id, row.index);
    if (!rows_.emplace(key, std::move(row)).second) throw Error(ErrorCode::kStorage, where() + ": duplicate row");
    pos = nl + 1;
  }
}

ServerDb::~ServerDb() {
  if (fd_ >= 0) ::close(fd_);
}

void ServerDb::Load(const std::vector<VehicleRow>& rows) {
  std::unique_lock lock(mu_);
  std::set<std::pair<uint64_t, uint32_t>> batch;
  std::string text;
  for (const auto& row : rows) {
    if (!HeldBy(row, party_)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "row " + std::to_string(row.index) + " holds shares for another server");
    }
    auto key = std::make_pair(row.owner_id, row.index);
    if (rows_.contains(key) || !batch.insert(key).second) {
      throw Error(ErrorCode::kDuplicate, "owner " + std::to_string(row.owner_id) + " row " +
                                             std::to_string(row.index) + " is already registered");
    }
    text += json{{"owner_id", row.owner_id}, {"index", row.index}, {"row", ToBase64(row.Encode())}}.dump();
    text += '\n';
  }
  // A failed batch is cut off again so the file never holds half a load.
  const off_t start = ::lseek(fd_, 0, SEEK_END);
  auto fail = [&](const char* what) {
    int saved = errno;
    if (start >= 0 && ::ftruncate(fd_, start) == 0) ::fdatasync(fd_);
    errno = saved;
    StorageError(what);
  };
  std::string_view rest = text;
  while (!rest.empty()) {
    ssize_t n = ::write(fd_, rest.data(), rest.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      fail("db write failed");
    }
    rest.remove_prefix(static_cast<size_t>(n));
  }
  if (::fdatasync(fd_) != 0) fail("db sync failed");
  for (const auto& row : rows) rows_.emplace(std::make_pair(row.owner_id, row.index), row);
}

std::vector<VehicleRow> ServerDb::Rows(uint64_t owner_id) const {
  std::shared_lock lock(mu_);
  std::vector<VehicleRow> out;
  for (auto it = rows_.lower_bound({owner_id, 0}); it != rows_.end() && it->first.first == owner_id; ++it) {
    out.push_back(it->second);
  }
  return out;
}

std::vector<uint32_t> ServerDb::Indices(uint64_t owner_id) const {
  std::shared_lock lock(mu_);
  std::vector<uint32_t> out;
  for (auto it = rows_.lower_bound({owner_id, 0}); it != rows_.end() && it->first.first == owner_id; ++it) {
    out.push_back(it->first.second);
  }
  return out;
}

size_t ServerDb::size() const {
  std::shared_lock lock(mu_);
  return rows_.size();
}

}  // namespace vsa
