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

#include "common.hpp"

#include <sys/stat.h>

#include <cctype>
#include <charconv>
#include <chrono>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include "vsa/bytes.hpp"
#include "vsa/error.hpp"

namespace vsa::cli {

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kNotFound, "cannot read " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void WriteFile(const std::filesystem::path& path, std::string_view text, bool secret) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kStorage, "cannot write " + tmp.string());
    if (secret) ::chmod(tmp.c_str(), 0600);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out.flush()) throw Error(ErrorCode::kStorage, "short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

json ReadJson(const std::filesystem::path& path) {
  json j = json::parse(ReadFile(path), nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::kParse, path.string() + " is not JSON");
  return j;
}

std::string ReadTrimmed(const std::filesystem::path& path) {
  std::string text = ReadFile(path);
  auto space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
  while (!text.empty() && space(text.back())) text.pop_back();
  size_t start = 0;
  while (start < text.size() && space(text[start])) ++start;
  return text.substr(start);
}

std::string ReadInput(const std::string& path) {
  if (path != "-") return ReadFile(path);
  std::ostringstream s;
  s << std::cin.rdbuf();
  return s.str();
}

void WriteOutput(const std::string& path, std::string_view text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    if (text.empty() || text.back() != '\n') std::cout << '\n';
    std::cout.flush();
    return;
  }
  WriteFile(path, std::string(text) + (text.empty() || text.back() != '\n' ? "\n" : ""));
}

std::vector<std::string> SplitList(std::string_view text, char sep) {
  std::vector<std::string> out;
  size_t start = 0;
  while (start <= text.size()) {
    size_t end = text.find(sep, start);
    if (end == std::string_view::npos) end = text.size();
    if (end > start) out.emplace_back(text.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

std::array<std::string, 3> ThreeUrls(std::string_view text) {
  auto parts = SplitList(text);
  if (parts.size() != 3) throw Error(ErrorCode::kInvalidArgument, "expected three comma-separated server URLs");
  return {parts[0], parts[1], parts[2]};
}

Endpoint ParseEndpoint(std::string_view host_port) {
  size_t colon = host_port.rfind(':');
  if (colon == std::string_view::npos || colon == 0) {
    throw Error(ErrorCode::kInvalidArgument, "expected host:port, got '" + std::string(host_port) + "'");
  }
  Endpoint e;
  e.host = std::string(host_port.substr(0, colon));
  auto digits = host_port.substr(colon + 1);
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), e.port);
  if (ec != std::errc() || ptr != digits.data() + digits.size()) {
    throw Error(ErrorCode::kInvalidArgument, "bad port in '" + std::string(host_port) + "'");
  }
  return e;
}

json BookingToJson(const BookingDetails& bd) {
  auto packed = bd.Pack();
  return {{"packed", ToHex(packed)},
          {"cert_hash", ToHex(bd.cert_hash)},
          {"vehicle_id", bd.vehicle_id},
          {"location", bd.location},
          {"start", bd.conditions.start},
          {"end", bd.conditions.end},
          {"revision", bd.conditions.revision()},
          {"revoked", bd.conditions.revoked()},
          {"access_rights", bd.access_rights},
          {"booking_id", bd.booking_id}};
}

BookingDetails BookingFromJson(const json& j) {
  if (!j.is_object() || !j.contains("packed") || !j["packed"].is_string()) {
    throw Error(ErrorCode::kParse, "booking JSON lacks 'packed'");
  }
  return BookingDetails::Unpack(FromHex(j["packed"].get<std::string>()));
}

uint64_t UnixSeconds() {
  return static_cast<uint64_t>(
      std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch()).count());
}

}  // namespace vsa::cli
