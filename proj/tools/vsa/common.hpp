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

// Helpers shared by the vsa subcommands: files, lists, endpoints and the
// JSON form of booking details.

#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "vsa/booking.hpp"
#include "vsa/transport.hpp"

namespace vsa::cli {

using nlohmann::json;

// Exit codes: 0 success, 1 error, 2 a check or access decision said no.
inline constexpr int kExitError = 1;
inline constexpr int kExitDenied = 2;

// Thrown by a subcommand to end the process with `code` after printing.
struct ExitStatus {
  int code;
};

std::string ReadFile(const std::filesystem::path& path);
// Whole-file replace via a temporary and rename; mode 0600 when `secret`.
void WriteFile(const std::filesystem::path& path, std::string_view text, bool secret = false);
json ReadJson(const std::filesystem::path& path);
// File contents without surrounding whitespace (key and certificate files).
std::string ReadTrimmed(const std::filesystem::path& path);

// Reads the file, or stdin for "-".
std::string ReadInput(const std::string& path);
// Writes to the file, or stdout for "" / "-".
void WriteOutput(const std::string& path, std::string_view text);

std::vector<std::string> SplitList(std::string_view text, char sep = ',');
std::array<std::string, 3> ThreeUrls(std::string_view text);
Endpoint ParseEndpoint(std::string_view host_port);

json BookingToJson(const BookingDetails& bd);
// Reads the packed form; the readable fields are only informational.
BookingDetails BookingFromJson(const json& j);

uint64_t UnixSeconds();

}  // namespace vsa::cli
