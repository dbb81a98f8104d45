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

// Server code must never see cleartext booking handling, the client roles
// or the consumer's key derivation. Checked on the include closure of the
// server sources, following each header into its implementation file.

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <regex>
#include <set>
#include <string>
#include <vector>

namespace {

namespace fs = std::filesystem;

const fs::path kCore = fs::path(VSA_SOURCE_DIR) / "core";

std::vector<std::string> LocalIncludes(const fs::path& file) {
  static const std::regex kInclude(R"re(^\s*#\s*include\s+"vsa/([a-z0-9_]+)\.hpp")re");
  std::vector<std::string> out;
  std::ifstream in(file);
  std::string line;
  std::smatch m;
  while (std::getline(in, line)) {
    if (std::regex_search(line, m, kInclude)) out.push_back(m[1]);
  }
  return out;
}

// Module names (header stems) reachable from the given source stems.
std::set<std::string> Closure(const std::vector<std::string>& roots) {
  std::set<std::string> seen;
  std::vector<std::string> todo(roots.begin(), roots.end());
  while (!todo.empty()) {
    std::string m = todo.back();
    todo.pop_back();
    if (!seen.insert(m).second) continue;
    for (const fs::path& f : {kCore / "include" / "vsa" / (m + ".hpp"), kCore / "src" / (m + ".cpp")}) {
      if (!fs::exists(f)) continue;
      for (auto& dep : LocalIncludes(f)) todo.push_back(dep);
    }
  }
  return seen;
}

const std::vector<std::string> kServerSources = {"server", "server_db", "tape_allocator", "ledger",
                                                  "ledger_service", "http", "session_inputs", "step2"};
const std::vector<std::string> kForbidden = {"booking", "roles", "kdf"};

TEST(ModuleBoundaryTest, ServerClosureExcludesClientModules) {
  ASSERT_TRUE(fs::exists(kCore / "src" / "server.cpp"));
  auto closure = Closure(kServerSources);
  for (const auto& m : kForbidden) EXPECT_FALSE(closure.contains(m)) << "server code reaches " << m << ".hpp";
  // Sanity: the closure did follow links.
  EXPECT_TRUE(closure.contains("transport"));
  EXPECT_TRUE(closure.contains("engine"));
}

TEST(ModuleBoundaryTest, ScannerSeesClientModules) {
  auto closure = Closure({"e2e"});
  for (const auto& m : kForbidden) EXPECT_TRUE(closure.contains(m)) << m;
}

}  // namespace
