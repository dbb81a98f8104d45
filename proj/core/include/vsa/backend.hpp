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

// Which MPC construction computes access tokens: MiMC over F_p with HtMAC
// tags, or AES-128 Bristol circuits over GF(2) with CBC-MAC tags.

#pragma once

#include <cstdint>
#include <string_view>

namespace vsa {

enum class Backend : uint8_t { kMimc = 1, kAes = 2 };

std::string_view BackendName(Backend backend);
// "mimc" or "aes"; Error(kInvalidArgument) otherwise.
Backend ParseBackend(std::string_view name);
// Error(kDecode) for unknown wire values.
Backend BackendFromByte(uint8_t b);

}  // namespace vsa
