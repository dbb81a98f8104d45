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

#include "vsa/backend.hpp"

#include <string>

#include "vsa/error.hpp"

namespace vsa {

std::string_view BackendName(Backend backend) { return backend == Backend::kAes ? "aes" : "mimc"; }

Backend ParseBackend(std::string_view name) {
  if (name == "mimc") return Backend::kMimc;
  if (name == "aes") return Backend::kAes;
  throw Error(ErrorCode::kInvalidArgument, "unknown backend '" + std::string(name) + "' (mimc or aes)");
}

Backend BackendFromByte(uint8_t b) {
  if (b != static_cast<uint8_t>(Backend::kMimc) && b != static_cast<uint8_t>(Backend::kAes)) {
    throw Error(ErrorCode::kDecode, "unknown backend id " + std::to_string(b));
  }
  return static_cast<Backend>(b);
}

}  // namespace vsa
