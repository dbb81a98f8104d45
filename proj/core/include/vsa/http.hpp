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

// Small JSON-over-HTTP helpers shared by the ledger and server control
// planes. Failures travel as {"code": "<error code>", "error": "<text>"}
// with a matching HTTP status, and are rethrown as vsa::Error by clients.

#pragma once

#include <chrono>
#include <string>
#include <string_view>

#include "vsa/error.hpp"

namespace vsa {

struct HttpResponse {
  int status = 0;
  std::string body;
};

int HttpStatusFor(ErrorCode code);
std::string ErrorBody(const Error& e);
std::string ErrorBody(ErrorCode code, std::string_view what);
// Error(kInvalidArgument) for unknown names.
ErrorCode ParseErrorCode(std::string_view name);

class HttpClient {
 public:
  // `base_url` like "http://127.0.0.1:8080".
  explicit HttpClient(std::string base_url, std::chrono::milliseconds timeout = std::chrono::seconds(30));

  // Error(kConnect) when no response arrives.
  HttpResponse Get(const std::string& path) const;
  HttpResponse Post(const std::string& path, const std::string& json_body) const;

  // Body of a 2xx response; otherwise the carried error is thrown.
  std::string GetOk(const std::string& path) const;
  std::string PostOk(const std::string& path, const std::string& json_body) const;

  const std::string& base_url() const { return base_url_; }

 private:
  std::string base_url_;
  std::chrono::milliseconds timeout_;
};

// Throws the error carried by a non-2xx response.
void ThrowIfError(const HttpResponse& r, std::string_view context);

}  // namespace vsa
