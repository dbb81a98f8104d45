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

#include "vsa/http.hpp"

#include "httplib.h"
#include "json.hpp"

namespace vsa {
namespace {

constexpr ErrorCode kAllCodes[] = {
    ErrorCode::kParameterMismatch, ErrorCode::kDivisionByZero, ErrorCode::kDecode,
    ErrorCode::kPreprocessingExhausted, ErrorCode::kIntegrity, ErrorCode::kSessionAbort,
    ErrorCode::kProtocolDesync, ErrorCode::kConnect, ErrorCode::kParse,
    ErrorCode::kCounterReuse, ErrorCode::kTagInvalid, ErrorCode::kDuplicate,
    ErrorCode::kNotFound, ErrorCode::kRefused, ErrorCode::kCrypto,
    ErrorCode::kStorage, ErrorCode::kInvalidArgument,
};

httplib::Client MakeClient(const std::string& url, std::chrono::milliseconds timeout) {
  httplib::Client c(url);
  auto secs = timeout.count() / 1000;
  auto usecs = (timeout.count() % 1000) * 1000;
  c.set_connection_timeout(secs, usecs);
  c.set_read_timeout(secs, usecs);
  c.set_write_timeout(secs, usecs);
  return c;
}

HttpResponse Convert(const httplib::Result& r, const std::string& url, const std::string& path) {
  if (!r) throw Error(ErrorCode::kConnect, url + path + ": " + httplib::to_string(r.error()));
  return {r->status, r->body};
}

}  // namespace

int HttpStatusFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse:
    case ErrorCode::kDecode:
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kCrypto:
    case ErrorCode::kParameterMismatch:
      return 400;
    case ErrorCode::kNotFound:
      return 404;
    case ErrorCode::kDuplicate:
    case ErrorCode::kRefused:
    case ErrorCode::kCounterReuse:
      return 409;
    case ErrorCode::kStorage:
    case ErrorCode::kPreprocessingExhausted:
      return 503;
    case ErrorCode::kSessionAbort:
    case ErrorCode::kConnect:
      return 504;
    default:
      return 500;
  }
}

std::string ErrorBody(ErrorCode code, std::string_view what) {
  return nlohmann::json{{"code", ErrorCodeName(code)}, {"error", what}}.dump();
}

std::string ErrorBody(const Error& e) { return ErrorBody(e.code(), e.what()); }

ErrorCode ParseErrorCode(std::string_view name) {
  for (ErrorCode c : kAllCodes) {
    if (ErrorCodeName(c) == name) return c;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown error code '" + std::string(name) + "'");
}

void ThrowIfError(const HttpResponse& r, std::string_view context) {
  if (r.status >= 200 && r.status < 300) return;
  auto j = nlohmann::json::parse(r.body, nullptr, false);
  ErrorCode code = ErrorCode::kProtocolDesync;
  std::string text = "HTTP " + std::to_string(r.status);
  if (j.is_object() && j.contains("code") && j["code"].is_string()) {
    try {
      code = ParseErrorCode(j["code"].get<std::string>());
    } catch (const Error&) {
    }
    if (j.contains("error") && j["error"].is_string()) text = j["error"].get<std::string>();
    const std::string prefix = std::string(ErrorCodeName(code)) + ": ";
    if (text.starts_with(prefix)) text.erase(0, prefix.size());
  }
  throw Error(code, std::string(context) + ": " + text);
}

HttpClient::HttpClient(std::string base_url, std::chrono::milliseconds timeout)
    : base_url_(std::move(base_url)), timeout_(timeout) {}

HttpResponse HttpClient::Get(const std::string& path) const {
  auto c = MakeClient(base_url_, timeout_);
  return Convert(c.Get(path), base_url_, path);
}

HttpResponse HttpClient::Post(const std::string& path, const std::string& json_body) const {
  auto c = MakeClient(base_url_, timeout_);
  return Convert(c.Post(path, json_body, "application/json"), base_url_, path);
}

std::string HttpClient::GetOk(const std::string& path) const {
  HttpResponse r = Get(path);
  ThrowIfError(r, base_url_ + path);
  return std::move(r.body);
}

std::string HttpClient::PostOk(const std::string& path, const std::string& json_body) const {
  HttpResponse r = Post(path, json_body);
  ThrowIfError(r, base_url_ + path);
  return std::move(r.body);
}

}  // namespace vsa
