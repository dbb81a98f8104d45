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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vsa {

// Every failure the library reports is a vsa::Error carrying one of these
// codes, so callers (and tests) can branch on the kind of failure without
// parsing messages.
enum class ErrorCode {
  kParameterMismatch,
  kDivisionByZero,
  kDecode,
  kPreprocessingExhausted,
  kIntegrity,
  kSessionAbort,
  kProtocolDesync,
  kConnect,
  kParse,
  kCounterReuse,
  kTagInvalid,
  kDuplicate,
  kNotFound,
  kRefused,
  kCrypto,
  kStorage,
  kInvalidArgument,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Parse failures keep the 1-based line number of the offending input line.
class ParseError : public Error {
 public:
  ParseError(size_t line, const std::string& what)
      : Error(ErrorCode::kParse, "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  size_t line() const noexcept { return line_; }

 private:
  size_t line_;
};

}  // namespace vsa
