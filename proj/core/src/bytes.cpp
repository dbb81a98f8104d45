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

#include "vsa/bytes.hpp"

#include <openssl/evp.h>

#include "vsa/error.hpp"

namespace vsa {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParameterMismatch: return "parameter-mismatch";
    case ErrorCode::kDivisionByZero: return "division-by-zero";
    case ErrorCode::kDecode: return "decode";
    case ErrorCode::kPreprocessingExhausted: return "preprocessing-exhausted";
    case ErrorCode::kIntegrity: return "integrity";
    case ErrorCode::kSessionAbort: return "session-abort";
    case ErrorCode::kProtocolDesync: return "protocol-desync";
    case ErrorCode::kConnect: return "connect";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kCounterReuse: return "counter-reuse";
    case ErrorCode::kTagInvalid: return "tag-invalid";
    case ErrorCode::kDuplicate: return "duplicate";
    case ErrorCode::kNotFound: return "not-found";
    case ErrorCode::kRefused: return "refused";
    case ErrorCode::kCrypto: return "crypto";
    case ErrorCode::kStorage: return "storage";
    case ErrorCode::kInvalidArgument: return "invalid-argument";
  }
  return "unknown";
}

std::string ToHex(ByteSpan data) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (uint8_t b : data) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 15]);
  }
  return out;
}

namespace {

int HexValue(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

Bytes FromHex(std::string_view hex) {
  if (hex.size() % 2 != 0) throw Error(ErrorCode::kDecode, "odd-length hex string");
  Bytes out(hex.size() / 2);
  for (size_t i = 0; i < out.size(); ++i) {
    int hi = HexValue(hex[2 * i]);
    int lo = HexValue(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw Error(ErrorCode::kDecode, "invalid hex digit");
    out[i] = static_cast<uint8_t>(hi << 4 | lo);
  }
  return out;
}

std::string ToBase64(ByteSpan data) {
  std::string out(4 * ((data.size() + 2) / 3), '\0');
  int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), data.data(),
                          static_cast<int>(data.size()));
  out.resize(static_cast<size_t>(n));
  return out;
}

Bytes FromBase64(std::string_view b64) {
  if (b64.size() % 4 != 0) throw Error(ErrorCode::kDecode, "base64 length not a multiple of 4");
  Bytes out(3 * b64.size() / 4);
  int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(b64.data()),
                          static_cast<int>(b64.size()));
  if (n < 0) throw Error(ErrorCode::kDecode, "invalid base64");
  // EVP_DecodeBlock keeps the zero bytes produced by '=' padding.
  size_t pad = 0;
  if (!b64.empty() && b64.back() == '=') ++pad;
  if (b64.size() > 1 && b64[b64.size() - 2] == '=') ++pad;
  out.resize(static_cast<size_t>(n) - pad);
  return out;
}

uint64_t ByteReader::Le(int n) {
  if (remaining() < static_cast<size_t>(n)) throw Error(ErrorCode::kDecode, "truncated input");
  uint64_t v = 0;
  for (int i = 0; i < n; ++i) v |= static_cast<uint64_t>(data_[pos_ + i]) << (8 * i);
  pos_ += static_cast<size_t>(n);
  return v;
}

uint8_t ByteReader::U8() { return static_cast<uint8_t>(Le(1)); }
uint16_t ByteReader::U16() { return static_cast<uint16_t>(Le(2)); }
uint32_t ByteReader::U32() { return static_cast<uint32_t>(Le(4)); }
uint64_t ByteReader::U64() { return Le(8); }

ByteSpan ByteReader::Raw(size_t n) {
  if (remaining() < n) throw Error(ErrorCode::kDecode, "truncated input");
  ByteSpan out = data_.subspan(pos_, n);
  pos_ += n;
  return out;
}

std::string ByteReader::Str(size_t n) {
  ByteSpan raw = Raw(n);
  return {raw.begin(), raw.end()};
}

void ByteReader::ExpectDone() const {
  if (!done()) throw Error(ErrorCode::kDecode, "trailing bytes");
}

}  // namespace vsa
