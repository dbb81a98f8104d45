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

#include "vsa/messages.hpp"

#include <gtest/gtest.h>

#include "json.hpp"

namespace vsa {
namespace {

std::vector<Message> Samples() {
  SessionId sid = SessionIdFromSeed(1);
  return {
      SesKGenReq{7, Backend::kAes},
      SesKGenAck{7, {Bytes{1}, Bytes{2, 3}, Bytes{}}},
      AtGenReq{sid, 42, Backend::kMimc, Bytes{1, 2}, Bytes{3}},
      AtPubReq{sid, Bytes{4, 5, 6}, Bytes(17, 9)},
      MPubAck{sid, 12},
      AtPubAck{sid, 12},
      AccessChallenge{7, Block128{1, 2, 3}},
      AccessReq{7, 1001, uint8_t{1}, Block128{4}, Bytes{1}, Bytes{2}, Bytes{3}},
      AccessConfirm{7, 1'700'000'000, Bytes(64, 1)},
  };
}

TEST(Messages, RoundTrip) {
  for (const Message& m : Samples()) {
    std::string text = ToJson(m);
    Message back = ParseMessage(text);
    EXPECT_EQ(back, m) << text;
    auto j = nlohmann::json::parse(text);
    EXPECT_EQ(j["type"], std::string(MessageTypeName(m)));
  }
}

TEST(Messages, ParseAs) {
  std::string text = ToJson(MPubAck{SessionIdFromSeed(2), 3});
  EXPECT_EQ(ParseMessageAs<MPubAck>(text).ts, 3u);
  EXPECT_THROW(ParseMessageAs<AtPubAck>(text), Error);
}

void ExpectParseError(const std::string& text) {
  try {
    ParseMessage(text);
    FAIL() << text;
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParse) << text;
  }
}

TEST(Messages, RejectsSchemaViolations) {
  const std::string sid(32, 'a');
  ExpectParseError("not json");
  ExpectParseError("[1,2]");
  ExpectParseError(R"({"booking_id": 1})");
  ExpectParseError(R"({"type": "NOPE"})");
  ExpectParseError(R"({"type": "SES_K_GEN_REQ", "booking_id": 1})");
  ExpectParseError(R"({"type": "SES_K_GEN_REQ", "booking_id": -1, "backend": "mimc"})");
  ExpectParseError(R"({"type": "SES_K_GEN_REQ", "booking_id": 4294967296, "backend": "mimc"})");
  ExpectParseError(R"({"type": "SES_K_GEN_REQ", "booking_id": "1", "backend": "mimc"})");
  ExpectParseError(R"({"type": "SES_K_GEN_REQ", "booking_id": 1, "backend": "rasta"})");
  ExpectParseError(R"({"type": "SES_K_GEN_REQ", "booking_id": 1, "backend": "mimc", "extra": 0})");
  ExpectParseError(R"({"type": "M_PUB_ACK", "session_id": "abc", "ts": 1})");
  ExpectParseError(R"({"type": "M_PUB_ACK", "session_id": ")" + std::string(32, 'z') + R"(", "ts": 1})");
  ExpectParseError(R"({"type": "AT_PUB_REQ", "session_id": ")" + sid + R"(", "c": "@@@", "tag": ""})");
  ExpectParseError(R"({"type": "SES_K_GEN_ACK", "booking_id": 1, "bundles": ["", ""]})");
  ExpectParseError(R"({"type": "ACCESS_REQ", "booking_id": 1, "vehicle_id": 2, "action": 256, "challenge": ")" +
                   sid + R"(", "token": "", "certificate": "", "challenge_signature": ""})");
}

TEST(Messages, GenerateAndRevokeLookAlike) {
  // Generation and revocation go through the same message types; only
  // payload bytes differ, never the set of fields.
  SessionId a = SessionIdFromSeed(3), b = SessionIdFromSeed(4);
  auto ja = nlohmann::json::parse(ToJson(AtPubReq{a, Bytes(200, 1), Bytes(17, 2)}));
  auto jb = nlohmann::json::parse(ToJson(AtPubReq{b, Bytes(200, 3), Bytes(17, 4)}));
  std::vector<std::string> ka, kb;
  for (auto& it : ja.items()) ka.push_back(it.key() + ":" + std::to_string(it.value().dump().size()));
  for (auto& it : jb.items()) kb.push_back(it.key() + ":" + std::to_string(it.value().dump().size()));
  EXPECT_EQ(ka, kb);
}

}  // namespace
}  // namespace vsa
