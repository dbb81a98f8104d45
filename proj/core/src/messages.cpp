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

#include <limits>
#include <map>
#include <set>

#include "json.hpp"

namespace vsa {
namespace {

using nlohmann::json;

enum class Kind { kU8, kU32, kU64, kBytes, kSession, kBlock, kBackend, kBundles };

using Schema = std::map<std::string, Kind>;

const std::map<std::string, Schema, std::less<>>& Schemas() {
  static const std::map<std::string, Schema, std::less<>> schemas = {
      {"SES_K_GEN_REQ", {{"booking_id", Kind::kU32}, {"backend", Kind::kBackend}}},
      {"SES_K_GEN_ACK", {{"booking_id", Kind::kU32}, {"bundles", Kind::kBundles}}},
      {"AT_GEN_REQ",
       {{"session_id", Kind::kSession},
        {"owner_id", Kind::kU64},
        {"backend", Kind::kBackend},
        {"key_bundle", Kind::kBytes},
        {"booking_bundle", Kind::kBytes}}},
      {"AT_PUB_REQ", {{"session_id", Kind::kSession}, {"c", Kind::kBytes}, {"tag", Kind::kBytes}}},
      {"M_PUB_ACK", {{"session_id", Kind::kSession}, {"ts", Kind::kU64}}},
      {"AT_PUB_ACK", {{"session_id", Kind::kSession}, {"ts", Kind::kU64}}},
      {"ACCESS_CHALLENGE", {{"booking_id", Kind::kU32}, {"nonce", Kind::kBlock}}},
      {"ACCESS_REQ",
       {{"booking_id", Kind::kU32},
        {"vehicle_id", Kind::kU32},
        {"action", Kind::kU8},
        {"challenge", Kind::kBlock},
        {"token", Kind::kBytes},
        {"certificate", Kind::kBytes},
        {"challenge_signature", Kind::kBytes}}},
      {"ACCESS_CONFIRM", {{"booking_id", Kind::kU32}, {"ts_access", Kind::kU64}, {"signature", Kind::kBytes}}},
  };
  return schemas;
}

[[noreturn]] void Fail(const std::string& what) { throw Error(ErrorCode::kParse, what); }

uint64_t Unsigned(const json& v, const std::string& name, uint64_t max) {
  if (!v.is_number_unsigned()) Fail("field '" + name + "' must be an unsigned integer");
  uint64_t x = v.get<uint64_t>();
  if (x > max) Fail("field '" + name + "' out of range");
  return x;
}

void CheckField(const json& v, const std::string& name, Kind kind) {
  switch (kind) {
    case Kind::kU8:
      Unsigned(v, name, 0xFF);
      return;
    case Kind::kU32:
      Unsigned(v, name, 0xFFFFFFFFu);
      return;
    case Kind::kU64:
      Unsigned(v, name, std::numeric_limits<uint64_t>::max());
      return;
    case Kind::kBackend:
      if (!v.is_string()) Fail("field '" + name + "' must be a string");
      try {
        ParseBackend(v.get<std::string>());
      } catch (const Error& e) {
        Fail(e.what());
      }
      return;
    case Kind::kSession:
    case Kind::kBlock:
      if (!v.is_string() || v.get<std::string>().size() != 32) Fail("field '" + name + "' must be 32 hex digits");
      try {
        FromHex(v.get<std::string>());
      } catch (const Error&) {
        Fail("field '" + name + "' is not hex");
      }
      return;
    case Kind::kBytes:
      if (!v.is_string()) Fail("field '" + name + "' must be a base64 string");
      try {
        FromBase64(v.get<std::string>());
      } catch (const Error&) {
        Fail("field '" + name + "' is not base64");
      }
      return;
    case Kind::kBundles:
      if (!v.is_array() || v.size() != 3) Fail("field '" + name + "' must be an array of 3");
      for (const auto& b : v) CheckField(b, name, Kind::kBytes);
      return;
  }
}

const json& Validate(const json& j) {
  if (!j.is_object()) Fail("message is not a JSON object");
  auto type = j.find("type");
  if (type == j.end() || !type->is_string()) Fail("message lacks a type tag");
  auto it = Schemas().find(type->get<std::string>());
  if (it == Schemas().end()) Fail("unknown message type '" + type->get<std::string>() + "'");
  const Schema& schema = it->second;
  for (const auto& [name, kind] : schema) {
    auto f = j.find(name);
    if (f == j.end()) Fail(it->first + " lacks field '" + name + "'");
    CheckField(*f, name, kind);
  }
  for (const auto& item : j.items()) {
    if (item.key() != "type" && !schema.contains(item.key())) Fail(it->first + " has unknown field '" + item.key() + "'");
  }
  return j;
}

std::string B64(const Bytes& b) { return ToBase64(b); }
Bytes UnB64(const json& v) { return FromBase64(v.get<std::string>()); }

std::string Hex16(const std::array<uint8_t, 16>& b) { return ToHex(b); }
std::array<uint8_t, 16> UnHex16(const json& v) {
  Bytes raw = FromHex(v.get<std::string>());
  std::array<uint8_t, 16> out{};
  std::copy(raw.begin(), raw.end(), out.begin());
  return out;
}

struct Encoder {
  json operator()(const SesKGenReq& m) const {
    return {{"type", "SES_K_GEN_REQ"}, {"booking_id", m.booking_id}, {"backend", BackendName(m.backend)}};
  }
  json operator()(const SesKGenAck& m) const {
    return {{"type", "SES_K_GEN_ACK"},
            {"booking_id", m.booking_id},
            {"bundles", {B64(m.bundles[0]), B64(m.bundles[1]), B64(m.bundles[2])}}};
  }
  json operator()(const AtGenReq& m) const {
    return {{"type", "AT_GEN_REQ"},
            {"session_id", Hex16(m.session)},
            {"owner_id", m.owner_id},
            {"backend", BackendName(m.backend)},
            {"key_bundle", B64(m.key_bundle)},
            {"booking_bundle", B64(m.booking_bundle)}};
  }
  json operator()(const AtPubReq& m) const {
    return {{"type", "AT_PUB_REQ"}, {"session_id", Hex16(m.session)}, {"c", B64(m.cipher)}, {"tag", B64(m.tag)}};
  }
  json operator()(const MPubAck& m) const {
    return {{"type", "M_PUB_ACK"}, {"session_id", Hex16(m.session)}, {"ts", m.ts}};
  }
  json operator()(const AtPubAck& m) const {
    return {{"type", "AT_PUB_ACK"}, {"session_id", Hex16(m.session)}, {"ts", m.ts}};
  }
  json operator()(const AccessChallenge& m) const {
    return {{"type", "ACCESS_CHALLENGE"}, {"booking_id", m.booking_id}, {"nonce", Hex16(m.nonce)}};
  }
  json operator()(const AccessReq& m) const {
    return {{"type", "ACCESS_REQ"},
            {"booking_id", m.booking_id},
            {"vehicle_id", m.vehicle_id},
            {"action", m.action},
            {"challenge", Hex16(m.challenge)},
            {"token", B64(m.token)},
            {"certificate", B64(m.certificate)},
            {"challenge_signature", B64(m.challenge_signature)}};
  }
  json operator()(const AccessConfirm& m) const {
    return {{"type", "ACCESS_CONFIRM"},
            {"booking_id", m.booking_id},
            {"ts_access", m.ts_access},
            {"signature", B64(m.signature)}};
  }
};

struct NameOf {
  std::string_view operator()(const SesKGenReq&) const { return "SES_K_GEN_REQ"; }
  std::string_view operator()(const SesKGenAck&) const { return "SES_K_GEN_ACK"; }
  std::string_view operator()(const AtGenReq&) const { return "AT_GEN_REQ"; }
  std::string_view operator()(const AtPubReq&) const { return "AT_PUB_REQ"; }
  std::string_view operator()(const MPubAck&) const { return "M_PUB_ACK"; }
  std::string_view operator()(const AtPubAck&) const { return "AT_PUB_ACK"; }
  std::string_view operator()(const AccessChallenge&) const { return "ACCESS_CHALLENGE"; }
  std::string_view operator()(const AccessReq&) const { return "ACCESS_REQ"; }
  std::string_view operator()(const AccessConfirm&) const { return "ACCESS_CONFIRM"; }
};

}  // namespace

Bytes KeyBundleAad(int party) {
  ByteWriter w;
  w.Str("vsa-key-bundle");
  w.U8(static_cast<uint8_t>(party));
  return std::move(w).bytes();
}

Bytes BookingBundleAad(int party, const SessionId& session) {
  ByteWriter w;
  w.Str("vsa-booking-bundle");
  w.U8(static_cast<uint8_t>(party));
  w.Raw(session);
  return std::move(w).bytes();
}

std::string_view MessageTypeName(const Message& m) { return std::visit(NameOf{}, m); }

std::string ToJson(const Message& m) { return std::visit(Encoder{}, m).dump(); }

Message ParseMessage(std::string_view text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) Fail("malformed JSON");
  Validate(j);
  const std::string type = j["type"].get<std::string>();
  if (type == "SES_K_GEN_REQ") {
    return SesKGenReq{j["booking_id"].get<uint32_t>(), ParseBackend(j["backend"].get<std::string>())};
  }
  if (type == "SES_K_GEN_ACK") {
    SesKGenAck m;
    m.booking_id = j["booking_id"].get<uint32_t>();
    for (size_t i = 0; i < 3; ++i) m.bundles[i] = UnB64(j["bundles"][i]);
    return m;
  }
  if (type == "AT_GEN_REQ") {
    AtGenReq m;
    m.session = UnHex16(j["session_id"]);
    m.owner_id = j["owner_id"].get<uint64_t>();
    m.backend = ParseBackend(j["backend"].get<std::string>());
    m.key_bundle = UnB64(j["key_bundle"]);
    m.booking_bundle = UnB64(j["booking_bundle"]);
    return m;
  }
  if (type == "AT_PUB_REQ") return AtPubReq{UnHex16(j["session_id"]), UnB64(j["c"]), UnB64(j["tag"])};
  if (type == "M_PUB_ACK") return MPubAck{UnHex16(j["session_id"]), j["ts"].get<uint64_t>()};
  if (type == "AT_PUB_ACK") return AtPubAck{UnHex16(j["session_id"]), j["ts"].get<uint64_t>()};
  if (type == "ACCESS_CHALLENGE") return AccessChallenge{j["booking_id"].get<uint32_t>(), UnHex16(j["nonce"])};
  if (type == "ACCESS_REQ") {
    AccessReq m;
    m.booking_id = j["booking_id"].get<uint32_t>();
    m.vehicle_id = j["vehicle_id"].get<uint32_t>();
    m.action = j["action"].get<uint8_t>();
    m.challenge = UnHex16(j["challenge"]);
    m.token = UnB64(j["token"]);
    m.certificate = UnB64(j["certificate"]);
    m.challenge_signature = UnB64(j["challenge_signature"]);
    return m;
  }
  AccessConfirm m;
  m.booking_id = j["booking_id"].get<uint32_t>();
  m.ts_access = j["ts_access"].get<uint64_t>();
  m.signature = UnB64(j["signature"]);
  return m;
}

}  // namespace vsa
