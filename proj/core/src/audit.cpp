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

#include "vsa/audit.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "vsa/error.hpp"

namespace vsa {

using nlohmann::json;

std::string AuditRecord::ToJson() const {
  ByteWriter w;
  if (backend == Backend::kMimc) {
    w.U16(static_cast<uint16_t>(m.size()));
    for (const auto& s : m) s.EncodeTo(w);
  } else {
    m_bits.EncodeTo(w);
  }
  json j = {{"session_id", SessionIdHex(session)},
            {"party", party},
            {"owner_id", owner_id},
            {"backend", BackendName(backend)},
            {"received_ms", received_ms},
            {"completed_ms", completed_ms},
            {"ts_pub", ts_pub},
            {"shares", ToBase64(w.bytes())}};
  return j.dump();
}

AuditRecord AuditRecord::FromJson(const FieldParams& field, std::string_view text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error(ErrorCode::kParse, "audit record is not a JSON object");
  AuditRecord r;
  try {
    r.session = SessionIdFromHex(j.at("session_id").get<std::string>());
    r.party = j.at("party").get<int>();
    r.owner_id = j.at("owner_id").get<uint64_t>();
    r.backend = ParseBackend(j.at("backend").get<std::string>());
    r.received_ms = j.at("received_ms").get<uint64_t>();
    r.completed_ms = j.at("completed_ms").get<uint64_t>();
    r.ts_pub = j.at("ts_pub").get<uint64_t>();
    Bytes raw = FromBase64(j.at("shares").get<std::string>());
    ByteReader rd(raw);
    if (r.backend == Backend::kMimc) {
      size_t n = rd.U16();
      for (size_t i = 0; i < n; ++i) r.m.push_back(RepShare::Read(field, rd));
    } else {
      r.m_bits = BitShares::Read(rd);
    }
    rd.ExpectDone();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("audit record: ") + e.what());
  } catch (const Error& e) {
    throw Error(ErrorCode::kParse, std::string("audit record: ") + e.what());
  }
  if (r.party < 0 || r.party > 2) throw Error(ErrorCode::kParse, "audit record party out of range");
  for (const auto& s : r.m) {
    if (s.party != r.party) throw Error(ErrorCode::kParse, "audit share party mismatch");
  }
  if (r.backend == Backend::kAes && r.m_bits.party != r.party) {
    throw Error(ErrorCode::kParse, "audit share party mismatch");
  }
  return r;
}

void AuditRecord::Save(const std::filesystem::path& path) const {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << ToJson() << "\n";
    if (!out.flush()) throw Error(ErrorCode::kStorage, "cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

AuditRecord AuditRecord::Load(const FieldParams& field, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kNotFound, "cannot open audit record " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return FromJson(field, ss.str());
}

std::string AuditFileName(const SessionId& session, int party) {
  return SessionIdHex(session) + ".p" + std::to_string(party) + ".json";
}

}  // namespace vsa
