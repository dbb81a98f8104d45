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

#include "vsa/ledger_service.hpp"

#include <thread>

#include "httplib.h"
#include "json.hpp"

namespace vsa {

using nlohmann::json;

struct LedgerService::Impl {
  Ledger* ledger;
  std::string host;
  uint16_t port;
  httplib::Server server;
  std::thread thread;
};

namespace {

void Reply(httplib::Response& res, int status, const std::string& body) {
  res.status = status;
  res.set_content(body, "application/json");
}

void ReplyError(httplib::Response& res, const Error& e) { Reply(res, HttpStatusFor(e.code()), ErrorBody(e)); }

std::string EntriesJson(const std::vector<LedgerEntry>& entries) {
  std::string out = "{\"entries\":[";
  for (size_t i = 0; i < entries.size(); ++i) {
    if (i) out += ",";
    out += entries[i].ToJson();
  }
  return out + "]}";
}

}  // namespace

LedgerService::LedgerService(Ledger& ledger, std::string host, uint16_t port, size_t threads)
    : impl_(std::make_unique<Impl>()) {
  impl_->ledger = &ledger;
  impl_->host = std::move(host);
  impl_->port = port;
  impl_->server.new_task_queue = [threads] { return new httplib::ThreadPool(threads); };
  Ledger* l = &ledger;

  impl_->server.Post("/publish", [l](const httplib::Request& req, httplib::Response& res) {
    try {
      json j = json::parse(req.body, nullptr, false);
      if (j.is_object() && j.contains("type")) {
        AtPubReq m = ParseMessageAs<AtPubReq>(req.body);
        auto r = l->Publish(m.cipher, m.tag);
        Reply(res, 200, ToJson(MPubAck{m.session, r.ts}));
        return;
      }
      if (!j.is_object() || !j.contains("c") || !j.contains("tag") || !j["c"].is_string() ||
          !j["tag"].is_string() || j.size() != 2) {
        throw Error(ErrorCode::kParse, "publish body must be {\"c\": base64, \"tag\": base64}");
      }
      Bytes c, tag;
      try {
        c = FromBase64(j["c"].get<std::string>());
        tag = FromBase64(j["tag"].get<std::string>());
      } catch (const Error& e) {
        throw Error(ErrorCode::kParse, e.what());
      }
      auto r = l->Publish(c, tag);
      Reply(res, 200, json{{"ts", r.ts}, {"duplicate", r.duplicate}}.dump());
    } catch (const Error& e) {
      ReplyError(res, e);
    }
  });

  impl_->server.Get("/entries", [l](const httplib::Request& req, httplib::Response& res) {
    uint64_t since = 0;
    if (req.has_param("since")) {
      try {
        size_t used = 0;
        const std::string v = req.get_param_value("since");
        since = std::stoull(v, &used);
        if (used != v.size() || v.starts_with("-")) throw std::invalid_argument("since");
      } catch (const std::exception&) {
        ReplyError(res, Error(ErrorCode::kParse, "since must be a non-negative integer"));
        return;
      }
    }
    Reply(res, 200, EntriesJson(l->Since(since)));
  });

  impl_->server.Get(R"(/entry/by-tag/([0-9a-fA-F]*))", [l](const httplib::Request& req, httplib::Response& res) {
    Bytes tag;
    try {
      tag = FromHex(req.matches[1].str());
    } catch (const Error& e) {
      ReplyError(res, Error(ErrorCode::kParse, e.what()));
      return;
    }
    auto e = l->ByTag(tag);
    if (!e) {
      ReplyError(res, Error(ErrorCode::kNotFound, "no entry with this tag"));
      return;
    }
    Reply(res, 200, e->ToJson());
  });

  impl_->server.Get("/health", [l](const httplib::Request&, httplib::Response& res) {
    Reply(res, 200, json{{"entries", l->size()}}.dump());
  });
}

LedgerService::~LedgerService() { Stop(); }

uint16_t LedgerService::Start() {
  if (impl_->port == 0) {
    int p = impl_->server.bind_to_any_port(impl_->host);
    if (p <= 0) throw Error(ErrorCode::kConnect, "ledger cannot bind " + impl_->host);
    impl_->port = static_cast<uint16_t>(p);
  } else if (!impl_->server.bind_to_port(impl_->host, impl_->port)) {
    throw Error(ErrorCode::kConnect, "ledger cannot bind " + impl_->host + ":" + std::to_string(impl_->port));
  }
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return impl_->port;
}

void LedgerService::Stop() {
  if (impl_ && impl_->thread.joinable()) {
    impl_->server.stop();
    impl_->thread.join();
  }
}

std::string LedgerService::url() const { return "http://" + impl_->host + ":" + std::to_string(impl_->port); }

LedgerClient::LedgerClient(std::string url, std::chrono::milliseconds timeout) : http_(std::move(url), timeout) {}

MPubAck LedgerClient::Publish(const AtPubReq& req) const {
  MPubAck ack = ParseMessageAs<MPubAck>(http_.PostOk("/publish", ToJson(req)));
  if (ack.session != req.session) throw Error(ErrorCode::kProtocolDesync, "ledger acknowledged another session");
  return ack;
}

std::vector<LedgerEntry> LedgerClient::Since(uint64_t since) const {
  json j = json::parse(http_.GetOk("/entries?since=" + std::to_string(since)), nullptr, false);
  if (!j.is_object() || !j.contains("entries") || !j["entries"].is_array()) {
    throw Error(ErrorCode::kParse, "malformed ledger listing");
  }
  std::vector<LedgerEntry> out;
  for (const auto& e : j["entries"]) out.push_back(LedgerEntry::FromJson(e.dump()));
  return out;
}

std::optional<LedgerEntry> LedgerClient::ByTag(ByteSpan tag) const {
  HttpResponse r = http_.Get("/entry/by-tag/" + ToHex(tag));
  if (r.status == 404) return std::nullopt;
  ThrowIfError(r, url());
  return LedgerEntry::FromJson(r.body);
}

}  // namespace vsa
