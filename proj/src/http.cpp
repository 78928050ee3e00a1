/*
 * Copyright 2026 The anonkey Authors.
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

#include "anonkey/http.hpp"

#include <thread>

#include "httplib.h"

namespace anonkey::http {

nlohmann::json Request::json() const {
  try {
    return nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kMalformedEncoding, std::string("request body: ") + e.what());
  }
}

std::optional<std::string> Request::param(const std::string& name) const {
  auto it = query.find(name);
  if (it == query.end()) return std::nullopt;
  return it->second;
}

int status_for(Errc code) {
  switch (code) {
    case Errc::kBadMac:
    case Errc::kAudienceMismatch:
    case Errc::kTokenExpired:
    case Errc::kUnknownProvider:
      return 401;
    case Errc::kForbidden:
    case Errc::kPseudonymBlocked:
      return 403;
    case Errc::kNotFound:
    case Errc::kUnknownArchivedKey:
    case Errc::kUnknownChallenge:
    case Errc::kUnknownToken:
      return 404;
    case Errc::kChallengeConsumed:
      return 409;
    case Errc::kEpochExpired:
    case Errc::kChallengeExpired:
      return 410;
    case Errc::kRateLimited:
      return 429;
    case Errc::kInternal:
    case Errc::kIoError:
      return 500;
    case Errc::kKeyServerUnreachable:
    case Errc::kServiceUnreachable:
    case Errc::kServerInconsistency:
      return 502;
    default:
      return 400;
  }
}

struct Server::Impl {
  httplib::Server server;
  std::thread thread;
  std::string host;
  int port = -1;
  bool stopped = false;
};

Server::Server() : impl_(std::make_unique<Impl>()) {}

Server::~Server() { stop(); }

void Server::route(const std::string& method, const std::string& path, Handler handler) {
  auto wrapped = [handler = std::move(handler), method](const httplib::Request& req,
                                                        httplib::Response& res) {
    Request r{method, req.path, req.body, {}, req.remote_addr};
    for (const auto& [k, v] : req.params) r.query[k] = v;
    try {
      res.set_content(handler(r).dump(), "application/json");
    } catch (const Error& e) {
      nlohmann::json body = {{"error", errc_name(e.code())}, {"detail", e.detail()}};
      res.status = status_for(e.code());
      res.set_content(body.dump(), "application/json");
    } catch (const std::exception& e) {
      nlohmann::json body = {{"error", "internal"}, {"detail", e.what()}};
      res.status = 500;
      res.set_content(body.dump(), "application/json");
    }
  };
  if (method == "GET") {
    impl_->server.Get(path, wrapped);
  } else if (method == "POST") {
    impl_->server.Post(path, wrapped);
  } else {
    throw Error(Errc::kInvalidArgument, "unsupported method " + method);
  }
}

int Server::bind(const std::string& host, int port) {
  impl_->host = host;
  // httplib's default adds SO_REUSEPORT, which lets a second server share a
  // port that is already taken.
  impl_->server.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
  });
  if (port == 0) {
    impl_->port = impl_->server.bind_to_any_port(host);
  } else if (impl_->server.bind_to_port(host, port)) {
    impl_->port = port;
  } else {
    impl_->port = -1;
  }
  if (impl_->port < 0) {
    throw Error(Errc::kIoError, "cannot bind " + host + ":" + std::to_string(port));
  }
  return impl_->port;
}

void Server::start() {
  if (impl_->port < 0) throw Error(Errc::kInternal, "server not bound");
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

void Server::stop() {
  if (!impl_ || impl_->stopped) return;
  impl_->stopped = true;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

int Server::port() const { return impl_->port; }

std::string Server::url() const {
  return "http://" + impl_->host + ":" + std::to_string(impl_->port);
}

namespace {

httplib::Client make_client(const std::string& base_url) {
  httplib::Client client(base_url);
  client.set_connection_timeout(3, 0);
  client.set_read_timeout(60, 0);
  client.set_write_timeout(60, 0);
  return client;
}

nlohmann::json handle(const httplib::Result& result, const std::string& base_url,
                      const std::string& path, Errc unreachable) {
  if (!result) {
    throw Error(unreachable, base_url + path + ": " + httplib::to_string(result.error()));
  }
  nlohmann::json body;
  try {
    body = nlohmann::json::parse(result->body);
  } catch (const nlohmann::json::exception&) {
    throw Error(Errc::kMalformedEncoding,
                base_url + path + ": non-JSON response (status " +
                    std::to_string(result->status) + ")");
  }
  if (result->status >= 400) {
    std::string code = body.value("error", "internal");
    throw Error(errc_from_name(code), body.value("detail", std::string()));
  }
  return body;
}

}  // namespace

nlohmann::json get(const std::string& base_url, const std::string& path,
                   const std::map<std::string, std::string>& query, Errc unreachable) {
  auto client = make_client(base_url);
  httplib::Params params(query.begin(), query.end());
  auto result = client.Get(path, params, httplib::Headers{});
  return handle(result, base_url, path, unreachable);
}

nlohmann::json post(const std::string& base_url, const std::string& path,
                    const nlohmann::json& body, Errc unreachable) {
  auto client = make_client(base_url);
  auto result = client.Post(path, body.dump(), "application/json");
  return handle(result, base_url, path, unreachable);
}

}  // namespace anonkey::http
