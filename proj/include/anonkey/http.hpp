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

#ifndef ANONKEY_HTTP_HPP_
#define ANONKEY_HTTP_HPP_

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "anonkey/error.hpp"
#include "json.hpp"

// Thin JSON-over-HTTP layer shared by every service and client. Handlers
// return a JSON body or throw anonkey::Error, which is rendered as
// {"error": code, "detail": text} with a status derived from the code.
namespace anonkey::http {

struct Request {
  std::string method;
  std::string path;
  std::string body;
  std::map<std::string, std::string> query;
  std::string remote_addr;

  // Throws Error(kMalformedEncoding) on invalid JSON.
  nlohmann::json json() const;
  std::optional<std::string> param(const std::string& name) const;
};

using Handler = std::function<nlohmann::json(const Request&)>;

int status_for(Errc code);

class Server {
 public:
  Server();
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  void route(const std::string& method, const std::string& path, Handler handler);

  // Port 0 picks a free port. Throws Error(kIoError) if the port is taken.
  int bind(const std::string& host, int port);
  // Serves on a background thread until stop().
  void start();
  void stop();

  int port() const;
  std::string url() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Connection failures throw Error(unreachable, ...). Error responses are
// rethrown with the remote code.
nlohmann::json get(const std::string& base_url, const std::string& path,
                   const std::map<std::string, std::string>& query = {},
                   Errc unreachable = Errc::kServiceUnreachable);
nlohmann::json post(const std::string& base_url, const std::string& path,
                    const nlohmann::json& body,
                    Errc unreachable = Errc::kServiceUnreachable);

}  // namespace anonkey::http

#endif  // ANONKEY_HTTP_HPP_
