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

#ifndef ANONKEY_HARNESS_HPP_
#define ANONKEY_HARNESS_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "anonkey/auth.hpp"
#include "anonkey/client.hpp"
#include "anonkey/group.hpp"
#include "anonkey/http.hpp"
#include "anonkey/idp.hpp"
#include "anonkey/keyserver.hpp"
#include "json.hpp"

// Local deployment: n key servers, one mock identity provider per provider
// name and one auth provider, all on loopback.
namespace anonkey::harness {

struct HarnessOptions {
  std::size_t servers = 3;
  std::vector<std::string> providers = {"mockbook", "mockpal"};
  // Seeds provider secrets and every server's epoch secrets.
  std::optional<std::uint64_t> epoch_seed;
  // Empty keeps all state in memory.
  std::filesystem::path state_dir;
  std::string service_name = "demo";
  std::string host = "127.0.0.1";
  // 0 picks free ports. Otherwise consecutive ports from here.
  int base_port = 0;
};

struct FixtureUser {
  std::string user_id;
  std::string display_name;
};

// Users present at every mock provider.
const std::vector<FixtureUser>& fixture_users();

class Harness {
 public:
  Harness(HarnessOptions options, group::GroupParams params);
  ~Harness();
  Harness(const Harness&) = delete;
  Harness& operator=(const Harness&) = delete;

  // Identity providers, then key servers, then the auth provider. Throws
  // Error(kIoError) on a port conflict, after tearing down what started.
  void start();
  // Reverse order. Safe to call repeatedly.
  void stop();
  bool running() const { return running_; }

  const group::GroupParams& params() const { return params_; }
  std::vector<std::string> server_urls() const;
  std::string idp_url(const std::string& provider) const;
  std::string auth_url() const;

  keyserver::KeyServer& key_server(std::size_t i) { return *key_servers_.at(i); }
  auth::AuthProvider& auth() { return *auth_; }
  idp::MockProvider& provider(const std::string& name);

  // {"params", "servers", "server_ids", "idps", "auth", "scope"}.
  nlohmann::json deployment() const;

 private:
  HarnessOptions options_;
  group::GroupParams params_;
  bool running_ = false;

  std::vector<std::unique_ptr<RandomSource>> rngs_;
  std::map<std::string, std::unique_ptr<idp::MockProvider>> providers_;
  std::map<std::string, std::unique_ptr<http::Server>> idp_servers_;
  std::vector<std::unique_ptr<keyserver::KeyServer>> key_servers_;
  std::vector<std::unique_ptr<http::Server>> ks_servers_;
  std::unique_ptr<client::HttpDirectory> directory_;
  std::unique_ptr<auth::AuthProvider> auth_;
  std::unique_ptr<http::Server> auth_server_;
};

}  // namespace anonkey::harness

#endif  // ANONKEY_HARNESS_HPP_
