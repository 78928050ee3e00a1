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

#include "anonkey/harness.hpp"

#include "anonkey/bytes.hpp"
#include "anonkey/error.hpp"

namespace anonkey::harness {

namespace fs = std::filesystem;

const std::vector<FixtureUser>& fixture_users() {
  static const std::vector<FixtureUser> users = {
      {"alice", "Alice Anders"}, {"bob", "Bob Brown"},     {"charles", "Charles Chu"},
      {"dave", "Dave Dunn"},     {"erin", "Erin Evans"},   {"frank", "Frank Fox"},
      {"grace", "Grace Gill"},   {"heidi", "Heidi Hart"},  {"ivan", "Ivan Ito"},
      {"judy", "Judy Jones"},
  };
  return users;
}

Harness::Harness(HarnessOptions options, group::GroupParams params)
    : options_(std::move(options)), params_(std::move(params)) {
  if (options_.servers == 0) throw Error(Errc::kInvalidArgument, "need at least one key server");
  if (options_.providers.empty()) throw Error(Errc::kInvalidArgument, "need a provider");
}

Harness::~Harness() { stop(); }

namespace {

int port_for(const HarnessOptions& o, int offset) {
  return o.base_port == 0 ? 0 : o.base_port + offset;
}

fs::path state_file(const HarnessOptions& o, const std::string& name) {
  return o.state_dir.empty() ? fs::path() : o.state_dir / name;
}

}  // namespace

void Harness::start() {
  if (running_) return;
  if (!options_.state_dir.empty()) fs::create_directories(options_.state_dir);
  int offset = 0;
  try {
    idp::ProviderSecrets secrets;
    for (const auto& name : options_.providers) {
      Bytes secret;
      if (options_.epoch_seed) {
        Bytes seed = to_bytes("idp-secret:" + name + ":");
        append_u64_be(seed, *options_.epoch_seed);
        auto d = sha256(seed);
        secret.assign(d.begin(), d.end());
      } else {
        secret = system_random().bytes(32);
      }
      secrets.add(name, secret);
      auto provider = std::make_unique<idp::MockProvider>(name, secret);
      for (const auto& u : fixture_users()) provider->add_user(u.user_id, u.display_name);
      auto server = std::make_unique<http::Server>();
      idp::register_routes(*server, *provider);
      server->bind(options_.host, port_for(options_, offset++));
      server->start();
      providers_[name] = std::move(provider);
      idp_servers_[name] = std::move(server);
    }

    for (std::size_t i = 0; i < options_.servers; ++i) {
      const std::string id = "ks" + std::to_string(i + 1);
      keyserver::ServerConfig config;
      config.server_id = id;
      config.host = options_.host;
      config.provider_secrets = secrets;
      config.epoch_state_path = state_file(options_, id + ".epoch.json");
      config.archive_path = state_file(options_, id + ".archive.jsonl");
      config.outbox_path = state_file(options_, id + ".outbox.jsonl");
      if (options_.epoch_seed) {
        Bytes seed = to_bytes("epoch-seed:" + id + ":");
        append_u64_be(seed, *options_.epoch_seed);
        rngs_.push_back(std::make_unique<DeterministicRandom>(seed));
      } else {
        rngs_.push_back(std::make_unique<SystemRandom>());
      }
      auto ks = std::make_unique<keyserver::KeyServer>(config, params_, *rngs_.back());
      auto server = std::make_unique<http::Server>();
      keyserver::register_routes(*server, *ks);
      server->bind(options_.host, port_for(options_, offset++));
      server->start();
      key_servers_.push_back(std::move(ks));
      ks_servers_.push_back(std::move(server));
    }

    directory_ = std::make_unique<client::HttpDirectory>(server_urls(), params_);
    auth::AuthConfig config;
    config.service_name = options_.service_name;
    config.host = options_.host;
    config.key_servers = server_urls();
    config.token_log_path = state_file(options_, "auth.tokens.jsonl");
    config.blocklist_log_path = state_file(options_, "auth.blocklist.jsonl");
    auth_ = std::make_unique<auth::AuthProvider>(config, params_, *directory_);
    auth_server_ = std::make_unique<http::Server>();
    auth::register_routes(*auth_server_, *auth_);
    auth_server_->bind(options_.host, port_for(options_, offset++));
    auth_server_->start();
  } catch (...) {
    running_ = true;
    stop();
    throw;
  }
  running_ = true;
}

void Harness::stop() {
  if (!running_) return;
  running_ = false;
  if (auth_server_) auth_server_->stop();
  for (auto it = ks_servers_.rbegin(); it != ks_servers_.rend(); ++it) (*it)->stop();
  for (auto& [name, server] : idp_servers_) server->stop();
  auth_server_.reset();
  auth_.reset();
  directory_.reset();
  ks_servers_.clear();
  key_servers_.clear();
  rngs_.clear();
  idp_servers_.clear();
  providers_.clear();
}

std::vector<std::string> Harness::server_urls() const {
  std::vector<std::string> urls;
  for (const auto& s : ks_servers_) urls.push_back(s->url());
  return urls;
}

std::string Harness::idp_url(const std::string& provider) const {
  auto it = idp_servers_.find(provider);
  if (it == idp_servers_.end()) throw Error(Errc::kUnknownProvider, provider);
  return it->second->url();
}

std::string Harness::auth_url() const {
  if (!auth_server_) throw Error(Errc::kServiceUnreachable, "harness is not running");
  return auth_server_->url();
}

idp::MockProvider& Harness::provider(const std::string& name) {
  auto it = providers_.find(name);
  if (it == providers_.end()) throw Error(Errc::kUnknownProvider, name);
  return *it->second;
}

nlohmann::json Harness::deployment() const {
  nlohmann::json idps = nlohmann::json::object();
  for (const auto& [name, server] : idp_servers_) idps[name] = server->url();
  nlohmann::json ids = nlohmann::json::array();
  for (const auto& ks : key_servers_) ids.push_back(ks->config().server_id);
  return {{"params", params_.to_json()},
          {"servers", server_urls()},
          {"server_ids", ids},
          {"idps", idps},
          {"auth", auth_url()},
          {"scope", auth_->config().effective_scope()}};
}

}  // namespace anonkey::harness
