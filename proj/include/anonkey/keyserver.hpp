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

#ifndef ANONKEY_KEYSERVER_HPP_
#define ANONKEY_KEYSERVER_HPP_

#include <cstdint>
#include <deque>
#include <filesystem>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

#include "anonkey/group.hpp"
#include "anonkey/http.hpp"
#include "anonkey/idp.hpp"
#include "anonkey/keyshare.hpp"
#include "anonkey/random.hpp"
#include "json.hpp"

namespace anonkey::keyserver {

using group::GroupElement;
using group::GroupParams;
using group::Scalar;
using keyshare::IdentityRef;

struct ServerConfig {
  std::string server_id;
  std::string host = "127.0.0.1";
  int port = 0;
  std::filesystem::path params_path;
  idp::ProviderSecrets provider_secrets;
  // Empty paths keep the corresponding state in memory only.
  std::filesystem::path epoch_state_path;
  std::filesystem::path archive_path;
  std::filesystem::path outbox_path;
  std::size_t invitation_cap = 100;
  std::size_t invitation_window_cap = 1000;
  std::int64_t invitation_window_seconds = 3600;
  // When several providers are presented, require equal display names.
  bool require_same_display_name = false;

  static ServerConfig from_json(const nlohmann::json& j);
  static ServerConfig load(const std::filesystem::path& path);
};

struct Invitation {
  std::string batch_id;
  IdentityRef identity;
  Bytes url_token;
  std::int64_t created_at = 0;

  nlohmann::json to_json() const;
};

struct ShareGrant {
  IdentityRef identity;
  Scalar x;
  GroupElement y;
};

struct ShareResponse {
  std::string server_id;
  std::uint64_t epoch = 0;
  std::vector<ShareGrant> shares;

  nlohmann::json to_json(const GroupParams& params) const;
  static ShareResponse from_json(const nlohmann::json& j, const GroupParams& params);
};

struct EpochInfo {
  std::string server_id;
  std::uint64_t epoch = 0;
  std::string params_fingerprint;

  nlohmann::json to_json() const;
  static EpochInfo from_json(const nlohmann::json& j);
};

// One anytrust key server. Thread-safe: derivation is pure, and archive
// appends, invitation writes and rotation are serialized.
class KeyServer {
 public:
  KeyServer(ServerConfig config, GroupParams params, RandomSource& rng = system_random(),
            idp::Clock clock = idp::unix_now);

  const ServerConfig& config() const { return config_; }
  const GroupParams& params() const { return params_; }

  // Queues one invitation per identity and returns the batch id. Nothing
  // about the caller is stored.
  std::string request_invitations(std::span<const IdentityRef> identities);

  // All tokens must verify or nothing is served. A requested epoch other
  // than the current one fails with kEpochExpired.
  ShareResponse get_private_share(std::span<const idp::IdpToken> tokens,
                                  std::optional<std::uint64_t> epoch = std::nullopt);

  // Current epoch derives on demand; earlier epochs come from the archive.
  GroupElement get_public_share(const IdentityRef& identity,
                                std::optional<std::uint64_t> epoch = std::nullopt);

  EpochInfo epoch_info() const;

  // Fresh random master secret; returns the new epoch.
  std::uint64_t rotate();

  std::vector<Invitation> outbox() const;

  // Everything persisted except the master secret.
  nlohmann::json state_snapshot() const;

 private:
  GroupElement record_locked(std::uint64_t epoch, const IdentityRef& identity,
                             const GroupElement& y);

  ServerConfig config_;
  GroupParams params_;
  std::string fingerprint_;
  RandomSource& rng_;
  idp::Clock clock_;

  mutable std::shared_mutex mu_;
  keyshare::EpochState state_;
  std::vector<Invitation> outbox_;
  std::deque<std::int64_t> invitation_times_;
};

// POST /invitations, POST /share, GET /pubkey, GET /epoch, POST /rotate and
// GET /outbox (the last two only from loopback).
void register_routes(http::Server& server, KeyServer& key_server);

}  // namespace anonkey::keyserver

#endif  // ANONKEY_KEYSERVER_HPP_
