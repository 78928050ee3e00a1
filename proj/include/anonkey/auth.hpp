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

#ifndef ANONKEY_AUTH_HPP_
#define ANONKEY_AUTH_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

#include "anonkey/group.hpp"
#include "anonkey/http.hpp"
#include "anonkey/idp.hpp"
#include "anonkey/keyserver.hpp"
#include "anonkey/keyshare.hpp"
#include "anonkey/lrs.hpp"
#include "anonkey/random.hpp"
#include "json.hpp"

// OAuth-style anonymous identity provider. A user proves membership in an
// anonymity set by ring-signing a challenge nonce; the linkage tag of the
// signature, hashed, becomes their stable pseudonym.
namespace anonkey::auth {

using group::GroupElement;
using group::GroupParams;
using keyshare::IdentityRef;
using keyshare::MemberRef;

struct Challenge {
  Bytes id;
  Bytes nonce;
  std::int64_t issued_at = 0;
  std::int64_t expires_at = 0;
  bool consumed = false;
};

struct AuthToken {
  std::string token;
  std::string pseudonym;
  std::vector<MemberRef> ring_identities;
  std::int64_t issued_at = 0;

  // Introspection view: pseudonym, ring_identities, issued_at.
  nlohmann::json introspection_json() const;
  nlohmann::json to_json() const;
  static AuthToken from_json(const nlohmann::json& j);
};

// Lowercase hex SHA-256 of the fixed-width tag encoding.
std::string pseudonym_of(const GroupElement& tag, const GroupParams& params);

// Source of composite public keys: the product of every key server's public
// share for an identity.
class PublicKeyDirectory {
 public:
  virtual ~PublicKeyDirectory() = default;
  virtual GroupElement composite_key(const IdentityRef& identity) = 0;
};

// Directory over in-process key servers.
class LocalDirectory final : public PublicKeyDirectory {
 public:
  explicit LocalDirectory(std::vector<keyserver::KeyServer*> servers)
      : servers_(std::move(servers)) {}
  GroupElement composite_key(const IdentityRef& identity) override;

 private:
  std::vector<keyserver::KeyServer*> servers_;
};

struct AuthConfig {
  std::string service_name = "service";
  // Linkability scope; empty means "auth:<service_name>".
  std::string scope;
  std::int64_t challenge_ttl_seconds = 300;
  std::size_t max_ring_size = 1024;
  std::filesystem::path token_log_path;
  std::filesystem::path blocklist_log_path;
  std::string host = "127.0.0.1";
  int port = 0;
  std::vector<std::string> key_servers;

  std::string effective_scope() const {
    return scope.empty() ? "auth:" + service_name : scope;
  }
  static AuthConfig from_json(const nlohmann::json& j);
};

class AuthProvider {
 public:
  AuthProvider(AuthConfig config, GroupParams params, PublicKeyDirectory& directory,
               RandomSource& rng = system_random(), idp::Clock clock = idp::unix_now);

  const AuthConfig& config() const { return config_; }
  const Bytes& scope() const { return scope_; }
  const GroupParams& params() const { return params_; }

  Challenge create_challenge();
  // Expired challenges are purged and reported as absent.
  std::optional<Challenge> find_challenge(const std::string& challenge_id_hex);
  void purge_expired();

  // Rebuilds the ring from the directory (a combined member's key is the
  // product of its identities' keys), verifies the signature over the
  // challenge nonce under the pinned scope, consumes the challenge and
  // issues a token. If client_ring is given it must equal the rebuilt ring.
  AuthToken verify_login(const std::string& challenge_id_hex,
                         std::span<const MemberRef> identities, ByteView sig_bytes,
                         const std::optional<std::vector<GroupElement>>& client_ring = std::nullopt);

  AuthToken introspect(const std::string& token) const;

  // Idempotent. Blocking also revokes the pseudonym's outstanding tokens.
  void block(const std::string& pseudonym);
  void unblock(const std::string& pseudonym);
  bool is_blocked(const std::string& pseudonym) const;

  std::size_t token_count() const;

 private:
  void replay_logs();
  void append_token_log(const nlohmann::json& line);
  void append_blocklist_log(const nlohmann::json& line);

  AuthConfig config_;
  GroupParams params_;
  Bytes scope_;
  PublicKeyDirectory& directory_;
  RandomSource& rng_;
  idp::Clock clock_;

  mutable std::shared_mutex mu_;
  std::map<Bytes, Challenge> challenges_;
  std::map<std::string, AuthToken> tokens_;
  std::set<std::string> blocked_;
};

// GET /challenge, POST /login, GET /introspect, POST /admin/block and
// POST /admin/unblock (admin routes loopback-only).
void register_routes(http::Server& server, AuthProvider& provider);

}  // namespace anonkey::auth

#endif  // ANONKEY_AUTH_HPP_
