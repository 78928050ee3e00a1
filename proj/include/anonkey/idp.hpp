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

#ifndef ANONKEY_IDP_HPP_
#define ANONKEY_IDP_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "anonkey/bytes.hpp"
#include "anonkey/http.hpp"
#include "anonkey/keyshare.hpp"
#include "json.hpp"

// Mock federated identity providers. A token is an HMAC-SHA-256 over the
// canonical JSON of its claims, keyed by a secret the provider shares with
// every key server. The audience claim binds a token to one key server.
namespace anonkey::idp {

using Clock = std::function<std::int64_t()>;

// Wall clock in unix seconds.
std::int64_t unix_now();

struct IdpToken {
  std::string provider;
  std::string user_id;
  std::string display_name;
  std::string audience;
  std::int64_t expiry = 0;
  Digest mac{};

  // Compact JSON of every claim except mac, keys sorted.
  std::string canonical_claims() const;
  nlohmann::json to_json() const;
  static IdpToken from_json(const nlohmann::json& j);

  keyshare::IdentityRef identity() const { return {provider, user_id}; }
};

// provider name -> shared MAC secret.
class ProviderSecrets {
 public:
  void add(const std::string& provider, Bytes secret);
  const Bytes* find(const std::string& provider) const;
  bool empty() const { return secrets_.empty(); }

  // {"mockbook": "hex", ...}
  static ProviderSecrets from_json(const nlohmann::json& j);

 private:
  std::map<std::string, Bytes> secrets_;
};

IdpToken issue_token(const ProviderSecrets& secrets, const std::string& provider,
                     const std::string& user_id, const std::string& display_name,
                     const std::string& audience, std::int64_t ttl_seconds,
                     std::int64_t now);

// Checks, in order: known provider, MAC, audience, expiry. Each failure has
// its own code: kUnknownProvider, kBadMac, kAudienceMismatch, kTokenExpired.
keyshare::IdentityRef verify_token(const ProviderSecrets& secrets, const IdpToken& token,
                                   const std::string& expected_audience,
                                   std::int64_t now);

// One mock provider with a fixed user directory.
class MockProvider {
 public:
  MockProvider(std::string name, Bytes secret, Clock clock = unix_now);

  const std::string& name() const { return name_; }
  const Bytes& secret() const { return secret_; }

  void add_user(const std::string& user_id, const std::string& display_name);
  bool has_user(const std::string& user_id) const;

  // Throws Error(kNotFound) for users outside the directory.
  IdpToken issue(const std::string& user_id, const std::string& audience,
                 std::int64_t ttl_seconds) const;

 private:
  std::string name_;
  Bytes secret_;
  Clock clock_;
  mutable std::mutex mu_;
  std::map<std::string, std::string> users_;
};

// POST /token {provider, user_id, audience, ttl}.
void register_routes(http::Server& server, MockProvider& provider);

}  // namespace anonkey::idp

#endif  // ANONKEY_IDP_HPP_
