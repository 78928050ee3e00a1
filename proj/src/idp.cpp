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

#include "anonkey/idp.hpp"

#include <chrono>

#include "anonkey/error.hpp"

namespace anonkey::idp {

std::int64_t unix_now() {
  return std::chrono::duration_cast<std::chrono::seconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

std::string IdpToken::canonical_claims() const {
  nlohmann::json j = {{"provider", provider},         {"user_id", user_id},
                      {"display_name", display_name}, {"audience", audience},
                      {"expiry", expiry}};
  return j.dump();
}

nlohmann::json IdpToken::to_json() const {
  nlohmann::json j = nlohmann::json::parse(canonical_claims());
  j["mac"] = to_hex(mac);
  return j;
}

IdpToken IdpToken::from_json(const nlohmann::json& j) {
  try {
    IdpToken t;
    t.provider = j.at("provider").get<std::string>();
    t.user_id = j.at("user_id").get<std::string>();
    t.display_name = j.at("display_name").get<std::string>();
    t.audience = j.at("audience").get<std::string>();
    t.expiry = j.at("expiry").get<std::int64_t>();
    Bytes mac = from_hex(j.at("mac").get<std::string>());
    if (mac.size() != t.mac.size()) throw Error(Errc::kMalformedEncoding, "mac must be 32 bytes");
    std::copy(mac.begin(), mac.end(), t.mac.begin());
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kMalformedEncoding, std::string("token json: ") + e.what());
  }
}

void ProviderSecrets::add(const std::string& provider, Bytes secret) {
  secrets_[provider] = std::move(secret);
}

const Bytes* ProviderSecrets::find(const std::string& provider) const {
  auto it = secrets_.find(provider);
  return it == secrets_.end() ? nullptr : &it->second;
}

ProviderSecrets ProviderSecrets::from_json(const nlohmann::json& j) {
  ProviderSecrets out;
  for (const auto& [name, hex] : j.items()) out.add(name, from_hex(hex.get<std::string>()));
  return out;
}

IdpToken issue_token(const ProviderSecrets& secrets, const std::string& provider,
                     const std::string& user_id, const std::string& display_name,
                     const std::string& audience, std::int64_t ttl_seconds,
                     std::int64_t now) {
  const Bytes* secret = secrets.find(provider);
  if (secret == nullptr) throw Error(Errc::kUnknownProvider, "unknown provider " + provider);
  keyshare::IdentityRef{provider, user_id}.validate();
  IdpToken t{provider, user_id, display_name, audience, now + ttl_seconds, {}};
  t.mac = hmac_sha256(*secret, as_bytes(t.canonical_claims()));
  return t;
}

keyshare::IdentityRef verify_token(const ProviderSecrets& secrets, const IdpToken& token,
                                   const std::string& expected_audience,
                                   std::int64_t now) {
  const Bytes* secret = secrets.find(token.provider);
  if (secret == nullptr) {
    throw Error(Errc::kUnknownProvider, "unknown provider " + token.provider);
  }
  Digest expected = hmac_sha256(*secret, as_bytes(token.canonical_claims()));
  if (!constant_time_equal(expected, token.mac)) {
    throw Error(Errc::kBadMac, "token MAC does not verify");
  }
  if (token.audience != expected_audience) {
    throw Error(Errc::kAudienceMismatch,
                "token is bound to " + token.audience + ", not " + expected_audience);
  }
  if (token.expiry <= now) throw Error(Errc::kTokenExpired, "token expired");
  auto id = token.identity();
  id.validate();
  return id;
}

MockProvider::MockProvider(std::string name, Bytes secret, Clock clock)
    : name_(std::move(name)), secret_(std::move(secret)), clock_(std::move(clock)) {}

void MockProvider::add_user(const std::string& user_id, const std::string& display_name) {
  std::lock_guard lock(mu_);
  users_[user_id] = display_name;
}

bool MockProvider::has_user(const std::string& user_id) const {
  std::lock_guard lock(mu_);
  return users_.count(user_id) != 0;
}

IdpToken MockProvider::issue(const std::string& user_id, const std::string& audience,
                             std::int64_t ttl_seconds) const {
  std::string display_name;
  {
    std::lock_guard lock(mu_);
    auto it = users_.find(user_id);
    if (it == users_.end()) throw Error(Errc::kNotFound, "no such user " + user_id);
    display_name = it->second;
  }
  ProviderSecrets secrets;
  secrets.add(name_, secret_);
  return issue_token(secrets, name_, user_id, display_name, audience, ttl_seconds, clock_());
}

void register_routes(http::Server& server, MockProvider& provider) {
  server.route("POST", "/token", [&provider](const http::Request& req) {
    auto body = req.json();
    try {
      std::string name = body.at("provider").get<std::string>();
      if (name != provider.name()) {
        throw Error(Errc::kUnknownProvider, "this endpoint mints " + provider.name());
      }
      auto token = provider.issue(body.at("user_id").get<std::string>(),
                                  body.at("audience").get<std::string>(),
                                  body.value("ttl", std::int64_t{600}));
      return token.to_json();
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::kInvalidArgument, e.what());
    }
  });
}

}  // namespace anonkey::idp
