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

#include "anonkey/auth.hpp"

#include <algorithm>
#include <fstream>
#include <mutex>

#include "anonkey/error.hpp"

namespace anonkey::auth {

namespace {

void validate_pseudonym(const std::string& p) {
  bool ok = p.size() == 64 && std::all_of(p.begin(), p.end(), [](char c) {
              return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
            });
  if (!ok) throw Error(Errc::kInvalidArgument, "pseudonym must be 64 lowercase hex characters");
}

void append_line(const std::filesystem::path& path, const nlohmann::json& line) {
  if (path.empty()) return;
  std::ofstream out(path, std::ios::app);
  if (!out) throw Error(Errc::kIoError, "cannot append to " + path.string());
  out << line.dump() << "\n";
  out.flush();
  if (!out) throw Error(Errc::kIoError, "short write to " + path.string());
}

template <typename F>
void for_each_line(const std::filesystem::path& path, F&& f) {
  if (path.empty()) return;
  std::ifstream in(path);
  if (!in) return;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      f(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::kMalformedEncoding, path.string() + ": " + e.what());
    }
  }
}

bool is_loopback(const std::string& addr) {
  return addr == "127.0.0.1" || addr == "::1" || addr == "::ffff:127.0.0.1";
}

}  // namespace

nlohmann::json AuthToken::introspection_json() const {
  nlohmann::json ring = nlohmann::json::array();
  for (const auto& id : ring_identities) ring.push_back(id.to_json());
  return {{"pseudonym", pseudonym}, {"ring_identities", ring}, {"issued_at", issued_at}};
}

nlohmann::json AuthToken::to_json() const {
  auto j = introspection_json();
  j["token"] = token;
  return j;
}

AuthToken AuthToken::from_json(const nlohmann::json& j) {
  try {
    AuthToken t;
    t.token = j.value("token", std::string());
    t.pseudonym = j.at("pseudonym").get<std::string>();
    for (const auto& id : j.at("ring_identities")) t.ring_identities.push_back(MemberRef::from_json(id));
    t.issued_at = j.at("issued_at").get<std::int64_t>();
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kMalformedEncoding, std::string("token record: ") + e.what());
  }
}

std::string pseudonym_of(const GroupElement& tag, const GroupParams& params) {
  return to_hex(sha256(tag.encode(params)));
}

GroupElement LocalDirectory::composite_key(const IdentityRef& identity) {
  if (servers_.empty()) throw Error(Errc::kKeyServerUnreachable, "no key servers configured");
  std::vector<GroupElement> parts;
  for (auto* ks : servers_) parts.push_back(ks->get_public_share(identity));
  return keyshare::combine_public(parts, servers_.front()->params());
}

AuthConfig AuthConfig::from_json(const nlohmann::json& j) {
  try {
    AuthConfig c;
    c.service_name = j.value("service_name", c.service_name);
    c.scope = j.value("scope", c.scope);
    c.challenge_ttl_seconds = j.value("challenge_ttl_seconds", c.challenge_ttl_seconds);
    c.max_ring_size = j.value("max_ring_size", c.max_ring_size);
    c.token_log_path = j.value("token_log", std::string());
    c.blocklist_log_path = j.value("blocklist_log", std::string());
    c.host = j.value("host", c.host);
    c.port = j.value("port", c.port);
    c.key_servers = j.value("key_servers", std::vector<std::string>{});
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kMalformedEncoding, std::string("auth config: ") + e.what());
  }
}

AuthProvider::AuthProvider(AuthConfig config, GroupParams params,
                           PublicKeyDirectory& directory, RandomSource& rng,
                           idp::Clock clock)
    : config_(std::move(config)),
      params_(std::move(params)),
      scope_(to_bytes(config_.effective_scope())),
      directory_(directory),
      rng_(rng),
      clock_(std::move(clock)) {
  replay_logs();
}

void AuthProvider::replay_logs() {
  for_each_line(config_.token_log_path, [this](const nlohmann::json& j) {
    const std::string op = j.at("op").get<std::string>();
    if (op == "issue") {
      auto t = AuthToken::from_json(j);
      tokens_[t.token] = t;
    } else if (op == "revoke") {
      tokens_.erase(j.at("token").get<std::string>());
    }
  });
  for_each_line(config_.blocklist_log_path, [this](const nlohmann::json& j) {
    const std::string op = j.at("op").get<std::string>();
    const std::string p = j.at("pseudonym").get<std::string>();
    if (op == "block") {
      blocked_.insert(p);
    } else if (op == "unblock") {
      blocked_.erase(p);
    }
  });
}

void AuthProvider::append_token_log(const nlohmann::json& line) {
  append_line(config_.token_log_path, line);
}

void AuthProvider::append_blocklist_log(const nlohmann::json& line) {
  append_line(config_.blocklist_log_path, line);
}

Challenge AuthProvider::create_challenge() {
  const std::int64_t now = clock_();
  Challenge c{rng_.bytes(16), rng_.bytes(32), now, now + config_.challenge_ttl_seconds, false};
  std::unique_lock lock(mu_);
  std::erase_if(challenges_, [now](const auto& kv) { return kv.second.expires_at <= now; });
  challenges_[c.id] = c;
  return c;
}

void AuthProvider::purge_expired() {
  const std::int64_t now = clock_();
  std::unique_lock lock(mu_);
  std::erase_if(challenges_, [now](const auto& kv) { return kv.second.expires_at <= now; });
}

std::optional<Challenge> AuthProvider::find_challenge(const std::string& challenge_id_hex) {
  purge_expired();
  Bytes id;
  try {
    id = from_hex(challenge_id_hex);
  } catch (const Error&) {
    return std::nullopt;
  }
  std::shared_lock lock(mu_);
  auto it = challenges_.find(id);
  if (it == challenges_.end()) return std::nullopt;
  return it->second;
}

AuthToken AuthProvider::verify_login(const std::string& challenge_id_hex,
                                     std::span<const MemberRef> identities,
                                     ByteView sig_bytes,
                                     const std::optional<std::vector<GroupElement>>& client_ring) {
  Bytes id;
  try {
    id = from_hex(challenge_id_hex);
  } catch (const Error&) {
    throw Error(Errc::kUnknownChallenge, "malformed challenge id");
  }
  const std::int64_t now = clock_();
  Bytes nonce;
  {
    std::shared_lock lock(mu_);
    auto it = challenges_.find(id);
    if (it == challenges_.end()) throw Error(Errc::kUnknownChallenge, "no such challenge");
    if (it->second.expires_at <= now) throw Error(Errc::kChallengeExpired, "challenge expired");
    if (it->second.consumed) throw Error(Errc::kChallengeConsumed, "challenge already used");
    nonce = it->second.nonce;
  }

  if (identities.empty()) throw Error(Errc::kEmptyInput, "anonymity set is empty");
  if (identities.size() > config_.max_ring_size) {
    throw Error(Errc::kInvalidArgument, "anonymity set exceeds " +
                                            std::to_string(config_.max_ring_size));
  }
  std::vector<MemberRef> ring_ids(identities.begin(), identities.end());
  std::sort(ring_ids.begin(), ring_ids.end());
  if (std::adjacent_find(ring_ids.begin(), ring_ids.end()) != ring_ids.end()) {
    throw Error(Errc::kInvalidArgument, "anonymity set lists a member twice");
  }

  std::vector<GroupElement> members;
  for (const auto& member : ring_ids) {
    member.validate();
    std::vector<GroupElement> parts;
    for (const auto& ident : member.identities) parts.push_back(directory_.composite_key(ident));
    members.push_back(keyshare::combine_public(parts, params_));
  }
  auto ring = lrs::Ring::canonical(std::move(members), params_);
  if (client_ring) {
    auto claimed = lrs::Ring::canonical(*client_ring, params_);
    if (claimed != ring) {
      throw Error(Errc::kRingMismatch, "ring keys do not match the key-server directory");
    }
  }

  auto sig = lrs::decode(sig_bytes, params_);
  if (sig.s.size() != ring.size()) {
    throw Error(Errc::kRingMismatch, "signature ring size differs from the anonymity set");
  }
  if (sig.scope != scope_) {
    throw Error(Errc::kSignatureInvalid, "signature is not bound to this service's scope");
  }
  auto result = lrs::verify(nonce, ring, sig, params_);
  if (!result.accepted) throw Error(Errc::kSignatureInvalid, "ring signature does not verify");

  const std::string pseudonym = pseudonym_of(result.tag, params_);
  AuthToken token{to_hex(rng_.bytes(32)), pseudonym, ring_ids, clock_()};

  std::unique_lock lock(mu_);
  auto it = challenges_.find(id);
  if (it == challenges_.end()) throw Error(Errc::kUnknownChallenge, "no such challenge");
  if (it->second.consumed) throw Error(Errc::kChallengeConsumed, "challenge already used");
  it->second.consumed = true;
  if (blocked_.count(pseudonym)) throw Error(Errc::kPseudonymBlocked, "pseudonym is blocked");
  auto line = token.to_json();
  line["op"] = "issue";
  append_token_log(line);
  tokens_[token.token] = token;
  return token;
}

AuthToken AuthProvider::introspect(const std::string& token) const {
  std::shared_lock lock(mu_);
  auto it = tokens_.find(token);
  if (it == tokens_.end()) throw Error(Errc::kUnknownToken, "unknown token");
  return it->second;
}

void AuthProvider::block(const std::string& pseudonym) {
  validate_pseudonym(pseudonym);
  std::unique_lock lock(mu_);
  if (blocked_.insert(pseudonym).second) {
    append_blocklist_log({{"op", "block"}, {"pseudonym", pseudonym}});
  }
  for (auto it = tokens_.begin(); it != tokens_.end();) {
    if (it->second.pseudonym == pseudonym) {
      append_token_log({{"op", "revoke"}, {"token", it->first}});
      it = tokens_.erase(it);
    } else {
      ++it;
    }
  }
}

void AuthProvider::unblock(const std::string& pseudonym) {
  validate_pseudonym(pseudonym);
  std::unique_lock lock(mu_);
  if (blocked_.erase(pseudonym) > 0) {
    append_blocklist_log({{"op", "unblock"}, {"pseudonym", pseudonym}});
  }
}

bool AuthProvider::is_blocked(const std::string& pseudonym) const {
  std::shared_lock lock(mu_);
  return blocked_.count(pseudonym) != 0;
}

std::size_t AuthProvider::token_count() const {
  std::shared_lock lock(mu_);
  return tokens_.size();
}

void register_routes(http::Server& server, AuthProvider& provider) {
  server.route("GET", "/challenge", [&provider](const http::Request&) {
    auto c = provider.create_challenge();
    return nlohmann::json{{"challenge_id", to_hex(c.id)},
                          {"nonce", to_hex(c.nonce)},
                          {"issued_at", c.issued_at},
                          {"expires_at", c.expires_at},
                          {"scope", provider.config().effective_scope()}};
  });

  server.route("POST", "/login", [&provider](const http::Request& req) {
    auto body = req.json();
    try {
      std::vector<MemberRef> ids;
      for (const auto& j : body.at("identities")) ids.push_back(MemberRef::from_json(j));
      std::optional<std::vector<GroupElement>> ring;
      if (body.contains("ring_keys")) {
        ring.emplace();
        for (const auto& k : body["ring_keys"]) {
          ring->push_back(GroupElement::decode(from_hex(k.get<std::string>()), provider.params()));
        }
      }
      Bytes sig = from_hex(body.at("sig_hex").get<std::string>());
      return provider.verify_login(body.at("challenge_id").get<std::string>(), ids, sig, ring)
          .to_json();
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::kInvalidArgument, e.what());
    }
  });

  server.route("GET", "/introspect", [&provider](const http::Request& req) {
    auto token = req.param("token");
    if (!token) throw Error(Errc::kInvalidArgument, "token parameter required");
    return provider.introspect(*token).introspection_json();
  });

  auto admin = [&provider](bool block) {
    return [&provider, block](const http::Request& req) {
      if (!is_loopback(req.remote_addr)) throw Error(Errc::kForbidden, "admin routes are local-only");
      auto body = req.json();
      if (!body.contains("pseudonym") || !body["pseudonym"].is_string()) {
        throw Error(Errc::kInvalidArgument, "pseudonym required");
      }
      auto p = body["pseudonym"].get<std::string>();
      block ? provider.block(p) : provider.unblock(p);
      return nlohmann::json{{"pseudonym", p}, {"blocked", block}};
    };
  };
  server.route("POST", "/admin/block", admin(true));
  server.route("POST", "/admin/unblock", admin(false));
}

}  // namespace anonkey::auth
